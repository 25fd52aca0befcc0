"""Weak limits of translates of spiraling trajectories.

A translate sequence ``z_k + Gamma`` is compared with a predicted limit
(a shift of ``Gamma``, a family of parallel lines, or parallel edges) by
integrating a fixed family of smooth bumps over both sets.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._geometry import cross, ell
from ._validation import check_box, check_positive
from .exceptions import PreconditionError
from .spiraling import ray_profile, singular_directions, torus_dist
from .trajectory import lattice_offsets, make_edges, make_parallel_lines

# --------------------------------------------------------------------------- test functions


@dataclass(frozen=True)
class BumpFamily:
    """Radial bumps ``exp(-1 / (1 - |z - c|^2 / r^2))`` supported in ``B_r(c)``."""

    centers: tuple
    radius: float = 1.0

    @classmethod
    def lattice(cls, half_width=2, step=1.0, radius=1.0):
        c = step * np.arange(-half_width, half_width + 1)
        return cls(tuple((float(x), float(y)) for x in c for y in c), float(radius))

    def check_inside(self, box):
        x0, x1, y0, y1 = check_box(box)
        for cx, cy in self.centers:
            if (cx - self.radius < x0 - 1e-12 or cx + self.radius > x1 + 1e-12
                    or cy - self.radius < y0 - 1e-12 or cy + self.radius > y1 + 1e-12):
                raise PreconditionError(f"bump at ({cx}, {cy}) leaks outside the box")

    def evaluate(self, pts):
        """Matrix ``B[j, i] = phi_j(pts_i)``."""
        c = np.asarray(self.centers)
        d2 = np.sum((pts[None, :, :] - c[:, None, :]) ** 2, axis=-1) / self.radius ** 2
        out = np.zeros_like(d2)
        inside = d2 < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - d2[inside]))
        return out

    def to_dict(self):
        return {"kind": "radial-bump", "radius": self.radius,
                "centers": [list(c) for c in self.centers]}


DEFAULT_BOX = (-3.0, 3.0, -3.0, 3.0)


def bump_integrals(traj, bumps, h):
    q = traj.quadrature(h)
    if len(q) == 0:
        return np.zeros(len(bumps.centers))
    return bumps.evaluate(q.nodes) @ q.weights


def weak_discrepancy(traj_a, traj_b, bumps=None, box=DEFAULT_BOX, h=0.005):
    """``max_phi |int_a phi dH^1 - int_b phi dH^1|`` over the bump family.

    Both trajectories are clipped to ``box`` before quadrature; the bumps
    must be supported inside it.
    """
    bumps = bumps or BumpFamily.lattice()
    bumps.check_inside(box)
    check_positive(h, "h")
    ia = bump_integrals(traj_a.clipped(box), bumps, h)
    ib = bump_integrals(traj_b.clipped(box), bumps, h)
    return float(np.max(np.abs(ia - ib)))


# --------------------------------------------------------------------------- sequences


@dataclass(frozen=True)
class TranslateSequence:
    """Translation vectors ``z_k``.

    ``kind`` is one of

    * ``"constant"``: ``z_k = shift``;
    * ``"escape"``: ``z_k = shift - (speed k + offset) ell(theta + drift k^-power)``;
    * ``"explicit"``: ``z_k = points[k]`` for the listed ``k``.
    """

    kind: str
    shift: tuple = (0.0, 0.0)
    speed: float = 0.0
    offset: float = 0.0
    theta: float = 0.0
    drift: float = 0.0
    power: float = 0.5
    points: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("constant", "escape", "explicit"):
            raise PreconditionError(f"unknown sequence rule {self.kind!r}")
        if self.kind == "escape" and not self.speed > 0:
            raise PreconditionError("escape rule needs speed > 0")

    @classmethod
    def constant(cls, z):
        return cls("constant", shift=tuple(map(float, z)))

    @classmethod
    def escape(cls, theta, speed, offset=0.0, shift=(0.0, 0.0), drift=0.0, power=0.5):
        return cls("escape", shift=tuple(map(float, shift)), speed=float(speed),
                   offset=float(offset), theta=float(theta), drift=float(drift),
                   power=float(power))

    @classmethod
    def explicit(cls, points):
        return cls("explicit", points={int(k): tuple(map(float, v)) for k, v in points.items()})

    def angle(self, k):
        return self.theta + (self.drift * k ** (-self.power) if self.drift else 0.0)

    def z(self, k):
        if self.kind == "constant":
            return np.array(self.shift)
        if self.kind == "escape":
            return np.array(self.shift) - (self.speed * k + self.offset) * ell(self.angle(k))
        if k not in self.points:
            raise PreconditionError(f"explicit sequence has no entry for k={k}")
        return np.array(self.points[k])

    def polar(self, k):
        """``(r_k, theta_k)`` with ``z_k = -r_k ell(theta_k)``."""
        z = self.z(k)
        return float(np.hypot(*z)), (math.atan2(-z[1], -z[0]) / (2 * math.pi)) % 1.0

    def probe_ks(self):
        if self.kind == "explicit":
            return sorted(self.points)
        return [2 ** j for j in range(4, 21)]

    def is_bounded(self):
        if self.kind == "constant":
            return True
        if self.kind == "escape":
            return False
        ks = self.probe_ks()
        if len(ks) < 3:
            raise PreconditionError("explicit sequence too short to classify")
        norms = np.array([np.hypot(*self.z(k)) for k in ks])
        half = len(ks) // 2
        return bool(norms[half:].max() <= 2.0 * norms[:half].max() + 1.0)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "explicit":
            d["points"] = {str(k): list(v) for k, v in sorted(self.points.items())}
        else:
            d.update(shift=list(self.shift), speed=self.speed, offset=self.offset,
                     theta=self.theta, drift=self.drift, power=self.power)
        return d


# --------------------------------------------------------------------------- predictions


@dataclass(frozen=True)
class PredictedLimit:
    """One of ``shift(z)``, ``lines(d, lambda, tau)``, ``edges(gamma, z)``."""

    kind: str
    params: dict

    def build(self, base, box=DEFAULT_BOX):
        """The predicted limit set, clipped to ``box``."""
        p = self.params
        if self.kind == "shift":
            return translate_clip(base, p["z"], box)
        if self.kind == "lines":
            lam, tau = p["lambda"], p["tau"]
            x0, x1, y0, y1 = check_box(box)
            reach = math.hypot(max(abs(x0), abs(x1)), max(abs(y0), abs(y1)))
            offs = [tau + o for o in lattice_offsets(lam, -reach - lam, reach + lam)]
            return make_parallel_lines(p["theta_d"], offs, box)
        return make_edges(p["gamma"], p["eta"], p["d_minus"], p["d_plus"], box,
                          shift=p["z"])

    def to_dict(self):
        return {"kind": self.kind, "params": self.params}


def translate_clip(traj, z, box):
    """``(z + traj) cap box``, clipping before translating."""
    x0, x1, y0, y1 = check_box(box)
    z = np.asarray(z, dtype=float)
    return traj.clipped((x0 - z[0], x1 - z[0], y0 - z[1], y1 - z[1])).translated(z)


def _model(traj, psi, k_fit=8):
    """Asymptotic ``eta, rho`` and velocity along the ray of angle ``psi``."""
    r, tang, _ = ray_profile(traj, psi)
    if r.size < k_fit + 2:
        raise PreconditionError(f"ray at angle {psi:.6g} meets the trajectory only "
                                f"{r.size} times")
    ks = np.arange(r.size - k_fit + 1, r.size + 1)
    A = np.column_stack([ks, np.ones(k_fit)])
    (eta, rho), *_ = np.linalg.lstsq(A, r[-k_fit:], rcond=None)
    return float(eta), float(rho), tang[-1]


def _bounded_along(seq, gamma):
    ks = seq.probe_ks()
    s = np.array([seq.polar(k)[0] * math.sin(2 * math.pi * (seq.polar(k)[1] - gamma))
                  for k in ks])
    half = len(ks) // 2
    return bool(np.abs(s[half:]).max() <= 2.0 * np.abs(s[:half]).max() + 1e-6)


def predict_limit(traj, seq, k_ref=None, eps=1e-7):
    """Classify the weak limit of ``z_k + traj``.

    * bounded sequence: ``shift(z*)``;
    * escaping with ``r_k sin(2 pi (theta_k - gamma))`` bounded for a corner
      direction ``gamma``: ``edges(gamma, z)``;
    * otherwise ``lines(d, lambda, tau)`` with ``lambda = eta |ell x d|`` and
      offsets measured along ``d_perp = R(-1/4) d``.

    ``k_ref`` (default: the largest probed ``k``) fixes the representative
    used for the offsets ``z`` and ``tau``, which are only defined along a
    subsequence.
    """
    ks = seq.probe_ks()
    k_ref = ks[-1] if k_ref is None else int(k_ref)
    if seq.is_bounded():
        return PredictedLimit("shift", {"z": seq.z(k_ref).tolist()})
    r_k, th_k = seq.polar(k_ref)
    corners = singular_directions(traj)
    for gamma in corners:
        if not _bounded_along(seq, gamma):
            continue
        eta, rho, _ = _model(traj, gamma)
        _, _, d_minus = _model(traj, gamma - eps)
        _, _, d_plus = _model(traj, gamma + eps)
        delta = 2 * math.pi * (th_k - gamma)
        a, s = r_k * math.cos(delta), r_k * math.sin(delta)
        v = (a - rho) % eta
        if min(v, eta - v) < 1e-7 * eta:
            v = 0.0
        z = -v * ell(gamma) - s * ell(gamma + 0.25)
        return PredictedLimit("edges", {"gamma": gamma, "eta": eta, "z": z.tolist(),
                                        "d_minus": d_minus.tolist(),
                                        "d_plus": d_plus.tolist()})
    theta_star = seq.theta % 1.0 if seq.kind == "escape" else th_k
    side = 0.0
    if any(torus_dist(theta_star, c) <= 1e-9 for c in corners):
        side = math.copysign(eps, math.sin(2 * math.pi * (th_k - theta_star)) or 1.0)
    eta, rho, d = _model(traj, theta_star + side)
    ell_star = ell(theta_star)
    d_perp = np.array([d[1], -d[0]])
    c = float(ell_star @ d_perp)
    lam = float(eta * abs(cross(ell_star, d)))
    tau = float(((rho - r_k) * c) % lam)
    if min(tau, lam - tau) < 1e-7 * lam:
        tau = 0.0
    theta_d = (math.atan2(d[1], d[0]) / (2 * math.pi) - 0.25) % 1.0
    return PredictedLimit("lines", {"d": d.tolist(), "lambda": lam, "tau": tau,
                                    "theta_d": theta_d, "theta_star": theta_star,
                                    "eta": eta, "rho": rho})


# --------------------------------------------------------------------------- verification


@dataclass(frozen=True)
class WeakLimitReport:
    predicted: PredictedLimit
    ks: tuple
    discrepancies: tuple
    bumps: BumpFamily
    h: float
    threshold: float

    @property
    def non_increasing(self):
        D = self.discrepancies
        return all(b <= a + 1e-12 for a, b in zip(D[:-1], D[1:]))

    @property
    def final(self):
        return self.discrepancies[-1]

    @property
    def verdict(self):
        return bool(self.non_increasing and self.final <= self.threshold)

    def to_dict(self):
        return {"predicted": self.predicted.to_dict(), "k": list(self.ks),
                "D": list(self.discrepancies), "bumps": self.bumps.to_dict(), "h": self.h,
                "threshold": self.threshold, "non_increasing": self.non_increasing,
                "final": self.final, "verdict": self.verdict}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def curve_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["k", "D_k"])
        for k, D in zip(self.ks, self.discrepancies):
            wr.writerow([k, repr(float(D))])
        return buf.getvalue()


def verify_limit(traj, seq, ks=(4, 8, 16, 32, 64), bumps=None, box=DEFAULT_BOX, h=0.005,
                 threshold=1e-2, predicted=None):
    """Discrepancies ``D_k`` between ``z_k + traj`` and the predicted limit.

    Raises
    ------
    PreconditionError
        If some ``box - z_k`` is not covered by the faithful part of ``traj``.
    """
    ks = [int(k) for k in ks]
    if any(b <= a for a, b in zip(ks[:-1], ks[1:])):
        raise PreconditionError("k list must be strictly increasing")
    bumps = bumps or BumpFamily.lattice()
    bumps.check_inside(box)
    x0, x1, y0, y1 = check_box(box)
    reach = math.hypot(max(abs(x0), abs(x1)), max(abs(y0), abs(y1)))
    for k in ks:
        need = float(np.hypot(*seq.z(k))) + reach
        if need > traj.r_faithful + 1e-12:
            raise PreconditionError(
                f"k={k}: translated box reaches radius {need:.6g} beyond the faithful "
                f"radius {traj.r_faithful:.6g}; enlarge the truncation")
    predicted = predicted or predict_limit(traj, seq, k_ref=ks[-1])
    limit_set = predicted.build(traj, box)
    ref = bump_integrals(limit_set.clipped(box), bumps, h)
    D = []
    for k in ks:
        moved = translate_clip(traj, seq.z(k), box)
        D.append(float(np.max(np.abs(bump_integrals(moved, bumps, h) - ref))))
    return WeakLimitReport(predicted, tuple(ks), tuple(D), bumps, float(h), float(threshold))


__all__ = ["BumpFamily", "weak_discrepancy", "TranslateSequence", "PredictedLimit",
           "predict_limit", "verify_limit", "WeakLimitReport", "translate_clip",
           "bump_integrals", "DEFAULT_BOX"]
