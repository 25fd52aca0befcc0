"""Sampling criteria and empirical frame bounds on finite Hermite sections."""

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._geometry import Box
from ._validation import check_positive
from .exceptions import NumericalError, PreconditionError
from .hermite import as_expansion, eval_expansion, metaplectic_rotate, sobolev_norms
from .stft import _basis_stft


# --------------------------------------------------------------------------- parallel lines


@dataclass(frozen=True)
class PeriodicOffsets:
    """The lattice ``shift + eta Z`` of line offsets."""

    eta: float
    shift: float = 0.0

    def __post_init__(self):
        check_positive(self.eta, "eta")


def _as_offsets(offsets):
    if isinstance(offsets, PeriodicOffsets):
        return offsets
    arr = np.atleast_1d(np.asarray(offsets, dtype=float))
    if arr.size == 0:
        raise PreconditionError("offset set must be non-empty")
    return arr


def _periodized_energy(window, t, lat, tail=1e-16):
    """``sum_j |window(t - shift - eta j)|^2`` summed outward until terms drop below ``tail``."""
    base = np.abs(eval_expansion(window, t - lat.shift)) ** 2
    total = base.copy()
    j = 1
    while True:
        left = np.abs(eval_expansion(window, t - lat.shift + lat.eta * j)) ** 2
        right = np.abs(eval_expansion(window, t - lat.shift - lat.eta * j)) ** 2
        total += left + right
        if j * lat.eta > 1.0 and max(left.max(), right.max()) < tail:
            break
        j += 1
        if j > 10 ** 6:
            raise NumericalError("periodic tail sum did not converge")
    return total


def line_energy(g, theta, offsets, t):
    """``sum_lambda |mu(theta) g(t - lambda)|^2`` on the points ``t``."""
    window = metaplectic_rotate(as_expansion(g), theta)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    off = _as_offsets(offsets)
    if isinstance(off, PeriodicOffsets):
        return _periodized_energy(window, t, off)
    total = np.zeros_like(t)
    for lam in off:
        total += np.abs(eval_expansion(window, t - lam)) ** 2
    return total


def line_frame_bounds(g, theta, offsets, t_grid=None):
    """Lower and upper bounds ``(A, B)`` of the line energy over a ``t`` grid.

    For a periodic offset set the grid defaults to one period (the energy is
    periodic); otherwise to ``[-6, 6]`` with spacing ``1e-3``.
    """
    off = _as_offsets(offsets)
    if t_grid is None:
        if isinstance(off, PeriodicOffsets):
            t_grid = off.shift + np.linspace(0.0, off.eta, 257)
        else:
            t_grid = np.linspace(-6.0, 6.0, 12001)
    e = line_energy(g, theta, off, t_grid)
    return float(e.min()), float(e.max())


# --------------------------------------------------------------------------- Delta criterion


@dataclass(frozen=True)
class DeltaCriterion:
    """Outcome of the sufficient sampling test on a square grid of scale ``R``."""

    R: float
    delta: float
    norms: dict
    satisfied: bool
    bounds: tuple = None

    def to_dict(self):
        return {"R": self.R, "delta": self.delta, "norms": self.norms,
                "satisfied": self.satisfied,
                "bounds": list(self.bounds) if self.bounds is not None else None}


def delta_value(norms, R):
    c = 2.0 * R / math.pi
    return c * (norms["dg"] + norms["tg"] + c * norms["tdg"])


def delta_criterion(g, R, m=None, M=None):
    """``Delta = (2R/pi)(|g'| + |tg| + (2R/pi)|tg'|)`` with exact coefficient norms.

    If ``m`` and ``M`` are given and ``Delta < |g|``, the explicit sampling
    bounds ``(m (|g| - Delta)^2, M (|g| + Delta)^2)`` are attached.
    """
    R = check_positive(R, "R", strict=False)
    norms = sobolev_norms(g)
    delta = delta_value(norms, R)
    ok = delta < norms["g"]
    bounds = None
    if ok and m is not None and M is not None:
        bounds = (float(m) * (norms["g"] - delta) ** 2, float(M) * (norms["g"] + delta) ** 2)
    return DeltaCriterion(R, delta, norms, bool(ok), bounds)


def critical_radius(g):
    """Largest ``R`` with ``Delta(R) <= |g|``; positive root of a quadratic in ``R``."""
    n = sobolev_norms(g)
    a = (2 / math.pi) ** 2 * n["tdg"]
    b = (2 / math.pi) * (n["dg"] + n["tg"])
    c = -n["g"]
    if a == 0:
        return -c / b if b > 0 else math.inf
    return (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)


# --------------------------------------------------------------------------- Gram matrices


def gram_matrix(g, nodes, weights, N):
    """``S[n, m] = sum_i w_i V_g h_m(z_i) conj(V_g h_n(z_i))``, ``n, m <= N``."""
    W = _basis_stft(g, N, nodes)
    return (np.conj(W) * np.asarray(weights)) @ W.T


@dataclass(frozen=True, eq=False)
class FrameReport:
    """Extreme eigenvalues of the sampling Gram matrix on ``span{h_0..h_N}``."""

    N: int
    h: float
    A_N: float
    B_N: float
    gram: np.ndarray = field(repr=False)
    trajectory: str = "custom"
    window_digest: str = ""

    def to_dict(self):
        return {"N": self.N, "h": self.h, "A_N": self.A_N, "B_N": self.B_N,
                "trajectory": self.trajectory, "window_digest": self.window_digest}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def gram_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "m", "re", "im"])
        for n in range(self.gram.shape[0]):
            for m in range(self.gram.shape[1]):
                v = self.gram[n, m]
                wr.writerow([n, m, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()


def gram_frame_bounds(g, quad, N, max_h=0.05):
    """Finite-section frame bounds ``A_N <= B_N`` from a quadrature set.

    ``quad`` is a :class:`QuadratureSet` (trajectory or planar grid).  The
    Gram matrix is Hermitian by construction and its spectrum comes from
    LAPACK's Hermitian tridiagonal solver.
    """
    N = int(N)
    if not 0 <= N <= 32:
        raise PreconditionError("Hermite section order must satisfy 0 <= N <= 32")
    g = as_expansion(g)
    if quad.h is not None and math.isfinite(quad.h) and quad.h > max_h:
        warnings.warn(f"quadrature spacing {quad.h} is coarser than {max_h}", stacklevel=2)
    S = gram_matrix(g, quad.nodes, quad.weights, N)
    S = 0.5 * (S + S.conj().T)
    try:
        ev = np.linalg.eigvalsh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver failed: {exc}") from exc
    parent = getattr(quad, "parent", None)
    tag = getattr(parent, "family", "planar" if parent is None else "custom")
    return FrameReport(N, float(quad.h), float(ev[0]), float(ev[-1]), S, tag, g.digest())


# --------------------------------------------------------------------------- Ortega-Cerda counting


def ortega_cerda_count(traj, R, N, delta, z=(0.0, 0.0)):
    """Number of the ``N^2`` half-open subsquares of ``z + [-R/2, R/2)^2``
    carrying trajectory length at least ``delta``."""
    R = check_positive(R, "R")
    delta = check_positive(delta, "delta")
    N = int(N)
    if N < 1:
        raise PreconditionError("N must be >= 1")
    side = R / N
    x0, y0 = float(z[0]) - R / 2, float(z[1]) - R / 2
    count = 0
    for i in range(N):
        for j in range(N):
            box = Box(x0 + i * side, x0 + (i + 1) * side, y0 + j * side,
                      y0 + (j + 1) * side, half_open=True)
            mu = traj.measure_in_box((box.x0, box.x1, box.y0, box.y1), half_open=True)
            if mu >= delta:
                count += 1
    return count


def condition_ii_check(traj, R, N, delta, grid):
    """``min_z n(R, N, delta, z) / R^2`` over a scan grid and whether it exceeds 1.

    A finite grid cannot certify the infimum over the whole plane; the result
    only speaks for the scanned points.
    """
    counts = np.array([ortega_cerda_count(traj, R, N, delta, z) for z in np.asarray(grid)])
    ratio = float(counts.min() / R ** 2) if counts.size else 0.0
    return {"min_ratio": ratio, "satisfied": ratio > 1.0, "counts": counts.tolist()}


__all__ = [
    "PeriodicOffsets", "line_energy", "line_frame_bounds", "DeltaCriterion",
    "delta_criterion", "delta_value", "critical_radius", "gram_matrix", "FrameReport",
    "gram_frame_bounds", "ortega_cerda_count", "condition_ii_check",
]
