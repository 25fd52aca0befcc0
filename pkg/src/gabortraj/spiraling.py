"""Numerical diagnostics for spiraling trajectories.

Everything here works from ray intersections: along the ray of angle
``psi`` (in turns) the trajectory is sampled at the radii ``r_1 < r_2 < ...``,
and ``r_k`` plays the role of ``r_beta(k + beta + theta)``.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._geometry import cross
from .exceptions import PreconditionError


def torus_dist(a, b):
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


def singular_directions(traj, tol=1e-9):
    """Arguments (in turns) of the corners of ``traj``.

    A corner is a point shared by two pieces whose tangents differ there.
    Angles are rounded to 1e-9 and returned sorted in ``[0, 1)``.
    """
    ends = {}
    for i, p in enumerate(traj.pieces):
        verts = p.vertices()
        if len(verts) != 2:
            continue
        for end, u in ((verts[0], 0.0), (verts[1], 1.0)):
            key = (round(float(end[0]), 9), round(float(end[1]), 9))
            ends.setdefault(key, []).append((i, u))
    angles = set()
    for key, incident in ends.items():
        if len(incident) < 2 or (key[0] == 0 and key[1] == 0):
            continue
        tangents = [traj.pieces[i].tangent(u) for i, u in incident]
        t0 = tangents[0]
        if any(abs(cross(t0, t)) > tol for t in tangents[1:]):
            ang = (math.atan2(key[1], key[0]) / (2 * math.pi)) % 1.0
            angles.add(round(ang, 9) % 1.0)
    return sorted(angles)


def ray_profile(traj, psi):
    """Radii, counter-clockwise unit tangents and curvatures along a ray."""
    hits = traj.ray_hits(psi)
    r = np.array([h[0] for h in hits])
    tang, curv = [], []
    direction = np.array([math.cos(2 * math.pi * psi), math.sin(2 * math.pi * psi)])
    for rr, i, u in hits:
        piece = traj.pieces[i]
        t = np.asarray(piece.tangent(u), dtype=float)
        if cross(direction, t) < 0:
            t = -t
        tang.append(t)
        curv.append(float(piece.curvature(u)))
    return r, np.array(tang).reshape(-1, 2), np.array(curv)


def fit_equispacing(r, ks):
    """Least-squares ``r_k ~ eta k + rho`` over the indices ``ks`` (1-based)."""
    ks = np.asarray(ks, dtype=float)
    A = np.column_stack([ks, np.ones_like(ks)])
    (eta, rho), *_ = np.linalg.lstsq(A, r[ks.astype(int) - 1], rcond=None)
    return float(eta), float(rho)


def cone_half_width(beta, singular):
    others = [s for s in singular if torus_dist(s, beta) > 1e-9]
    if not others:
        return 0.125
    return min(min(torus_dist(beta, s) for s in others), 0.125)


@dataclass(frozen=True)
class SpiralingReport:
    singular: tuple
    per_beta: tuple = field(default_factory=tuple)

    @property
    def ok(self):
        return all(b["ok"] for b in self.per_beta)

    def to_dict(self):
        return {"singular": list(self.singular), "per_beta": list(self.per_beta),
                "ok": self.ok}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def spiraling_validate(traj, betas=None, k_range=(4, 32), n_theta=9, tail=0.25,
                       residual_tol=1e-2):
    """Check the spiraling conditions (A.i)-(A.v) numerically.

    Parameters
    ----------
    traj : Trajectory
        Must contain at least ``k_range[1]`` turns around the origin.
    betas : sequence of float, optional
        Cone directions in turns.  Defaults to 8 equispaced directions plus
        the detected singular directions.
    k_range : (int, int)
        ``K`` and ``k_max``: monotonicity and fits use ``K <= k <= k_max``.
    n_theta : int
        Number of angles sampled in each cone ``[-alpha, alpha]``.
    tail : float
        Fraction of the largest ``k`` used to report the fit residual.
    residual_tol : float
        Tail residual below which (A.iv) counts as satisfied.

    Raises
    ------
    PreconditionError
        If some ray in a cone meets the trajectory fewer than ``k_max`` times
        (the cone cannot be parametrised, condition (A.i)).
    """
    K, k_max = map(int, k_range)
    if not 1 <= K < k_max:
        raise PreconditionError("k_range must satisfy 1 <= K < k_max")
    singular = singular_directions(traj)
    if betas is None:
        betas = sorted(set([j / 8 for j in range(8)] + list(singular)))
    ks = np.arange(K, k_max + 1)
    tail_ks = ks[ks >= k_max - max(1, int(tail * (k_max - K)))]
    out = []
    for beta in betas:
        beta = float(beta) % 1.0
        is_sing = any(torus_dist(beta, s) <= 1e-9 for s in singular)
        alpha = cone_half_width(beta, singular)
        thetas = np.linspace(-alpha, alpha, n_theta)
        if is_sing:
            thetas = thetas[np.abs(thetas) > 1e-12]
        etas, rhos, resid, dirs, mono, curv_rows, vel_rows = [], [], [], [], 0, [], []
        for th in thetas:
            r, tang, curv = ray_profile(traj, beta + th)
            if r.size < k_max:
                raise PreconditionError(
                    f"(A.i) ray at angle {beta + th:.6g} meets the trajectory only "
                    f"{r.size} times, need {k_max}")
            mono += int(np.sum(np.diff(r[K - 1:k_max]) <= 1e-12))
            eta, rho = fit_equispacing(r, ks)
            resid.append([abs(r[k - 1] - eta * k - rho) for k in ks])
            if rhos:
                # the turn index is only defined up to a shift; keep rho continuous in theta
                rho -= eta * round((rho - rhos[-1]) / eta)
            etas.append(eta)
            rhos.append(rho)
            curv_rows.append(curv[K - 1:k_max])
            d_last = tang[k_max - 1]
            dirs.append(d_last.tolist())
            vel_rows.append([float(np.linalg.norm(tang[k - 1] - d_last)) for k in ks])
        resid = np.array(resid)
        curv_max = np.max(np.array(curv_rows), axis=0)
        vel = np.max(np.array(vel_rows), axis=0)
        tail_res = float(resid[:, np.isin(ks, tail_ks)].max())
        entry = {
            "beta": beta, "alpha": alpha, "singular": is_sing,
            "thetas": thetas.tolist(),
            "monotonicity_violations": mono,
            "curvature_max": curv_max.tolist(),
            "curvature_trend": float(curv_max[-1] - curv_max[0]),
            "eta": etas, "rho": rhos,
            "eta_spread": float(np.ptp(etas)),
            "fit_residual": resid.max(axis=0).tolist(),
            "tail_residual": tail_res,
            "direction": dirs,
            "velocity_deviation": vel.tolist(),
        }
        if is_sing:
            eps = 1e-6 * alpha
            for side, th in (("d_minus", -eps), ("d_plus", eps)):
                _, tang, _ = ray_profile(traj, beta + th)
                entry[side] = tang[k_max - 1].tolist()
        entry["ok"] = bool(mono == 0 and curv_max[-1] <= curv_max[0] + 1e-12
                           and tail_res <= residual_tol)
        out.append(entry)
    return SpiralingReport(tuple(singular), tuple(out))


__all__ = ["singular_directions", "ray_profile", "fit_equispacing", "spiraling_validate",
           "SpiralingReport", "torus_dist", "cone_half_width"]
