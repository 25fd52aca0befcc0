"""Relative density and phi-regularity diagnostics for trajectories."""

import json
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_points, check_positive
from .exceptions import PreconditionError


def scan_grid(center=(0.0, 0.0), half_width=1.0, step=0.25):
    """Square lattice of scan points ``center + step * Z^2`` within ``half_width``."""
    step = check_positive(step, "step")
    n = int(math.floor(half_width / step + 1e-12))
    c = step * np.arange(-n, n + 1)
    X, Y = np.meshgrid(c, c, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()]) + np.asarray(center, dtype=float)


@dataclass(frozen=True)
class DensityReport:
    """Extremes of ``H^1(Gamma cap B_R(z))`` over a finite scan grid."""

    R: float
    m_est: float
    M_est: float
    grid: np.ndarray
    values: np.ndarray
    shape: str = "ball"

    @property
    def argmin(self):
        return self.grid[int(np.argmin(self.values))]

    def to_dict(self):
        return {"R": self.R, "m_est": self.m_est, "M_est": self.M_est, "shape": self.shape,
                "n_points": int(self.grid.shape[0]),
                "grid_min": self.grid.min(0).tolist(), "grid_max": self.grid.max(0).tolist()}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _margin_check(traj, grid, reach):
    eta = traj.eta or 0.0
    worst = float(np.max(np.linalg.norm(grid, axis=1))) + reach + eta
    if worst > traj.r_faithful + 1e-12:
        raise PreconditionError(
            f"scan reaches radius {worst:.6g} but the truncated trajectory is only "
            f"faithful up to {traj.r_faithful:.6g}")


def density_scan(traj, R, grid, shape="ball", check_margin=True):
    """Exact ``H^1(Gamma cap B_R(z))`` for every grid point ``z``.

    Parameters
    ----------
    traj : Trajectory
    R : float
        Ball radius (half side length for ``shape="square"``).
    grid : array_like, shape (k, 2)
        Scan points.
    shape : {"ball", "square"}
    check_margin : bool
        Reject scans that could see the truncation boundary, i.e. when
        ``|z| + R + eta`` exceeds the trajectory's faithful radius.
    """
    R = check_positive(R, "R")
    grid = check_points(grid, "grid")
    if shape not in ("ball", "square"):
        raise PreconditionError(f"unknown scan shape {shape!r}")
    if check_margin:
        _margin_check(traj, grid, R * (math.sqrt(2) if shape == "square" else 1.0))
    vals = np.empty(grid.shape[0])
    for i, z in enumerate(grid):
        if shape == "ball":
            vals[i] = traj.measure_in_ball(z, R)
        else:
            vals[i] = traj.measure_in_box((z[0] - R, z[0] + R, z[1] - R, z[1] + R))
    return DensityReport(R, float(vals.min()), float(vals.max()), grid, vals, shape)


def phi_regularity_check(traj, phi, radii, grid):
    """Worst ratio ``H^1(Gamma cap B_R(z)) / (pi R)`` and the comparison with ``phi``.

    Returns a dict with ``worst_ratio``, the per-radius maxima, and ``regular``
    (whether every ratio stays below ``phi(R)``).
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii <= 0) or np.any(radii >= 1):
        raise PreconditionError("regularity radii must lie in (0, 1)")
    grid = check_points(grid, "grid")
    per_r = []
    for R in radii:
        best = 0.0
        for z in grid:
            best = max(best, traj.measure_in_ball(z, R) / (math.pi * R))
        per_r.append(best)
    per_r = np.array(per_r)
    bound = np.array([float(phi(R)) for R in radii])
    return {"worst_ratio": float(per_r.max()) if per_r.size else 0.0,
            "ratios": per_r.tolist(), "phi": bound.tolist(),
            "regular": bool(np.all(per_r <= bound))}


__all__ = ["DensityReport", "density_scan", "phi_regularity_check", "scan_grid"]
