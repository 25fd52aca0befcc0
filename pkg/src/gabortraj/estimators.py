"""scikit-learn style wrappers around the functional core.

The estimators follow the usual conventions: constructor arguments are
stored verbatim, learned state ends in an underscore, and ``get_params`` /
``set_params`` come from :class:`sklearn.base.BaseEstimator`.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import IllPosedError, PreconditionError
from .hermite import HermiteExpansion, as_expansion
from .reconstruction import _krylov_solve, stft_circle_reconstruct
from .stft import _basis_stft, stft_values
from .trajectory import make_archimedes, make_circles, make_point_path, make_polygon_family

_BUILDERS = {
    "circles": lambda p: make_circles(p["eta"], p["k_max"]),
    "polygons": lambda p: make_polygon_family(p["vertices"], p["eta"], p["k_max"]),
    "point-path": lambda p: make_point_path(p["points"], p["eta"], p["k_max"]),
    "archimedes": lambda p: make_archimedes(p["eta"], p["k_max"]),
}


def _coeff_rows(X):
    # check_array rejects complex input, so validate by hand
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] == 0:
        raise PreconditionError("expected a 2-D array of complex coefficients")
    if not np.all(np.isfinite(X)):
        raise PreconditionError("input contains non-finite values")
    return X


class TrajectorySampler(TransformerMixin, BaseEstimator):
    """Map Hermite coefficient vectors to weighted STFT samples on a trajectory.

    Parameters
    ----------
    family : {"circles", "polygons", "point-path", "archimedes"}
    eta : float
    k_max : int
        Number of circles / polygons / rounds, or turns for the spiral.
    h : float
        Quadrature spacing.
    window : str or array_like
    vertices, points : array_like, optional
        Shape data for the polygon and point-path families.
    """

    def __init__(self, family="circles", eta=0.5, k_max=16, h=0.02, window="h0",
                 vertices=None, points=None):
        self.family = family
        self.eta = eta
        self.k_max = k_max
        self.h = h
        self.window = window
        self.vertices = vertices
        self.points = points

    def fit(self, X=None, y=None):
        if self.family not in _BUILDERS:
            raise PreconditionError(f"unsupported family {self.family!r}")
        self.trajectory_ = _BUILDERS[self.family](self.get_params())
        self.quadrature_ = self.trajectory_.quadrature(self.h)
        self.window_ = as_expansion(self.window)
        return self

    def transform(self, X):
        """``(n_signals, n_coeffs)`` -> ``(n_signals, n_nodes)`` STFT values."""
        check_is_fitted(self, "quadrature_")
        rows = _coeff_rows(X)
        W = _basis_stft(self.window_, rows.shape[1] - 1, self.quadrature_.nodes)
        return rows @ W

    @property
    def nodes_(self):
        return self.quadrature_.nodes

    @property
    def weights_(self):
        return self.quadrature_.weights


class FrameReconstructor(BaseEstimator):
    """Finite-section frame inversion fitted to a set of weighted nodes.

    ``fit(nodes, sample_weight=weights)`` assembles the Gram matrix;
    ``predict(values)`` returns Hermite coefficients of length ``N + 1``.
    """

    def __init__(self, window="h0", N=8, tol=1e-10, floor=1e-8, method="cr"):
        self.window = window
        self.N = N
        self.tol = tol
        self.floor = floor
        self.method = method

    def fit(self, X, y=None, sample_weight=None):
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise PreconditionError("nodes must have two columns (x, xi)")
        w = np.ones(X.shape[0]) if sample_weight is None else np.asarray(sample_weight, float)
        g = as_expansion(self.window)
        W = _basis_stft(g, int(self.N), X)
        self.analysis_ = np.conj(W) * w
        S = self.analysis_ @ W.T
        self.gram_ = 0.5 * (S + S.conj().T)
        ev = np.linalg.eigvalsh(self.gram_)
        self.A_N_, self.B_N_ = float(ev[0]), float(ev[-1])
        if self.A_N_ < self.floor:
            raise IllPosedError(f"lower frame bound A_N={self.A_N_:.3e} below floor",
                                lower_bound=self.A_N_)
        return self

    def predict(self, values):
        check_is_fitted(self, "gram_")
        V = _coeff_rows(values)
        out = np.empty((V.shape[0], self.gram_.shape[0]), dtype=complex)
        self.n_iter_ = []
        for i, v in enumerate(V):
            c, it, _ = _krylov_solve(self.gram_, self.analysis_ @ v, self.tol,
                                     10 * (int(self.N) + 1), self.method)
            out[i] = c
            self.n_iter_.append(it)
        return out

    def score(self, values, coeffs):
        """Negative mean relative coefficient error."""
        pred = self.predict(values)
        truth = _coeff_rows(coeffs)
        n = max(pred.shape[1], truth.shape[1])
        P = np.zeros((pred.shape[0], n), complex)
        T = np.zeros((truth.shape[0], n), complex)
        P[:, :pred.shape[1]] = pred
        T[:, :truth.shape[1]] = truth
        return -float(np.mean(np.linalg.norm(P - T, axis=1) / np.linalg.norm(T, axis=1)))


class CauchyCircleReconstructor(BaseEstimator):
    """Reconstruct ``V_g f`` inside the smallest circle from circle samples.

    ``fit(coeffs)`` stores the signal; ``predict(points)`` evaluates the
    reconstruction at phase-space points ``(k, 2)``.
    """

    def __init__(self, window="h0+h1", radii=(4.0, 5.0), M=512):
        self.window = window
        self.radii = radii
        self.M = M

    def fit(self, X, y=None):
        self.signal_ = HermiteExpansion(_coeff_rows(X)[0])
        self.window_ = as_expansion(self.window)
        if len(self.radii) != self.window_.order + 1:
            raise PreconditionError(f"window of degree {self.window_.order} needs "
                                    f"{self.window_.order + 1} radii")
        return self

    def predict(self, X):
        check_is_fitted(self, "signal_")
        pts = check_array(X, dtype=float)
        return np.array([stft_circle_reconstruct(self.signal_, self.window_, self.radii, z,
                                                 M=self.M) for z in pts])

    def reference(self, X):
        """Direct STFT values at the same points, for comparison."""
        check_is_fitted(self, "signal_")
        return stft_values(self.signal_, self.window_, check_array(X, dtype=float))


__all__ = ["TrajectorySampler", "FrameReconstructor", "CauchyCircleReconstructor"]
