"""Pointwise STFT of Hermite expansions.

The transform is ``V_g f(x, xi) = int f(t) conj(g(t - x)) exp(-2 pi i xi t) dt``.
For basis functions, with ``z = x + i xi`` and ``n >= m``,

    V_{h_m} h_n(z) = sqrt(m!/n!) (sqrt(pi) conj(z))^{n-m} L_m^{(n-m)}(pi |z|^2)
                     * exp(-pi i x xi) * exp(-pi |z|^2 / 2),

and for ``m > n``

    V_{h_m} h_n(z) = sqrt(n!/m!) (-sqrt(pi) z)^{m-n} L_n^{(m-n)}(pi |z|^2)
                     * exp(-pi i x xi) * exp(-pi |z|^2 / 2).

Both follow from the ladder identities
``V_g(A^+ f) = V_{Ag} f + sqrt(pi) conj(z) V_g f`` and
``V_g(A f) = V_{A^+ g} f + sqrt(pi) z V_g f``
started from ``V_{h_0} h_0(z) = exp(-pi i x xi - pi |z|^2 / 2)``.
"""

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from ._validation import check_index, check_points, check_positive
from .exceptions import PreconditionError
from .hermite import HermiteExpansion, as_expansion, hermite_functions, metaplectic_rotate

_SQRT_PI = math.sqrt(math.pi)


def _laguerre_table(n_max, s):
    """``L[a, m] = L_m^{(a)}(s)`` for ``a + m <= n_max``; shape ``(n+1, n+1, k)``."""
    out = np.zeros((n_max + 1, n_max + 1) + s.shape)
    for a in range(n_max + 1):
        prev = np.zeros_like(s)
        cur = np.ones_like(s)
        out[a, 0] = cur
        for m in range(n_max - a):
            nxt = ((2 * m + 1 + a - s) * cur - (m + a) * prev) / (m + 1)
            prev, cur = cur, nxt
            out[a, m + 1] = cur
    return out


def kernel_table(n_window, n_signal, z, gaussian=True):
    """Basis STFT values ``K[m, n, i] = V_{h_m} h_n(z_i)``.

    Parameters
    ----------
    n_window, n_signal : int
        Highest window / signal index.
    z : array_like
        Phase-space points, shape ``(k, 2)`` (or complex).
    gaussian : bool
        If False the common factor ``exp(-pi |z|^2 / 2)`` is omitted, which is
        what the polyanalytic lift needs at large ``|z|``.

    Returns
    -------
    numpy.ndarray
        Complex array of shape ``(n_window + 1, n_signal + 1, k)``.
    """
    n_window = check_index(n_window, "n_window")
    n_signal = check_index(n_signal, "n_signal")
    pts = check_points(z)
    x, xi = pts[:, 0], pts[:, 1]
    r2 = x * x + xi * xi
    s = math.pi * r2
    lag = _laguerre_table(max(n_window, n_signal), s)
    with np.errstate(divide="ignore"):
        log_r = 0.5 * np.log(s)  # log(sqrt(pi) |z|)
    phase_common = np.exp(-1j * math.pi * x * xi)
    gauss = -0.5 * s if gaussian else np.zeros_like(s)
    zeta = x + 1j * xi
    unit = np.where(r2 > 0, zeta / np.where(r2 > 0, np.abs(zeta), 1.0), 1.0)

    out = np.empty((n_window + 1, n_signal + 1, pts.shape[0]), dtype=complex)
    for m in range(n_window + 1):
        for n in range(n_signal + 1):
            d = abs(n - m)
            lo = min(n, m)
            if d == 0:
                mag = np.exp(gauss)
            else:
                with np.errstate(invalid="ignore"):
                    logmag = (0.5 * (gammaln(lo + 1) - gammaln(lo + d + 1))
                              + d * log_r + gauss)
                mag = np.where(r2 > 0, np.exp(np.where(r2 > 0, logmag, 0.0)), 0.0)
            if n >= m:
                ang = np.conj(unit) ** d
            else:
                ang = (-unit) ** d
            out[m, n] = mag * ang * lag[d, lo] * phase_common
    return out


def _basis_stft(g, n_signal, z, gaussian=True):
    """``W[n, i] = V_g h_n(z_i)`` for ``n <= n_signal``."""
    g = as_expansion(g)
    K = kernel_table(len(g) - 1, n_signal, z, gaussian=gaussian)
    return np.tensordot(np.conj(g.coeffs), K, axes=(0, 0))


def stft_values(f, g, z, gaussian=True):
    """Vectorised ``V_g f`` at points ``z``; returns an array of length ``k``."""
    f = as_expansion(f)
    W = _basis_stft(g, len(f) - 1, z, gaussian=gaussian)
    return f.coeffs @ W


def stft_point(f, g, z):
    """``V_g f(z) = sum_{n,m} alpha_n conj(beta_m) V_{h_m} h_n(z)``.

    ``z`` may be a single pair / complex number (returns a complex scalar) or
    an array of points (returns an array).
    """
    single = np.ndim(z) == 0 or (np.ndim(z) == 1 and np.size(z) == 2
                                 and not np.iscomplexobj(z))
    vals = stft_values(f, g, z)
    return complex(vals[0]) if single else vals


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _composite_gauss_legendre(a=-12.0, b=12.0, panels=80):
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return t, w


def stft_quadrature(f, g, z):
    """Independent oracle: ``V_g f`` by composite Gauss-Legendre on [-12, 12].

    Uses 80 panels of 16 nodes and pointwise Hermite evaluation only; it shares
    no code with :func:`kernel_table`.  Fewer panels under-resolve the
    ``exp(-2 pi i xi t)`` oscillation once ``|xi|`` approaches 6.
    """
    f, g = as_expansion(f), as_expansion(g)
    pts = check_points(z)
    t, w = _composite_gauss_legendre()
    ft = np.tensordot(f.coeffs, hermite_functions(len(f) - 1, t), axes=(0, 0))
    out = np.empty(pts.shape[0], dtype=complex)
    for i, (x, xi) in enumerate(pts):
        gt = np.tensordot(g.coeffs, hermite_functions(len(g) - 1, t - x), axes=(0, 0))
        out[i] = np.sum(w * ft * np.conj(gt) * np.exp(-2j * math.pi * xi * t))
    return out


def orthogonality_residual(f1, f2, g1, g2, half_width=8.0, spacing=0.1):
    """Plane-quadrature check of the STFT orthogonality relation.

    Returns ``|int V_{g1}f1 conj(V_{g2}f2) dz - <f1,f2> conj(<g1,g2>)|`` with
    the integral taken by the 2-D trapezoid rule on ``[-T, T]^2``.
    """
    if spacing > 0.25:
        raise PreconditionError(f"grid spacing {spacing} > 0.25 is too coarse")
    if spacing > 0.1 or half_width < 8.0:
        warnings.warn("orthogonality grid outside the contracted range "
                      "(T >= 8, spacing <= 0.1)", stacklevel=2)
    f1, f2, g1, g2 = (as_expansion(v) for v in (f1, f2, g1, g2))
    n = int(round(2 * half_width / spacing))
    ax = np.linspace(-half_width, half_width, n + 1)
    h = ax[1] - ax[0]
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    w1 = np.full(n + 1, h)
    w1[[0, -1]] *= 0.5
    W = np.outer(w1, w1).ravel()
    v1 = stft_values(f1, g1, pts)
    v2 = stft_values(f2, g2, pts)
    integral = np.sum(W * v1 * np.conj(v2))
    expected = f1.inner(f2) * np.conj(g1.inner(g2))
    return float(abs(integral - expected))


def rotation_matrix(theta):
    c, s = math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta)
    return np.array([[c, -s], [s, c]])


def covariance_residual(f, g, theta, z):
    """Residual of ``V_g f(R z) = e^{pi i (x w - x' w')} V_{mu g}(mu f)(z)``."""
    f, g = as_expansion(f), as_expansion(g)
    pts = check_points(z)
    rz = pts @ rotation_matrix(theta).T
    lhs = stft_values(f, g, rz)
    phase = np.exp(1j * math.pi * (pts[:, 0] * pts[:, 1] - rz[:, 0] * rz[:, 1]))
    rhs = phase * stft_values(metaplectic_rotate(f, theta), metaplectic_rotate(g, theta), pts)
    res = np.abs(lhs - rhs)
    return float(res.max()) if np.ndim(z) > 1 else float(res[0])


def lift_weight(z):
    """Phase/Gaussian factor ``exp(-pi i x xi) exp(pi |z|^2 / 2)`` of the lift."""
    pts = check_points(z)
    x, xi = pts[:, 0], pts[:, 1]
    return np.exp(-1j * math.pi * x * xi + 0.5 * math.pi * (x * x + xi * xi))


def polyanalytic_lift(f, g, z):
    """``F(z) = V_g f(conj z) exp(-pi (z^2 - conj(z)^2)/4) exp(pi |z|^2 / 2)``.

    ``F`` is polyanalytic of order ``deg g``.  The Gaussian factor is cancelled
    analytically inside the kernel, so large ``|z|`` does not overflow.
    """
    pts = check_points(z)
    conj_pts = pts * np.array([1.0, -1.0])
    vals = stft_values(f, g, conj_pts, gaussian=False)
    out = vals * np.exp(-1j * math.pi * pts[:, 0] * pts[:, 1])
    single = np.ndim(z) == 0 or (np.ndim(z) == 1 and np.size(z) == 2
                                 and not np.iscomplexobj(z))
    return complex(out[0]) if single else out


@dataclass(frozen=True, eq=False)
class SampledField:
    """STFT values attached to weighted nodes along a trajectory."""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    window: HermiteExpansion = field(default_factory=lambda: HermiteExpansion.basis(0))

    def __post_init__(self):
        nodes = check_points(self.nodes)
        weights = np.asarray(self.weights, dtype=float).ravel()
        values = np.asarray(self.values, dtype=complex).ravel()
        if not (nodes.shape[0] == weights.size == values.size):
            raise PreconditionError("nodes, weights and values must have equal length")
        if np.any(weights <= 0):
            raise PreconditionError("weights must be strictly positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "window", as_expansion(self.window))

    def __len__(self):
        return self.weights.size

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["x", "xi", "weight", "re", "im"])
        for (x, xi), w, v in zip(self.nodes, self.weights, self.values):
            wr.writerow([repr(float(x)), repr(float(xi)), repr(float(w)),
                         repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, window=None):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["x", "xi", "weight", "re", "im"]:
            raise PreconditionError("SampledField CSV needs header x,xi,weight,re,im")
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
        data = data.reshape(-1, 5)
        return cls(data[:, :2], data[:, 2], data[:, 3] + 1j * data[:, 4],
                   window if window is not None else HermiteExpansion.basis(0))


def sample_field(f, g, quadrature):
    """Forward sampling: ``V_g f`` at the nodes of a quadrature set."""
    g = as_expansion(g)
    vals = stft_values(f, g, quadrature.nodes)
    return SampledField(quadrature.nodes, quadrature.weights, vals, g)


def check_sample_resolution(h, scale=1.0):
    check_positive(h, "h")
    if h > 0.05 * scale:
        warnings.warn(f"quadrature spacing h={h} coarser than 0.05", stacklevel=3)


__all__ = [
    "kernel_table", "stft_values", "stft_point", "stft_quadrature",
    "orthogonality_residual", "covariance_residual", "polyanalytic_lift",
    "lift_weight", "rotation_matrix", "SampledField", "sample_field",
]
