"""Signal recovery from trajectory samples.

* :func:`cg_reconstruct` inverts the finite-section frame operator.
* :func:`cauchy_reconstruct` implements Balk's Cauchy-type formula for
  reduced polyanalytic functions sampled on ``n + 1`` concentric circles.
* :func:`line_uniqueness_check` decides uniqueness on parallel lines from
  the real zero set of the rotated window.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_points
from .exceptions import ConvergenceError, IllPosedError, PreconditionError
from .frames import PeriodicOffsets, _as_offsets
from .hermite import HermiteExpansion, as_expansion, metaplectic_rotate
from .stft import _basis_stft, lift_weight, polyanalytic_lift

# --------------------------------------------------------------------------- frame inversion


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    estimate: HermiteExpansion
    iterations: int
    residual: float
    residual_history: tuple = ()
    rel_error: float = None
    A_N: float = None
    B_N: float = None
    method: str = "cg"

    def to_dict(self):
        return {"coeffs": json.loads(self.estimate.to_json()), "iterations": self.iterations,
                "residual": self.residual, "rel_error": self.rel_error,
                "A_N": self.A_N, "B_N": self.B_N, "method": self.method}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _krylov_solve(S, b, tol, maxiter, method):
    """CG or conjugate residual for Hermitian positive definite ``S``.

    Conjugate residual minimises ``|S c - b|`` over the Krylov space, so its
    residual norms never increase; plain CG does not guarantee that.
    """
    c = np.zeros_like(b)
    r = b.copy()
    bnorm = np.linalg.norm(b)
    hist = [float(np.linalg.norm(r))]
    if hist[0] <= tol * bnorm:
        return c, 0, hist
    p = r.copy()
    if method == "cg":
        rr = np.vdot(r, r).real
        for it in range(1, maxiter + 1):
            Sp = S @ p
            alpha = rr / np.vdot(p, Sp).real
            c = c + alpha * p
            r = r - alpha * Sp
            hist.append(float(np.linalg.norm(r)))
            if hist[-1] <= tol * bnorm:
                return c, it, hist
            rr_new = np.vdot(r, r).real
            p = r + (rr_new / rr) * p
            rr = rr_new
    else:
        Sr = S @ r
        Sp = Sr.copy()
        rSr = np.vdot(r, Sr).real
        for it in range(1, maxiter + 1):
            alpha = rSr / np.vdot(Sp, Sp).real
            c = c + alpha * p
            r = r - alpha * Sp
            hist.append(float(np.linalg.norm(r)))
            if hist[-1] <= tol * bnorm:
                return c, it, hist
            Sr = S @ r
            rSr_new = np.vdot(r, Sr).real
            beta = rSr_new / rSr
            p = r + beta * p
            Sp = Sr + beta * Sp
            rSr = rSr_new
    raise ConvergenceError(f"{method} did not reach tol={tol} in {maxiter} iterations "
                           f"(residual {hist[-1]:.3e})")


def cg_reconstruct(samples, g=None, N=8, tol=1e-10, floor=1e-8, truth=None, method="cr"):
    """Recover Hermite coefficients ``c_0..c_N`` from weighted STFT samples.

    Solves ``S c = b`` with ``b_n = sum_i w_i v_i conj(V_g h_n(z_i))``.

    Parameters
    ----------
    samples : SampledField
    g : window, optional
        Defaults to ``samples.window``.
    N : int
        Hermite section order.
    tol : float
        Relative residual target ``|S c - b| <= tol |b|``.
    floor : float
        Smallest admissible lower frame bound ``A_N``.
    truth : HermiteExpansion, optional
        If given, the relative L2 error is reported.
    method : {"cr", "cg"}
        Krylov variant; ``"cr"`` (conjugate residual) has monotone residuals.

    Raises
    ------
    IllPosedError
        If ``A_N < floor``.
    ConvergenceError
        If the residual target is missed within ``10 (N + 1)`` iterations.
    """
    if method not in ("cg", "cr"):
        raise PreconditionError(f"unknown Krylov method {method!r}")
    g = as_expansion(samples.window if g is None else g)
    N = int(N)
    W = _basis_stft(g, N, samples.nodes)
    Wc = np.conj(W) * samples.weights
    S = Wc @ W.T
    S = 0.5 * (S + S.conj().T)
    ev = np.linalg.eigvalsh(S)
    A_N, B_N = float(ev[0]), float(ev[-1])
    if A_N < floor:
        raise IllPosedError(f"lower frame bound A_N={A_N:.3e} below floor {floor:g}",
                            lower_bound=A_N)
    b = Wc @ samples.values
    c, it, hist = _krylov_solve(S, b, tol, 10 * (N + 1), method)
    est = HermiteExpansion(c)
    err = None
    if truth is not None:
        truth = as_expansion(truth)
        n = max(len(truth), len(est))
        tn = truth.norm()
        diff = (est.padded(n) - truth.padded(n)).norm()
        err = diff / tn if tn > 0 else diff
    return ReconstructionResult(est, it, hist[-1], tuple(hist), err, A_N, B_N, method)


# --------------------------------------------------------------------------- Balk / Cauchy


@dataclass(frozen=True, eq=False)
class PolyanalyticSamples:
    """Uniform angular samples ``G(R_k e^{2 pi i j / M})`` on concentric circles."""

    order: int
    radii: np.ndarray
    values: np.ndarray  # shape (len(radii), M)

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float).ravel()
        vals = np.asarray(self.values, dtype=complex)
        if int(self.order) < 0:
            raise PreconditionError("order must be non-negative")
        if radii.size < int(self.order) + 1:
            raise PreconditionError(f"order {self.order} needs {self.order + 1} radii")
        if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
            raise PreconditionError("radii must be positive and strictly increasing")
        if vals.ndim != 2 or vals.shape[0] != radii.size:
            raise PreconditionError("values must have one row per circle")
        if vals.shape[1] < 64:
            raise PreconditionError("angular resolution M must be >= 64")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("samples must be finite")
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", vals)

    @property
    def M(self):
        return self.values.shape[1]

    @staticmethod
    def nodes(radii, M):
        ang = 2 * np.pi * np.arange(M) / M
        return np.asarray(radii, dtype=float)[:, None] * np.exp(1j * ang)[None, :]

    @classmethod
    def from_function(cls, func, order, radii, M=256):
        """Sample a vectorised ``func(complex array)`` on the circles."""
        t = cls.nodes(radii, M)
        return cls(order, radii, np.asarray(func(t), dtype=complex).reshape(t.shape))

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["circle", "angle", "re", "im"])
        for k in range(self.radii.size):
            for j in range(self.M):
                v = self.values[k, j]
                wr.writerow([k, repr(2 * math.pi * j / self.M), repr(float(v.real)),
                             repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, order, radii):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["circle", "angle", "re", "im"]:
            raise PreconditionError("PolyanalyticSamples CSV needs header circle,angle,re,im")
        data = np.array([[float(c) for c in r] for r in rows[1:] if r]).reshape(-1, 4)
        K = len(radii)
        vals = (data[:, 2] + 1j * data[:, 3]).reshape(K, -1)
        return cls(order, radii, vals)


def lagrange_weights(radii, s):
    """``P_k(s) = prod_{j != k} (R_j^2 - s) / (R_j^2 - R_k^2)``."""
    r2 = np.asarray(radii, dtype=float) ** 2
    out = np.ones(r2.size)
    for k in range(r2.size):
        for j in range(r2.size):
            if j != k:
                out[k] *= (r2[j] - s) / (r2[j] - r2[k])
    return out


def _as_complex(z):
    if np.ndim(z) == 0:
        return complex(z)
    pts = check_points(z)
    if pts.shape[0] != 1:
        raise PreconditionError("expected a single phase-space point")
    return complex(pts[0, 0], pts[0, 1])


def circle_integrals(samples, z):
    """Trapezoid values of ``(1 / 2 pi i) oint_{|t|=R_k} G(t) / (t - z) dt``."""
    t = PolyanalyticSamples.nodes(samples.radii, samples.M)
    return np.mean(samples.values * t / (t - z), axis=1)


def cauchy_reconstruct(samples, z, least_squares=False):
    """Evaluate the reduced polyanalytic ``G`` at ``z`` from its circle samples.

    With exactly ``n + 1`` radii this is the Lagrange combination
    ``sum_k P_k(|z|^2) c_k``.  Extra radii are only used when
    ``least_squares=True``, which fits ``c_k = sum_j F_j(z) R_k^{2j}`` in the
    least-squares sense (an experiment; not covered by the classical formula).
    """
    zc = _as_complex(z)
    R0 = float(samples.radii[0])
    if not abs(zc) < R0:
        raise PreconditionError(f"|z|={abs(zc):.6g} must be < smallest radius {R0:g}")
    n = samples.order
    c = circle_integrals(samples, zc)
    s = abs(zc) ** 2
    if samples.radii.size == n + 1:
        return complex(lagrange_weights(samples.radii, s) @ c)
    if not least_squares:
        raise PreconditionError(f"order {n} uses exactly {n + 1} radii; "
                                "pass least_squares=True for more")
    V = (samples.radii[:, None] ** 2) ** np.arange(n + 1)[None, :]
    Fj, *_ = np.linalg.lstsq(V, c, rcond=None)
    return complex(Fj @ s ** np.arange(n + 1))


def _lift_samples(f, g, radii, M):
    n = as_expansion(g).order
    t = PolyanalyticSamples.nodes(radii, M)
    pts = np.column_stack([t.real.ravel(), t.imag.ravel()])
    F = polyanalytic_lift(f, g, pts).reshape(t.shape)
    return PolyanalyticSamples(n, radii, F * t ** n)


def stft_circle_reconstruct(f, g, radii, z, M=256, refine=True, max_M=8192, tol=1e-8):
    """Recover ``V_g f(z)`` from STFT samples on the circles ``|t| = R_k``.

    The samples are lifted to the reduced polyanalytic ``G(t) = t^n F(t)``
    (``n = deg g``), evaluated at ``conj z`` by :func:`cauchy_reconstruct`,
    divided by ``conj(z)^n`` and the lift weight is removed.  When ``refine``
    is set, ``M`` is doubled until the ``M`` and ``2M`` values agree to ``tol``.
    """
    zc = _as_complex(z)
    if abs(zc) < 1e-3:
        raise PreconditionError("|z| must be >= 1e-3 (division by z^n)")
    g = as_expansion(g)
    n = g.order
    w = np.conj(zc)

    def once(m):
        return cauchy_reconstruct(_lift_samples(f, g, radii, m), w)

    G = once(M)
    if refine:
        while True:
            G2 = once(2 * M)
            if abs(G2 - G) <= tol * max(1.0, abs(G2)) or 2 * M >= max_M:
                G, M = G2, 2 * M
                break
            G, M = G2, 2 * M
    F = G / w ** n
    return complex(F / lift_weight([w.real, w.imag])[0])


# --------------------------------------------------------------------------- lines


def window_real_zeros(g, theta=0.0, imag_tol=1e-8, residual_tol=1e-8):
    """Finite real zero set of ``mu(theta) g``.

    The Gaussian factor is stripped, leaving a Hermite series in
    ``x = sqrt(2 pi) t`` whose roots come from the companion matrix.
    """
    w = metaplectic_rotate(as_expansion(g), theta)
    c = w.trimmed().coeffs
    if not np.any(c):
        raise PreconditionError("zero window has no well-defined zero set")
    n = np.arange(c.size)
    from scipy.special import gammaln
    a = c * np.exp(-0.5 * (n * math.log(2.0) + gammaln(n + 1)))
    if c.size == 1:
        return np.zeros(0)
    roots = np.polynomial.hermite.hermroots(a)
    scale = np.max(np.abs(a))
    out = []
    for x in np.atleast_1d(roots):
        if abs(x.imag) > imag_tol:
            continue
        xr = float(x.real)
        # residual relative to the size of the series near xr
        vals = np.polynomial.hermite.hermval(xr, np.abs(a))
        if abs(np.polynomial.hermite.hermval(xr, a)) > residual_tol * max(scale, abs(vals)):
            continue
        out.append(xr / math.sqrt(2 * math.pi))
    return np.unique(np.round(np.array(out), 12)) + 0.0


@dataclass(frozen=True)
class UniquenessVerdict:
    unique: bool
    zeros: tuple
    witness: float = None

    def to_dict(self):
        return {"unique": self.unique, "zeros": list(self.zeros), "witness": self.witness}


def line_uniqueness_check(g, theta, offsets, tol=1e-9):
    """Uniqueness of parallel lines: ``unique`` iff no ``t`` is a zero of every translate.

    For a lattice ``eta Z`` the intersection of shifted finite zero sets is
    always empty.
    """
    off = _as_offsets(offsets)
    Z = window_real_zeros(g, theta)
    if Z.size == 0 or isinstance(off, PeriodicOffsets):
        return UniquenessVerdict(True, tuple(Z.tolist()))
    lam0 = off[0]
    for zeta in Z:
        t = lam0 + zeta
        if all(np.any(np.abs((t - lam) - Z) <= tol) for lam in off[1:]):
            return UniquenessVerdict(False, tuple(Z.tolist()), float(t))
    return UniquenessVerdict(True, tuple(Z.tolist()))


__all__ = [
    "ReconstructionResult", "cg_reconstruct", "PolyanalyticSamples", "lagrange_weights",
    "circle_integrals", "cauchy_reconstruct", "stft_circle_reconstruct",
    "window_real_zeros", "UniquenessVerdict", "line_uniqueness_check",
]
