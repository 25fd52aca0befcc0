"""Hermite-basis arithmetic.

Hermite functions are normalised as

    h_n(t) = 2^{1/4} / sqrt(2^n n!) * H_n(sqrt(2 pi) t) * exp(-pi t^2),

with ``H_n`` the physicists' Hermite polynomials, so that ``{h_n}`` is an
orthonormal basis of L^2(R) and ``h_0(0) = 2^{1/4}``.  In this basis
multiplication by ``t`` and differentiation are tridiagonal:

    t h_n  = (sqrt(n+1) h_{n+1} + sqrt(n) h_{n-1}) / (2 sqrt(pi))
    h_n'   = sqrt(pi) (sqrt(n) h_{n-1} - sqrt(n+1) h_{n+1})
"""

import hashlib
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from ._validation import N_MAX, check_coefficients, check_index
from .exceptions import PreconditionError

_SQRT_PI = math.sqrt(math.pi)
_RESCALE = 1e150


def hermite_functions(n_max, t):
    """Evaluate ``h_0, ..., h_{n_max}`` at the points ``t``.

    Parameters
    ----------
    n_max : int
        Highest index, ``0 <= n_max <= N_MAX``.
    t : array_like
        Evaluation points.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(n_max + 1,) + t.shape``.

    Notes
    -----
    The normalised three-term recurrence is run on the polynomial part while
    the Gaussian factor is carried as a separate per-point log scale, so
    neither overflow nor premature underflow can occur.
    """
    n_max = check_index(n_max, "n_max")
    t = np.asarray(t, dtype=float)
    x = math.sqrt(2.0 * math.pi) * t
    out = np.empty((n_max + 1,) + t.shape)

    log_scale = -0.5 * x * x
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 2.0 ** 0.25)
    out[0] = p * np.exp(log_scale)
    for n in range(n_max):
        p_next = math.sqrt(2.0 / (n + 1)) * x * p - math.sqrt(n / (n + 1)) * p_prev
        p_prev, p = p, p_next
        big = np.abs(p) > _RESCALE
        if np.any(big):
            p_prev = np.where(big, p_prev / _RESCALE, p_prev)
            p = np.where(big, p / _RESCALE, p)
            log_scale = np.where(big, log_scale + math.log(_RESCALE), log_scale)
        out[n + 1] = p * np.exp(log_scale)
    return out


def eval_hermite(n, t):
    """Orthonormal Hermite function ``h_n`` at ``t`` (scalar or array)."""
    n = check_index(n)
    val = hermite_functions(n, t)[n]
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True, eq=False)
class HermiteExpansion:
    """Finite expansion ``sum_n coeffs[n] h_n`` in the Hermite basis."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = check_coefficients(self.coeffs).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def basis(cls, n):
        n = check_index(n)
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @classmethod
    def zero(cls):
        return cls(np.zeros(1, dtype=complex))

    @classmethod
    def random(cls, order, seed):
        """Seeded complex Gaussian coefficients for ``h_0 .. h_order``, unit norm."""
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(order + 1) + 1j * rng.standard_normal(order + 1)
        return cls(c / np.linalg.norm(c))

    @property
    def order(self):
        """Highest occupied index (``0`` for the zero expansion)."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def __len__(self):
        return self.coeffs.size

    def trimmed(self):
        return HermiteExpansion(self.coeffs[: self.order + 1])

    def padded(self, length):
        if length < self.order + 1:
            raise PreconditionError("cannot pad below the occupied length")
        c = np.zeros(length, dtype=complex)
        k = min(length, self.coeffs.size)
        c[:k] = self.coeffs[:k]
        return HermiteExpansion(c)

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other):
        """``<self, other>``, linear in ``self``."""
        n = min(len(self), len(other))
        return complex(np.vdot(other.coeffs[:n], self.coeffs[:n]))

    def __call__(self, t):
        return eval_expansion(self, t)

    def __add__(self, other):
        n = max(len(self), len(other))
        return HermiteExpansion(self.padded(n).coeffs + other.padded(n).coeffs)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        return HermiteExpansion(complex(scalar) * self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, HermiteExpansion):
            return NotImplemented
        a, b = self.trimmed().coeffs, other.trimmed().coeffs
        return a.shape == b.shape and bool(np.all(a == b))

    __hash__ = None

    def allclose(self, other, atol=1e-12):
        n = max(len(self), len(other))
        return bool(np.allclose(self.padded(n).coeffs, other.padded(n).coeffs,
                                rtol=0.0, atol=atol))

    def to_json(self):
        """JSON array of ``[re, im]`` pairs in index order."""
        return json.dumps([[float(c.real), float(c.imag)] for c in self.coeffs])

    @classmethod
    def from_json(cls, text):
        pairs = json.loads(text) if isinstance(text, str) else text
        try:
            return cls(np.array([complex(re_, im) for re_, im in pairs]))
        except (TypeError, ValueError) as exc:
            raise PreconditionError(f"bad HermiteExpansion JSON: {exc}") from exc

    def digest(self):
        return hashlib.sha256(self.trimmed().to_json().encode()).hexdigest()[:16]


def as_expansion(obj):
    """Accept a :class:`HermiteExpansion`, a coefficient sequence or a preset name."""
    if isinstance(obj, HermiteExpansion):
        return obj
    if isinstance(obj, str):
        return parse_preset(obj)
    return HermiteExpansion(obj)


_TERM = re.compile(r"^h(\d+)$")


def parse_preset(spec):
    """Parse window names like ``"h0"`` or ``"h0+h1"`` into an expansion.

    Presets are plain sums of basis functions; normalise explicitly if needed.
    """
    coeffs = {}
    for term in spec.replace(" ", "").split("+"):
        m = _TERM.match(term)
        if not m:
            raise PreconditionError(f"unknown window preset {spec!r}")
        n = check_index(int(m.group(1)))
        coeffs[n] = coeffs.get(n, 0.0) + 1.0
    c = np.zeros(max(coeffs) + 1, dtype=complex)
    for n, v in coeffs.items():
        c[n] = v
    return HermiteExpansion(c)


def eval_expansion(f, t):
    """``sum_n alpha_n h_n(t)``."""
    f = as_expansion(f)
    vals = hermite_functions(len(f) - 1, t)
    out = np.tensordot(f.coeffs, vals, axes=(0, 0))
    return complex(out) if np.ndim(out) == 0 else out


def mult_by_t(f):
    """Exact action of multiplication by ``t``; raises the length by one."""
    f = as_expansion(f)
    c = f.coeffs
    n = np.arange(c.size)
    out = np.zeros(c.size + 1, dtype=complex)
    out[1:] += np.sqrt(n + 1) * c
    out[:-2] += np.sqrt(n[1:]) * c[1:]
    return HermiteExpansion(out / (2.0 * _SQRT_PI))


def derivative(f):
    """Exact action of ``d/dt``; raises the length by one."""
    f = as_expansion(f)
    c = f.coeffs
    n = np.arange(c.size)
    out = np.zeros(c.size + 1, dtype=complex)
    out[1:] -= np.sqrt(n + 1) * c
    out[:-2] += np.sqrt(n[1:]) * c[1:]
    return HermiteExpansion(_SQRT_PI * out)


def metaplectic_rotate(f, theta):
    """Metaplectic rotation: ``alpha_n -> exp(-2 pi i n theta) alpha_n``."""
    f = as_expansion(f)
    n = np.arange(len(f))
    # reduce n*theta mod 1 first so the group law holds to rounding
    phase = np.exp(-2j * np.pi * np.mod(n * float(theta), 1.0))
    return HermiteExpansion(f.coeffs * phase)


def sobolev_norms(g):
    """Return ``(|g|, |g'|, |t g|, |t g'|)`` as exact coefficient norms."""
    g = as_expansion(g)
    dg = derivative(g)
    return {
        "g": g.norm(),
        "dg": dg.norm(),
        "tg": mult_by_t(g).norm(),
        "tdg": mult_by_t(dg).norm(),
    }


__all__ = [
    "N_MAX", "HermiteExpansion", "as_expansion", "parse_preset",
    "hermite_functions", "eval_hermite", "eval_expansion", "mult_by_t",
    "derivative", "metaplectic_rotate", "sobolev_norms",
]
