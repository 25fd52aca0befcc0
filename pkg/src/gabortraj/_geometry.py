"""Planar curve pieces and exact clipping against disks and boxes.

Every piece is parametrised on ``[0, 1]``.  Region clipping works by
collecting the parameter values where the piece crosses the region boundary,
then testing the midpoint of each sub-interval for membership; lengths of the
kept sub-intervals are closed-form for lines and arcs.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

TWO_PI = 2.0 * math.pi
_EPS = 1e-13


def _cos_sin(theta):
    # exact values on quarter turns keep axis-aligned lines axis-aligned
    q = 4.0 * float(theta)
    if q == round(q):
        return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[int(round(q)) % 4]
    return math.cos(TWO_PI * theta), math.sin(TWO_PI * theta)


def ell(theta):
    """Unit vector ``(cos 2 pi theta, sin 2 pi theta)`` (angle in turns)."""
    return np.array(_cos_sin(theta))


def rot(theta):
    c, s = _cos_sin(theta)
    return np.array([[c, -s], [s, c]])


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


# --------------------------------------------------------------------------- regions


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def contains(self, p):
        c = self.center
        return (p[0] - c[0]) ** 2 + (p[1] - c[1]) ** 2 <= self.radius ** 2

    def level(self, pts):
        c = np.asarray(self.center)
        return self.radius ** 2 - np.sum((pts - c) ** 2, axis=-1)


@dataclass(frozen=True)
class Box:
    x0: float
    x1: float
    y0: float
    y1: float
    half_open: bool = False

    def contains(self, p):
        x, y = p
        if self.half_open:
            return self.x0 <= x < self.x1 and self.y0 <= y < self.y1
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def level(self, pts):
        return np.minimum.reduce([pts[..., 0] - self.x0, self.x1 - pts[..., 0],
                                  pts[..., 1] - self.y0, self.y1 - pts[..., 1]])


# --------------------------------------------------------------------------- pieces


class Piece:
    kind = None

    def length(self):
        raise NotImplementedError

    def point(self, u):
        raise NotImplementedError

    def length_between(self, u0, u1):
        raise NotImplementedError

    def criticals(self, region):
        raise NotImplementedError

    def inside_intervals(self, region):
        """Parameter intervals of the piece lying inside ``region``."""
        cuts = sorted({0.0, 1.0, *[u for u in self.criticals(region) if 0.0 < u < 1.0]})
        out = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= _EPS:
                continue
            if region.contains(self.point(0.5 * (a + b))):
                if out and abs(out[-1][1] - a) <= _EPS:
                    out[-1] = (out[-1][0], b)
                else:
                    out.append((a, b))
        return out

    def measure_in(self, region):
        return sum(self.length_between(a, b) for a, b in self.inside_intervals(region))


class LineSegment(Piece):
    kind = "line-segment"

    def __init__(self, p0, p1):
        self.p0 = np.asarray(p0, dtype=float)
        self.p1 = np.asarray(p1, dtype=float)

    def length(self):
        return float(math.hypot(*(self.p1 - self.p0)))

    def point(self, u):
        return self.p0 + u * (self.p1 - self.p0)

    def points(self, u):
        u = np.asarray(u)[:, None]
        return self.p0 + u * (self.p1 - self.p0)

    def length_between(self, u0, u1):
        return (u1 - u0) * self.length()

    def tangent(self, u=None):
        d = self.p1 - self.p0
        return d / np.linalg.norm(d)

    def curvature(self, u=None):
        return 0.0

    def sub(self, u0, u1):
        return LineSegment(self.point(u0), self.point(u1))

    def criticals(self, region):
        d = self.p1 - self.p0
        if isinstance(region, Disk):
            f = self.p0 - np.asarray(region.center)
            a, b, c = d @ d, 2 * f @ d, f @ f - region.radius ** 2
            disc = b * b - 4 * a * c
            if a == 0 or disc < 0:
                return []
            sq = math.sqrt(disc)
            return [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]
        out = []
        for k, (lo, hi) in enumerate(((region.x0, region.x1), (region.y0, region.y1))):
            if d[k] != 0:
                out += [(lo - self.p0[k]) / d[k], (hi - self.p0[k]) / d[k]]
        return out

    def transformed(self, A, b):
        return LineSegment(A @ self.p0 + b, A @ self.p1 + b)

    def vertices(self):
        return [self.p0, self.p1]

    def to_dict(self):
        return {"kind": self.kind, "p0": self.p0.tolist(), "p1": self.p1.tolist()}


class CircularArc(Piece):
    """Arc ``center + radius * (cos a, sin a)`` for ``a`` in ``[a0, a1]`` (radians).

    ``orientation=+1`` traverses counter-clockwise.
    """

    kind = "circular-arc"

    def __init__(self, center, radius, a0=0.0, a1=TWO_PI, orientation=1):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.a0, self.a1 = float(a0), float(a1)
        self.orientation = 1 if orientation >= 0 else -1

    @property
    def closed(self):
        return abs(self.a1 - self.a0 - TWO_PI) < 1e-15

    def _angle(self, u):
        return self.a0 + u * (self.a1 - self.a0)

    def length(self):
        return self.radius * (self.a1 - self.a0)

    def point(self, u):
        a = self._angle(u)
        return self.center + self.radius * np.array([math.cos(a), math.sin(a)])

    def points(self, u):
        a = self._angle(np.asarray(u))
        return self.center + self.radius * np.column_stack([np.cos(a), np.sin(a)])

    def length_between(self, u0, u1):
        return (u1 - u0) * self.length()

    def tangent(self, u):
        a = self._angle(u)
        return self.orientation * np.array([-math.sin(a), math.cos(a)])

    def curvature(self, u=None):
        return 1.0 / self.radius

    def sub(self, u0, u1):
        return CircularArc(self.center, self.radius, self._angle(u0), self._angle(u1),
                           self.orientation)

    def _to_u(self, angles):
        span = self.a1 - self.a0
        out = []
        for a in angles:
            base = (a - self.a0) % TWO_PI
            for k in range(-1, 2):
                u = (base + k * TWO_PI) / span
                if -_EPS <= u <= 1 + _EPS:
                    out.append(min(max(u, 0.0), 1.0))
        return out

    def criticals(self, region):
        cx, cy = self.center
        rho = self.radius
        angles = []
        if isinstance(region, Disk):
            dx, dy = region.center[0] - cx, region.center[1] - cy
            D = math.hypot(dx, dy)
            if D > 0:
                val = (D * D + rho * rho - region.radius ** 2) / (2 * rho * D)
                if -1 <= val <= 1:
                    phi = math.atan2(dy, dx)
                    delta = math.acos(val)
                    angles += [phi - delta, phi + delta]
        else:
            for xb in (region.x0, region.x1):
                v = (xb - cx) / rho
                if -1 <= v <= 1:
                    a = math.acos(v)
                    angles += [a, -a]
            for yb in (region.y0, region.y1):
                v = (yb - cy) / rho
                if -1 <= v <= 1:
                    a = math.asin(v)
                    angles += [a, math.pi - a]
        return self._to_u(angles)

    def transformed(self, A, b):
        # A is a rotation (det +1) for every caller in this package
        shift = math.atan2(A[1, 0], A[0, 0])
        return CircularArc(A @ self.center + b, self.radius, self.a0 + shift,
                           self.a1 + shift, self.orientation)

    def vertices(self):
        return [] if self.closed else [self.point(0.0), self.point(1.0)]

    def to_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius,
                "a0": self.a0, "a1": self.a1, "orientation": self.orientation}


class PolarLaw:
    """Radial law ``r(psi)`` with ``psi`` measured in turns.

    Derivatives default to central differences; subclasses may be exact.
    """

    name = "custom"

    def __init__(self, func, params=None):
        self.func = func
        self.params = dict(params or {})

    def r(self, psi):
        return self.func(psi)

    def dr(self, psi, step=1e-5):
        return (self.r(psi + step) - self.r(psi - step)) / (2 * step)

    def d2r(self, psi, step=1e-4):
        return (self.r(psi + step) - 2 * self.r(psi) + self.r(psi - step)) / step ** 2

    def to_dict(self):
        if self.name == "custom":
            raise TypeError("custom polar laws are not serialisable")
        return {"name": self.name, **self.params}


class ArchimedesLaw(PolarLaw):
    """``r(psi) = eta * psi`` (radial gap ``eta`` per turn)."""

    name = "archimedes"

    def __init__(self, eta):
        super().__init__(None, {"eta": float(eta)})
        self.eta = float(eta)

    def r(self, psi):
        return self.eta * np.asarray(psi, dtype=float)

    def dr(self, psi, step=None):
        return self.eta * np.ones_like(np.asarray(psi, dtype=float))

    def d2r(self, psi, step=None):
        return np.zeros_like(np.asarray(psi, dtype=float))


_LAWS = {"archimedes": lambda d: ArchimedesLaw(d["eta"])}


class PolarGraph(Piece):
    """``origin + Rot(rotation) r(psi) ell(psi)`` for ``psi`` in ``[psi0, psi1]`` (turns)."""

    kind = "polar-graph"

    def __init__(self, law, psi0, psi1, origin=(0.0, 0.0), rotation=0.0):
        self.law = law
        self.psi0, self.psi1 = float(psi0), float(psi1)
        self.origin = np.asarray(origin, dtype=float)
        self.rotation = float(rotation)
        self._table = None

    def _psi(self, u):
        return self.psi0 + np.asarray(u) * (self.psi1 - self.psi0)

    def _local(self, psi):
        psi = np.asarray(psi, dtype=float)
        r = self.law.r(psi)
        return np.stack([r * np.cos(TWO_PI * psi), r * np.sin(TWO_PI * psi)], axis=-1)

    def points(self, u):
        loc = self._local(self._psi(u))
        return loc @ rot(self.rotation).T + self.origin

    def point(self, u):
        return self.points(np.array([u]))[0]

    def speed(self, psi):
        """``|d gamma / d psi|`` (per turn)."""
        r = self.law.r(psi)
        return np.sqrt(self.law.dr(psi) ** 2 + (TWO_PI * r) ** 2)

    def length_between(self, u0, u1):
        if u1 <= u0:
            return 0.0
        a, b = float(self._psi(u0)), float(self._psi(u1))
        n = max(1, int(math.ceil((b - a) * 16)))
        edges = np.linspace(a, b, n + 1)
        # the speed is smooth, so fixed Gauss-Legendre panels are exact to rounding
        x, w = np.polynomial.legendre.leggauss(24)
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
        nodes = mid[:, None] + half[:, None] * x
        return float(np.sum(half[:, None] * w * self.speed(nodes)))

    def length(self):
        return self.length_between(0.0, 1.0)

    def tangent(self, u):
        psi = float(self._psi(u))
        r, dr = float(self.law.r(psi)), float(self.law.dr(psi))
        c, s = math.cos(TWO_PI * psi), math.sin(TWO_PI * psi)
        v = np.array([dr * c - TWO_PI * r * s, dr * s + TWO_PI * r * c])
        v = rot(self.rotation) @ v
        return v / np.linalg.norm(v)

    def curvature(self, u):
        psi = float(self._psi(u))
        r = float(self.law.r(psi))
        # derivatives with respect to the angle in radians
        d1 = float(self.law.dr(psi)) / TWO_PI
        d2 = float(self.law.d2r(psi)) / TWO_PI ** 2
        return abs(r * r + 2 * d1 * d1 - r * d2) / (r * r + d1 * d1) ** 1.5

    def sub(self, u0, u1):
        return PolarGraph(self.law, float(self._psi(u0)), float(self._psi(u1)),
                          self.origin, self.rotation)

    def criticals(self, region):
        n = max(64, int(math.ceil(self.length() / 0.01)))
        u = np.linspace(0.0, 1.0, n + 1)
        lv = region.level(self.points(u))
        out = []
        for i in np.flatnonzero(np.sign(lv[:-1]) != np.sign(lv[1:])):
            f = lambda s: float(region.level(self.points(np.array([s])))[0])
            if lv[i] == 0:
                out.append(float(u[i]))
                continue
            out.append(optimize.brentq(f, u[i], u[i + 1], xtol=1e-15))
        return out

    def arclength_table(self, samples_per_turn=256):
        """Cumulative arc length at Gauss-refined nodes, cached."""
        if self._table is None:
            span = self.psi1 - self.psi0
            n = max(16, int(math.ceil(abs(span) * samples_per_turn)))
            psi = np.linspace(self.psi0, self.psi1, n + 1)
            xg, wg = np.polynomial.legendre.leggauss(8)
            half = 0.5 * np.diff(psi)
            mid = 0.5 * (psi[:-1] + psi[1:])
            nodes = mid[:, None] + half[:, None] * xg[None, :]
            pieces = np.sum(wg[None, :] * self.speed(nodes), axis=1) * half
            self._table = (psi, np.concatenate([[0.0], np.cumsum(pieces)]))
        return self._table

    def psi_at_arclength(self, s):
        psi, cum = self.arclength_table()
        out = np.interp(s, cum, psi)
        # Newton refinement on the tabulated arc-length function
        for _ in range(3):
            idx = np.clip(np.searchsorted(psi, out) - 1, 0, psi.size - 2)
            base = cum[idx]
            xg, wg = np.polynomial.legendre.leggauss(8)
            lo = psi[idx]
            half = 0.5 * (out - lo)
            mid = lo + half
            partial = np.sum(wg[None, :] * self.speed(mid[:, None] + half[:, None] * xg[None, :]),
                             axis=1) * half
            out = out - (base + partial - s) / self.speed(out)
        return out

    def transformed(self, A, b):
        shift = math.atan2(A[1, 0], A[0, 0]) / TWO_PI
        return PolarGraph(self.law, self.psi0, self.psi1, A @ self.origin + b,
                          self.rotation + shift)

    def vertices(self):
        return [self.point(0.0), self.point(1.0)]

    def to_dict(self):
        return {"kind": self.kind, "law": self.law.to_dict(), "psi0": self.psi0,
                "psi1": self.psi1, "origin": self.origin.tolist(), "rotation": self.rotation}


def piece_from_dict(d):
    kind = d["kind"]
    if kind == LineSegment.kind:
        return LineSegment(d["p0"], d["p1"])
    if kind == CircularArc.kind:
        return CircularArc(d["center"], d["radius"], d["a0"], d["a1"], d.get("orientation", 1))
    if kind == PolarGraph.kind:
        law = _LAWS[d["law"]["name"]](d["law"])
        return PolarGraph(law, d["psi0"], d["psi1"], d.get("origin", (0, 0)),
                          d.get("rotation", 0.0))
    raise ValueError(f"unknown segment kind {kind!r}")


def clip_line(p, d, box):
    """Liang-Barsky clip of the infinite line ``p + t d`` to a closed box.

    Returns the ``(t0, t1)`` interval or ``None``.
    """
    t0, t1 = -math.inf, math.inf
    for k, (lo, hi) in enumerate(((box.x0, box.x1), (box.y0, box.y1))):
        if abs(d[k]) < 1e-15:
            if not (lo <= p[k] <= hi):
                return None
            continue
        a, b = (lo - p[k]) / d[k], (hi - p[k]) / d[k]
        t0, t1 = max(t0, min(a, b)), min(t1, max(a, b))
    if t1 <= t0:
        return None
    return t0, t1
