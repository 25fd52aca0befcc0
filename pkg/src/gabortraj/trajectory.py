"""Trajectory families in the time-frequency plane and their arc-length quadrature."""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._geometry import (TWO_PI, ArchimedesLaw, Box, CircularArc, Disk, LineSegment,
                        PolarGraph, clip_line, cross, ell, piece_from_dict, rot)
from ._validation import check_box, check_positive
from .exceptions import PreconditionError

FAMILIES = ("circles", "polygons", "point-path", "lines", "edges", "archimedes", "custom")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A finite union of curve pieces.

    Attributes
    ----------
    pieces : tuple
        Ordered :class:`LineSegment` / :class:`CircularArc` / :class:`PolarGraph`.
    family : str
        One of :data:`FAMILIES`.
    params : dict
        Constructor parameters (``eta``, vertices, ...), JSON-friendly.
    r_trunc : float
        Every piece lies in the closed disk of this radius.
    r_faithful : float
        Radius of the centred disk on which the truncated set coincides with
        the untruncated family.  Scans must stay inside it.
    """

    pieces: tuple
    family: str = "custom"
    params: dict = field(default_factory=dict)
    r_trunc: float = math.inf
    r_faithful: float = math.inf

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise PreconditionError(f"unknown family tag {self.family!r}")
        object.__setattr__(self, "pieces", tuple(self.pieces))

    def __len__(self):
        return len(self.pieces)

    @property
    def eta(self):
        return self.params.get("eta")

    def length(self):
        return float(sum(p.length() for p in self.pieces))

    def measure_in_ball(self, center, radius):
        """``H^1(Gamma cap B_R(center))`` by exact clipping."""
        disk = Disk(tuple(map(float, center)), float(radius))
        return float(sum(p.measure_in(disk) for p in self.pieces if _may_hit(p, disk)))

    def measure_in_box(self, box, half_open=False):
        b = Box(*check_box(box), half_open=half_open)
        return float(sum(p.measure_in(b) for p in self.pieces if _may_hit(p, b)))

    def clipped(self, box):
        """Sub-trajectory inside a closed box (pieces cut at the boundary)."""
        b = Box(*check_box(box))
        out = []
        for p in self.pieces:
            if not _may_hit(p, b):
                continue
            out += [p.sub(u0, u1) for u0, u1 in p.inside_intervals(b)]
        return Trajectory(out, self.family, dict(self.params), self.r_trunc, self.r_faithful)

    def _transformed(self, A, b):
        pieces = [p.transformed(A, b) for p in self.pieces]
        shift = float(np.linalg.norm(b))
        return Trajectory(pieces, "custom", {"base_family": self.family, **self.params},
                          self.r_trunc + shift, max(self.r_faithful - shift, 0.0))

    def translated(self, z):
        return self._transformed(np.eye(2), np.asarray(z, dtype=float))

    def rotated(self, theta):
        A = rot(theta)
        pieces = [p.transformed(A, np.zeros(2)) for p in self.pieces]
        return Trajectory(pieces, "custom", {"base_family": self.family, **self.params},
                          self.r_trunc, self.r_faithful)

    def ray_hits(self, psi):
        """Intersections with the ray ``{r ell(psi): r > 0}`` sorted by ``r``.

        Returns a list of ``(r, piece_index, u)``; coincident hits at shared
        vertices are reported once.
        """
        direction = ell(psi)
        hits = []
        for i, p in enumerate(self.pieces):
            for r, u in _ray_piece(direction, psi, p):
                hits.append((r, i, u))
        hits.sort()
        out = []
        for h in hits:
            if out and abs(h[0] - out[-1][0]) <= 1e-9 * max(1.0, h[0]):
                continue
            out.append(h)
        return out

    def junctions(self):
        """End points of open pieces (candidate non-smooth points)."""
        pts = []
        for p in self.pieces:
            pts += list(p.vertices())
        return np.array(pts).reshape(-1, 2)

    def quadrature(self, h):
        return quadrature(self, h)

    def to_dict(self):
        return {"family": self.family, "params": _jsonable(self.params),
                "r_trunc": self.r_trunc, "r_faithful": self.r_faithful,
                "segments": [p.to_dict() for p in self.pieces]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text) if isinstance(text, str) else text
        try:
            pieces = [piece_from_dict(s) for s in d["segments"]]
            return cls(pieces, d.get("family", "custom"), d.get("params", {}),
                       d.get("r_trunc", math.inf), d.get("r_faithful", math.inf))
        except (KeyError, ValueError, TypeError) as exc:
            raise PreconditionError(f"bad Trajectory JSON: {exc}") from exc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _bbox(p):
    if isinstance(p, LineSegment):
        pts = np.array([p.p0, p.p1])
        return pts.min(0), pts.max(0)
    if isinstance(p, CircularArc):
        return p.center - p.radius, p.center + p.radius
    return None


def _may_hit(p, region):
    bb = _bbox(p)
    if bb is None:
        return True
    lo, hi = bb
    if isinstance(region, Disk):
        c = np.asarray(region.center)
        nearest = np.clip(c, lo, hi)
        return float(np.sum((nearest - c) ** 2)) <= region.radius ** 2 + 1e-12
    return not (hi[0] < region.x0 or lo[0] > region.x1 or hi[1] < region.y0 or lo[1] > region.y1)


def _ray_piece(direction, psi, p):
    out = []
    if isinstance(p, LineSegment):
        d = p.p1 - p.p0
        den = cross(direction, d)
        if abs(den) < 1e-15:
            return out
        r = cross(p.p0, d) / den
        u = cross(p.p0, direction) / den
        if r > 0 and -1e-12 <= u <= 1 + 1e-12:
            out.append((r, min(max(u, 0.0), 1.0)))
    elif isinstance(p, CircularArc):
        b = direction @ p.center
        c = p.center @ p.center - p.radius ** 2
        disc = b * b - c
        if disc < 0:
            return out
        for r in (b - math.sqrt(disc), b + math.sqrt(disc)):
            if r <= 0:
                continue
            v = r * direction - p.center
            for u in p._to_u([math.atan2(v[1], v[0])]):
                out.append((r, u))
    else:
        if np.any(p.origin != 0):
            raise PreconditionError("ray intersection needs a polar graph centred at 0")
        local = psi - p.rotation
        j0 = math.ceil(p.psi0 - local - 1e-12)
        j1 = math.floor(p.psi1 - local + 1e-12)
        for j in range(j0, j1 + 1):
            q = local + j
            r = float(p.law.r(q))
            if r > 0:
                out.append((r, (q - p.psi0) / (p.psi1 - p.psi0)))
    return out


# --------------------------------------------------------------------------- quadrature


@dataclass(frozen=True, eq=False)
class QuadratureSet:
    """Arc-length nodes and trapezoid weights approximating ``int_Gamma . dH^1``."""

    nodes: np.ndarray
    weights: np.ndarray
    h: float
    parent: object = None

    def __len__(self):
        return self.weights.size

    def total(self):
        return float(np.sum(self.weights))

    def integrate(self, func):
        """``sum_i w_i func(nodes_i)`` for a vectorised ``func((k, 2)) -> (k,)``."""
        return np.sum(self.weights * func(self.nodes))

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["x", "xi", "weight"])
        for (x, xi), w in zip(self.nodes, self.weights):
            wr.writerow([repr(float(x)), repr(float(xi)), repr(float(w))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, h=math.nan):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]][:3] != ["x", "xi", "weight"]:
            raise PreconditionError("quadrature CSV needs header x,xi,weight")
        data = np.array([[float(c) for c in r[:3]] for r in rows[1:] if r]).reshape(-1, 3)
        return cls(data[:, :2], data[:, 2], h)

    @classmethod
    def planar_grid(cls, half_width, spacing):
        """Midpoint grid on ``[-T, T]^2`` with cell-area weights."""
        n = int(round(2 * half_width / spacing))
        c = -half_width + spacing * (np.arange(n) + 0.5)
        X, Y = np.meshgrid(c, c, indexing="ij")
        nodes = np.column_stack([X.ravel(), Y.ravel()])
        return cls(nodes, np.full(nodes.shape[0], spacing * spacing), spacing)


def quadrature(traj, h):
    """Equal-arc-length nodes with trapezoid weights on each piece.

    Closed arcs use the periodic trapezoid rule; open pieces put half weights
    on their end nodes.  ``sum(weights)`` equals the total length.
    """
    if not (isinstance(h, (int, float)) and h > 0):
        raise PreconditionError(f"quadrature spacing must be positive, got {h!r}")
    nodes, weights = [], []
    for p in traj.pieces:
        L = p.length()
        if L <= 0:
            continue
        m = max(1, int(math.ceil(L / h - 1e-12)))
        if isinstance(p, CircularArc) and p.closed:
            m = max(m, 3)
            u = np.arange(m) / m
            w = np.full(m, L / m)
        else:
            u = np.arange(m + 1) / m
            w = np.full(m + 1, L / m)
            w[[0, -1]] *= 0.5
        if isinstance(p, PolarGraph):
            psi = p.psi_at_arclength(u * L)
            pts = p.points((psi - p.psi0) / (p.psi1 - p.psi0))
        else:
            pts = p.points(u)
        nodes.append(pts)
        weights.append(w)
    if not nodes:
        return QuadratureSet(np.zeros((0, 2)), np.zeros(0), float(h), traj)
    return QuadratureSet(np.vstack(nodes), np.concatenate(weights), float(h), traj)


# --------------------------------------------------------------------------- families


def make_circles(eta, k_max):
    """Concentric circles of radii ``eta k``, ``k = 1..k_max``."""
    eta = check_positive(eta, "eta")
    if int(k_max) < 1:
        raise PreconditionError("k_max must be >= 1")
    pieces = [CircularArc((0.0, 0.0), eta * k) for k in range(1, int(k_max) + 1)]
    R = eta * int(k_max)
    return Trajectory(pieces, "circles", {"eta": eta, "k_max": int(k_max)}, R, R)


def _signed_area(v):
    return 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))


def polygon_edge_distances(vertices, tol=1e-9):
    """Signed distances from the origin to each edge line (positive = inner side).

    Raises :class:`PreconditionError` naming the first offending edge if the
    origin is not in the kernel or lies on an edge line.
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise PreconditionError("a polygon needs at least three 2-D vertices")
    orient = 1.0 if _signed_area(v) > 0 else -1.0
    out = []
    for i in range(v.shape[0]):
        a, b = v[i], v[(i + 1) % v.shape[0]]
        e = b - a
        if np.linalg.norm(e) == 0:
            raise PreconditionError(f"edge {i} is degenerate")
        dist = orient * cross(e, -a) / np.linalg.norm(e)
        if abs(dist) <= tol:
            raise PreconditionError(f"line through edge {i} meets the origin")
        if dist < 0:
            raise PreconditionError(f"origin is not in the kernel: outside edge {i}")
        out.append(dist)
    return np.array(out)


def make_polygon_family(vertices, eta, k_max):
    """Scaled copies ``eta k P``, ``k = 1..k_max``, of a star-shaped polygon."""
    eta = check_positive(eta, "eta")
    v = np.asarray(vertices, dtype=float)
    dists = polygon_edge_distances(v)
    k_max = int(k_max)
    if k_max < 1:
        raise PreconditionError("k_max must be >= 1")
    pieces = []
    for k in range(1, k_max + 1):
        w = eta * k * v
        pieces += [LineSegment(w[i], w[(i + 1) % len(w)]) for i in range(len(w))]
    rmax = eta * k_max * float(np.max(np.linalg.norm(v, axis=1)))
    rmin = eta * k_max * float(dists.min())
    return Trajectory(pieces, "polygons",
                      {"eta": eta, "k_max": k_max, "vertices": v.tolist()}, rmax, rmin)


def check_argument_monotone(points, tol=1e-12):
    """Return ``+1``/``-1`` if the arguments of ``z_1..z_n, z_1`` wind once
    strictly counter-clockwise / clockwise; raise otherwise."""
    z = np.asarray(points, dtype=float)
    if z.ndim != 2 or z.shape[1] != 2 or z.shape[0] < 3:
        raise PreconditionError("point path needs n >= 3 points")
    norms = np.linalg.norm(z, axis=1)
    if np.any(norms == 0):
        raise PreconditionError(f"point {int(np.argmin(norms))} has undefined argument")
    ang = np.arctan2(z[:, 1], z[:, 0])
    steps = np.angle(np.exp(1j * (np.roll(ang, -1) - ang)))  # principal value in (-pi, pi]
    for i, s in enumerate(steps):
        if abs(s) <= tol or abs(abs(s) - math.pi) <= tol:
            raise PreconditionError(f"arguments of points {i} and {(i + 1) % len(z)} are collinear")
    sign = 1 if np.sum(steps) > 0 else -1
    for i, s in enumerate(steps):
        if np.sign(s) != sign:
            raise PreconditionError(f"argument sequence not monotone at index {i}")
    if abs(abs(np.sum(steps)) - TWO_PI) > 1e-9:
        raise PreconditionError("arguments wind more than once")
    return sign


def make_point_path(points, eta, rounds):
    """Polyline through ``eta z_1, ..., eta z_n, 2 eta z_1, ...``.

    Each round contributes ``n`` segments, the last one closing onto the next
    round's first vertex, so ``rounds`` rounds end at ``(rounds+1) eta z_1``.
    """
    eta = check_positive(eta, "eta")
    z = np.asarray(points, dtype=float)
    check_argument_monotone(z)
    rounds = int(rounds)
    if rounds < 1:
        raise PreconditionError("rounds must be >= 1")
    verts = [k * eta * z[j] for k in range(1, rounds + 1) for j in range(len(z))]
    verts.append((rounds + 1) * eta * z[0])
    pieces = [LineSegment(a, b) for a, b in zip(verts[:-1], verts[1:])]
    rmax = float(max(np.linalg.norm(v) for v in verts))
    # inner radius of the last complete round's polygon
    n = len(z)
    dist = [abs(cross(z[i], z[(i + 1) % n] - z[i])) / np.linalg.norm(z[(i + 1) % n] - z[i])
            for i in range(n)]
    return Trajectory(pieces, "point-path",
                      {"eta": eta, "rounds": rounds, "points": z.tolist()},
                      rmax, eta * rounds * float(min(dist)))


def lattice_offsets(eta, lo, hi):
    """``eta Z cap [lo, hi]``."""
    eta = check_positive(eta, "eta")
    k0, k1 = math.ceil(lo / eta - 1e-12), math.floor(hi / eta + 1e-12)
    return [eta * k for k in range(k0, k1 + 1)]


def line_direction(theta):
    """``d = R(theta) e_2`` and the offset direction ``ell(theta)``.

    Offsets are measured along ``ell(theta)`` so that ``theta = 0`` gives the
    vertical lines ``x = lambda``.
    """
    return ell(theta + 0.25), ell(theta)


def make_parallel_lines(theta, offsets, box):
    """Lines ``{t d + lambda ell(theta)}`` with ``d = R(theta) e_2``, clipped to ``box``."""
    offsets = list(offsets)
    if not offsets:
        raise PreconditionError("offset set must be non-empty")
    b = Box(*check_box(box))
    d, perp = line_direction(theta)
    pieces = []
    for lam in offsets:
        p = lam * perp
        iv = clip_line(p, d, b)
        if iv is not None:
            pieces.append(LineSegment(p + iv[0] * d, p + iv[1] * d))
    corners = np.array([[b.x0, b.y0], [b.x0, b.y1], [b.x1, b.y0], [b.x1, b.y1]])
    r_in = float(min(-b.x0, b.x1, -b.y0, b.y1))
    return Trajectory(pieces, "lines",
                      {"theta": float(theta), "offsets": [float(o) for o in offsets],
                       "box": [b.x0, b.x1, b.y0, b.y1]},
                      float(np.max(np.linalg.norm(corners, axis=1))), max(r_in, 0.0))


def make_edges(gamma, eta, d_minus, d_plus, box, shift=(0.0, 0.0)):
    """Parallel edges: rays ``v_k - t d^-`` and ``v_k + t d^+`` from
    ``v_k = shift + eta k ell(gamma)``, ``k`` in Z, clipped to ``box``."""
    eta = check_positive(eta, "eta")
    b = Box(*check_box(box))
    axis = ell(gamma)
    dm = np.asarray(d_minus, dtype=float)
    dp = np.asarray(d_plus, dtype=float)
    dm, dp = dm / np.linalg.norm(dm), dp / np.linalg.norm(dp)
    for name, d in (("d_minus", dm), ("d_plus", dp)):
        if abs(cross(axis, d)) <= 1e-9:
            raise PreconditionError(f"{name} is collinear with ell(gamma)")
    shift = np.asarray(shift, dtype=float)
    corners = np.array([[b.x0, b.y0], [b.x0, b.y1], [b.x1, b.y0], [b.x1, b.y1]])
    diag = float(np.max(np.linalg.norm(corners, axis=1)))
    cot = max(abs(axis @ d) / abs(cross(axis, d)) for d in (dm, dp))
    kmax = int(math.ceil((np.linalg.norm(shift) + diag * (1 + cot)) / eta)) + 1
    pieces = []
    for k in range(-kmax, kmax + 1):
        v = shift + eta * k * axis
        for d in (-dm, dp):
            iv = clip_line(v, d, b)
            if iv is None:
                continue
            t0, t1 = max(iv[0], 0.0), iv[1]
            if t1 > t0:
                pieces.append(LineSegment(v + t0 * d, v + t1 * d))
    r_in = float(min(-b.x0, b.x1, -b.y0, b.y1))
    return Trajectory(pieces, "edges",
                      {"gamma": float(gamma), "eta": eta, "d_minus": dm.tolist(),
                       "d_plus": dp.tolist(), "shift": shift.tolist(),
                       "box": [b.x0, b.x1, b.y0, b.y1]}, diag, max(r_in, 0.0))


def make_archimedes(eta, turns):
    """Archimedes spiral ``r = eta psi`` for ``psi`` in ``[0, turns]`` (turns)."""
    eta = check_positive(eta, "eta")
    turns = check_positive(turns, "turns")
    piece = PolarGraph(ArchimedesLaw(eta), 0.0, turns)
    return Trajectory([piece], "archimedes", {"eta": eta, "turns": turns},
                      eta * turns, eta * (turns - 1.0) if turns > 1 else 0.0)


def empty_trajectory():
    return Trajectory([], "custom", {}, 0.0, math.inf)


__all__ = [
    "Trajectory", "QuadratureSet", "quadrature", "make_circles", "make_polygon_family",
    "make_point_path", "make_parallel_lines", "make_edges", "make_archimedes",
    "lattice_offsets", "line_direction", "polygon_edge_distances",
    "check_argument_monotone", "empty_trajectory", "LineSegment", "CircularArc",
    "PolarGraph", "ArchimedesLaw",
]
