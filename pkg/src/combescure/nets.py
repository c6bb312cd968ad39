"""Quad nets: the basic containers and area machinery.

A net is an (m+1) x (n+1) grid of points in R^2 or R^3 whose elementary
quadrilaterals (faces) are planar and strictly convex. Vertices are stored
row-major: index(i, j) = i*(n+1) + j with i in 0..m and j in 0..n.

Face (i, j) is the quad

    P(i,j), P(i+1,j), P(i+1,j+1), P(i,j+1)

labelled A, B, C, D in that cyclic order. Note A->B moves along the i
direction and B->C along j.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import NetValidationError


def _env_tol():
    raw = os.environ.get("COMBESCURE_TOL")
    if raw is None or raw.strip() == "":
        return None
    return float(raw)


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the library.

    Planarity and parallelism are relative to local edge lengths, area
    comparisons relative to face area. Concurrency is looser because the
    underlying intersection points amplify noise.
    """

    eps_planar: float = 1e-9
    eps_parallel: float = 1e-9
    eps_area: float = 1e-9
    eps_concurrency: float = 1e-8

    @classmethod
    def default(cls) -> "Tolerances":
        t = _env_tol()
        if t is None:
            return cls()
        return cls.uniform(t)

    @classmethod
    def uniform(cls, t: float) -> "Tolerances":
        return cls(eps_planar=t, eps_parallel=t, eps_area=t, eps_concurrency=t)


def _resolve_tol(tol) -> Tolerances:
    if tol is None:
        return Tolerances.default()
    if isinstance(tol, Tolerances):
        return tol
    return Tolerances.uniform(float(tol))


_SIDE_NAMES = {"AB": (0, 1), "BC": (1, 2), "CD": (2, 3), "DA": (3, 0)}


def _side_indices(side):
    """Accept 'AB'/'BC'/'CD'/'DA' (or an index pair) for a quad side."""
    if isinstance(side, str):
        key = side.upper()
        if key not in _SIDE_NAMES:
            raise ValueError(f"unknown side {side!r}, expected one of {sorted(_SIDE_NAMES)}")
        return _SIDE_NAMES[key]
    i, j = side
    if (i - j) % 4 not in (1, 3):
        raise ValueError(f"side indices {side} are not adjacent")
    return int(i) % 4, int(j) % 4


class Quad:
    """One planar convex quadrilateral with vertices A, B, C, D in cyclic order."""

    __slots__ = ("vertices", "grid_index", "_plane")

    def __init__(self, vertices, grid_index=None):
        v = np.asarray(vertices, dtype=float)
        if v.shape not in ((4, 2), (4, 3)):
            raise ValueError(f"quad needs four 2d or 3d vertices, got shape {v.shape}")
        self.vertices = v
        self.grid_index = grid_index  # (i, j) when the quad is a net face
        self._plane = None

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def a(self):
        return self.vertices[0]

    @property
    def b(self):
        return self.vertices[1]

    @property
    def c(self):
        return self.vertices[2]

    @property
    def d(self):
        return self.vertices[3]

    def side(self, which):
        i, j = _side_indices(which)
        return self.vertices[i], self.vertices[j]

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.roll(self.vertices, -1, axis=0) - self.vertices, axis=1)

    def relabel(self, order) -> "Quad":
        """New quad with vertices permuted; order is a tuple of old indices."""
        return Quad(self.vertices[list(order)])

    def plane(self) -> geo.PlaneFrame:
        # memoized; vertices are treated as immutable once constructed
        if self._plane is None:
            self._plane = geo.fit_plane(self.vertices)
        return self._plane

    def planar_coords(self, frame=None):
        frame = frame or self.plane()
        return frame.to_plane(self.vertices), frame

    def translated(self, offset) -> "Quad":
        return Quad(self.vertices + np.asarray(offset, dtype=float), self.grid_index)

    def __repr__(self):
        tag = f" face{self.grid_index}" if self.grid_index else ""
        return f"Quad(dim={self.dim}{tag})"


def quad(a, b, c, d) -> Quad:
    return Quad(np.stack([geo.as_point(a), geo.as_point(b), geo.as_point(c), geo.as_point(d)]))


def _convexity_margin_signed(xy):
    """Smallest normalised cross product of consecutive edge pairs.

    Positive for a strictly convex vertex order (either orientation),
    zero or negative when a corner is straight, reflex, or degenerate.
    """
    e = np.roll(xy, -1, axis=0) - xy
    lens = np.linalg.norm(e, axis=1)
    scale = float(np.max(lens)) ** 2
    if scale == 0.0:
        return -1.0
    cr = np.array([geo.cross2(e[k], e[(k + 1) % 4]) for k in range(4)]) / scale
    if np.all(cr > 0):
        return float(np.min(cr))
    if np.all(cr < 0):
        return float(np.min(-cr))
    return float(-np.max(np.abs(cr)))


def check_quad(q: Quad, tol=None) -> dict:
    """Planarity and strict-convexity report for one quad."""
    tol = _resolve_tol(tol)
    frame = q.plane()
    lens = q.edge_lengths()
    ref = float(np.max(lens))
    planar_rel = frame.out_of_plane / ref if ref > 0 else float("inf")
    xy = frame.to_plane(q.vertices)
    margin = _convexity_margin_signed(xy)
    ok = (
        ref > 0.0
        and float(np.min(lens)) > tol.eps_planar * ref
        and planar_rel <= tol.eps_planar
        and margin > tol.eps_planar
    )
    return {
        "ok": bool(ok),
        "planarity": float(planar_rel),
        "convexity_margin": float(margin),
        "min_edge": float(np.min(lens)),
        "face": q.grid_index,
    }


@dataclass
class ValidationReport:
    ok: bool
    failures: list = field(default_factory=list)  # per-face reports that failed
    worst_planarity: float = 0.0
    worst_convexity: float = float("inf")

    def summary(self) -> str:
        if self.ok:
            return (f"valid: planarity residual {self.worst_planarity:.3e}, "
                    f"convexity margin {self.worst_convexity:.3e}")
        bad = ", ".join(str(f["face"]) for f in self.failures[:8])
        more = "" if len(self.failures) <= 8 else f" (+{len(self.failures) - 8} more)"
        return f"invalid faces: {bad}{more}"


class Net:
    """An m x n quad net. Plain container; use validate() for the geometry checks."""

    __slots__ = ("m", "n", "vertices")

    def __init__(self, m: int, n: int, vertices):
        v = np.asarray(vertices, dtype=float)
        if m < 1 or n < 1:
            raise ValueError("need m >= 1 and n >= 1")
        if v.ndim != 2 or v.shape[0] != (m + 1) * (n + 1) or v.shape[1] not in (2, 3):
            raise ValueError(
                f"expected {(m + 1) * (n + 1)} points of dim 2 or 3, got shape {v.shape}")
        self.m = int(m)
        self.n = int(n)
        self.vertices = v

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def index(self, i: int, j: int) -> int:
        if not (0 <= i <= self.m and 0 <= j <= self.n):
            raise IndexError(f"vertex ({i},{j}) outside {self.m}x{self.n} net")
        return i * (self.n + 1) + j

    def point(self, i: int, j: int) -> np.ndarray:
        return self.vertices[self.index(i, j)]

    def grid(self) -> np.ndarray:
        """Vertices reshaped to (m+1, n+1, dim)."""
        return self.vertices.reshape(self.m + 1, self.n + 1, self.dim)

    def face(self, i: int, j: int) -> Quad:
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexError(f"face ({i},{j}) outside {self.m}x{self.n} net")
        g = self.grid()
        return Quad(np.stack([g[i, j], g[i + 1, j], g[i + 1, j + 1], g[i, j + 1]]),
                    grid_index=(i, j))

    def faces(self):
        for i in range(self.m):
            for j in range(self.n):
                yield self.face(i, j)

    def transposed(self) -> "Net":
        g = self.grid()
        return Net(self.n, self.m, np.transpose(g, (1, 0, 2)).reshape(-1, self.dim))

    def translated(self, offset) -> "Net":
        return Net(self.m, self.n, self.vertices + np.asarray(offset, dtype=float))

    def copy(self) -> "Net":
        return Net(self.m, self.n, self.vertices.copy())

    def __eq__(self, other):
        return (isinstance(other, Net) and self.m == other.m and self.n == other.n
                and np.array_equal(self.vertices, other.vertices))

    def __repr__(self):
        return f"Net({self.m}x{self.n}, dim={self.dim})"


def net_from_grid(grid) -> Net:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 3:
        raise ValueError("grid must have shape (m+1, n+1, dim)")
    return Net(g.shape[0] - 1, g.shape[1] - 1, g.reshape(-1, g.shape[2]))


def validate(net: Net, tol=None) -> ValidationReport:
    """Check every face for planarity and strict convexity."""
    tol = _resolve_tol(tol)
    failures = []
    worst_p = 0.0
    worst_c = float("inf")
    for q in net.faces():
        rep = check_quad(q, tol)
        worst_p = max(worst_p, rep["planarity"])
        worst_c = min(worst_c, rep["convexity_margin"])
        if not rep["ok"]:
            failures.append(rep)
    return ValidationReport(ok=not failures, failures=failures,
                            worst_planarity=worst_p, worst_convexity=worst_c)


def require_valid(net: Net, tol=None, what: str = "net") -> None:
    rep = validate(net, tol)
    if not rep.ok:
        raise NetValidationError(f"{what} is not a valid quad net: {rep.summary()}", rep)


def quad_normal(q: Quad) -> np.ndarray:
    """Unit normal of a 3d quad, oriented by the diagonal cross product (C-A) x (D-B)."""
    n = np.cross(q.c - q.a, q.d - q.b)
    ln = geo.norm(n)
    if ln == 0.0:
        raise NetValidationError(f"degenerate quad {q.grid_index}: diagonals are parallel")
    return n / ln


def oriented_area(q: Quad, normal=None, tol=None) -> float:
    """Signed area of a planar quad.

    In 2d this is the shoelace area (counterclockwise positive). In 3d
    the sign is taken against ``normal`` when given, else against the
    quad's own diagonal normal (C-A) x (D-B), which makes the result
    positive for the quad's intrinsic orientation.
    """
    tol = _resolve_tol(tol)
    v = q.vertices
    if q.dim == 2:
        return geo.polygon_area2(v)
    frame = q.plane()
    ref = float(np.max(q.edge_lengths()))
    if ref == 0.0 or frame.out_of_plane > tol.eps_planar * ref:
        raise NetValidationError(
            f"quad {q.grid_index} is not planar: residual {frame.out_of_plane:.3e} "
            f"vs edge {ref:.3e}")
    s = np.zeros(3)
    for k in range(4):
        s += np.cross(v[k], v[(k + 1) % 4])
    if normal is None:
        normal = quad_normal(q)
    else:
        normal = np.asarray(normal, dtype=float)
        normal = normal / geo.norm(normal)
    return 0.5 * float(s @ normal)


def mixed_area(q1: Quad, q2: Quad, tol=None) -> float:
    """Mixed area of two parallel quads.

    Defined by Area(q1 + q2) = Area(q1) + Area(q2) + 2*MixedArea(q1, q2),
    where q1 + q2 is the vertex-wise sum. All areas are measured against
    q1's normal so the bilinear expansion is coherent in 3d.
    """
    tol = _resolve_tol(tol)
    if q1.dim != q2.dim:
        raise ValueError("quads live in different dimensions")
    for side in ("AB", "BC", "CD", "DA"):
        u0, u1 = q1.side(side)
        w0, w1 = q2.side(side)
        if geo.parallel_residual(u1 - u0, w1 - w0) > tol.eps_parallel:
            raise NetValidationError(f"side {side} of the two quads is not parallel")
    ref = quad_normal(q1) if q1.dim == 3 else None
    s = Quad(q1.vertices + q2.vertices)
    a12 = oriented_area(s, normal=ref, tol=tol)
    a1 = oriented_area(q1, normal=ref, tol=tol)
    a2 = oriented_area(q2, normal=ref, tol=tol)
    return 0.5 * (a12 - a1 - a2)


def are_parallel_nets(n1: Net, n2: Net, tol=None) -> bool:
    """True when the nets are combinatorially equal and every corresponding
    edge is parallel with the same direction."""
    tol = _resolve_tol(tol)
    if n1.m != n2.m or n1.n != n2.n or n1.dim != n2.dim:
        return False
    g1 = n1.grid()
    g2 = n2.grid()
    for i in range(n1.m + 1):
        for j in range(n1.n + 1):
            for di, dj in ((1, 0), (0, 1)):
                if i + di > n1.m or j + dj > n1.n:
                    continue
                u = g1[i + di, j + dj] - g1[i, j]
                w = g2[i + di, j + dj] - g2[i, j]
                if not geo.same_direction(u, w, tol.eps_parallel):
                    return False
    return True


def max_area_deviation(n1: Net, n2: Net, tol=None) -> float:
    """Largest relative difference between corresponding face areas."""
    tol = _resolve_tol(tol)
    worst = 0.0
    for i in range(n1.m):
        for j in range(n1.n):
            q1 = n1.face(i, j)
            q2 = n2.face(i, j)
            ref = quad_normal(q1) if q1.dim == 3 else None
            a1 = oriented_area(q1, normal=ref, tol=tol)
            a2 = oriented_area(q2, normal=ref, tol=tol)
            worst = max(worst, abs(a2 - a1) / max(abs(a1), 1e-300))
    return worst
