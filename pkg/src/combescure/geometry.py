"""Low-level vector and plane helpers.

Points are plain numpy arrays of shape (2,) or (3,). Nothing here knows
about nets; these are the primitives the rest of the library is built on.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateGeometryError


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.shape not in ((2,), (3,)):
        raise ValueError(f"expected a 2d or 3d point, got shape {a.shape}")
    return a


def norm(v) -> float:
    return float(np.linalg.norm(v))


def cross2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def parallel_residual(u, v) -> float:
    """sin of the angle between u and v. 0 means parallel (either sign).

    Degenerate (zero) vectors give inf so they never count as parallel.
    """
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return float("inf")
    if len(u) == 2:
        s = abs(cross2(u, v))
    else:
        s = np.linalg.norm(np.cross(u, v))
    return float(s / (nu * nv))


def same_direction(u, v, eps: float) -> bool:
    return parallel_residual(u, v) <= eps and float(np.dot(u, v)) > 0.0


def intersect_lines(p, d, q, e, eps_parallel: float = 1e-9):
    """Intersection of lines p + s*d and q + r*e.

    Works in 2d and 3d; in 3d the lines may be skew, in which case the
    midpoint of the common perpendicular is returned and ``gap`` is the
    distance between the closest points (0 for a true intersection).

    Returns (point, s, r, gap). Raises DegenerateGeometryError when the
    directions are parallel within eps_parallel.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    if parallel_residual(d, e) <= eps_parallel:
        raise DegenerateGeometryError("cannot intersect parallel lines")
    a = np.stack([d, -e], axis=1)  # (dim, 2)
    rhs = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    ata = a.T @ a
    atb = a.T @ rhs
    det = ata[0, 0] * ata[1, 1] - ata[0, 1] * ata[1, 0]
    if det == 0.0:
        raise DegenerateGeometryError("cannot intersect parallel lines")
    s = (atb[0] * ata[1, 1] - atb[1] * ata[0, 1]) / det
    r = (ata[0, 0] * atb[1] - ata[1, 0] * atb[0]) / det
    x1 = p + s * d
    x2 = q + r * e
    gap = norm(x1 - x2)
    return 0.5 * (x1 + x2), float(s), float(r), gap


class PlaneFrame:
    """Orthonormal in-plane frame fitted to a point cloud.

    Attributes: origin, u, v (in-plane unit vectors), normal (None in 2d)
    and out_of_plane, the largest distance of any input point from the
    fitted plane.
    """

    __slots__ = ("origin", "u", "v", "normal", "out_of_plane")

    def __init__(self, origin, u, v, normal, out_of_plane):
        self.origin = origin
        self.u = u
        self.v = v
        self.normal = normal
        self.out_of_plane = out_of_plane

    def to_plane(self, pts) -> np.ndarray:
        m = np.atleast_2d(np.asarray(pts, dtype=float)) - self.origin
        return np.stack([m @ self.u, m @ self.v], axis=-1)

    def from_plane(self, xy) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        pts = self.origin + np.outer(xy[:, 0], self.u) + np.outer(xy[:, 1], self.v)
        return pts if len(pts) > 1 else pts[0]


def fit_plane(pts) -> PlaneFrame:
    pts = np.asarray(pts, dtype=float)
    c = pts.mean(axis=0)
    m = pts - c
    if pts.shape[1] == 2:
        return PlaneFrame(c, np.array([1.0, 0.0]), np.array([0.0, 1.0]), None, 0.0)
    _, sv, vt = np.linalg.svd(m, full_matrices=False)
    u, v = vt[0], vt[1]
    n = np.cross(u, v)
    off = float(np.max(np.abs(m @ n))) if len(sv) > 2 else 0.0
    return PlaneFrame(c, u, v, n, off)


def polygon_area2(xy) -> float:
    """Signed shoelace area of a polygon given as an (k, 2) array."""
    xy = np.asarray(xy, dtype=float)
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def triangle_area(a, b, c) -> float:
    """Unsigned area of triangle abc in 2d or 3d."""
    u = np.asarray(b, dtype=float) - a
    v = np.asarray(c, dtype=float) - a
    if len(u) == 2:
        return 0.5 * abs(cross2(u, v))
    return 0.5 * norm(np.cross(u, v))


def affine_map_from_triples(src, dst):
    """Affine map sending the three source points to the three targets.

    The map is only determined on the affine span of the sources; it is
    returned as a callable defined there (points are expressed in the
    barycentric-style frame of the source triple). Collinear sources
    raise DegenerateGeometryError.
    """
    s0, s1, s2 = (np.asarray(p, dtype=float) for p in src)
    d0, d1, d2 = (np.asarray(p, dtype=float) for p in dst)
    e1, e2 = s1 - s0, s2 - s0
    g = np.array([[e1 @ e1, e1 @ e2], [e2 @ e1, e2 @ e2]])
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    scale = max(g[0, 0], g[1, 1])
    if scale == 0.0 or abs(det) < 1e-24 * scale * scale:
        raise DegenerateGeometryError("affine frame is collinear")
    ginv = np.linalg.inv(g)

    def apply(p):
        w = np.asarray(p, dtype=float) - s0
        pq = ginv @ np.array([w @ e1, w @ e2])
        return d0 + pq[0] * (d1 - d0) + pq[1] * (d2 - d0)

    return apply
