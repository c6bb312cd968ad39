"""Isotropic metric duality.

The isotropic semi-norm ignores z. Polarity with respect to the unit
sphere 2z = x^2 + y^2 swaps the point (u, v, w) with the non-vertical
plane z = ux + vy - w; applying it to all face planes of a net gives the
dual net, whose top view does not move when the source runs through a
family of parallel nets (parallel planes share (u, v)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import IsotropicPlaneError, NetValidationError
from .nets import Net, Quad, _resolve_tol, net_from_grid

__all__ = [
    "iso_norm", "IsoPlane", "ContactElement", "delta_point", "delta_plane",
    "delta_contact", "iso_plane_from_points", "face_plane", "dual_net",
    "dual_family_invariants", "isotropic_gaussian_curvature",
]


def iso_norm(vec) -> float:
    """Isotropic semi-norm: length of the top view, sqrt(x^2 + y^2)."""
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise ValueError("iso_norm expects a 3-vector")
    return math.hypot(v[0], v[1])


@dataclass(frozen=True)
class IsoPlane:
    """The plane u x + v y - z - w = 0 (z coefficient pinned to -1).

    This representation covers exactly the non-isotropic planes, the ones
    not parallel to the z axis.
    """

    u: float
    v: float
    w: float

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.u, self.v, -1.0])

    def z_at(self, x: float, y: float) -> float:
        return self.u * x + self.v * y - self.w

    def contains(self, p, scale: float = 1.0, eps: float = 1e-9) -> bool:
        p = np.asarray(p, dtype=float)
        return abs(self.z_at(p[0], p[1]) - p[2]) <= eps * max(1.0, scale)


def delta_point(p) -> IsoPlane:
    """Polar plane of a point under the polarity at 2z = x^2 + y^2.

    The point (u, v, w) maps to the plane z = ux + vy - w; for points on
    the sphere itself this is the tangent plane there.
    """
    p = np.asarray(p, dtype=float)
    return IsoPlane(float(p[0]), float(p[1]), float(p[2]))


def delta_plane(pl: IsoPlane) -> np.ndarray:
    """Pole of a non-isotropic plane: the inverse of delta_point."""
    return np.array([pl.u, pl.v, pl.w])


@dataclass(frozen=True)
class ContactElement:
    """A point together with a non-isotropic plane through it."""

    point: np.ndarray
    plane: IsoPlane

    def __post_init__(self):
        p = np.asarray(self.point, dtype=float)
        if p.shape != (3,):
            raise ValueError("contact point must live in 3d")
        scale = float(np.max(np.abs(p))) or 1.0
        if not self.plane.contains(p, scale):
            raise NetValidationError("contact point does not lie on its plane")
        object.__setattr__(self, "point", p)


def delta_contact(ce: ContactElement) -> ContactElement:
    """Polarity on contact elements: swaps point and plane. Incidence is
    preserved, so the result is again a contact element."""
    return ContactElement(delta_plane(ce.plane), delta_point(ce.point))


def iso_plane_from_points(points, tol=None, label=None) -> IsoPlane:
    """Fitted plane through the points, as an IsoPlane.

    Raises IsotropicPlaneError when the plane is (numerically) parallel to
    the z axis, which has no IsoPlane representation.
    """
    tol = _resolve_tol(tol)
    pts = np.asarray(points, dtype=float)
    frame = geo.fit_plane(pts)
    n = frame.normal
    c = float(n @ frame.origin)
    if abs(n[2]) < 1e-9:
        raise IsotropicPlaneError(
            "plane is isotropic (parallel to the z axis)"
            + (f" at face {label}" if label is not None else ""),
            face=label)
    return IsoPlane(-n[0] / n[2], -n[1] / n[2], -c / n[2])


def face_plane(q: Quad, tol=None) -> IsoPlane:
    """IsoPlane carrying a (planar, 3d) face."""
    if q.dim != 3:
        raise NetValidationError("face planes need a 3d quad")
    tol = _resolve_tol(tol)
    frame = geo.fit_plane(q.vertices)
    scale = float(np.max(q.edge_lengths()))
    if frame.out_of_plane > tol.eps_planar * max(1.0, scale) * 100:
        raise NetValidationError(
            f"face {q.grid_index} is not planar enough for a face plane "
            f"(residual {frame.out_of_plane:.3e})")
    return iso_plane_from_points(q.vertices, tol, label=q.grid_index)


def dual_net(net: Net, tol=None) -> Net:
    """Metric dual: vertex (i, j) is the pole of the plane of face (i, j).

    The result is an (m-1) x (n-1) net; faces of the dual correspond to
    interior vertices of the source. Any isotropic face plane raises,
    naming the face.
    """
    tol = _resolve_tol(tol)
    if net.dim != 3:
        raise NetValidationError("the metric dual is defined for 3d nets")
    if net.m < 2 or net.n < 2:
        raise NetValidationError("dual needs at least a 2x2 net")
    g = np.empty((net.m, net.n, 3))
    for i in range(net.m):
        for j in range(net.n):
            pl = face_plane(net.face(i, j), tol)
            g[i, j] = delta_plane(pl)
    return net_from_grid(g)


def _line_fit_residual(pts2d: np.ndarray) -> float:
    """Largest distance of the 2d points from their best-fit line."""
    c = pts2d - pts2d.mean(axis=0)
    _, s, vt = np.linalg.svd(c, full_matrices=False)
    if s[0] == 0.0:
        return 0.0
    return float(np.max(np.abs(c @ vt[-1])))


def _cylinder_strips(net: Net, tol) -> list:
    """Indices of strips whose cross edges are all one translation."""
    g = net.grid()
    med = float(np.median(np.linalg.norm(
        (g[:, 1:] - g[:, :-1]).reshape(-1, net.dim), axis=-1)))
    out = []
    for i in range(net.m):
        d = g[i + 1] - g[i]
        if np.max(np.linalg.norm(d - d[0], axis=-1)) <= 1e-9 * med:
            out.append(i)
    return out


def dual_family_invariants(fam, ts, tol=None) -> dict:
    """What stays put when the source net runs through a family.

    Returns a report with the largest top-view drift of the dual vertices
    over the t grid, and (for every cylindrical strip of the base, where
    the cross edges are a single translation) the residual of the dual
    strip polyline against a vertical, i.e. isotropic, plane, checked as
    collinearity of its top view across all members.
    """
    tol = _resolve_tol(tol)
    ts = [float(t) for t in ts]
    if not ts:
        raise ValueError("need at least one t sample")
    duals = [dual_net(fam.net_at(t), tol) for t in ts]
    top0 = duals[0].vertices[:, :2]
    drift = max(float(np.max(np.abs(d.vertices[:, :2] - top0))) for d in duals)
    strips = _cylinder_strips(fam.base, tol)
    strip_residuals = {}
    for i in strips:
        worst = 0.0
        for d in duals:
            row = d.grid()[i][:, :2]
            if row.shape[0] >= 2:
                worst = max(worst, _line_fit_residual(row))
        strip_residuals[i] = worst
    return {
        "t_grid": ts,
        "top_view_drift": drift,
        "cylinder_strips": strips,
        "isotropic_plane_residuals": strip_residuals,
    }


def isotropic_gaussian_curvature(z, h) -> np.ndarray:
    """det of the finite-difference Hessian of graph samples z[i, j] on a
    uniform grid, i along x with step hx and j along y with step hy (pass a
    scalar h for hx = hy); interior points only, so the result loses one
    sample on each side. Exact for quadratic graphs."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[0] < 3 or z.shape[1] < 3:
        raise ValueError("need at least a 3x3 grid of samples")
    hx, hy = (h, h) if np.ndim(h) == 0 else h
    if hx <= 0.0 or hy <= 0.0:
        raise ValueError("steps must be positive")
    zxx = (z[2:, 1:-1] - 2.0 * z[1:-1, 1:-1] + z[:-2, 1:-1]) / (hx * hx)
    zyy = (z[1:-1, 2:] - 2.0 * z[1:-1, 1:-1] + z[1:-1, :-2]) / (hy * hy)
    zxy = (z[2:, 2:] - z[2:, :-2] - z[:-2, 2:] + z[:-2, :-2]) / (4.0 * hx * hy)
    return zxx * zyy - zxy * zxy
