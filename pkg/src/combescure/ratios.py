"""Per-quad ratio machinery.

Two numbers drive everything in this library:

* the simple ratio of a quad with respect to an oriented side, and
* the opposite ratio with respect to an (unoriented) side.

For quad ABCD and oriented side A->B, let the line CD meet the line AB at
the parameter s, i.e. at A + s*(B-A). The simple ratio is -1/s, and 0 when
the sides are parallel. For a strictly convex quad s never lands in [0,1],
so the ratio is finite; it is > 0 exactly when the rays BA and DC converge.

The opposite ratio with respect to side AB is the ratio of triangle areas
cut by the diagonal intersection Q: |AQB| / |CQD|. It equals the product
of the diagonal pieces (AQ*BQ)/(CQ*DQ) and, whenever the rays BC and AD
meet in a point S, also (AS*BS)/(CS*DS). Ratios with respect to opposite
sides are reciprocal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import ClassConditionError, DegenerateGeometryError, NetValidationError
from .nets import Net, Quad, _resolve_tol, _side_indices, check_quad


def _face_tag(q: Quad) -> str:
    return f"face {q.grid_index}" if q.grid_index is not None else "quad"


def _opposite_of(i0: int, i1: int):
    rest = [k for k in range(4) if k not in (i0, i1)]
    return rest[0], rest[1]


def simple_ratio(q: Quad, side="AB", tol=None) -> float:
    """Simple ratio of q with respect to the oriented side.

    side is 'AB', 'BC', 'CD', 'DA' or an ordered index pair; orientation
    matters ('AB' and ('B','A') style pairs give different values).
    """
    tol = _resolve_tol(tol)
    i0, i1 = _side_indices(side)
    j0, j1 = _opposite_of(i0, i1)
    xy, _ = q.planar_coords()
    a, b = xy[i0], xy[i1]
    c, d = xy[j0], xy[j1]
    d1 = b - a
    d2 = d - c
    denom = geo.cross2(d1, d2)
    scale = geo.norm(d1) * geo.norm(d2)
    if scale == 0.0:
        raise DegenerateGeometryError(f"{_face_tag(q)} has a zero edge")
    if abs(denom) <= tol.eps_parallel * scale:
        return 0.0
    s = geo.cross2(c - a, d2) / denom
    if abs(s) >= 1.0 / tol.eps_concurrency:
        return 0.0
    if 0.0 <= s <= 1.0:
        raise DegenerateGeometryError(
            f"{_face_tag(q)} is not strictly convex: extension of the opposite "
            f"side crosses the side itself (s={s:.3g})")
    return -1.0 / s


@dataclass
class FaceGeometry:
    """Diagonal intersection of a convex quad, in normalised coordinates.

    q is the intersection point of the diagonals AC and BD. e1 points
    along A->C, e2 along B->D, scaled so that with A = q + alpha*e1,
    C = q + gamma*e1, B = q + beta*e2, D = q + delta*e2 the product
    alpha*beta*gamma*delta equals 1. Convexity gives alpha*gamma < 0 and
    beta*delta < 0; the residual scale freedom is fixed by alpha*beta > 0.
    """

    q: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    alpha: float
    beta: float
    gamma: float
    delta: float
    face: tuple | None = None

    def diagonal_lengths(self):
        s = geo.norm(self.e1)
        t = geo.norm(self.e2)
        return (abs(self.alpha) * s, abs(self.beta) * t,
                abs(self.gamma) * s, abs(self.delta) * t)


def diagonal_intersection(q: Quad, tol=None) -> FaceGeometry:
    tol = _resolve_tol(tol)
    rep = check_quad(q, tol)
    if not rep["ok"]:
        raise NetValidationError(
            f"{_face_tag(q)} is not a planar strictly convex quad "
            f"(planarity {rep['planarity']:.3e}, convexity margin {rep['convexity_margin']:.3e})")
    xy, frame = q.planar_coords()
    a, b, c, d = xy
    qpt, s, _, _ = geo.intersect_lines(a, c - a, b, d - b, tol.eps_parallel)
    if not (0.0 < s < 1.0):
        raise NetValidationError(f"diagonals of {_face_tag(q)} do not cross internally")
    u1 = (c - a) / geo.norm(c - a)
    u2 = (d - b) / geo.norm(d - b)
    alpha = float((a - qpt) @ u1)
    gamma = float((c - qpt) @ u1)
    beta = float((b - qpt) @ u2)
    delta = float((d - qpt) @ u2)
    prod = alpha * beta * gamma * delta
    if not (alpha * gamma < 0.0 and beta * delta < 0.0 and prod > 0.0):
        raise NetValidationError(
            f"diagonal coordinates of {_face_tag(q)} violate the convexity signs "
            f"(alpha*gamma={alpha * gamma:.3e}, beta*delta={beta * delta:.3e})")
    scale = prod ** 0.25
    alpha, beta, gamma, delta = (x / scale for x in (alpha, beta, gamma, delta))
    u1 = u1 * scale
    u2 = u2 * scale
    if alpha * beta < 0.0:
        u1, alpha, gamma = -u1, -alpha, -gamma

    def lift_dir(v2):
        return frame.u * v2[0] + frame.v * v2[1] if q.dim == 3 else v2

    return FaceGeometry(
        q=frame.from_plane(qpt),
        e1=lift_dir(u1),
        e2=lift_dir(u2),
        alpha=alpha, beta=beta, gamma=gamma, delta=delta,
        face=q.grid_index,
    )


def opposite_ratio(q: Quad, side="AB", tol=None) -> float:
    """Opposite ratio of q with respect to the given side (orientation-free).

    Always positive for a valid convex quad. Ratios with respect to a
    side and its opposite multiply to 1.
    """
    tol = _resolve_tol(tol)
    i0, i1 = _side_indices(side)
    j0, j1 = _opposite_of(i0, i1)
    fg = diagonal_intersection(q, tol)
    v = q.vertices
    near = geo.triangle_area(v[i0], fg.q, v[i1])
    far = geo.triangle_area(v[j0], fg.q, v[j1])
    if far == 0.0:
        raise DegenerateGeometryError(f"{_face_tag(q)} has a degenerate diagonal split")
    return near / far


def lengths_from_opposite_ratios(area_aqb: float, area_bqc: float,
                                 area_cqd: float, area_dqa: float):
    """Recover the diagonal length ratios (AQ/CQ, BQ/DQ) from the four
    triangle areas around the diagonal intersection Q.

    Uses |AQB|/|CQD| = (AQ*BQ)/(CQ*DQ) and |BQC|/|DQA| = (BQ*CQ)/(DQ*AQ);
    areas must be positive.
    """
    for x in (area_aqb, area_bqc, area_cqd, area_dqa):
        if x <= 0.0:
            raise ValueError("triangle areas must be positive")
    r_ab = area_aqb / area_cqd
    r_bc = area_bqc / area_dqa
    return float(np.sqrt(r_ab / r_bc)), float(np.sqrt(r_ab * r_bc))


def quad_from_ratios(a, b, c, r_ab: float, r_bc: float, tol=None) -> Quad:
    """The unique convex quad ABCD with the given three vertices and the
    prescribed opposite ratios with respect to sides AB and BC.

    Works in 2d and 3d (D lands in the plane of A, B, C). The ratios must
    be positive; collinear input raises DegenerateGeometryError.
    """
    tol = _resolve_tol(tol)
    if r_ab <= 0.0 or r_bc <= 0.0:
        raise ValueError(f"opposite ratios must be positive, got {r_ab!r}, {r_bc!r}")
    a = geo.as_point(a)
    b = geo.as_point(b)
    c = geo.as_point(c)
    if geo.parallel_residual(b - a, c - b) <= tol.eps_parallel:
        raise DegenerateGeometryError("corner points A, B, C are collinear")
    lam = float(np.sqrt(r_ab / r_bc))   # AQ/CQ
    mu = float(np.sqrt(r_ab * r_bc))    # BQ/DQ
    qpt = a + (c - a) * (lam / (1.0 + lam))
    d = qpt + (qpt - b) / mu
    out = Quad(np.stack([a, b, c, d]))
    rep = check_quad(out, tol)
    if not rep["ok"]:
        raise NetValidationError("constructed quad is degenerate")
    return out


def _cycle_from(start: int, nxt: int):
    step = 1 if (nxt - start) % 4 == 1 else -1
    return [(start + step * k) % 4 for k in range(4)]


def _find_shared_side(q1: Quad, q2: Quad, tol):
    """Locate the side q1 and q2 have in common (exactly two coincident
    vertices, adjacent in both). Returns the oriented index pairs."""
    scale = max(float(np.max(q1.edge_lengths())), float(np.max(q2.edge_lengths())))
    pairs = []
    for i in range(4):
        dists = np.linalg.norm(q2.vertices - q1.vertices[i], axis=1)
        k = int(np.argmin(dists))
        if dists[k] <= max(tol.eps_planar, 1e-9) * 100 * scale:
            pairs.append((i, k))
    if len(pairs) != 2:
        raise DegenerateGeometryError(
            f"quads share {len(pairs)} vertices, need exactly 2 for a common side")
    (i0, k0), (i1, k1) = pairs
    if (i0 - i1) % 4 not in (1, 3) or (k0 - k1) % 4 not in (1, 3):
        raise DegenerateGeometryError("shared vertices are not adjacent in both quads")
    return (i0, i1), (k0, k1)


def _match_side(q1: Quad, q2: Quad, side, tol):
    """Relabel both quads as ABCD / ABC'D' with the common side A, B in
    matching order. side names q1's side; None means auto-detect."""
    if side is None:
        (i0, i1), pair2 = _find_shared_side(q1, q2, tol)
    else:
        i0, i1 = _side_indices(side)
        scale = max(float(np.max(q1.edge_lengths())), float(np.max(q2.edge_lengths())))
        thresh = max(tol.eps_planar, 1e-9) * 100 * scale
        pair2 = []
        for i in (i0, i1):
            dists = np.linalg.norm(q2.vertices - q1.vertices[i], axis=1)
            k = int(np.argmin(dists))
            if dists[k] > thresh:
                raise DegenerateGeometryError(
                    f"side {side} of the first quad is not shared by the second")
        pair2 = tuple(int(np.argmin(np.linalg.norm(q2.vertices - q1.vertices[i], axis=1)))
                      for i in (i0, i1))
        if pair2[0] == pair2[1] or (pair2[0] - pair2[1]) % 4 not in (1, 3):
            raise DegenerateGeometryError(
                f"side {side} endpoints are not an edge of the second quad")
    # orient q2's side to start at the same physical vertex as q1's
    if geo.norm(q2.vertices[pair2[0]] - q1.vertices[i0]) > \
            geo.norm(q2.vertices[pair2[1]] - q1.vertices[i0]):
        pair2 = (pair2[1], pair2[0])
    v1 = q1.vertices[_cycle_from(i0, i1)]
    v2 = q2.vertices[_cycle_from(pair2[0], pair2[1])]
    return v1, v2


def affine_symmetry_residual(q1: Quad, q2: Quad, side=None, tol=None) -> float:
    """Residual of the side-fixing affine map q1 -> q2.

    With both quads relabelled ABCD / ABC'D' so the shared side is A, B
    in matching order, the unique affine map fixing A and B with C -> C'
    is applied to D; the distance to D', relative to the longest edge, is
    returned. 0 means affine symmetric.
    """
    tol = _resolve_tol(tol)
    v1, v2 = _match_side(q1, q2, side, tol)
    a, b, c, d = v1
    a2, b2, c2, d2 = v2
    phi = geo.affine_map_from_triples((a, b, c), (a2, b2, c2))
    scale = max(float(np.max(q1.edge_lengths())), float(np.max(q2.edge_lengths())))
    return geo.norm(phi(d) - d2) / scale


def _line_point_distance(p, d, x):
    u = d / geo.norm(d)
    w = np.asarray(x, dtype=float) - p
    if len(u) == 2:
        return abs(geo.cross2(u, w))
    return geo.norm(np.cross(u, w))


def affine_symmetric(q1: Quad, q2: Quad, side=None, tol=None) -> bool:
    """Whether two quads sharing a side are affine symmetric with respect
    to it, i.e. some affine map fixing the shared side pointwise carries
    one onto the other.

    Decided geometrically: with labels ABCD / ABC'D' along the common
    side, the segments CC' and DD' must be parallel, and (when the quads
    are coplanar) the lines AB, CD, C'D' must be concurrent or parallel.
    For non-coplanar quads the parallelism of CC' and DD' suffices.
    """
    tol = _resolve_tol(tol)
    v1, v2 = _match_side(q1, q2, side, tol)
    a, b, c, d = v1
    _, _, c2, d2 = v2
    scale = max(float(np.max(q1.edge_lengths())), float(np.max(q2.edge_lengths())))
    cc = c2 - c
    dd = d2 - d
    if geo.norm(cc) <= tol.eps_planar * scale or geo.norm(dd) <= tol.eps_planar * scale:
        # a vertex coincides across the quads; treat the zero segment as
        # parallel to anything
        pass
    elif geo.parallel_residual(cc, dd) > tol.eps_parallel:
        return False
    if q1.dim == 3:
        allpts = np.vstack([q1.vertices, q2.vertices])
        if geo.fit_plane(allpts).out_of_plane > tol.eps_planar * scale:
            return True  # non-coplanar case: CC' parallel DD' is the whole condition
    # concurrency of lines AB, CD, C'D'
    lines = [(a, b - a), (c, d - c), (c2, d2 - c2)]
    res01 = geo.parallel_residual(lines[0][1], lines[1][1])
    res02 = geo.parallel_residual(lines[0][1], lines[2][1])
    res12 = geo.parallel_residual(lines[1][1], lines[2][1])
    if res01 <= tol.eps_parallel and res02 <= tol.eps_parallel and res12 <= tol.eps_parallel:
        return True
    # intersect the pair meeting at the widest angle, test the third line
    pairs = [(0, 1, 2, res01), (0, 2, 1, res02), (1, 2, 0, res12)]
    ia, ib, ic, _ = max(pairs, key=lambda t: t[3])
    x, _, _, _ = geo.intersect_lines(lines[ia][0], lines[ia][1],
                                     lines[ib][0], lines[ib][1], tol.eps_parallel)
    dist = _line_point_distance(lines[ic][0], lines[ic][1], x)
    edges = np.concatenate([q1.edge_lengths(), q2.edge_lengths()])
    return dist <= tol.eps_concurrency * float(np.median(edges))


@dataclass
class SimpleRatioFrame:
    """The four faces around an interior vertex O, with their simple ratios.

    Writing A_0..A_3 for the edge neighbours of O in the cyclic layout
    A_0 = (i, j+1), A_1 = (i+1, j), A_2 = (i, j-1), A_3 = (i-1, j),
    faces[k] is the quad (O, A_k, B_k, A_{k+1}) where B_k is the matching
    corner vertex; faces[k] and faces[k+1] share the edge O A_{k+1}
    (indices mod 4). l[k] is the simple ratio of faces[k] with respect to
    O -> A_k, and m[k] with respect to O -> A_{k+1}.
    """

    center: np.ndarray
    faces: list
    l: np.ndarray
    m: np.ndarray
    vertex: tuple | None = None

    def rotated(self, k: int) -> "SimpleRatioFrame":
        k %= 4
        idx = [(k + t) % 4 for t in range(4)]
        return SimpleRatioFrame(self.center, [self.faces[t] for t in idx],
                                self.l[idx], self.m[idx], self.vertex)

    def opposite_ratios(self):
        """Opposite ratio of faces[k] with respect to the shared edge
        O A_{k+1} (the edge to faces[k+1]); the class (ii) condition is
        that faces[k+1] gives the same number for that edge."""
        return np.array([(1.0 - self.m[k] * self.l[k]) / (1.0 + self.l[k]) ** 2
                         for k in range(4)])


_FRAME_RELABEL = [(0, 3, 2, 1), (3, 2, 1, 0), (2, 1, 0, 3), (1, 0, 3, 2)]


def frame_from_quads(faces, tol=None, vertex=None) -> SimpleRatioFrame:
    """Build a SimpleRatioFrame from four quads already in frame order
    (each quad (O, A_k, B_k, A_k+1) with the shared vertex first)."""
    tol = _resolve_tol(tol)
    center = faces[0].vertices[0]
    ls = np.empty(4)
    ms = np.empty(4)
    for k, fq in enumerate(faces):
        rep = check_quad(fq, tol)
        if not rep["ok"]:
            raise NetValidationError(f"frame {_face_tag(fq)} is not a valid convex quad")
        ls[k] = simple_ratio(fq, "AB", tol)
        ms[k] = simple_ratio(fq, (0, 3), tol)
        if ls[k] <= -1.0 or ms[k] <= -1.0 or ls[k] * ms[k] >= 1.0:
            raise ClassConditionError(
                f"{_face_tag(fq)} violates the convex ratio bounds "
                f"(l={ls[k]:.4g}, m={ms[k]:.4g})", face=fq.grid_index)
    return SimpleRatioFrame(center=center, faces=list(faces), l=ls, m=ms, vertex=vertex)


def local_frame(net: Net, i: int, j: int, tol=None) -> SimpleRatioFrame:
    """Frame of the four faces around interior vertex (i, j)."""
    if not (1 <= i <= net.m - 1 and 1 <= j <= net.n - 1):
        raise IndexError(
            f"vertex ({i},{j}) is not interior to an {net.m}x{net.n} net")
    raw = [net.face(i, j), net.face(i, j - 1), net.face(i - 1, j - 1), net.face(i - 1, j)]
    faces = []
    for fq, order in zip(raw, _FRAME_RELABEL):
        rq = fq.relabel(order)
        rq.grid_index = fq.grid_index
        faces.append(rq)
    return frame_from_quads(faces, tol, vertex=(i, j))


def area_identity_residual(frame: SimpleRatioFrame) -> float:
    """Check of the closed-form face area around a frame:

        Area(O A B A') / Area(O A A') = (l + m + 2) / (1 - l*m)

    for each face; returns the largest absolute deviation.
    """
    worst = 0.0
    for k, fq in enumerate(frame.faces):
        xy, _ = fq.planar_coords()
        quad_area = geo.polygon_area2(xy)
        tri_area = 0.5 * geo.cross2(xy[1] - xy[0], xy[3] - xy[0])
        lhs = quad_area / tri_area
        rhs = (frame.l[k] + frame.m[k] + 2.0) / (1.0 - frame.l[k] * frame.m[k])
        worst = max(worst, abs(lhs - rhs))
    return worst
