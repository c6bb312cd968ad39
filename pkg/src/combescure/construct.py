"""Builders for deformable nets.

quad_from_ratios is the basic inverse problem (three corners plus two
opposite ratios pin the fourth corner); everything else stacks it or the
explicit generator P_ij = a_i + sigma_i b_j into whole nets:

- build_2x2_from_opposite_faces: complete two faces meeting at one vertex
  to a 2x2 net of the requested class,
- complete_L: extend an L-shaped seed (first face row + first face column)
  to the unique net of the requested class containing it,
- gen_cone_cylinder / gen_doubled_cone_cylinder: direct generators whose
  outputs land in class (i) by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .classify import ratio_residual
from .errors import (ClassConditionError, DegenerateGeometryError,
                     NetValidationError)
from .nets import (Net, Quad, _resolve_tol, check_quad, net_from_grid,
                   validate)
from .ratios import _cycle_from, opposite_ratio, quad_from_ratios

__all__ = [
    "LShapedNet", "ConeCylinderData", "quad_from_ratios",
    "build_2x2_from_opposite_faces", "complete_L", "extract_l_shape",
    "gen_cone_cylinder", "extract_cone_cylinder_data",
    "gen_doubled_cone_cylinder", "strip_apex", "lift_planar_net",
]


@dataclass
class LShapedNet:
    """The first face row and first face column of a prospective m x n net.

    points maps (i, j) -> vertex for every index with min(i, j) <= 1; that
    is exactly the support of the faces (0, j) and (i, 0). Every such face
    must be a valid convex quad.
    """

    m: int
    n: int
    points: dict = field(repr=False)

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise NetValidationError("L-shape needs m, n >= 1")
        pts = {}
        dim = None
        for key, val in self.points.items():
            i, j = int(key[0]), int(key[1])
            p = geo.as_point(val)
            if dim is None:
                dim = p.shape[0]
            elif p.shape[0] != dim:
                raise NetValidationError("mixed point dimensions in L-shape")
            pts[(i, j)] = p
        missing = [k for k in self.required_keys(self.m, self.n) if k not in pts]
        if missing:
            raise NetValidationError(f"L-shape is missing vertices {missing[:6]}")
        self.points = pts
        self.dim = dim

    @staticmethod
    def required_keys(m: int, n: int):
        keys = []
        for i in range(m + 1):
            for j in range(n + 1):
                if min(i, j) <= 1:
                    keys.append((i, j))
        return keys

    def face(self, i: int, j: int) -> Quad:
        if not (i == 0 or j == 0) or not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexError(f"({i},{j}) is not an L-shape face")
        vs = np.stack([self.points[(i, j)], self.points[(i + 1, j)],
                       self.points[(i + 1, j + 1)], self.points[(i, j + 1)]])
        return Quad(vs, grid_index=(i, j))

    def faces(self):
        for j in range(self.n):
            yield self.face(0, j)
        for i in range(1, self.m):
            yield self.face(i, 0)

    def check(self, tol=None):
        tol = _resolve_tol(tol)
        for q in self.faces():
            rep = check_quad(q, tol)
            if not rep["ok"]:
                raise NetValidationError(
                    f"L-shape face {q.grid_index} is not a valid convex quad",
                    report=rep)


def extract_l_shape(net: Net) -> LShapedNet:
    """The L-shaped sub-collection (first face row + column) of a net."""
    pts = {(i, j): net.point(i, j)
           for (i, j) in LShapedNet.required_keys(net.m, net.n)}
    return LShapedNet(net.m, net.n, pts)


@dataclass(frozen=True)
class ConeCylinderData:
    """Generator data for P_ij = a_i + sigma_i * b_j.

    Rows are similar copies of the polyline b, scaled by sigma_i and
    translated by a_i; the strip between rows i and i+1 is a cone with
    apex strip_apex(i) when sigma changes, a cylinder otherwise.
    direction = "cols" means the same with the roles of i and j swapped.
    """

    a: np.ndarray
    sigma: np.ndarray
    b: np.ndarray
    direction: str = "rows"

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.atleast_2d(np.asarray(self.b, dtype=float))
        sig = np.asarray(self.sigma, dtype=float).reshape(-1)
        if a.shape[0] != sig.shape[0]:
            raise NetValidationError("need one sigma per a point")
        if a.shape[1] != b.shape[1]:
            raise NetValidationError("a and b have different dimensions")
        if a.shape[0] < 2 or b.shape[0] < 2:
            raise NetValidationError("need at least two rows and two columns")
        if np.any(sig == 0.0):
            raise NetValidationError("sigma entries must be nonzero")
        if self.direction not in ("rows", "cols"):
            raise NetValidationError("direction must be rows or cols")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "sigma", sig)

    @property
    def m(self):
        return self.a.shape[0] - 1

    @property
    def n(self):
        return self.b.shape[0] - 1

    @property
    def dim(self):
        return self.a.shape[1]


def strip_apex(data: ConeCylinderData, i: int) -> np.ndarray:
    """Apex of the cone strip between rows i and i+1:
    c_i = (sigma_{i+1} a_i - sigma_i a_{i+1}) / (sigma_{i+1} - sigma_i)."""
    s0, s1 = data.sigma[i], data.sigma[i + 1]
    if s1 == s0:
        raise DegenerateGeometryError(
            f"strip {i} is a cylinder (equal sigma), it has no apex")
    return (s1 * data.a[i] - s0 * data.a[i + 1]) / (s1 - s0)


def gen_cone_cylinder(data: ConeCylinderData, tol=None) -> Net:
    """The net P_ij = a_i + sigma_i b_j (transposed for direction='cols')."""
    tol = _resolve_tol(tol)
    g = data.a[:, None, :] + data.sigma[:, None, None] * data.b[None, :, :]
    net = net_from_grid(g)
    if data.direction == "cols":
        net = net.transposed()
    rep = validate(net, tol)
    if not rep.ok:
        raise NetValidationError(
            f"generator data produces invalid faces: {rep.summary()}", report=rep)
    return net


def extract_cone_cylinder_data(net: Net, tol=None,
                               residual_tol: float = 1e-8) -> ConeCylinderData:
    """Recover (a, sigma, b) with the gauge b_j = P_0j, sigma_0 = 1, a_0 = 0.

    sigma_i comes from signed ratios of corresponding parallel row edges;
    both readings are tried, and the one whose structure residual
    max |P_ij - (a_i + sigma_i b_j)| (relative to the median edge) stays
    below residual_tol wins.
    """
    tol = _resolve_tol(tol)

    def attempt(g):
        rows, cols = g.shape[0], g.shape[1]
        b = g[0].copy()
        e0 = b[1:] - b[:-1]
        med = float(np.median(np.linalg.norm(
            (g[:, 1:] - g[:, :-1]).reshape(-1, g.shape[2]), axis=-1)))
        sig = np.empty(rows)
        for i in range(rows):
            ei = g[i, 1:] - g[i, :-1]
            for k in range(cols - 1):
                if geo.parallel_residual(e0[k], ei[k]) > 1e-6:
                    return None, float("inf")
            ratios = np.einsum("kd,kd->k", ei, e0) / np.einsum("kd,kd->k", e0, e0)
            sig[i] = float(np.mean(ratios))
            if sig[i] == 0.0:
                return None, float("inf")
        a = g[:, 0] - sig[:, None] * b[0]
        recon = a[:, None, :] + sig[:, None, None] * b[None, :, :]
        resid = float(np.max(np.linalg.norm(recon - g, axis=-1))) / med
        return (a, sig, b), resid

    g = net.grid()
    rows_data, rows_resid = attempt(g)
    if rows_resid <= residual_tol:
        a, sig, b = rows_data
        return ConeCylinderData(a, sig, b, direction="rows")
    cols_data, cols_resid = attempt(np.swapaxes(g, 0, 1))
    if cols_resid <= residual_tol:
        a, sig, b = cols_data
        return ConeCylinderData(a, sig, b, direction="cols")
    raise NetValidationError(
        "net does not have cone-cylinder structure in either direction "
        f"(residuals: rows {rows_resid:.3e}, cols {cols_resid:.3e})")


def gen_doubled_cone_cylinder(seed: ConeCylinderData, odd_points=None,
                              strip_scales=None, tol=None) -> Net:
    """Interleave a second polyline into a cone-cylinder net.

    The seed generates the even columns P_{i,2j} = a_i + sigma_i b_j. One
    new point per b-edge (odd_points, default midpoints) starts the odd
    columns in row 0; each strip then carries its odd points down by the
    central similarity from its own apex, with a free ratio per strip
    (strip_scales; the default reuses the even ratio sigma_{i+1}/sigma_i,
    cylinder strips translate instead). Cross edges of every strip stay
    concurrent and skip-column edges stay parallel, which makes every
    side-by-side face pair affine symmetric: the output is class (i) by
    construction. Generic strip_scales give a net that is doubled but not
    plain cone-cylinder.
    """
    tol = _resolve_tol(tol)
    a, sig, b = seed.a, seed.sigma, seed.b
    m, n = seed.m, seed.n
    if odd_points is None:
        odd = 0.5 * (b[:-1] + b[1:])
        odd = a[0] + sig[0] * odd
    else:
        odd = np.atleast_2d(np.asarray(odd_points, dtype=float))
        if odd.shape != (n, seed.dim):
            raise NetValidationError(
                f"need {n} odd points of dimension {seed.dim}, got {odd.shape}")
    if strip_scales is None:
        scales = [None] * m
    else:
        scales = list(np.asarray(strip_scales, dtype=float))
        if len(scales) != m:
            raise NetValidationError(f"need one strip scale per strip ({m})")
    g = np.empty((m + 1, 2 * n + 1, seed.dim))
    qrow = odd.copy()
    for i in range(m + 1):
        g[i, 0::2] = a[i] + sig[i] * b
        g[i, 1::2] = qrow
        if i == m:
            break
        if sig[i + 1] == sig[i]:
            lam = 1.0 if scales[i] is None else scales[i]
            qrow = qrow + lam * (a[i + 1] - a[i])
        else:
            c = strip_apex(seed, i)
            mu = sig[i + 1] / sig[i] if scales[i] is None else scales[i]
            qrow = c + mu * (qrow - c)
    net = net_from_grid(g)
    if seed.direction == "cols":
        net = net.transposed()
    rep = validate(net, tol)
    if not rep.ok:
        raise NetValidationError(
            f"odd points / strip scales break face convexity: {rep.summary()}",
            report=rep)
    return net


def lift_planar_net(net: Net, z_row, z_col, tol=None) -> Net:
    """Lift a 2d net to a 3d net with planar faces.

    Heights are free along the first vertex row and first vertex column
    (z_row[0] and z_col[0] both name the corner and must agree); every
    other height is forced by face planarity. Simple and opposite ratios
    are affine invariants of each face, so the lift classifies exactly
    like the source.
    """
    tol = _resolve_tol(tol)
    if net.dim != 2:
        raise NetValidationError("lift_planar_net expects a 2d net")
    z_row = np.asarray(z_row, dtype=float).reshape(-1)
    z_col = np.asarray(z_col, dtype=float).reshape(-1)
    if z_row.shape[0] != net.n + 1 or z_col.shape[0] != net.m + 1:
        raise NetValidationError(
            f"need {net.n + 1} row heights and {net.m + 1} column heights")
    if z_row[0] != z_col[0]:
        raise NetValidationError("z_row[0] and z_col[0] both set the corner "
                                 "height and must be equal")
    g = net.grid()
    z = np.empty((net.m + 1, net.n + 1))
    z[0, :] = z_row
    z[:, 0] = z_col
    for i in range(net.m):
        for j in range(net.n):
            e1, e2 = g[i + 1, j] - g[i, j], g[i, j + 1] - g[i, j]
            gram = np.array([[e1 @ e1, e1 @ e2], [e2 @ e1, e2 @ e2]])
            w = g[i + 1, j + 1] - g[i, j]
            pq = np.linalg.solve(gram, np.array([w @ e1, w @ e2]))
            z[i + 1, j + 1] = (z[i, j] + pq[0] * (z[i + 1, j] - z[i, j])
                               + pq[1] * (z[i, j + 1] - z[i, j]))
    return net_from_grid(np.concatenate([g, z[:, :, None]], axis=2))


def _shared_vertex(q1: Quad, q2: Quad, tol):
    med = float(np.median(np.concatenate([q1.edge_lengths(), q2.edge_lengths()])))
    hits = [(i, j) for i in range(4) for j in range(4)
            if geo.norm(q1.vertices[i] - q2.vertices[j]) <= 1e-9 * med]
    if len(hits) != 1:
        raise NetValidationError(
            f"faces must share exactly one vertex (found {len(hits)} coincidences)")
    return hits[0]


def build_2x2_from_opposite_faces(f1: Quad, f3: Quad, klass: str,
                                  variant: str = "rows", tol=None) -> Net:
    """Complete two faces that meet at a single vertex to a 2x2 net.

    The shared vertex becomes the center P_11; walking each face from it
    in its stored order gives (O, A0, B0, A1) and (O, A2, B2, A3), and the
    two missing corners are filled per class: 'ii' prescribes the opposite
    ratios across the four interior edges (unique completion), 'i' applies
    the affine symmetry mapping one known face onto the missing neighbour
    (variant 'rows' pairs across the edges O-A1 / O-A3, 'cols' across
    O-A2 / O-A0; these are the at most two class-(i) completions).
    """
    tol = _resolve_tol(tol)
    if klass not in ("i", "ii"):
        raise ValueError("klass must be 'i' or 'ii'")
    i1, i3 = _shared_vertex(f1, f3, tol)
    q1 = f1.relabel(_cycle_from(i1, (i1 + 1) % 4))
    q3 = f3.relabel(_cycle_from(i3, (i3 + 1) % 4))
    o = q1.vertices[0]
    a0, b0, a1 = q1.vertices[1], q1.vertices[2], q1.vertices[3]
    a2, b2, a3 = q3.vertices[1], q3.vertices[2], q3.vertices[3]
    if klass == "ii":
        # unknown faces (O,A1,B1,A2) and (O,A3,B3,A0), each pinned by the
        # ratios its known neighbours show across the shared interior edges
        r_oa1 = opposite_ratio(q1, (0, 3), tol)
        r_oa0 = opposite_ratio(q1, (0, 1), tol)
        r_oa2 = opposite_ratio(q3, (0, 1), tol)
        r_oa3 = opposite_ratio(q3, (0, 3), tol)
        b1 = quad_from_ratios(a2, o, a1, r_oa2, r_oa1, tol).vertices[3]
        b3 = quad_from_ratios(a0, o, a3, r_oa0, r_oa3, tol).vertices[3]
    else:
        if variant == "rows":
            # (O,A1,B1,A2) affine symmetric to q1 across O-A1, and
            # (O,A3,B3,A0) to q3 across O-A3
            b1 = geo.affine_map_from_triples((o, a1, a0), (o, a1, a2))(b0)
            b3 = geo.affine_map_from_triples((o, a3, a2), (o, a3, a0))(b2)
        elif variant == "cols":
            b1 = geo.affine_map_from_triples((o, a2, a3), (o, a2, a1))(b2)
            b3 = geo.affine_map_from_triples((o, a0, a1), (o, a0, a3))(b0)
        else:
            raise ValueError("variant must be 'rows' or 'cols'")
    g = np.stack([
        np.stack([b2, a3, b3]),
        np.stack([a2, o, a0]),
        np.stack([b1, a1, b0]),
    ])
    net = net_from_grid(g)
    rep = validate(net, tol)
    if not rep.ok:
        raise NetValidationError(
            f"no convex completion for these faces: {rep.summary()}", report=rep)
    return net


def _table_entry_h(face: Quad, fi: int, tol) -> float:
    return opposite_ratio(face, "DA" if fi % 2 == 0 else "BC", tol)


def _table_entry_v(face: Quad, fj: int, tol) -> float:
    return opposite_ratio(face, "AB" if fj % 2 == 0 else "CD", tol)


def complete_L(l: LShapedNet, klass: str, tol=None,
               class_tol: float = 1e-8) -> Net:
    """The unique net of the given class containing the L-shape.

    The L determines the first row and first column of both opposite-ratio
    tables; the class rule extends them (class ii: H constant down columns
    and V constant along rows; class i: both tables constant along one
    direction, chosen by whichever the L's own faces satisfy better), and
    one quad_from_ratios sweep fills the interior. The L's own vertices
    are copied bit-exactly, so equal inputs give bit-identical outputs.
    """
    tol = _resolve_tol(tol)
    if klass not in ("i", "ii"):
        raise ValueError("klass must be 'i' or 'ii'")
    l.check(tol)
    m, n = l.m, l.n
    h_row0 = [_table_entry_h(l.face(0, fj), 0, tol) for fj in range(n)]
    v_row0 = [_table_entry_v(l.face(0, fj), fj, tol) for fj in range(n)]
    h_col0 = [_table_entry_h(l.face(fi, 0), fi, tol) for fi in range(m)]
    v_col0 = [_table_entry_v(l.face(fi, 0), 0, tol) for fi in range(m)]

    def check_const(vals, faces, label):
        for val, fc in zip(vals, faces):
            r = ratio_residual(val, vals[0])
            if r > class_tol:
                raise ClassConditionError(
                    f"face {fc} breaks the class-{klass} condition on the "
                    f"L-shape ({label} ratio residual {r:.3e})",
                    face=fc, residual=r)

    row_faces = [(0, fj) for fj in range(n)]
    col_faces = [(fi, 0) for fi in range(m)]
    if klass == "ii":
        check_const(h_col0, col_faces, "row-to-row")
        check_const(v_row0, row_faces, "column-to-column")

        def href(fi, fj):
            return h_row0[fj]

        def vref(fi, fj):
            return v_col0[fi]
    else:
        res_rows = max(max(ratio_residual(x, h_row0[0]) for x in h_row0),
                       max(ratio_residual(x, v_row0[0]) for x in v_row0))
        res_cols = max(max(ratio_residual(x, h_col0[0]) for x in h_col0),
                       max(ratio_residual(x, v_col0[0]) for x in v_col0))
        if min(res_rows, res_cols) > class_tol:
            raise ClassConditionError(
                "L-shape satisfies neither class-(i) variant (residuals: "
                f"along rows {res_rows:.3e}, along columns {res_cols:.3e})",
                residual=min(res_rows, res_cols))
        if res_rows <= res_cols:
            # tables constant along rows: extend from the first column faces
            def href(fi, fj):
                return h_col0[fi]

            def vref(fi, fj):
                return v_col0[fi]
        else:
            def href(fi, fj):
                return h_row0[fj]

            def vref(fi, fj):
                return v_row0[fj]

    g = np.full((m + 1, n + 1, l.dim), np.nan)
    for (i, j), p in l.points.items():
        g[i, j] = p
    for fi in range(1, m):
        for fj in range(1, n):
            r_ab = vref(fi, fj) if fj % 2 == 0 else 1.0 / vref(fi, fj)
            r_bc = href(fi, fj) if fi % 2 == 0 else 1.0 / href(fi, fj)
            try:
                built = quad_from_ratios(g[fi + 1, fj], g[fi, fj], g[fi, fj + 1],
                                         r_ab, r_bc, tol)
            except (DegenerateGeometryError, NetValidationError) as exc:
                raise DegenerateGeometryError(
                    f"completion failed at face ({fi},{fj}): {exc}") from exc
            g[fi + 1, fj + 1] = built.vertices[3]
            rep = check_quad(Quad(np.stack([g[fi, fj], g[fi + 1, fj],
                                            g[fi + 1, fj + 1], g[fi, fj + 1]]),
                                  grid_index=(fi, fj)), tol)
            if not rep["ok"]:
                raise DegenerateGeometryError(
                    f"face ({fi},{fj}) lost convexity during completion")
    return net_from_grid(g)
