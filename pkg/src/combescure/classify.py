"""Deformability classification of quad nets.

An m x n net sits inside a nontrivial continuous family of parallel nets
with equal face areas exactly when one of these holds:

(i)  every 1x2 sub-net (rows variant) or every 2x1 sub-net (cols variant)
     consists of two affine symmetric faces, or
(ii) adjacent faces have equal opposite ratios with respect to every
     interior edge.

The flags are decided through simple-ratio conditions (class i) and
opposite-ratio equality (class ii); residuals are reported so callers can
see how close a near-miss was.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import DegenerateGeometryError, NetValidationError
from .nets import Net, Quad, _resolve_tol, validate
from .ratios import diagonal_intersection, opposite_ratio, simple_ratio


def ratio_residual(r1: float, r2: float) -> float:
    """Relative disagreement of two ratio values."""
    return abs(r1 - r2) / max(1.0, abs(r1), abs(r2))


class _FaceCache:
    """Per-face planar projection with memoised ratio lookups.

    Everything downstream is a planar affine quantity, so each face is
    projected once and all ratios are evaluated on the 2d copy.
    """

    def __init__(self, net: Net, tol):
        self.tol = tol
        self.net = net
        self.flat = {}
        self.fg = {}
        for q in net.faces():
            q2 = Quad(q.planar_coords()[0])
            q2.grid_index = q.grid_index
            self.flat[q.grid_index] = q2
        self._sr = {}
        self._opp = {}

    def sr(self, fi, fj, side):
        key = (fi, fj, side)
        if key not in self._sr:
            self._sr[key] = simple_ratio(self.flat[(fi, fj)], side, self.tol)
        return self._sr[key]

    def opp(self, fi, fj, side):
        key = (fi, fj, side)
        if key not in self._opp:
            self._opp[key] = opposite_ratio(self.flat[(fi, fj)], side, self.tol)
        return self._opp[key]


@dataclass
class ClassVerdict:
    """Outcome of classify(). deformable is the disjunction of the flags."""

    class_i_rows: bool
    class_i_cols: bool
    class_ii: bool
    deformable: bool
    residuals: dict = field(default_factory=dict)
    worst_pairs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        vals = [v for v in self.residuals.values() if v is not None]
        return max(vals) if vals else 0.0

    def as_dict(self) -> dict:
        return {
            "class_i_rows": self.class_i_rows,
            "class_i_cols": self.class_i_cols,
            "class_ii": self.class_ii,
            "deformable": self.deformable,
            "max_residual": self.max_residual,
            "residuals": {k: v for k, v in self.residuals.items()},
            "notes": list(self.notes),
        }


def _class_i_rows_residual(cache: _FaceCache, net: Net):
    """Simple-ratio conditions for affine symmetry of each 1x2 sub-net.

    Faces (i,j) and (i,j+1) share the edge from P(i,j+1) to P(i+1,j+1).
    Taking O = P(i,j+1), the pair is affine symmetric iff the simple
    ratios of both faces with respect to the shared edge (from O) agree
    and the ratios with respect to the two outer edges at O agree.
    """
    worst = 0.0
    worst_pair = None
    for i in range(net.m):
        for j in range(net.n - 1):
            r1 = ratio_residual(cache.sr(i, j, (3, 2)), cache.sr(i, j + 1, (0, 1)))
            r2 = ratio_residual(cache.sr(i, j, (3, 0)), cache.sr(i, j + 1, (0, 3)))
            r = max(r1, r2)
            if r > worst:
                worst, worst_pair = r, ((i, j), (i, j + 1))
    return worst, worst_pair


def _class_i_cols_residual(cache: _FaceCache, net: Net):
    """Same as the rows variant for each 2x1 sub-net, O = P(i+1,j)."""
    worst = 0.0
    worst_pair = None
    for i in range(net.m - 1):
        for j in range(net.n):
            r1 = ratio_residual(cache.sr(i, j, (1, 2)), cache.sr(i + 1, j, (0, 3)))
            r2 = ratio_residual(cache.sr(i, j, (1, 0)), cache.sr(i + 1, j, (0, 1)))
            r = max(r1, r2)
            if r > worst:
                worst, worst_pair = r, ((i, j), (i + 1, j))
    return worst, worst_pair


def _class_ii_residual(cache: _FaceCache, net: Net):
    """Opposite-ratio equality across every interior edge."""
    worst = 0.0
    worst_pair = None
    for i in range(net.m):
        for j in range(net.n - 1):
            r = ratio_residual(cache.opp(i, j, "CD"), cache.opp(i, j + 1, "AB"))
            if r > worst:
                worst, worst_pair = r, ((i, j), (i, j + 1))
    for i in range(net.m - 1):
        for j in range(net.n):
            r = ratio_residual(cache.opp(i, j, "BC"), cache.opp(i + 1, j, "DA"))
            if r > worst:
                worst, worst_pair = r, ((i, j), (i + 1, j))
    return worst, worst_pair


def classify(net: Net, class_tol: float = 1e-8, tol=None) -> ClassVerdict:
    """Class membership and deformability verdict for a net.

    class_tol bounds the acceptable relative residual in the defining
    ratio equalities; tol carries the geometric thresholds.
    """
    tol = _resolve_tol(tol)
    rep = validate(net, tol)
    if not rep.ok:
        raise NetValidationError(f"cannot classify an invalid net: {rep.summary()}", rep)
    cache = _FaceCache(net, tol)
    residuals = {}
    worst_pairs = {}
    notes = []

    if net.n >= 2:
        r, p = _class_i_rows_residual(cache, net)
        residuals["class_i_rows"] = r
        worst_pairs["class_i_rows"] = p
        rows = r <= class_tol
    else:
        residuals["class_i_rows"] = None
        rows = True
        notes.append("class_i_rows is vacuous for n=1 (no 1x2 sub-nets)")
    if net.m >= 2:
        r, p = _class_i_cols_residual(cache, net)
        residuals["class_i_cols"] = r
        worst_pairs["class_i_cols"] = p
        cols = r <= class_tol
    else:
        residuals["class_i_cols"] = None
        cols = True
        notes.append("class_i_cols is vacuous for m=1 (no 2x1 sub-nets)")
    if net.m >= 2 or net.n >= 2:
        r, p = _class_ii_residual(cache, net)
        residuals["class_ii"] = r
        worst_pairs["class_ii"] = p
        cii = r <= class_tol
    else:
        residuals["class_ii"] = None
        cii = True
        notes.append("single face: every condition is vacuous, net is deformable")

    return ClassVerdict(class_i_rows=rows, class_i_cols=cols, class_ii=cii,
                        deformable=rows or cols or cii,
                        residuals=residuals, worst_pairs=worst_pairs, notes=notes)


def ratio_tables(net: Net, tol=None):
    """The two m x n opposite-ratio tables (H, V) of a net.

    H[i][j] is the opposite ratio of face (i,j) with respect to its side
    on the even vertex row (row i when i is even, else row i+1); V[i][j]
    likewise for the even vertex column. With this parity convention:

    * class (ii) <=> H has equal rows and V has equal columns;
    * class (i)  <=> both tables have equal rows (cols variant) or both
      have equal columns (rows variant).
    """
    tol = _resolve_tol(tol)
    h = np.empty((net.m, net.n))
    v = np.empty((net.m, net.n))
    for i in range(net.m):
        for j in range(net.n):
            q = net.face(i, j)
            h[i, j] = opposite_ratio(q, "DA" if i % 2 == 0 else "BC", tol)
            v[i, j] = opposite_ratio(q, "AB" if j % 2 == 0 else "CD", tol)
    return h, v


def koenigs_residual(net: Net, tol=None) -> float:
    """Worst deviation from 1 of the diagonal-intersection products.

    For each 2x2 sub-net with central vertex Z, each face contributes the
    ratio of the two pieces its Q point cuts from the diagonal that does
    not pass through Z; the four ratios chained around Z multiply to 1 on
    a Koenigs net.
    """
    tol = _resolve_tol(tol)
    if net.m < 2 or net.n < 2:
        return 0.0
    g = net.grid()
    qpt = {}
    for q in net.faces():
        fg = diagonal_intersection(q, tol)
        qpt[q.grid_index] = fg.q
    worst = 0.0
    for p in range(net.m - 1):
        for r in range(net.n - 1):
            q00 = qpt[(p, r)]
            q01 = qpt[(p, r + 1)]
            q11 = qpt[(p + 1, r + 1)]
            q10 = qpt[(p + 1, r)]
            prod = (geo.norm(g[p + 1, r] - q00) / geo.norm(q00 - g[p, r + 1])
                    * geo.norm(g[p, r + 1] - q01) / geo.norm(q01 - g[p + 1, r + 2])
                    * geo.norm(g[p + 1, r + 2] - q11) / geo.norm(q11 - g[p + 2, r + 1])
                    * geo.norm(g[p + 2, r + 1] - q10) / geo.norm(q10 - g[p + 1, r]))
            worst = max(worst, abs(prod - 1.0))
    return worst


def is_koenigs(net: Net, tol=None, product_tol: float = 1e-8) -> bool:
    return koenigs_residual(net, tol) <= product_tol


def _strip_cross_lines(g, i):
    pts = g[i]
    dirs = g[i + 1] - g[i]
    return pts, dirs


def _concurrency_point(pts, dirs):
    """Least-squares common point of the lines (pts[k], dirs[k])."""
    dim = pts.shape[1]
    a = np.zeros((dim, dim))
    b = np.zeros(dim)
    for p, d in zip(pts, dirs):
        u = d / np.linalg.norm(d)
        proj = np.eye(dim) - np.outer(u, u)
        a += proj
        b += proj @ p
    x = np.linalg.lstsq(a, b, rcond=None)[0]
    worst = 0.0
    for p, d in zip(pts, dirs):
        u = d / np.linalg.norm(d)
        w = x - p
        worst = max(worst, geo.norm(w - (w @ u) * u))
    return x, worst


def _median_edge(net: Net) -> float:
    g = net.grid()
    e1 = np.linalg.norm(g[1:] - g[:-1], axis=-1).ravel()
    e2 = np.linalg.norm(g[:, 1:] - g[:, :-1], axis=-1).ravel()
    return float(np.median(np.concatenate([e1, e2])))


@dataclass
class ConeNetReport:
    """Strongest cone-like structure in each orientation.

    kind_rows describes the reading P(i,j) = a_i + sigma_i * b_j (rows are
    similar copies of one polyline, strips between them are cones);
    kind_cols is the same for the transposed net. Values: none, cone,
    cone_cylinder, doubled_cone_cylinder. The raw condition flags are
    kept so callers can see why a kind was chosen.
    """

    kind_rows: str
    kind_cols: str
    flags_rows: dict
    flags_cols: dict


def _cone_flags(net: Net, tol) -> dict:
    g = net.grid()
    med = _median_edge(net)
    cone = True
    cylindrical = True
    for i in range(net.m):
        pts, dirs = _strip_cross_lines(g, i)
        par = all(geo.parallel_residual(dirs[0], dirs[k]) <= tol.eps_parallel
                  for k in range(1, len(dirs)))
        if par:
            continue
        cylindrical = False
        _, resid = _concurrency_point(pts, dirs)
        if resid / med > tol.eps_concurrency:
            cone = False
            break
    direct = True
    for i in range(net.m):
        for j in range(net.n):
            if geo.parallel_residual(g[i, j + 1] - g[i, j],
                                     g[i + 1, j + 1] - g[i + 1, j]) > tol.eps_parallel:
                direct = False
                break
        if not direct:
            break
    doubled = net.n >= 2
    if doubled:
        for i in range(net.m):
            for j in range(net.n - 1):
                u = g[i, j + 2] - g[i, j]
                w = g[i + 1, j + 2] - g[i + 1, j]
                if geo.norm(u) <= tol.eps_parallel * med or \
                        geo.parallel_residual(u, w) > tol.eps_parallel:
                    doubled = False
                    break
            if not doubled:
                break
    return {"cone": cone, "cylindrical": cone and cylindrical,
            "direct_parallels": direct, "skip_parallels": doubled}


def _kind_from_flags(f: dict) -> str:
    if not f["cone"]:
        return "none"
    # A doubled cone-cylinder built from two generic interleaved nets also
    # satisfies the skip-parallel conditions when it is a plain
    # cone-cylinder net, so report the finer doubled structure only when
    # the direct parallels fail or the strips are all cylindrical.
    if f["skip_parallels"] and (f["cylindrical"] or not f["direct_parallels"]):
        return "doubled_cone_cylinder"
    if f["direct_parallels"]:
        return "cone_cylinder"
    if f["skip_parallels"]:
        return "doubled_cone_cylinder"
    return "cone"


def cone_net_kind(net: Net, tol=None) -> ConeNetReport:
    """Detect cone, cone-cylinder, or doubled cone-cylinder structure.

    Both orientations are reported: kind_rows for strips between
    consecutive vertex rows, kind_cols for the transposed reading.
    """
    tol = _resolve_tol(tol)
    fr = _cone_flags(net, tol)
    fc = _cone_flags(net.transposed(), tol)
    return ConeNetReport(kind_rows=_kind_from_flags(fr), kind_cols=_kind_from_flags(fc),
                         flags_rows=fr, flags_cols=fc)


def _zigzag_entry(vs1, vs2, tol, med):
    """Relation of the far intersection points of two side-sharing quads.

    vs1, vs2 are the quads relabelled (A, B, C, D) / (A, B, C', D') along
    the shared side. Returns 'parallel', 'opposite' or 'same'.
    """
    a, b, c, d = vs1
    a2, b2, c2, d2 = vs2
    out = []
    for (bb, cc, aa, dd) in ((b, c, a, d), (b2, c2, a2, d2)):
        if geo.parallel_residual(cc - bb, dd - aa) <= tol.eps_parallel:
            out.append(None)
            continue
        x, s, r, _ = geo.intersect_lines(bb, cc - bb, aa, dd - aa, tol.eps_parallel)
        if max(abs(s), abs(r)) * geo.norm(cc - bb) > med / tol.eps_concurrency:
            out.append(None)
            continue
        out.append(float(geo.cross2(b - a, x - a)))
    if out[0] is None or out[1] is None:
        return "parallel"
    return "opposite" if out[0] * out[1] < 0.0 else "same"


def zigzag_diagnostic(net: Net, tol=None) -> dict:
    """Where the opposite-side intersection points fall for adjacent faces.

    For each interior edge the two neighbouring faces ABCD and ABC'D'
    (shared side AB) define intersection points S = BC ^ AD and
    S' = BC' ^ AD'. When the opposite ratios with respect to AB agree, S
    and S' lie on opposite sides of the line AB (or both pairs of lines
    are parallel), which forces the zig-zag look of deformable nets.
    Planar nets only.
    """
    tol = _resolve_tol(tol)
    if net.dim != 2:
        raise NetValidationError("zigzag diagnostic expects a planar net")
    med = _median_edge(net)
    g = net.grid()
    report = {"row_pairs": [], "col_pairs": []}
    for i in range(net.m):
        for j in range(net.n - 1):
            # shared edge P(i,j+1) -- P(i+1,j+1), O at the top
            vs1 = [g[i, j + 1], g[i + 1, j + 1], g[i + 1, j], g[i, j]]
            vs2 = [g[i, j + 1], g[i + 1, j + 1], g[i + 1, j + 2], g[i, j + 2]]
            rel = _zigzag_entry(vs1, vs2, tol, med)
            report["row_pairs"].append({"faces": [(i, j), (i, j + 1)], "relation": rel})
    for i in range(net.m - 1):
        for j in range(net.n):
            vs1 = [g[i + 1, j], g[i + 1, j + 1], g[i, j + 1], g[i, j]]
            vs2 = [g[i + 1, j], g[i + 1, j + 1], g[i + 2, j + 1], g[i + 2, j]]
            rel = _zigzag_entry(vs1, vs2, tol, med)
            report["col_pairs"].append({"faces": [(i, j), (i + 1, j)], "relation": rel})
    for key in ("row_pairs", "col_pairs"):
        rels = [e["relation"] for e in report[key]]
        report[key.replace("_pairs", "_all_alternating")] = all(
            r in ("opposite", "parallel") for r in rels)
    return report
