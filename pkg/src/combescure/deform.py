"""Area-preserving deformations.

The engine room: scaling the two edges at a corner of a convex quad by x
and y keeps its area exactly when

    P(x, y) = l x^2 + 2 x y + m y^2 - (l + m + 2) = 0,

where l, m are the simple ratios with respect to the two edges. Every
family in this module is built from solutions of such quadratics, or from
the two global constructions (Christoffel dual pairs, cone-cylinder
telescoping) that solve them all at once.

Root selection: y is always evaluated as

    y = C / (x + sqrt(x^2 + m C)),      C = (l + m + 2) - l x^2,

which is the quadratic root continuous from the identity (x=1 -> y=1),
written so the m -> 0 limit y = C/(2x) is taken automatically and no
cancellation occurs for small m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .classify import classify, ratio_residual
from .construct import ConeCylinderData, gen_cone_cylinder
from .errors import (AdmissibleRangeError, ClassConditionError,
                     DegenerateGeometryError, NetValidationError,
                     NotDeformableError)
from .nets import (Net, Quad, _resolve_tol, _side_indices,
                   mixed_area, net_from_grid, oriented_area, quad_normal)
from .ratios import (SimpleRatioFrame, _cycle_from, diagonal_intersection,
                     local_frame, simple_ratio)


@dataclass(frozen=True)
class SystemPolynomial:
    """P(x, y) = l x^2 + 2 x y + m y^2 - (l + m + 2).

    The coefficient bounds l > -1, m > -1, l*m < 1 hold for every convex
    quad and guarantee a positive discriminant around the identity.
    """

    l: float
    m: float

    def __post_init__(self):
        if self.l <= -1.0 or self.m <= -1.0 or self.l * self.m >= 1.0:
            raise ClassConditionError(
                f"coefficients l={self.l:.4g}, m={self.m:.4g} violate the "
                "convexity bounds (l > -1, m > -1, lm < 1)")

    def __call__(self, x: float, y: float) -> float:
        return self.l * x * x + 2.0 * x * y + self.m * y * y - (self.l + self.m + 2.0)

    def solve_y(self, x: float) -> float:
        """The root of P(x, .) = 0 on the branch through (1, 1)."""
        if x <= 0.0:
            raise AdmissibleRangeError(f"edge scale must stay positive, got x={x:.4g}")
        if x == 1.0:
            return 1.0
        c = (self.l + self.m + 2.0) - self.l * x * x
        disc = x * x + self.m * c
        if disc < 0.0:
            lo, hi = self.admissible_interval()
            raise AdmissibleRangeError(
                f"x={x:.6g} leaves the admissible scale interval "
                f"[{lo:.6g}, {hi if math.isfinite(hi) else float('inf'):.6g}]",
                interval=(lo, hi))
        y = c / (x + math.sqrt(disc))
        if y <= 0.0:
            lo, hi = self.admissible_interval()
            raise AdmissibleRangeError(
                f"x={x:.6g} forces a nonpositive companion scale (y={y:.4g})",
                interval=(lo, hi))
        return y

    def admissible_interval(self):
        """The x > 0 range where the discriminant stays nonnegative and
        the companion scale stays positive."""
        lo = 0.0
        hi = float("inf")
        mc0 = self.m * (self.l + self.m + 2.0)
        denom = 1.0 - self.l * self.m
        if mc0 < 0.0:
            lo = math.sqrt(-mc0 / denom)
        if self.l > 0.0:
            # y > 0 needs C > 0, i.e. x^2 < (l+m+2)/l
            hi = math.sqrt((self.l + self.m + 2.0) / self.l)
        return lo, hi


def deform_1x1(q: Quad, side, new_a, new_b, tol=None) -> Quad:
    """The unique area-preserving parallel copy of q realizing the given
    side by the segment new_a -> new_b.

    side names which side of q the segment replaces; the segment must be
    parallel to it (same direction). The remaining vertices follow from
    the quadratic and the two parallelism constraints.
    """
    tol = _resolve_tol(tol)
    i0, i1 = _side_indices(side)
    order = _cycle_from(i0, i1)
    v = q.vertices[order]  # v0 -> v1 is the side being prescribed
    new_a = geo.as_point(new_a)
    new_b = geo.as_point(new_b)
    old = v[1] - v[0]
    new = new_b - new_a
    if not geo.same_direction(old, new, tol.eps_parallel):
        raise DegenerateGeometryError(
            "replacement segment is not parallel (same direction) to the chosen side")
    x = geo.norm(new) / geo.norm(old)
    rq = Quad(v)
    l = simple_ratio(rq, (0, 1), tol)
    m = simple_ratio(rq, (0, 3), tol)
    y = SystemPolynomial(l, m).solve_y(x)
    w = np.empty_like(v)
    w[0] = new_a
    w[1] = new_b
    w[3] = new_a + y * (v[3] - v[0])
    w[2], _, _, gap = geo.intersect_lines(w[1], v[2] - v[1], w[3], v[2] - v[3],
                                          tol.eps_parallel)
    scale = float(np.max(q.edge_lengths()))
    if gap > tol.eps_planar * scale * 10.0:
        raise NotDeformableError(
            f"forced corner is off-plane by {gap:.3e} (relative to edge {scale:.3e})",
            residual=gap / scale)
    if (w[2] - w[1]) @ (v[2] - v[1]) <= 0.0 or (w[2] - w[3]) @ (v[2] - v[3]) <= 0.0:
        raise AdmissibleRangeError(
            "an edge of the deformed face collapses and reverses direction")
    out = np.empty_like(v)
    for pos, orig in enumerate(order):
        out[orig] = w[pos]
    res = Quad(out, grid_index=q.grid_index)
    a0 = oriented_area(q, tol=tol)
    a1 = oriented_area(res, normal=quad_normal(q) if q.dim == 3 else None, tol=tol)
    rel = abs(a1 - a0) / abs(a0)
    if rel > 100 * tol.eps_area:
        raise NotDeformableError(
            f"area slipped by {rel:.3e} during the 1x1 deformation", residual=rel)
    return res


def _closed_form_assemble(frame: SimpleRatioFrame, scales, tol) -> Net:
    """2x2 net whose interior edges O A_k are scaled by scales[k]."""
    o = frame.center
    a_pts = [fq.vertices[1] for fq in frame.faces]
    b_pts = [fq.vertices[2] for fq in frame.faces]
    a_new = [o + scales[k] * (a_pts[k] - o) for k in range(4)]
    b_new = []
    for k in range(4):
        d1 = b_pts[k] - a_pts[k]
        d2 = b_pts[k] - a_pts[(k + 1) % 4]
        x, _, _, gap = geo.intersect_lines(a_new[k], d1, a_new[(k + 1) % 4], d2,
                                           tol.eps_parallel)
        b_new.append(x)
    g = np.stack([
        np.stack([b_new[2], a_new[3], b_new[3]]),
        np.stack([a_new[2], o, a_new[0]]),
        np.stack([b_new[1], a_new[1], b_new[0]]),
    ])
    return net_from_grid(g)


class ClosedForm2x2:
    """Explicit scale functions t -> (x_0..x_3) for a deformable 2x2 frame.

    x(t)[k] scales the interior edge O A_k; polynomials[k] is the quadratic
    P_k tying x_k and x_{k+1}. net_at(t) rebuilds the full 2x2 net.
    """

    def __init__(self, frame, kind, xfun, polynomials, params=None, tol=None):
        self.frame = frame
        self.kind = kind
        self._xfun = xfun
        self.polynomials = polynomials
        self.params = params
        self._tol = _resolve_tol(tol)

    def x(self, t: float) -> np.ndarray:
        return self._xfun(float(t))

    def residuals(self, t: float) -> np.ndarray:
        xs = self.x(t)
        return np.array([abs(self.polynomials[k](xs[k], xs[(k + 1) % 4]))
                         for k in range(4)])

    def net_at(self, t: float) -> Net:
        return _closed_form_assemble(self.frame, self.x(t), self._tol)


def family_2x2_class_i(frame: SimpleRatioFrame, class_tol: float = 1e-8,
                       tol=None) -> ClosedForm2x2:
    """Deformation scales for a 2x2 frame whose face pairs (f0,f1) and
    (f2,f3) are affine symmetric (l0=m1, l1=m0, l2=m3, l3=m2).

    x_0 = x_2 = 1+t; x_1 and x_3 solve their quadratics on the identity
    branch. The remaining two quadratics vanish automatically because the
    symmetry makes them mirror images of the solved ones.
    """
    tol = _resolve_tol(tol)
    l, m = frame.l, frame.m
    worst = max(ratio_residual(l[0], m[1]), ratio_residual(l[1], m[0]),
                ratio_residual(l[2], m[3]), ratio_residual(l[3], m[2]))
    if worst > class_tol:
        raise ClassConditionError(
            f"frame is not class (i) for the (f0,f1),(f2,f3) pairing "
            f"(residual {worst:.3e})", residual=worst)
    polys = [SystemPolynomial(l[k], m[k]) for k in range(4)]

    def xfun(t: float) -> np.ndarray:
        s = 1.0 + t
        return np.array([s, polys[0].solve_y(s), s, polys[2].solve_y(s)])

    return ClosedForm2x2(frame, "class_i", xfun, polys, tol=tol)


@dataclass(frozen=True)
class ClassIIParams:
    """The four positive parameters k_0..k_3 of a class-(ii) 2x2 frame;
    the opposite ratio across the interior edge O A_{k+1} is 1/k_{k+1}^2."""

    k: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.shape != (4,) or np.any(k <= 0.0):
            raise ClassConditionError("class (ii) parameters must be 4 positive reals")
        object.__setattr__(self, "k", k)


def family_2x2_class_ii(frame: SimpleRatioFrame, class_tol: float = 1e-8,
                        tol=None) -> ClosedForm2x2:
    """Deformation scales for a class-(ii) 2x2 frame.

    The opposite ratios across the four interior edges determine
    parameters k_0..k_3 > 0; the scale functions are rational in k and t,
    with even and odd edges trading the roles of 1-k and 1+k.
    """
    tol = _resolve_tol(tol)
    l, m = frame.l, frame.m
    shared_from_lower = frame.opposite_ratios()
    shared_from_upper = np.array([(1.0 - m[k] * l[k]) / (1.0 + m[k]) ** 2
                                  for k in range(4)])
    worst = max(ratio_residual(shared_from_lower[k], shared_from_upper[(k + 1) % 4])
                for k in range(4))
    if worst > class_tol:
        raise ClassConditionError(
            f"opposite ratios disagree across the interior edges "
            f"(residual {worst:.3e})", residual=worst)
    if np.any(shared_from_lower <= 0.0):
        raise ClassConditionError("nonpositive opposite ratio")
    karr = np.empty(4)
    for kidx in range(4):
        karr[(kidx + 1) % 4] = 1.0 / math.sqrt(shared_from_lower[kidx])
    params = ClassIIParams(karr)
    polys = [SystemPolynomial(l[k], m[k]) for k in range(4)]

    def xfun(t: float) -> np.ndarray:
        s = 1.0 + t
        if s <= 0.0:
            raise AdmissibleRangeError(f"t={t:.4g} collapses the seed edge")
        out = np.empty(4)
        for kk in range(4):
            sign = -1.0 if kk % 2 == 0 else 1.0
            out[kk] = (s * s * (1.0 + sign * karr[kk]) + 1.0 - sign * karr[kk]) / (2.0 * s)
        return out

    return ClosedForm2x2(frame, "class_ii", xfun, polys, params=params, tol=tol)


def recovered_frame_ratios(params: ClassIIParams) -> tuple:
    """The (l, m) arrays a class-(ii) frame must have, given its k parameters."""
    k = params.k
    l = np.empty(4)
    m = np.empty(4)
    for f in range(4):
        kn = k[(f + 1) % 4]
        denom = 1.0 + k[f] * kn
        l[f] = (kn * kn - 1.0) / denom
        m[f] = (k[f] * k[f] - 1.0) / denom
    return l, m


def _default_seed_scale(t: float) -> float:
    return 1.0 + t


def _refine_member(g, out, tol):
    """Snap a swept member grid back onto the parallel-net constraints.

    The sweep chains local constructions, so roundoff piles up along long
    grids and explodes on nearly degenerate faces (the forced corner is a
    1/sin amplifier there). Rewriting the member as one edge scale per
    base edge turns the face closures into linear equations and the face
    areas into quadratics; a couple of Gauss-Newton steps then land on the
    true member to machine precision and the vertices are reintegrated
    along exact base directions. Skipped for huge grids where the dense
    solve would not pay off.
    """
    mm, nn = g.shape[0] - 1, g.shape[1] - 1
    if mm * nn > 2500:
        return out
    dim = g.shape[2]
    r0 = g[:, 1:] - g[:, :-1]          # row edges, (mm+1, nn, dim)
    c0 = g[1:, :] - g[:-1, :]          # column edges, (mm, nn+1, dim)
    u = np.sum((out[:, 1:] - out[:, :-1]) * r0, axis=2) / np.sum(r0 * r0, axis=2)
    w = np.sum((out[1:, :] - out[:-1, :]) * c0, axis=2) / np.sum(c0 * c0, axis=2)
    nu, nw = u.size, w.size
    uid = np.arange(nu).reshape(u.shape)
    wid = nu + np.arange(nw).reshape(w.shape)
    if dim == 3:
        nrm = np.cross(r0[:-1], c0[:, :-1])
        nrm /= np.linalg.norm(nrm, axis=2, keepdims=True)

    def k(a, b, i, j):
        if dim == 2:
            return a[0] * b[1] - a[1] * b[0]
        return float(np.cross(a, b) @ nrm[i, j])

    base_area = np.empty((mm, nn))
    for i in range(mm):
        for j in range(nn):
            base_area[i, j] = 0.25 * (
                k(c0[i, j], r0[i + 1, j], i, j)
                + 2.0 * k(c0[i, j], r0[i, j], i, j)
                + k(c0[i, j], c0[i, j + 1], i, j)
                + k(r0[i + 1, j], r0[i, j], i, j)
                + k(c0[i, j + 1], r0[i, j], i, j))
    s = np.concatenate([u.ravel(), w.ravel()])
    n_eq = dim * mm * nn + mm * nn + 1
    for _ in range(2):
        uu = s[:nu].reshape(u.shape)
        ww = s[nu:].reshape(w.shape)
        jac = np.zeros((n_eq, nu + nw))
        res = np.zeros(n_eq)
        row = 0
        for i in range(mm):
            for j in range(nn):
                # closure: going around the face must come back
                gap = (uu[i, j] * r0[i, j] + ww[i, j + 1] * c0[i, j + 1]
                       - ww[i, j] * c0[i, j] - uu[i + 1, j] * r0[i + 1, j])
                res[row:row + dim] = gap
                jac[row:row + dim, uid[i, j]] = r0[i, j]
                jac[row:row + dim, wid[i, j + 1]] = c0[i, j + 1]
                jac[row:row + dim, wid[i, j]] = -c0[i, j]
                jac[row:row + dim, uid[i + 1, j]] = -r0[i + 1, j]
                row += dim
                # area written over the symmetrised far corner
                k1 = k(c0[i, j], r0[i + 1, j], i, j)
                k2 = k(c0[i, j], r0[i, j], i, j)
                k3 = k(c0[i, j], c0[i, j + 1], i, j)
                k4 = k(r0[i + 1, j], r0[i, j], i, j)
                k5 = k(c0[i, j + 1], r0[i, j], i, j)
                w1, w2 = ww[i, j], ww[i, j + 1]
                u1, u2 = uu[i, j], uu[i + 1, j]
                res[row] = 0.25 * (w1 * u2 * k1 + 2.0 * w1 * u1 * k2
                                   + w1 * w2 * k3 + u2 * u1 * k4
                                   + w2 * u1 * k5) - base_area[i, j]
                jac[row, wid[i, j]] = 0.25 * (u2 * k1 + 2.0 * u1 * k2 + w2 * k3)
                jac[row, wid[i, j + 1]] = 0.25 * (w1 * k3 + u1 * k5)
                jac[row, uid[i, j]] = 0.25 * (2.0 * w1 * k2 + u2 * k4 + w2 * k5)
                jac[row, uid[i + 1, j]] = 0.25 * (w1 * k1 + u1 * k4)
                row += 1
        # the family is one-dimensional: pin the seed scale
        res[row] = s[wid[0, 0]] - w[0, 0]
        jac[row, wid[0, 0]] = 1.0
        step = np.linalg.lstsq(jac, -res, rcond=None)[0]
        s = s + step
    uu = s[:nu].reshape(u.shape)
    ww = s[nu:].reshape(w.shape)
    ref = np.empty_like(out)
    ref[0, 0] = out[0, 0]
    ref[0, 1:] = out[0, 0] + np.cumsum(uu[0][:, None] * r0[0], axis=0)
    ref[1:] = ref[0][None, :] + np.cumsum(ww[:, :, None] * c0, axis=0)
    return ref


def propagate(net: Net, t: float, seed_scale=None, tol=None) -> Net:
    """Deform a whole net, layer by layer.

    P(0,0) stays fixed and the edge P(0,0) -> P(1,0) is scaled by
    seed_scale(t) (default 1+t). The first face strip is built by chained
    1x1 deformations; every further row takes one 1x1 step on its leading
    face and then forces each remaining vertex as the intersection of the
    two parallel-edge lines. Face areas are verified against the base as
    the sweep runs; a failure means the net is not deformable and raises
    with the offending face and residual.
    """
    tol = _resolve_tol(tol)
    seed_scale = seed_scale or _default_seed_scale
    s = float(seed_scale(t))
    if t == 0.0 and s == 1.0:
        return net.copy()
    if s <= 0.0:
        raise AdmissibleRangeError(f"seed scale {s:.4g} must be positive")
    g = net.grid()
    out = np.full_like(g, np.nan)
    out[0, 0] = g[0, 0]
    out[1, 0] = g[0, 0] + s * (g[1, 0] - g[0, 0])
    # first strip: chained unique 1x1 deformations, passing the shared edge
    for j in range(net.n):
        q = net.face(0, j)
        try:
            nq = deform_1x1(q, "AB", out[0, j], out[1, j], tol)
        except AdmissibleRangeError as exc:
            raise AdmissibleRangeError(
                f"face (0,{j}): {exc}", interval=exc.interval) from exc
        out[1, j + 1] = nq.c
        out[0, j + 1] = nq.d
    # later rows: one 1x1 step on the leading face, then forced intersections
    for i in range(1, net.m):
        q = net.face(i, 0)
        try:
            nq = deform_1x1(q, (0, 3), out[i, 0], out[i, 1], tol)
        except AdmissibleRangeError as exc:
            raise AdmissibleRangeError(
                f"face ({i},0): {exc}", interval=exc.interval) from exc
        out[i + 1, 0] = nq.vertices[1]
        out[i + 1, 1] = nq.vertices[2]
        for j in range(1, net.n):
            d_bottom = g[i + 1, j + 1] - g[i + 1, j]
            d_right = g[i + 1, j + 1] - g[i, j + 1]
            x, _, _, gap = geo.intersect_lines(out[i + 1, j], d_bottom,
                                               out[i, j + 1], d_right,
                                               tol.eps_parallel)
            scale = geo.norm(d_bottom)
            if gap > max(tol.eps_planar, 1e-12) * scale * 100:
                raise NotDeformableError(
                    f"face ({i},{j}): forced vertex is inconsistent "
                    f"(line gap {gap / scale:.3e})", face=(i, j), residual=gap / scale)
            if (x - out[i + 1, j]) @ d_bottom <= 0.0 \
                    or (x - out[i, j + 1]) @ d_right <= 0.0:
                raise AdmissibleRangeError(
                    f"face ({i},{j}): an edge collapses and reverses direction "
                    "at this parameter")
            out[i + 1, j + 1] = x
    out = _refine_member(g, out, tol)
    result = net_from_grid(out)
    # verify whole-net area preservation; first offender is reported
    for i in range(net.m):
        for j in range(net.n):
            q0 = net.face(i, j)
            q1 = result.face(i, j)
            a0 = oriented_area(q0, tol=tol)
            try:
                a1 = oriented_area(q1, normal=quad_normal(q0) if net.dim == 3 else None,
                                   tol=tol)
            except NetValidationError as exc:
                raise NotDeformableError(
                    f"face ({i},{j}) went non-planar during propagation: {exc}",
                    face=(i, j)) from exc
            rel = abs(a1 - a0) / abs(a0)
            if rel > max(1e-9, 100 * tol.eps_area):
                raise NotDeformableError(
                    f"face ({i},{j}) changed area by {rel:.3e}: net is not "
                    "deformable (or t left the admissible domain)",
                    face=(i, j), residual=rel)
    return result


def christoffel_dual(net: Net, tol=None, mismatch_tol: float = 1e-6) -> Net:
    """Christoffel dual of a class-(ii) net.

    Each face gets the dual quad of its FaceGeometry (diagonals swapped
    and inverted: offsets -e2/alpha, -e1/beta, -e2/gamma, -e1/delta from
    the dual diagonal point), which is parallel to the face, has the same
    unsigned area, opposite orientation, and vanishing mixed area with it.
    Sides along the i direction keep their direction, j sides reverse.

    The per-face duals are translated so shared edges coincide; the class
    (ii) condition is exactly what makes the dual edge lengths of
    neighbouring faces agree. The worst relative mismatch above
    mismatch_tol raises; the first dual vertex sits at the origin.
    """
    tol = _resolve_tol(tol)
    g = net.grid()
    out = np.full_like(g, np.nan)
    med = float(np.median(np.linalg.norm(g[1:] - g[:-1], axis=-1)))
    worst = 0.0
    worst_face = None
    for i in range(net.m):
        for j in range(net.n):
            fg = diagonal_intersection(net.face(i, j), tol)
            offs = {
                (i, j): -fg.e2 / fg.alpha,
                (i + 1, j): -fg.e1 / fg.beta,
                (i + 1, j + 1): -fg.e2 / fg.gamma,
                (i, j + 1): -fg.e1 / fg.delta,
            }
            known = [(vid, off) for vid, off in offs.items()
                     if not np.isnan(out[vid[0], vid[1]][0])]
            if not known:
                anchor_vid, anchor_off = (i, j), offs[(i, j)]
                qstar = -anchor_off  # puts the first dual vertex at the origin
            else:
                anchor_vid, anchor_off = known[0]
                qstar = out[anchor_vid[0], anchor_vid[1]] - anchor_off
            for vid, off in offs.items():
                target = qstar + off
                cur = out[vid[0], vid[1]]
                if np.isnan(cur[0]):
                    out[vid[0], vid[1]] = target
                else:
                    miss = geo.norm(cur - target) / med
                    if miss > worst:
                        worst, worst_face = miss, (i, j)
    if worst > mismatch_tol:
        raise ClassConditionError(
            f"net is not class (ii): dual edges fail to match at face {worst_face} "
            f"(relative mismatch {worst:.3e})", face=worst_face, residual=worst)
    return net_from_grid(out)


def dual_pair_residual(net: Net, dual: Net, tol=None) -> float:
    """How far (net, dual) is from a Christoffel dual pair: checks parallel
    sides, equal unsigned areas and vanishing mixed area per face."""
    tol = _resolve_tol(tol)
    worst = 0.0
    for i in range(net.m):
        for j in range(net.n):
            q = net.face(i, j)
            qs = dual.face(i, j)
            ref = quad_normal(q) if q.dim == 3 else None
            a = oriented_area(q, normal=ref, tol=tol)
            astar = oriented_area(qs, normal=ref, tol=tol)
            mixed = mixed_area(q, qs, tol)  # raises if sides not parallel
            worst = max(worst,
                        abs(abs(astar) - abs(a)) / abs(a),
                        abs(mixed) / abs(a))
    return worst


def hyperbolic_family(net: Net, dual: Net, t: float, tol=None,
                      pair_tol: float = 1e-6) -> Net:
    """The member at parameter t of the family spanned by a dual pair:
    vertices P cosh t + P* sinh t.

    Face areas are constant in t because the dual face has the same area
    with opposite orientation and zero mixed area with its face.
    """
    tol = _resolve_tol(tol)
    if net.m != dual.m or net.n != dual.n or net.dim != dual.dim:
        raise NetValidationError("net and dual have different grid shapes")
    resid = dual_pair_residual(net, dual, tol)
    if resid > pair_tol:
        raise NetValidationError(
            f"inputs are not a Christoffel dual pair (residual {resid:.3e})")
    if t == 0.0:
        return net.copy()
    ch, sh = math.cosh(t), math.sinh(t)
    return Net(net.m, net.n, ch * net.vertices + sh * dual.vertices)


def cone_cylinder_family(data: ConeCylinderData, t: float, tol=None) -> Net:
    """Member at parameter t of the family through a cone-cylinder net.

    Vertices a_i(t) + sqrt(t + sigma_i^2) b_j, where the a_i(t) telescope
    with steps scaled by (sigma_i + sigma_{i-1}) over the sum of the two
    square roots; this keeps rows similar, strips conical, and every face
    area constant. Needs every sigma_i > 0 and t > -min(sigma^2).
    """
    tol = _resolve_tol(tol)
    sig = np.asarray(data.sigma, dtype=float)
    if np.any(sig <= 0.0):
        raise AdmissibleRangeError("cone-cylinder family needs all sigma > 0")
    tmin = -float(np.min(sig ** 2))
    if t <= tmin:
        raise AdmissibleRangeError(
            f"t={t:.4g} is outside the admissible range ({tmin:.4g}, inf)",
            interval=(tmin, float("inf")))
    if t == 0.0:
        return gen_cone_cylinder(data, tol)
    a = np.asarray(data.a, dtype=float)
    b = np.asarray(data.b, dtype=float)
    roots = np.sqrt(t + sig ** 2)
    at = np.empty_like(a)
    at[0] = a[0]
    for k in range(1, len(a)):
        at[k] = at[k - 1] + (a[k] - a[k - 1]) * (sig[k] + sig[k - 1]) / (roots[k] + roots[k - 1])
    m = len(a) - 1
    n = len(b) - 1
    g = np.empty((m + 1, n + 1, a.shape[1]))
    for i in range(m + 1):
        g[i] = at[i] + roots[i] * b
    out = net_from_grid(g)
    if data.direction == "cols":
        out = out.transposed()
    return out


@dataclass
class DeformationFamily:
    """A continuous family of parallel equal-area nets through a base net.

    kind is one of propagated, hyperbolic, cone_cylinder, closed_form_2x2;
    net_at(t) evaluates a member (t=0 gives back the base). domain, when
    set, is the empirically admissible open interval around 0.
    """

    base: Net
    kind: str
    net_at_fn: callable = field(repr=False)
    domain: tuple | None = None

    def net_at(self, t: float) -> Net:
        if t == 0.0:
            return self.base.copy()
        return self.net_at_fn(float(t))

    def sample(self, ts):
        return [self.net_at(float(t)) for t in ts]


def family_from_propagation(net: Net, seed_scale=None, tol=None) -> DeformationFamily:
    v = classify(net, tol=tol)
    if not v.deformable:
        best = min((r, c) for c, r in v.residuals.items() if r is not None)
        pair = v.worst_pairs.get(best[1])
        where = f" at faces {pair[0]} and {pair[1]}" if pair else ""
        raise NotDeformableError(
            f"net is not deformable: every class condition fails, closest is "
            f"{best[1]} with residual {best[0]:.3e}{where}")
    return DeformationFamily(base=net.copy(), kind="propagated",
                             net_at_fn=lambda t: propagate(net, t, seed_scale, tol))


def family_from_dual(net: Net, dual: Net = None, tol=None) -> DeformationFamily:
    if dual is None:
        dual = christoffel_dual(net, tol)
    resid = dual_pair_residual(net, dual, tol)
    if resid > 1e-6:
        raise NetValidationError(f"not a dual pair (residual {resid:.3e})")
    return DeformationFamily(base=net.copy(), kind="hyperbolic",
                             net_at_fn=lambda t: hyperbolic_family(net, dual, t, tol))


def family_from_cone_cylinder(data: ConeCylinderData, tol=None) -> DeformationFamily:
    base = gen_cone_cylinder(data, tol)
    sig = np.asarray(data.sigma, dtype=float)
    tmin = -float(np.min(sig ** 2))
    return DeformationFamily(base=base, kind="cone_cylinder",
                             net_at_fn=lambda t: cone_cylinder_family(data, t, tol),
                             domain=(tmin, float("inf")))


def family_from_2x2(net: Net, klass: str = None, tol=None,
                    class_tol: float = 1e-8) -> DeformationFamily:
    """Closed-form family through a 2x2 net. klass picks 'i' or 'ii';
    None tries class (ii) first, then both class-(i) pairings."""
    if net.m != 2 or net.n != 2:
        raise NetValidationError("closed-form families need a 2x2 net")
    frame = local_frame(net, 1, 1, tol)
    attempts = []
    if klass in (None, "ii"):
        attempts.append(("class_ii",
                         lambda: family_2x2_class_ii(frame, class_tol, tol)))
    if klass in (None, "i"):
        attempts.append(("class_i_rows",
                         lambda: family_2x2_class_i(frame, class_tol, tol)))
        attempts.append(("class_i_cols",
                         lambda: family_2x2_class_i(frame.rotated(1), class_tol, tol)))
    last = None
    for name, make in attempts:
        try:
            cf = make()
            return DeformationFamily(base=net.copy(), kind=name,
                                     net_at_fn=cf.net_at)
        except ClassConditionError as exc:
            last = exc
    raise ClassConditionError(f"2x2 net is not deformable: {last}")


def estimate_domain(family: DeformationFamily, t_max: float = 4.0,
                    steps: int = 64, tol=None) -> tuple:
    """Scan outwards from 0 until evaluation fails or a face stops being
    strictly convex; returns the last surviving (lo, hi)."""
    from .nets import validate

    def survives(t):
        try:
            return validate(family.net_at(t), tol).ok
        except Exception:
            return False

    hi = 0.0
    for t in np.linspace(0.0, t_max, steps + 1)[1:]:
        if not survives(float(t)):
            break
        hi = float(t)
    lo = 0.0
    for t in np.linspace(0.0, -t_max, steps + 1)[1:]:
        if not survives(float(t)):
            break
        lo = float(t)
    return lo, hi
