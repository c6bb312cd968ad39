"""Property-based checks of the core invariants."""
import numpy as np
from hypothesis import assume, given, settings, strategies as st

import _gen
from combescure import deform, errors, isotropic, ratios
from combescure import geometry as geo
from combescure.classify import koenigs_residual
from combescure.construct import ConeCylinderData, gen_cone_cylinder
from combescure.nets import Quad, check_quad, oriented_area

finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def convex_quads(draw):
    th0 = draw(st.floats(0.0, 2.0 * np.pi, **finite))
    gaps = np.array([draw(st.floats(0.4, 1.5, **finite)) for _ in range(4)])
    th = th0 + 2.0 * np.pi * np.cumsum(gaps) / np.sum(gaps)
    r = np.array([draw(st.floats(0.7, 1.3, **finite)) for _ in range(4)])
    q = Quad(np.stack([r * np.cos(th), r * np.sin(th)], axis=1))
    rep = check_quad(q)
    assume(rep["ok"] and rep["convexity_margin"] > 0.05)
    return q


@given(convex_quads())
def test_ratio_expressions_and_identity(q):
    v = q.vertices
    r0 = ratios.opposite_ratio(q, "AB")
    fg = ratios.diagonal_intersection(q)
    aq, bq, cq, dq = fg.diagonal_lengths()
    assert abs(aq * bq / (cq * dq) - r0) < 1e-9 * r0
    l = ratios.simple_ratio(q, "AB")
    m = ratios.simple_ratio(q, (0, 3))
    assert l > -1.0 and m > -1.0 and l * m < 1.0
    lhs = oriented_area(q) / geo.polygon_area2(v[[0, 1, 3]])
    assert abs(lhs - (l + m + 2.0) / (1.0 - l * m)) < 1e-9 * abs(lhs)


@given(convex_quads(), st.floats(0.6, 1.6, **finite))
def test_unit_deformation_invariants(q, x):
    v = q.vertices
    l = ratios.simple_ratio(q, (0, 1))
    m = ratios.simple_ratio(q, (0, 3))
    lo, hi = deform.SystemPolynomial(l, m).admissible_interval()
    assume(lo + 1e-6 < x < hi - 1e-6)
    try:
        nq = deform.deform_1x1(q, "AB", v[0], v[0] + x * (v[1] - v[0]))
    except errors.AdmissibleRangeError:
        assume(False)
    a0 = oriented_area(q)
    assert abs(oriented_area(nq) - a0) < 1e-9 * abs(a0)
    for k in range(4):
        e0 = v[(k + 1) % 4] - v[k]
        e1 = nq.vertices[(k + 1) % 4] - nq.vertices[k]
        assert geo.parallel_residual(e0, e1) < 1e-9
        assert e0 @ e1 > 0.0


@given(st.floats(-0.8, 3.0, **finite), st.floats(-0.8, 3.0, **finite),
       st.floats(0.05, 0.95, **finite))
def test_companion_scale_is_a_positive_root(l, m, s):
    assume(l * m < 1.0)
    p = deform.SystemPolynomial(l, m)
    lo, hi = p.admissible_interval()
    lo = max(lo, 0.05)
    hi = min(hi, 5.0)
    assume(hi > lo + 1e-6)
    x = lo + s * (hi - lo)
    y = p.solve_y(x)
    assert y > 0.0
    assert abs(p(x, y)) < 1e-10 * (1.0 + abs(l) + abs(m))


@given(st.lists(st.floats(-30.0, 30.0, **finite), min_size=3, max_size=3))
def test_metric_duality_is_an_involution(coords):
    p = np.array(coords)
    pl = isotropic.delta_point(p)
    back = isotropic.delta_plane(pl)
    scale = 1.0 + float(np.max(np.abs(p)))
    assert np.max(np.abs(back - p)) < 1e-12 * scale
    again = isotropic.delta_point(back)
    assert again == pl


@st.composite
def cone_cylinder_inputs(draw):
    m = draw(st.integers(2, 3))
    n = draw(st.integers(2, 3))
    fl = st.floats(-0.12, 0.12, **finite)
    a = np.stack([np.array([draw(fl) for _ in range(m + 1)]),
                  1.0 + np.array([draw(fl) for _ in range(m + 1)])], axis=1)
    b = np.stack([1.0 + np.array([draw(fl) for _ in range(n + 1)]),
                  np.array([draw(fl) for _ in range(n + 1)])], axis=1)
    sig = np.array([draw(st.floats(0.8, 1.25, **finite)) for _ in range(m + 1)])
    return ConeCylinderData(np.cumsum(a, axis=0), sig, np.cumsum(b, axis=0))


@settings(max_examples=60, deadline=None)
@given(cone_cylinder_inputs())
def test_generated_nets_close_multiplicatively(data):
    try:
        net = gen_cone_cylinder(data)
    except errors.CombescureError:
        assume(False)
    assert koenigs_residual(net) < 1e-9
