import numpy as np
import pytest

from combescure import classify, construct, deform, errors, smooth as sm
from combescure.nets import validate


@pytest.fixture
def curves():
    a = sm.PolyCurve(np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.2],
                               [0.0, 0.3, 0.0], [0.0, 0.0, 0.1]]))
    sigma = sm.PolyCurve(np.array([1.0, 0.25]))
    b = sm.TrigCurve(const=np.array([0.0, 0.0, 0.0]),
                     cos_coeffs=np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.3]]),
                     sin_coeffs=np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]))
    return a, sigma, b


@pytest.fixture
def surface(curves):
    a, sigma, b = curves
    return sm.SmoothConeCylinderNet(a, sigma, b, ((0.0, 1.2), (0.2, 1.4)))


def test_poly_curve_frozen():
    p = sm.PolyCurve(np.array([1.0, -2.0, 3.0]))  # 1 - 2u + 3u^2
    assert p(0.5) == pytest.approx(1 - 1 + 0.75, abs=0)
    assert p.deriv(0.5) == pytest.approx(-2 + 3.0, abs=0)


def test_trig_curve_frozen():
    c = sm.TrigCurve(const=np.array([0.5]), cos_coeffs=np.array([[1.0]]),
                     sin_coeffs=np.array([[2.0]]), omega=3.0)
    u = 0.4
    assert c(u) == pytest.approx(0.5 + np.cos(3 * u) + 2 * np.sin(3 * u))
    assert c.deriv(u) == pytest.approx(-3 * np.sin(3 * u) + 6 * np.cos(3 * u))


def test_curve_derivatives_match_finite_differences(curves):
    a, sigma, b = curves
    h = 1e-6
    for crv, u in ((a, 0.37), (sigma, 0.37), (b, 0.91)):
        fd = (np.asarray(crv(u + h)) - np.asarray(crv(u - h))) / (2 * h)
        assert np.max(np.abs(fd - np.asarray(crv.deriv(u)))) < 1e-9


def test_surface_regularity_and_domain(curves, surface):
    a, sigma, b = curves
    with pytest.raises(errors.NetValidationError):
        sm.SmoothConeCylinderNet(a, sigma, b, ((0.5, 0.5), (0.0, 1.0)))
    with pytest.raises(ValueError):
        surface.eval(2.0, 0.5)
    with pytest.raises(ValueError):
        surface.eval(0.5, 0.1)


def test_surface_partials_match_finite_differences(surface):
    h = 1e-5
    for u, v in ((0.3, 0.5), (1.0, 1.3)):
        fu = (surface.eval(u + h, v) - surface.eval(u - h, v)) / (2 * h)
        fv = (surface.eval(u, v + h) - surface.eval(u, v - h)) / (2 * h)
        fuv = (surface.eval(u + h, v + h) - surface.eval(u + h, v - h)
               - surface.eval(u - h, v + h) + surface.eval(u - h, v - h)) / (4 * h * h)
        assert np.max(np.abs(fu - surface.partial_u(u, v))) < 1e-8
        assert np.max(np.abs(fv - surface.partial_v(u, v))) < 1e-8
        assert np.max(np.abs(fuv - surface.partial_uv(u, v))) < 1e-6


def test_member_constant_sigma_closed_form(curves):
    # sigma == 1 turns the quadrature into (a(u) - a(0)) / sqrt(1 + t)
    a, _, b = curves
    s1 = sm.SmoothConeCylinderNet(a, sm.PolyCurve(np.array([1.0])), b,
                                  ((0.0, 1.2), (0.2, 1.4)))
    t = 0.7
    mem = sm.SmoothFamilyMember(s1, t)
    a0 = np.asarray(a(0.0))
    worst = 0.0
    for u in np.linspace(0.0, 1.2, 7):
        for v in np.linspace(0.2, 1.4, 5):
            want = a0 + (np.asarray(a(u)) - a0) / np.sqrt(1 + t) \
                + np.sqrt(1 + t) * np.asarray(b(v))
            worst = max(worst, np.max(np.abs(mem.eval(u, v) - want)))
    assert worst < 1e-10


def test_member_at_zero_is_base(surface):
    mem = sm.SmoothFamilyMember(surface, 0.0)
    for u, v in ((0.0, 0.2), (0.7, 0.9), (1.2, 1.4)):
        assert np.max(np.abs(mem.eval(u, v) - surface.eval(u, v))) < 1e-10
        assert np.allclose(sm.family_eval(mem, u, v), mem.eval(u, v), atol=0)


def test_member_partials_match_finite_differences(surface):
    mem = sm.SmoothFamilyMember(surface, 0.4)
    h = 1e-5
    u, v = 0.6, 0.8
    fu = (mem.eval(u + h, v) - mem.eval(u - h, v)) / (2 * h)
    fv = (mem.eval(u, v + h) - mem.eval(u, v - h)) / (2 * h)
    assert np.max(np.abs(fu - mem.partial_u(u, v))) < 1e-8
    assert np.max(np.abs(fv - mem.partial_v(u, v))) < 1e-8


def test_first_fundamental_det_is_t_invariant(surface):
    pts = [(0.3, 0.5), (0.9, 1.1), (0.05, 0.25)]
    base = [sm.first_fundamental_det(surface, u, v) for u, v in pts]
    for t in (0.0, 0.3, 1.0):
        mem = sm.SmoothFamilyMember(surface, t)
        for (u, v), d0 in zip(pts, base):
            d = sm.first_fundamental_det(mem, u, v)
            assert abs(d - d0) < 1e-12 * abs(d0)


def test_first_fundamental_det_finite_difference_path(surface):
    class Wrap:
        def __init__(self, f):
            self.f = f

        def __call__(self, u, v):
            return self.f(u, v)

    u, v = 0.3, 0.5
    want = sm.first_fundamental_det(surface, u, v)
    got = sm.first_fundamental_det(Wrap(surface.eval), u, v, h=1e-4)
    assert abs(got - want) < 1e-7 * abs(want)


def test_conjugate_net_check(surface):
    us = np.linspace(0.0, 1.2, 6)
    vs = np.linspace(0.2, 1.4, 6)
    rep = sm.conjugate_net_check(surface, us, vs)
    # f_uv = (sigma'/sigma) f_v exactly for these surfaces
    assert rep["max_outside_span"] < 1e-14
    assert rep["max_fv_parallel_residual"] < 1e-12
    assert not rep["mixed_partial_vanishes"]
    mem = sm.SmoothFamilyMember(surface, 0.4)
    rep = sm.conjugate_net_check(mem, us, vs)
    assert rep["max_outside_span"] < 1e-9
    assert rep["max_fv_parallel_residual"] < 1e-9


def test_conjugate_net_check_finite_differences(surface):
    class Wrap:
        def __init__(self, f):
            self.f = f

        def __call__(self, u, v):
            return self.f(u, v)

    us = np.linspace(0.1, 1.1, 5)
    vs = np.linspace(0.3, 1.3, 5)
    rep = sm.conjugate_net_check(Wrap(surface.eval), us, vs, h=1e-4)
    assert rep["max_outside_span"] < 1e-7


def test_sample_smooth_is_cone_cylinder(surface):
    net = sm.sample_smooth(surface, 6, 7)
    assert net.m == 6 and net.n == 7 and net.dim == 3
    assert validate(net).ok
    kind = classify.cone_net_kind(net)
    assert kind.kind_rows in ("cone_cylinder", "doubled_cone_cylinder")
    assert classify.classify(net).deformable


def test_sample_smooth_too_coarse_names_resolution(curves):
    a, sigma, b = curves
    wide = sm.SmoothConeCylinderNet(a, sigma, b, ((0.0, 1.2), (0.0, 4 * np.pi)))
    # a v step of one full period collapses the row edges
    with pytest.raises(errors.NetValidationError, match="2x2"):
        sm.sample_smooth(wide, 2, 2)
    # same surface, enough samples: fine
    assert validate(sm.sample_smooth(wide, 4, 24)).ok


def test_sampling_commutes_with_deformation(curves, surface):
    # discrete family of the sampled net vs sampling the deformed surface:
    # gap shrinks like h^2
    a, sigma, b = curves
    t = 0.5

    def gap(m, n):
        net0 = sm.sample_smooth(surface, m, n)
        data = construct.extract_cone_cylinder_data(net0)
        fam = deform.cone_cylinder_family(data, t / sigma(0.0) ** 2)
        smoothed = sm.sample_smooth(surface, m, n, t=t)
        d = fam.grid() - smoothed.grid()
        d = d - d[0, 0]
        return np.max(np.abs(d))

    g1, g2 = gap(8, 8), gap(16, 16)
    assert g1 < 1e-3
    assert 3.0 < g1 / g2 < 5.0


def test_translational_dual_frozen():
    a = sm.PolyCurve(np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))  # (u,0,0)
    b = sm.PolyCurve(np.array([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))  # (0,v,0)
    dom = ((0.0, 1.0), (0.0, 1.0))
    dual = sm.translational_dual(a, b, dom)
    assert np.allclose(dual.eval(0.3, 0.8), [0.3, -0.8, 0.0], atol=1e-15)
    assert np.max(np.abs(dual.partial_uv(0.3, 0.8))) == 0.0


def test_translational_dual_of_cylinder_surface(curves):
    a, _, b = curves
    s1 = sm.SmoothConeCylinderNet(a, sm.PolyCurve(np.array([2.0])), b,
                                  ((0.0, 1.2), (0.2, 1.4)))
    dual = sm.translational_dual(s1)
    u, v = 0.7, 0.9
    d0 = sm.first_fundamental_det(s1, u, v)
    assert abs(sm.first_fundamental_det(dual, u, v) - d0) < 1e-10 * abs(d0)
    # dualizing twice translates back: f** - f is constant
    ddual = sm.TranslationalDual(dual.a, sm._ScaledCurve(dual.b, -1.0), dual.domain)
    g1 = ddual.eval(u, v) - s1.eval(u, v)
    g2 = ddual.eval(0.1, 1.2) - s1.eval(0.1, 1.2)
    assert np.max(np.abs(g1 - g2)) < 1e-12


def test_translational_dual_input_checks(curves, surface):
    a, _, b = curves
    with pytest.raises(errors.NetValidationError):
        sm.translational_dual(surface)  # sigma really varies
    with pytest.raises(ValueError):
        sm.translational_dual(a, b)  # raw curves need a domain


def test_negative_t_gating(surface):
    with pytest.raises(errors.NetValidationError):
        sm.SmoothFamilyMember(surface, -0.5)
    mem = sm.SmoothFamilyMember(surface, -0.5, allow_negative=True)
    assert mem.eval(0.5, 0.5).shape == (3,)
    with pytest.raises(errors.NetValidationError):
        sm.SmoothFamilyMember(surface, -1.5, allow_negative=True)
