"""Smooth scale-translational surfaces f(u,v) = a(u) + sigma(u) b(v).

These are the smooth counterparts of the discrete generators: sampling
one on a parameter grid gives a cone-cylinder net exactly, and each
surface sits inside the one-parameter family

    f_t(u,v) = a(alpha) + int_alpha^u a'(w) sigma(w)/sqrt(t+sigma(w)^2) dw
               + sqrt(t + sigma(u)^2) b(v),

whose first fundamental form determinant is independent of t (the area
element is preserved). Curves are supplied analytically (polynomial or
trigonometric) so all partial derivatives are exact; finite differences
exist only as a cross-check path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad as _quad

from .errors import NetValidationError
from .nets import Net, _resolve_tol, net_from_grid, validate
from . import geometry as geo

__all__ = [
    "PolyCurve", "TrigCurve", "SmoothConeCylinderNet", "SmoothFamilyMember",
    "TranslationalDual", "sample_smooth", "family_eval",
    "first_fundamental_det", "conjugate_net_check", "translational_dual",
]

QUAD_EPSABS = 1e-10


@dataclass(frozen=True)
class PolyCurve:
    """t -> sum_k coeffs[k] t^k; coeffs shape (k,) for scalars, (k, d) else."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim not in (1, 2) or c.shape[0] == 0:
            raise ValueError("poly coefficients must be (k,) or (k, d)")
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self):
        return 1 if self.coeffs.ndim == 1 else self.coeffs.shape[1]

    def __call__(self, u: float):
        out = self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            out = out * u + c
        return float(out) if self.coeffs.ndim == 1 else np.asarray(out, dtype=float)

    def deriv(self, u: float):
        k = self.coeffs.shape[0]
        if k == 1:
            zero = np.zeros_like(self.coeffs[0])
            return float(zero) if self.coeffs.ndim == 1 else zero
        powers = np.arange(1, k).reshape((k - 1,) + (1,) * (self.coeffs.ndim - 1))
        return PolyCurve(self.coeffs[1:] * powers)(u)


@dataclass(frozen=True)
class TrigCurve:
    """t -> const + sum_k cos(k w t) cos_coeffs[k-1] + sin(k w t) sin_coeffs[k-1]."""

    const: np.ndarray
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    omega: float = 1.0

    def __post_init__(self):
        const = np.asarray(self.const, dtype=float)
        cc = np.asarray(self.cos_coeffs, dtype=float)
        sc = np.asarray(self.sin_coeffs, dtype=float)
        if cc.shape != sc.shape:
            raise ValueError("cos and sin coefficient shapes must match")
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "cos_coeffs", cc)
        object.__setattr__(self, "sin_coeffs", sc)

    @property
    def dim(self):
        return 1 if self.const.ndim == 0 else self.const.shape[0]

    def __call__(self, u: float):
        out = self.const.copy() if self.const.ndim else float(self.const)
        for k in range(self.cos_coeffs.shape[0]):
            ang = (k + 1) * self.omega * u
            out = out + math.cos(ang) * self.cos_coeffs[k] \
                      + math.sin(ang) * self.sin_coeffs[k]
        return out

    def deriv(self, u: float):
        out = np.zeros_like(self.const, dtype=float)
        for k in range(self.cos_coeffs.shape[0]):
            w = (k + 1) * self.omega
            ang = w * u
            out = out - w * math.sin(ang) * self.cos_coeffs[k] \
                      + w * math.cos(ang) * self.sin_coeffs[k]
        return float(out) if self.const.ndim == 0 else out


class SmoothConeCylinderNet:
    """f(u,v) = a(u) + sigma(u) b(v) on [alpha,beta] x [gamma,delta].

    a and b are curves into R^d, sigma a positive scalar curve. Regularity
    (f_u and f_v independent) and sigma > 0 are checked on a sample grid
    at construction.
    """

    def __init__(self, a, sigma, b, domain, check_samples=17):
        self.a = a
        self.sigma = sigma
        self.b = b
        (self.u_min, self.u_max), (self.v_min, self.v_max) = domain
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise NetValidationError("empty parameter domain")
        self.domain = ((self.u_min, self.u_max), (self.v_min, self.v_max))
        a0 = np.asarray(a(self.u_min), dtype=float)
        b0 = np.asarray(b(self.v_min), dtype=float)
        if a0.ndim != 1 or b0.ndim != 1 or a0.shape != b0.shape or a0.shape[0] < 2:
            raise NetValidationError(
                "a and b must map into the same R^2 or R^3")
        if np.ndim(sigma(self.u_min)) != 0:
            raise NetValidationError("sigma must be a scalar curve")
        if check_samples:
            us = np.linspace(self.u_min, self.u_max, check_samples)
            vs = np.linspace(self.v_min, self.v_max, check_samples)
            for u in us:
                if self.sigma(u) <= 0.0:
                    raise NetValidationError(f"sigma({u:.4g}) <= 0")
            for u in us:
                for v in vs:
                    fu = self.partial_u(u, v)
                    fv = self.partial_v(u, v)
                    if geo.norm(np.cross(fu, fv) if len(fu) == 3
                                else np.array([geo.cross2(fu, fv)])) \
                            <= 1e-12 * geo.norm(fu) * geo.norm(fv):
                        raise NetValidationError(
                            f"surface is not regular at (u,v)=({u:.4g},{v:.4g})")

    def _check_domain(self, u, v):
        eps = 1e-12 * (1 + abs(self.u_max) + abs(self.v_max))
        if not (self.u_min - eps <= u <= self.u_max + eps
                and self.v_min - eps <= v <= self.v_max + eps):
            raise ValueError(f"(u,v)=({u},{v}) outside the parameter domain")

    def eval(self, u: float, v: float) -> np.ndarray:
        self._check_domain(u, v)
        return np.asarray(self.a(u)) + self.sigma(u) * np.asarray(self.b(v))

    __call__ = eval

    def partial_u(self, u, v):
        return np.asarray(self.a.deriv(u)) + self.sigma.deriv(u) * np.asarray(self.b(v))

    def partial_v(self, u, v):
        return self.sigma(u) * np.asarray(self.b.deriv(v))

    def partial_uv(self, u, v):
        return self.sigma.deriv(u) * np.asarray(self.b.deriv(v))


class SmoothFamilyMember:
    """The member at parameter t of the family through a smooth net.

    The u-integral is evaluated by adaptive quadrature (absolute tolerance
    1e-10) and accumulated over segments, so grid evaluations reuse work.
    t >= 0 always works; negative t is allowed down to -min sigma^2 when
    allow_negative is set.
    """

    def __init__(self, base: SmoothConeCylinderNet, t: float,
                 allow_negative: bool = False):
        self.base = base
        self.t = float(t)
        if self.t < 0.0 and not allow_negative:
            raise NetValidationError("t must be >= 0 (allow_negative for less)")
        us = np.linspace(base.u_min, base.u_max, 65)
        if any(self.t + base.sigma(u) ** 2 <= 0.0 for u in us):
            raise NetValidationError(f"t={t} makes t + sigma^2 nonpositive")
        self.domain = base.domain
        self._nodes = [base.u_min]
        self._values = [np.zeros_like(np.asarray(base.a(base.u_min), dtype=float))]

    def _integrand(self, w, k):
        s = self.base.sigma(w)
        return np.asarray(self.base.a.deriv(w))[k] * s / math.sqrt(self.t + s * s)

    def _segment(self, lo, hi):
        dim = len(self._values[0])
        out = np.empty(dim)
        for k in range(dim):
            res = _quad(self._integrand, lo, hi, args=(k,),
                        epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200,
                        full_output=1)
            if len(res) > 3:
                raise RuntimeError(
                    f"quadrature failed on [{lo:.6g},{hi:.6g}]: {res[3]}")
            out[k] = res[0]
        return out

    def _a_integral(self, u: float) -> np.ndarray:
        """Integral of a' sigma / sqrt(t + sigma^2) from u_min to u."""
        # walk the cached nodes; extend from the nearest one below
        idx = None
        for i, x in enumerate(self._nodes):
            if x == u:
                return self._values[i]
            if x < u:
                idx = i
        if idx is None:
            val = -self._segment(u, self._nodes[0]) + self._values[0]
        else:
            val = self._values[idx] + self._segment(self._nodes[idx], u)
        self._nodes.append(u)
        self._values.append(val)
        order = np.argsort(self._nodes)
        self._nodes = [self._nodes[i] for i in order]
        self._values = [self._values[i] for i in order]
        return val

    def eval(self, u: float, v: float) -> np.ndarray:
        self.base._check_domain(u, v)
        root = math.sqrt(self.t + self.base.sigma(u) ** 2)
        return (np.asarray(self.base.a(self.base.u_min))
                + self._a_integral(u) + root * np.asarray(self.base.b(v)))

    __call__ = eval

    def partial_u(self, u, v):
        s = self.base.sigma(u)
        root = math.sqrt(self.t + s * s)
        g = np.asarray(self.base.a.deriv(u)) \
            + self.base.sigma.deriv(u) * np.asarray(self.base.b(v))
        return s / root * g

    def partial_v(self, u, v):
        root = math.sqrt(self.t + self.base.sigma(u) ** 2)
        return root * np.asarray(self.base.b.deriv(v))

    def partial_uv(self, u, v):
        s = self.base.sigma(u)
        root = math.sqrt(self.t + s * s)
        return s * self.base.sigma.deriv(u) / root * np.asarray(self.base.b.deriv(v))


def family_eval(member: SmoothFamilyMember, u: float, v: float) -> np.ndarray:
    return member.eval(u, v)


def sample_smooth(nets: SmoothConeCylinderNet, m: int, n: int,
                  t: float = 0.0, tol=None, allow_negative=False) -> Net:
    """Discrete net P_ij = f_t(u_i, v_j) on the uniform (m+1) x (n+1) grid.

    At t = 0 the closed form is used directly (no quadrature). The sampled
    net is validated; too coarse a grid over a curved b raises with the
    resolution in the message.
    """
    tol = _resolve_tol(tol)
    if t == 0.0:
        f = nets.eval
    else:
        f = SmoothFamilyMember(nets, t, allow_negative=allow_negative).eval
    us = np.linspace(nets.u_min, nets.u_max, m + 1)
    vs = np.linspace(nets.v_min, nets.v_max, n + 1)
    rows = [[f(u, v) for v in vs] for u in us]
    g = np.asarray(rows, dtype=float)
    net = net_from_grid(g)
    rep = validate(net, tol)
    if not rep.ok:
        raise NetValidationError(
            f"sampling at {m}x{n} gives invalid faces: {rep.summary()}", report=rep)
    return net


def _fd_partials(f, u, v, h):
    fu = (np.asarray(f(u + h, v)) - np.asarray(f(u - h, v))) / (2 * h)
    fv = (np.asarray(f(u, v + h)) - np.asarray(f(u, v - h))) / (2 * h)
    return fu, fv


def first_fundamental_det(surface, u: float, v: float, h: float = 1e-4) -> float:
    """det I = <f_u,f_u><f_v,f_v> - <f_u,f_v>^2.

    Analytic partials are used when the surface provides them; otherwise
    central differences with step h.
    """
    if hasattr(surface, "partial_u"):
        fu = np.asarray(surface.partial_u(u, v))
        fv = np.asarray(surface.partial_v(u, v))
    else:
        fu, fv = _fd_partials(surface, u, v, h)
    return float((fu @ fu) * (fv @ fv) - (fu @ fv) ** 2)


def conjugate_net_check(surface, us, vs, tol=None, h: float = 1e-4) -> dict:
    """How far the parameter lines are from a conjugate net.

    Reports the largest component of f_uv outside span(f_u, f_v)
    (normalized by |f_u||f_v| scale) and, for the cone-cylinder shape,
    the residual of f_uv against being parallel to f_v alone.
    """
    worst_span = 0.0
    worst_par = 0.0
    degenerate = True
    for u in us:
        for v in vs:
            if hasattr(surface, "partial_uv"):
                fu = np.asarray(surface.partial_u(u, v))
                fv = np.asarray(surface.partial_v(u, v))
                fuv = np.asarray(surface.partial_uv(u, v))
            else:
                fu, fv = _fd_partials(surface, u, v, h)
                fuv = (np.asarray(surface(u + h, v + h))
                       - np.asarray(surface(u + h, v - h))
                       - np.asarray(surface(u - h, v + h))
                       + np.asarray(surface(u - h, v - h))) / (4 * h * h)
            scale = geo.norm(fu) * geo.norm(fv)
            basis = np.stack([fu, fv], axis=1)
            coef, *_ = np.linalg.lstsq(basis, fuv, rcond=None)
            outside = geo.norm(fuv - basis @ coef)
            worst_span = max(worst_span, outside / math.sqrt(scale))
            nrm = geo.norm(fuv)
            if nrm > 1e-13 * math.sqrt(scale):
                degenerate = False
                worst_par = max(worst_par, geo.parallel_residual(fuv, fv))
    return {"max_outside_span": worst_span,
            "max_fv_parallel_residual": worst_par,
            "mixed_partial_vanishes": degenerate}


class TranslationalDual:
    """f*(u,v) = a(u) - b(v): the area-preserving dual of a translational
    surface a(u) + b(v). Dualizing twice gives the original back (up to
    the curves' shared constant)."""

    def __init__(self, a, b, domain):
        self.a = a
        self.b = b
        (self.u_min, self.u_max), (self.v_min, self.v_max) = domain
        self.domain = domain

    def eval(self, u, v):
        return np.asarray(self.a(u)) - np.asarray(self.b(v))

    __call__ = eval

    def partial_u(self, u, v):
        return np.asarray(self.a.deriv(u))

    def partial_v(self, u, v):
        return -np.asarray(self.b.deriv(v))

    def partial_uv(self, u, v):
        return np.zeros_like(np.asarray(self.a(u), dtype=float))


def translational_dual(nets_or_a, b=None, domain=None) -> TranslationalDual:
    """Dual of a translational surface.

    Either pass the two curves (with a domain), or a SmoothConeCylinderNet
    whose sigma is constant; anything with varying sigma is rejected.
    """
    if b is None:
        nets = nets_or_a
        us = np.linspace(nets.u_min, nets.u_max, 33)
        s0 = nets.sigma(us[0])
        if any(abs(nets.sigma(u) - s0) > 1e-12 * max(1.0, abs(s0)) for u in us):
            raise NetValidationError(
                "translational dual needs constant sigma (a translational net)")
        scaled_b = _ScaledCurve(nets.b, s0)
        return TranslationalDual(nets.a, scaled_b, nets.domain)
    if domain is None:
        raise ValueError("pass a domain when giving raw curves")
    return TranslationalDual(nets_or_a, b, domain)


@dataclass(frozen=True)
class _ScaledCurve:
    curve: object
    factor: float

    def __call__(self, u):
        return self.factor * np.asarray(self.curve(u))

    def deriv(self, u):
        return self.factor * np.asarray(self.curve.deriv(u))
