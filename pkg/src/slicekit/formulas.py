"""Assembly of the integral formulas (Borel-Pompeiu, Cauchy type, Stokes).

Everything is computed on the image side: for a structural map ``a`` and a
ball ``Omega`` in x-space the integrals run over ``a(Omega)`` with nodes
pulled back through ``a^-1``.  This is the change of variables y = a(q); the
volume factor M_a and the surface factor J_a are realised by the image rules.
With ``a`` the identity the formulas are those of the operator G.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import H, qmul, qnorm2, qvec
from .diffeo import DiffeoMap, identity
from .kernels import kernel_A_array, kernel_B_array, kernel_C_array, nu_array
from .operators import D_u_array, G_array, Gr_array, H_a_array, H_ar_array, JetFn
from .quadrature import (
    BallDomain,
    ImageRegion,
    SurfaceRule,
    VolumeRule,
    push_forward_surface,
    volume_nodes,
    weighted_sum,
)
from .errors import ContractError

VARIANTS = ("G", "Ha", "Du")


@dataclass(frozen=True)
class Nodes:
    angular: tuple = (32, 32, 32)
    radial: int = 24

    def coarse(self):
        return Nodes(tuple(max(2, v // 2) for v in self.angular), max(2, self.radial // 2))

    def count(self):
        n1, n2, n3 = self.angular
        return n1 * n2 * n3 * (1 + 2 * self.radial)


@dataclass
class Setting:
    """Map, x-space ball and the two test functions for one formula evaluation."""

    a: DiffeoMap
    domain: BallDomain
    f: JetFn
    g: JetFn
    nodes: Nodes = field(default_factory=Nodes)

    def __post_init__(self):
        pts = SurfaceRule.sphere(self.domain, (6, 6, 6)).points
        if not np.all(self.a.in_domain(pts)) or not np.all(self.a.in_domain(self.domain.c)):
            raise ContractError("ball is not inside the domain of the map")
        img = self.a.apply(pts)
        if np.min(np.sum(img[:, 1:] ** 2, axis=-1)) <= 0:
            raise ContractError("image of the ball meets the real axis")

    @property
    def region(self):
        if self.a.name == "identity":
            return self.domain
        return ImageRegion(self.a, self.domain)

    def surface(self):
        rule = SurfaceRule.sphere(self.domain, self.nodes.angular)
        if self.a.name == "identity":
            return rule
        return push_forward_surface(self.a, self.domain, rule)

    def volume_rule(self):
        return VolumeRule(self.nodes.angular, self.nodes.radial)


def _split(P):
    return P[:, :4]


def boundary_term(st: Setting, X):
    """int over d a(Omega) of |tau_vec|^2 [g nu A(X, tau) - A(tau, X) nu f]."""
    surf = st.surface()
    pts = np.concatenate([surf.points, surf.normals], axis=-1)
    a = st.a

    def integrand(pn):
        tau, n = pn[:, :4], pn[:, 4:]
        q = a.apply_inverse(tau)
        nu = nu_array(tau, n)
        Xb = np.broadcast_to(X, tau.shape)
        t2 = qnorm2(qvec(tau))[:, None]
        left = qmul(qmul(st.g.value(q), nu), kernel_A_array(Xb, tau))
        right = qmul(qmul(kernel_A_array(tau, Xb), nu), st.f.value(q))
        return t2 * (left - right)

    return weighted_sum(integrand, pts, surf.weights)


def _operator_terms(variant, st: Setting, z, q, X, cauchy=False):
    """Operator volume integrand (without the kernel part) at image nodes z."""
    a = st.a
    Xb = np.broadcast_to(X, z.shape)
    A_zX = kernel_A_array(z, Xb)
    A_Xz = kernel_A_array(Xb, z)
    zv = qvec(z)
    gf, gg = st.f.grad(q), st.g.grad(q)
    if variant == "G":
        if cauchy:
            return 0.0
        return 2 * (qmul(A_zX, G_array(H, gf, z)) - qmul(Gr_array(H, gg, z), A_Xz))
    if variant == "Ha":
        if cauchy:
            return 0.0
        return 2 * (-qmul(qmul(A_zX, zv), H_a_array(H, a, gf, q)) + qmul(qmul(H_ar_array(H, a, gg, q), zv), A_Xz))
    one_z = H.one() + zv
    d0f, d0g = gf[:, 0, :], gg[:, 0, :]
    out = 2 * (-qmul(qmul(A_zX, zv), qmul(one_z, d0f)) + qmul(qmul(d0g, one_z), qmul(zv, A_Xz)))
    if not cauchy:
        out = out + 2 * (qmul(qmul(A_zX, zv), D_u_array(H, a, gf, q)) - qmul(qmul(D_u_array(H, a, gg, q), zv), A_Xz))
    return out


def volume_terms(variant, st: Setting, X, inside: bool, cauchy=False):
    """Kernel volume integral plus operator volume terms over a(Omega)."""
    a = st.a
    region = st.region
    anchor = X if inside else a.apply(st.domain.c)
    P, W = volume_nodes(region, anchor, st.volume_rule(), singular=inside)

    def integrand(z):
        q = a.apply_inverse(z)
        Xb = np.broadcast_to(X, z.shape)
        # the g-part enters with a plus sign: B f + g C reproduces f + g
        val = qmul(kernel_B_array(z, Xb), st.f.value(q)) + qmul(st.g.value(q), kernel_C_array(Xb, z))
        return val + _operator_terms(variant, st, z, q, X, cauchy)

    return weighted_sum(integrand, P, W)


def borel_pompeiu(variant, st: Setting, x, cauchy=False):
    """Left side of the Borel-Pompeiu (or Cauchy-type) formula at the x-space point ``x``.

    Returns ``(lhs, target, inside)``: target is f(x) + g(x) inside Omega and 0
    outside.
    """
    if variant not in VARIANTS:
        raise ContractError(f"unknown variant {variant!r}")
    x = np.asarray(x, dtype=float)
    inside = bool(st.domain.contains(x))
    X = st.a.apply(x)
    if np.sum(X[1:] ** 2) == 0:
        raise ContractError("evaluation point maps onto the real axis")
    lhs = boundary_term(st, X) + volume_terms(variant, st, X, inside, cauchy)
    target = (st.f.value(x) + st.g.value(x)) if inside else np.zeros(4)
    return lhs, target, inside


def stokes(variant, st: Setting):
    """Boundary side and volume side of the Stokes identity; returns both arrays."""
    if variant not in VARIANTS:
        raise ContractError(f"unknown variant {variant!r}")
    a = st.a
    surf = st.surface()
    pts = np.concatenate([surf.points, surf.normals], axis=-1)

    def bnd(pn):
        tau, n = pn[:, :4], pn[:, 4:]
        q = a.apply_inverse(tau)
        return qmul(qmul(st.g.value(q), nu_array(tau, n)), st.f.value(q))

    boundary = weighted_sum(bnd, pts, surf.weights)
    P, W = volume_nodes(st.region, a.apply(st.domain.c), st.volume_rule(), singular=False)

    def vol(z):
        q = a.apply_inverse(z)
        zv = qvec(z)
        r2 = qnorm2(zv)[:, None]
        fv, gv = st.f.value(q), st.g.value(q)
        out = 4 * qmul(qmul(gv, zv / r2), fv)
        gf, gg = st.f.grad(q), st.g.grad(q)
        if variant == "G":
            ops = qmul(Gr_array(H, gg, z), fv) + qmul(gv, G_array(H, gf, z))
            return out + 2 * ops / r2
        if variant == "Ha":
            ops = qmul(qmul(H_ar_array(H, a, gg, q), zv), fv) + qmul(gv, qmul(zv, H_a_array(H, a, gf, q)))
            return out - 2 * ops / r2
        one_z = H.one() + zv
        d0 = qmul(qmul(gg[:, 0, :], one_z), qmul(zv, fv)) + qmul(gv, qmul(zv, qmul(one_z, gf[:, 0, :])))
        du = qmul(qmul(D_u_array(H, a, gg, q), zv), fv) + qmul(gv, qmul(zv, D_u_array(H, a, gf, q)))
        return out - 2 * d0 / r2 + 2 * du / r2

    volume = weighted_sum(vol, P, W)
    return boundary, volume
