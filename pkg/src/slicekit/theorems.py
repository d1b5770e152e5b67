"""Numerical verification suites.

Each suite turns one identity into a list of ``VerificationReport`` rows.  A
row carries a relative residual and the tolerance it is judged against:

* exact algebra or exact derivatives: 1e-12
* slice formulas evaluated through contour quadrature or the representation
  formula: 1e-10
* finite-difference routes: 1e-6
* volume and surface quadrature: 5e-2, plus a refinement row asking for the
  error to drop by at least a factor two when the node counts double.

Residuals are divided by ``max(1, scale)`` where the scale is the size of the
quantities being compared.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .algebra import H, qmul, qnorm2
from .config import SUITES, RunConfig
from .diffeo import Box, DiffeoMap, family
from .errors import ConfigError, ContractError
from .formulas import Nodes, Setting, borel_pompeiu, stokes
from .kernels import cauchy_kernel_array, kernel_membership_residual
from .moebius import MoebiusMap, _ha_sides, compose_moebius, covariance_constraints_ok, covariance_factors, real_family
from .operators import (
    D_u_array,
    FDConfig,
    G_array,
    H_a_array,
    H_ar_array,
    JetFn,
    du_kernel_fn,
    jet_left,
    jet_product,
    jet_right,
    jet_sum,
    series_in_map,
)
from .quadrature import BallDomain, ContourRule, SurfaceRule, contour_integrate
from .slice import IntrinsicPair, PowerSeriesFn, cr_residual, representation_array, splitting_extract, splitting_reassemble

TOL_EXACT = 1e-12
TOL_SLICE = 1e-10
TOL_FD = 1e-6
TOL_QUAD = 5e-2
# refinement: fine error / coarse error must not exceed this
REFINE_RATIO = 0.5
# errors below this are roundoff; the refinement ratio divides by at least it
ROUNDOFF_FLOOR = 1e-10
# measured convergence orders may fall short of 2 by this much
ORDER_SLACK = 0.05

# families whose image V is all of R^3, so slices through the real axis stay inside V
FULL_IMAGE = ("identity", "affine", "log", "rotation")
ALL_FAMILIES = ("identity", "affine", "power", "exp", "sin", "log", "rotation")

# sampling boxes for the vector part x_vec, chosen so that values stay moderate
_SAMPLE = {
    "identity": (-1.5, 1.5),
    "affine": (-1.5, 1.5),
    "rotation": (-1.5, 1.5),
    "log": (0.3, 3.0),
    "exp": (0.05, 1.2),
    "power": (0.2, 1.5),
    "sin": (0.05, 1.45),
}

# fallback x-space balls when the configured one does not fit the family
_DEFAULT_BALL = {
    "identity": ((0.0, 2.0, 0.0, 0.0), 0.5),
    "affine": ((0.0, 2.0, 0.0, 0.0), 0.5),
    "rotation": ((0.0, 2.0, 0.0, 0.0), 0.5),
    "exp": ((0.0, 1.0, 1.0, 1.0), 0.5),
    "power": ((0.0, 1.0, 1.0, 1.0), 0.5),
    "log": ((0.0, 2.0, 2.0, 2.0), 0.5),
    "sin": ((0.0, 0.8, 0.8, 0.8), 0.5),
}


@dataclass(frozen=True)
class VerificationReport:
    suite: str
    case: str
    quantity: str
    residual: float
    tolerance: float
    nodes: int
    runtime_ms: float
    passed: bool


@dataclass
class CheckCase:
    """Inputs shared by the check functions: map, random stream and resolution."""

    suite: str
    name: str
    a: DiffeoMap
    rng: np.random.Generator
    points: int = 50
    domain: BallDomain | None = None
    nodes: Nodes = field(default_factory=Nodes)
    fd: FDConfig = field(default_factory=FDConfig)
    contour_nodes: int = 256
    tolerance: float | None = None
    moebius: MoebiusMap | None = None


class _Rows:
    """Collects report rows for one case, timing each block."""

    def __init__(self, case: CheckCase):
        self.case = case
        self.rows = []
        self._t = time.perf_counter()

    def restart(self):
        self._t = time.perf_counter()

    def add(self, quantity, residual, tolerance, nodes):
        now = time.perf_counter()
        tol = self.case.tolerance if self.case.tolerance is not None else tolerance
        residual = float(residual)
        ok = bool(np.isfinite(residual) and residual <= tol)
        self.rows.append(
            VerificationReport(
                self.case.suite, self.case.name, quantity, residual, tol, int(nodes),
                (now - self._t) * 1e3, ok,
            )
        )
        self._t = time.perf_counter()


def _norm(v):
    return np.sqrt(qnorm2(np.asarray(v)))


def _rel(diff, scale):
    return float(np.max(_norm(diff) / np.maximum(1.0, scale)))


def sample_points(a: DiffeoMap, rng, size, min_vec=0.1):
    """Paravector points with x0 in (-1, 1) and x_vec in the family's sampling box."""
    lo, hi = _SAMPLE.get(a.name, (-1.5, 1.5))
    out = np.empty((0, 4))
    while len(out) < size:
        x = np.empty((2 * size, 4))
        x[:, 0] = rng.uniform(-1.0, 1.0, 2 * size)
        x[:, 1:] = rng.uniform(lo, hi, (2 * size, 3))
        ok = a.in_domain(x) & (np.linalg.norm(a.forward(x[:, 1:]), axis=-1) > min_vec)
        out = np.concatenate([out, x[ok]])
    return out[:size]


def _unit_vectors(rng, size):
    v = rng.standard_normal((size, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _order(r_coarse, r_fine):
    if r_coarse <= 1e-13:
        return math.inf
    return math.log2(r_coarse / max(r_fine, 1e-300))


def _deficit(order):
    return max(0.0, 2.0 - order)


def _full_image(case: CheckCase):
    if np.all(np.isinf([b for bd in case.a.codomainV.bounds for b in bd])):
        return True
    warnings.warn(
        f"{case.suite}: family {case.a.name!r} has a bounded image; slices through "
        "the real axis leave it, points skipped",
        stacklevel=3,
    )
    return False


# -- slice function checks ------------------------------------------------------


def check_representation(case: CheckCase):
    """f(x) against the two-point formula on a random slice, for f = sum a(x)^k c_k."""
    rows = _Rows(case)
    if not _full_image(case):
        return rows.rows
    a, rng = case.a, case.rng
    ps = PowerSeriesFn.random(rng, 5, H, scale=0.5)
    f = series_in_map(ps, a)
    x = sample_points(a, rng, case.points)
    y = a.apply(x)
    fx = f.value(x)

    def on_slice(p):
        return f.value(a.apply_inverse(p))

    J1, J2 = _unit_vectors(rng, len(x)), _unit_vectors(rng, len(x))
    rep1 = representation_array(H, on_slice, y, J1)
    scale = _norm(fx)
    rows.add("formula_vs_value", _rel(rep1 - fx, scale), TOL_SLICE, len(x))
    rep2 = representation_array(H, on_slice, y, J2)
    rows.add("slice_independence", _rel(rep1 - rep2, scale), TOL_SLICE, len(x))
    return rows.rows


def check_splitting(case: CheckCase):
    """Components on C_I reassemble f and satisfy Cauchy-Riemann at second order."""
    rows = _Rows(case)
    if not _full_image(case):
        return rows.rows
    a, rng = case.a, case.rng
    ps = PowerSeriesFn.random(rng, 4, H, scale=0.5)
    f = series_in_map(ps, a)
    I = _unit_vectors(rng, 1)[0]
    J = np.cross(I, _unit_vectors(rng, 1)[0])
    J /= np.linalg.norm(J)
    comps = splitting_extract(lambda p: ps(p), I, [J], algebra=H)
    u = rng.uniform(-1.5, 1.5, case.points)
    v = rng.uniform(0.2, 1.5, case.points) * rng.choice([-1.0, 1.0], case.points)
    z = u + 1j * v
    y = np.concatenate([u[:, None], v[:, None] * I], axis=-1)
    fx = f.value(a.apply_inverse(y))
    back = splitting_reassemble(comps, I, [J], z, algebra=H)
    rows.add("reassembly", _rel(back - fx, _norm(fx)), TOL_EXACT, len(z))

    rows.restart()
    worst = 0.0
    for comp in comps:
        pair = IntrinsicPair.from_complex(comp)
        for k in range(min(5, case.points)):
            r1 = cr_residual(pair, u[k], v[k], 1e-2)
            r2 = cr_residual(pair, u[k], v[k], 5e-3)
            worst = max(worst, _deficit(_order(r1, r2)))
    rows.add("cauchy_riemann_order_deficit", worst, ORDER_SLACK, 4 * len(comps))
    return rows.rows


def check_power_series_kernel(case: CheckCase):
    """H_a annihilates sum a(x)^k c_k and H_{a,r} annihilates sum c_k a(x)^k."""
    rows = _Rows(case)
    a, rng = case.a, case.rng
    x = sample_points(a, rng, case.points)
    u = a.velocity(x)
    av = a.forward(x[:, 1:])
    for side, op in (("left", H_a_array), ("right", H_ar_array)):
        f = series_in_map(PowerSeriesFn.random(rng, 6, H, side=side, scale=0.5), a)
        for route, fn, tol in (("exact", f, TOL_EXACT), ("fd", f.as_fd(case.fd), TOL_FD)):
            rows.restart()
            grad = fn.grad(x)
            val = op(H, a, grad, x)
            scale = np.linalg.norm(av, axis=-1) * _norm(grad[:, 0]) + np.einsum(
                "pi,pi->p", np.abs(u), _norm(grad[:, 1:])
            )
            rows.add(f"{side}_series_{route}", _rel(val, scale), tol, len(x))
    return rows.rows


def check_slice_cauchy(case: CheckCase):
    """Contour integral over circles in two slices reproduces f(x)."""
    rows = _Rows(case)
    if not _full_image(case):
        return rows.rows
    a, rng = case.a, case.rng
    ps = PowerSeriesFn.random(rng, 4, H, scale=0.5)
    f = series_in_map(ps, a)
    x = sample_points(a, rng, min(case.points, 20))
    y = a.apply(x)
    worst = spread = 0.0
    for xi, yi in zip(x, y):
        fx = f.value(xi)
        v = float(np.linalg.norm(yi[1:]))
        vals = []
        for I in _unit_vectors(rng, 2):
            for rad in (v + 0.5, 2 * v + 1.0):
                rule = ContourRule(tuple(I), (yi[0], 0.0), rad, case.contour_nodes)

                def integrand(s, yi=yi):
                    return cauchy_kernel_array(H, s, np.broadcast_to(yi, s.shape)), ps(s)

                vals.append(contour_integrate(rule, integrand, H) / (2 * np.pi))
        scale = float(_norm(fx))
        worst = max(worst, max(_rel(val - fx, scale) for val in vals))
        spread = max(spread, max(_rel(val - vals[0], scale) for val in vals))
    rows.add("formula_vs_value", worst, TOL_SLICE, case.contour_nodes)
    rows.add("contour_independence", spread, TOL_SLICE, case.contour_nodes)
    return rows.rows


def check_kernel_membership(case: CheckCase):
    """S^-1(s, x) is annihilated by G in x and by G_r in s."""
    rows = _Rows(case)
    rng = case.rng
    pairs = []
    while len(pairs) < min(case.points, 10):
        s, x = rng.uniform(-1.5, 1.5, (2, 4))
        if min(np.linalg.norm(s[1:]), np.linalg.norm(x[1:])) < 0.3:
            continue
        # keep x away from the sphere [s]
        if abs(x[0] - s[0]) + abs(np.linalg.norm(x[1:]) - np.linalg.norm(s[1:])) < 0.3:
            continue
        pairs.append((s, x))
    res_x = res_s = 0.0
    for s, x in pairs:
        scale = max(1.0, float(_norm(cauchy_kernel_array(H, s, x))))
        rx, rs = kernel_membership_residual(s, x, case.fd.h, case.fd.richardson)
        res_x, res_s = max(res_x, rx / scale), max(res_s, rs / scale)
    rows.add("left_variable_fd", res_x, TOL_FD, 16 * len(pairs))
    rows.add("right_variable_fd", res_s, TOL_FD, 16 * len(pairs))
    rows.restart()
    dx = ds = 0.0
    for s, x in pairs:
        c = kernel_membership_residual(s, x, 1e-2, False)
        fnr = kernel_membership_residual(s, x, 5e-3, False)
        dx = max(dx, _deficit(_order(c[0], fnr[0])))
        ds = max(ds, _deficit(_order(c[1], fnr[1])))
    rows.add("left_variable_order_deficit", dx, ORDER_SLACK, 16 * len(pairs))
    rows.add("right_variable_order_deficit", ds, ORDER_SLACK, 16 * len(pairs))
    return rows.rows


# -- integral formulas ------------------------------------------------------------


def _generic_pair():
    """A non-monogenic f and g, polynomial in x and conj(x)."""
    I, C = JetFn.identity(H), JetFn.conjugate(H)
    e2 = np.array([0.0, 0.0, 1.0, 0.0])
    k = np.array([0.0, 0.0, 0.0, 1.0])
    f = jet_sum(jet_product(C, jet_left(e2, I)), JetFn.coordinate(H, 1))
    g = jet_product(I, jet_right(I, k))
    return f, g


def _kernel_pair(variant, a: DiffeoMap, rng):
    """f, g in the kernels the Cauchy-type formula for ``variant`` needs."""
    lps = PowerSeriesFn.random(rng, 3, H, side="left", scale=0.5)
    rps = PowerSeriesFn.random(rng, 3, H, side="right", scale=0.5)
    if variant == "G":
        return JetFn.from_power_series(lps), JetFn.from_power_series(rps)
    if variant == "Ha":
        return series_in_map(lps, a), series_in_map(rps, a)
    return (
        du_kernel_fn(a, JetFn.from_power_series(lps)),
        du_kernel_fn(a, JetFn.from_power_series(rps)),
    )


def ball_for(a: DiffeoMap, domain: BallDomain | None):
    """``domain`` when it fits inside U with an image off the real axis, else a family default."""
    probe = JetFn.constant(H, np.array([1.0, 0, 0, 0]))
    if domain is not None:
        try:
            Setting(a, domain, probe, probe)
            return domain
        except ContractError:
            pass
    c, r = _DEFAULT_BALL.get(a.name, ((0.0, 2.0, 0.0, 0.0), 0.5))
    return BallDomain(c, r)


def _points_for(domain: BallDomain, calibration=False):
    c, r = np.asarray(domain.c, dtype=float), domain.radius
    interior = c if calibration else c + r * np.array([0.2, 0.1, 0.4, -0.2])
    # shifting x0 keeps x_vec, so the exterior point stays inside U for every family
    exterior = c + np.array([2 * r, 0.0, 0.0, 0.0])
    return interior, exterior


def _boundary_scale(st: Setting):
    pts = SurfaceRule.sphere(st.domain, (6, 6, 6)).points
    return float(np.max(_norm(st.f.value(pts)) + _norm(st.g.value(pts))))


def _bp_rows(rows: _Rows, variant, st: Setting, cauchy, calibration=False):
    xi, xe = _points_for(st.domain, calibration)
    lhs, target, _ = borel_pompeiu(variant, st, xi, cauchy)
    err = _rel(lhs - target, _norm(target))
    rows.add("interior", err, TOL_QUAD, st.nodes.count())
    lhs_e, _, _ = borel_pompeiu(variant, st, xe, cauchy)
    rows.add("exterior", _rel(lhs_e, _boundary_scale(st)), TOL_QUAD, st.nodes.count())
    coarse = Setting(st.a, st.domain, st.f, st.g, st.nodes.coarse())
    lhs_c, _, _ = borel_pompeiu(variant, coarse, xi, cauchy)
    err_c = _rel(lhs_c - target, _norm(target))
    rows.add("refinement_ratio", err / max(err_c, ROUNDOFF_FLOOR), REFINE_RATIO, st.nodes.count())
    return lhs


def _agreement_row(rows: _Rows, quantity, first, second):
    rows.add(quantity, _rel(first - second, max(_norm(first), _norm(second))), TOL_EXACT, 0)


def check_borel_pompeiu(case: CheckCase, variant="G"):
    """Borel-Pompeiu formula inside and outside the ball, with a refinement check."""
    rows = _Rows(case)
    a = case.a
    domain = ball_for(a, case.domain)
    if variant == "G":
        one = JetFn.constant(H, np.array([1.0, 0, 0, 0]))
        zero = JetFn.constant(H, np.zeros(4))
        cal = _Rows(case)
        _bp_rows(cal, variant, Setting(a, domain, one, zero, case.nodes), False, True)
        rows.rows += [_rename(r, "calibration_") for r in cal.rows]
        rows.restart()
    f, g = _generic_pair()
    st = Setting(a, domain, f, g, case.nodes)
    lhs = _bp_rows(rows, variant, st, False)
    if variant == "Du":
        rows.restart()
        xi, _ = _points_for(domain)
        other, _, _ = borel_pompeiu("Ha", st, xi)
        _agreement_row(rows, "equals_Ha_variant", lhs, other)
    return rows.rows


def _rename(rep: VerificationReport, prefix):
    return VerificationReport(
        rep.suite, rep.case, prefix + rep.quantity, rep.residual, rep.tolerance,
        rep.nodes, rep.runtime_ms, rep.passed,
    )


def check_cauchy_type(case: CheckCase, variant="G"):
    """Cauchy-type formula for f, g in the relevant kernels."""
    rows = _Rows(case)
    a = case.a
    domain = ball_for(a, case.domain)
    f, g = _kernel_pair(variant, a, case.rng)
    st = Setting(a, domain, f, g, case.nodes)
    lhs = _bp_rows(rows, variant, st, True)
    if variant == "Du":
        # for D_u-kernel functions the D_u terms vanish, so the full formula agrees
        rows.restart()
        xi, _ = _points_for(domain)
        full, _, _ = borel_pompeiu("Du", st, xi, False)
        _agreement_row(rows, "equals_full_formula", lhs, full)
    return rows.rows


def check_stokes(case: CheckCase, variant="G"):
    """Boundary integral of g nu f against the volume integral of the operator terms."""
    rows = _Rows(case)
    a = case.a
    domain = ball_for(a, case.domain)
    f, g = _generic_pair()
    st = Setting(a, domain, f, g, case.nodes)
    bnd, vol = stokes(variant, st)
    scale = max(_norm(bnd), _boundary_scale(st))
    err = _rel(bnd - vol, scale)
    rows.add("boundary_vs_volume", err, TOL_QUAD, st.nodes.count())
    bc, vc = stokes(variant, Setting(a, domain, f, g, st.nodes.coarse()))
    err_c = _rel(bc - vc, scale)
    rows.add("refinement_ratio", err / max(err_c, ROUNDOFF_FLOOR), REFINE_RATIO, st.nodes.count())
    if variant == "Du":
        rows.restart()
        _, vol_ha = stokes("Ha", st)
        _agreement_row(rows, "equals_Ha_variant", vol, vol_ha)
    return rows.rows


def check_identity_reduction(case: CheckCase, kind, variant):
    """With a = identity the H_a form of a formula equals the G form."""
    rows = _Rows(case)
    domain = case.domain if case.domain is not None else ball_for(case.a, None)
    f, g = _generic_pair() if kind != "cauchy" else _kernel_pair("G", case.a, case.rng)
    st = Setting(case.a, domain, f, g, case.nodes.coarse())
    if kind == "stokes":
        _, first = stokes(variant, st)
        _, second = stokes("G", st)
    else:
        xi, _ = _points_for(domain)
        first, _, _ = borel_pompeiu(variant, st, xi, kind == "cauchy")
        second, _, _ = borel_pompeiu("G", st, xi, kind == "cauchy")
    _agreement_row(rows, "identity_map_equals_G", first, second)
    return rows.rows


# -- Moebius covariance -----------------------------------------------------------


def _moebius_points(T: MoebiusMap, a: DiffeoMap, rng, size):
    """Image-side points q with q and T(q) in V and away from the pole."""
    c, d = np.asarray(T.c), np.asarray(T.d)
    bounded = not np.all(np.isinf([b for bd in a.codomainV.bounds for b in bd]))
    lo, hi = (-1.5, 1.5)
    if bounded:
        lo, hi = (1.5, 3.0) if a.name != "sin" else (0.05, 0.95)
    out = np.empty((0, 4))
    for _ in range(200):
        q = np.empty((4 * size, 4))
        q[:, 0] = rng.uniform(-1.0, 1.0, 4 * size)
        q[:, 1:] = rng.uniform(lo, hi, (4 * size, 3))
        w = qmul(np.broadcast_to(c, q.shape), q) + d
        ok = (_norm(w) > 0.3) & (np.linalg.norm(q[:, 1:], axis=-1) > 0.1)
        q = q[ok]
        Tq = T(q)
        ok = a.in_codomain(q) & a.in_codomain(Tq) & (np.linalg.norm(Tq[:, 1:], axis=-1) > 0.1)
        out = np.concatenate([out, q[ok]])
        if len(out) >= size:
            return out[:size]
    raise ContractError(f"could not sample Moebius test points for the {a.name} map")


def moebius_for(a: DiffeoMap, configured: MoebiusMap):
    """The configured map when V = R^3; a real map keeping the bounded image invariant otherwise."""
    if np.all(np.isinf([b for bd in a.codomainV.bounds for b in bd])):
        return configured
    if a.name == "sin":
        return real_family(2.0, 3.0, -4.0)
    return real_family(2.0, 0.0, -20.0)


def _test_function():
    """Generic polynomial jet used for covariance checks."""
    I, C = JetFn.identity(H), JetFn.conjugate(H)
    j = np.array([0.0, 0.0, 1.0, 0.0])
    return jet_sum(jet_product(I, jet_right(I, j)), jet_product(C, JetFn.coordinate(H, 2)))


def check_conformal_G(case: CheckCase):
    """G[A_T (g o T)] = B_T(T x) G[g](T x), and Ker(G) is preserved."""
    rows = _Rows(case)
    T = case.moebius
    if not covariance_constraints_ok(T):
        rows.add("constraints", math.inf, 0.0, 0)
        return rows.rows
    cf = covariance_factors(T)
    idm = family("identity")
    x = _moebius_points(T, idm, case.rng, case.points)
    y = T(x)
    kern = JetFn.from_power_series(PowerSeriesFn.random(case.rng, 4, H, scale=0.5))
    gen = _test_function()
    for label, g in (("kernel", kern), ("generic", gen)):
        for route, tol in (("exact", TOL_EXACT), ("fd", TOL_FD)):
            rows.restart()
            lhs_fn = jet_left(cf.A, compose_moebius(g, T))
            if route == "fd":
                lhs_fn = lhs_fn.as_fd(case.fd)
            lhs = G_array(H, lhs_fn.grad(x), x)
            if label == "kernel":
                # scale by the size of the individual terms of G
                gr = lhs_fn.grad(x)
                scale = qnorm2(x[:, 1:]) * _norm(gr[:, 0]) + np.linalg.norm(x[:, 1:], axis=-1) * np.einsum(
                    "pi,pi->p", np.abs(x[:, 1:]), _norm(gr[:, 1:])
                )
                rows.add(f"kernel_preserved_{route}", _rel(lhs, scale), tol, len(x))
            else:
                rhs = qmul(cf.B(y), G_array(H, g.grad(y), y))
                rows.add(f"covariance_{route}", _rel(lhs - rhs, _norm(rhs)), tol, len(x))
    return rows.rows


def check_conformal_Ha(case: CheckCase):
    """Covariance of H_a under a Moebius map, in the H_a and the D_u form."""
    from .moebius import conformal_residual_Du

    rows = _Rows(case)
    a = case.a
    T = moebius_for(a, case.moebius)
    if not covariance_constraints_ok(T):
        rows.add("constraints", math.inf, 0.0, 0)
        return rows.rows
    q = _moebius_points(T, a, case.rng, case.points)
    g = _test_function()
    res_ha = None
    for route, tol in (("exact", TOL_EXACT), ("fd", TOL_FD)):
        rows.restart()
        lhs, rhs, _ = _ha_sides(T, a, g, q, route == "fd")
        scale = np.maximum(_norm(lhs), _norm(rhs))
        rows.add(f"covariance_{route}", _rel(lhs - rhs, scale), tol, len(q))
        if route == "exact":
            res_ha, ha_scale = _norm(lhs - rhs), scale
    rows.restart()
    res_du = conformal_residual_Du(T, a, g, q)
    rows.add("du_form_agreement", float(np.max(np.abs(res_du - res_ha) / np.maximum(1.0, ha_scale))), TOL_EXACT, len(q))
    return rows.rows


def check_du_relation(case: CheckCase):
    """D_u f = (1 + a_vec) df/dx0 - H_a f for generic f."""
    rows = _Rows(case)
    a = case.a
    x = sample_points(a, case.rng, case.points)
    ps = series_in_map(PowerSeriesFn.random(case.rng, 4, H, scale=0.5), a)
    for label, f in (("generic", _test_function()), ("series", ps)):
        rows.restart()
        grad = f.grad(x)
        du = D_u_array(H, a, grad, x)
        ha = H_a_array(H, a, grad, x)
        lead = qmul(H.one() + H.vector(a.forward(x[:, 1:])), grad[:, 0])
        scale = _norm(du) + _norm(lead) + _norm(ha)
        rows.add(label, _rel(du - (lead - ha), scale), TOL_EXACT, len(x))
    return rows.rows


# -- suite driver -----------------------------------------------------------------


def _families(cfg: RunConfig, suite, default):
    names = cfg.section(suite).get("a", default)
    return [(n, family(n, **_family_params(cfg, n))) for n in names]


def _family_params(cfg: RunConfig, name):
    return {"affine": {"r": cfg.r, "s": cfg.s}, "power": {"alpha": cfg.alpha}, "rotation": {"c": cfg.c}}.get(name, {})


def _moebius(cfg: RunConfig) -> MoebiusMap:
    m = np.asarray(cfg.moebius, dtype=float).reshape(4, 4)
    return MoebiusMap(*m)


def _cases(cfg: RunConfig, suite):
    """Yield (check callable, CheckCase) pairs for one suite."""
    sec = cfg.section(suite)
    nodes = Nodes(tuple(cfg.surface_nodes), cfg.radial_nodes)
    fd = FDConfig(cfg.fd_step, cfg.richardson)
    domain = BallDomain(cfg.domain_center, cfg.domain_radius)
    T = _moebius(cfg)
    sidx = SUITES.index(suite)

    def make(name, a, idx, points):
        return CheckCase(
            suite, name, a, np.random.default_rng([cfg.seed, sidx, idx]),
            sec.get("points", points), domain, nodes, fd, cfg.contour_nodes,
            sec.get("tolerance"), T,
        )

    simple = {
        "representation": (check_representation, FULL_IMAGE, 50),
        "splitting": (check_splitting, FULL_IMAGE, 50),
        "power_series": (check_power_series_kernel, ALL_FAMILIES, 100),
        "slice_cauchy": (check_slice_cauchy, FULL_IMAGE, 10),
        "conformal_Ha": (check_conformal_Ha, ALL_FAMILIES, 50),
        "du_relation": (check_du_relation, ALL_FAMILIES, 500),
    }
    if suite in simple:
        fn, default, pts = simple[suite]
        for i, (name, a) in enumerate(_families(cfg, suite, default)):
            yield fn, make(name, a, i, pts)
        return
    if suite == "kernel_membership":
        yield check_kernel_membership, make("cauchy_kernel", family("identity"), 0, 10)
        return
    if suite == "conformal_G":
        yield check_conformal_G, make("moebius", family("identity"), 0, 50)
        return
    kind, _, variant = suite.rpartition("_")
    check = {"borel_pompeiu": check_borel_pompeiu, "cauchy_type": check_cauchy_type, "stokes": check_stokes}[kind]
    if variant == "G":
        yield (lambda c: check(c, "G")), make("identity", family("identity"), 0, 1)
        return
    if variant == "Ha":
        red = make("identity_reduction", family("identity"), 99, 1)
        red_kind = {"borel_pompeiu": "bp", "cauchy_type": "cauchy", "stokes": "stokes"}[kind]
        yield (lambda c: check_identity_reduction(c, red_kind, "Ha")), red
    for i, (name, a) in enumerate(_families(cfg, suite, cfg.a)):
        yield (lambda c, v=variant: check(c, v)), make(name, a, i, 1)


def run_suite(config: RunConfig | None = None, suites=None):
    """Run the configured suites (or ``suites``) in their canonical order."""
    cfg = config if config is not None else RunConfig()
    names = list(suites) if suites is not None else list(cfg.suites)
    for n in names:
        if n not in SUITES:
            raise ConfigError(f"unknown suite {n!r}")
    reports = []
    for suite in SUITES:
        if suite not in names:
            continue
        for fn, case in _cases(cfg, suite):
            reports.extend(fn(case))
    return reports
