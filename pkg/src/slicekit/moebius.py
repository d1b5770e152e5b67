"""Quaternionic Moebius maps T(q) = (aq + b)(cq + d)^-1 and covariance of G and H_a."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import H, Quaternion, qconj, qinv, qmul, qnorm2, qreal, qvec
from .diffeo import DiffeoMap
from .errors import ContractError, SingularPointError
from .operators import (
    JetFn,
    G_array,
    H_a_array,
    compose_diffeo,
    compose_inverse,
    compose_map,
    jet_left,
)

_REAL_TOL = 1e-12


def _q(v):
    return np.asarray(v, dtype=float).reshape(4)


def _is_real(q, scale=1.0):
    return bool(np.max(np.abs(np.asarray(q)[1:])) <= _REAL_TOL * max(1.0, scale))


@dataclass(frozen=True)
class MoebiusMap:
    a: Quaternion
    b: Quaternion
    c: Quaternion
    d: Quaternion

    def __post_init__(self):
        for f in ("a", "b", "c", "d"):
            v = getattr(self, f)
            if not isinstance(v, Quaternion):
                object.__setattr__(self, f, Quaternion.from_array(_q(v)))
        if self.c_nonzero:
            if qnorm2(self.delta) == 0.0:
                raise ContractError("b - a c^-1 d must be nonzero")
        else:
            if qnorm2(_q(self.d)) == 0.0 or qnorm2(_q(self.a)) == 0.0:
                raise ContractError("with c = 0 both a and d must be nonzero")

    @property
    def c_nonzero(self) -> bool:
        return bool(qnorm2(_q(self.c)) > 0.0)

    @property
    def delta(self):
        """b - a c^-1 d."""
        a, b, c, d = (_q(v) for v in (self.a, self.b, self.c, self.d))
        return b - qmul(qmul(a, qinv(c)), d)

    @property
    def pole(self):
        """a c^-1, the centre of the factor B_T."""
        return qmul(_q(self.a), qinv(_q(self.c)))

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        a, b, c, d = (_q(v) for v in (self.a, self.b, self.c, self.d))
        den = qmul(c, q) + d
        n2 = qnorm2(den)
        if np.any(n2 <= 1e-300):
            raise SingularPointError("c q + d = 0: Moebius map evaluated at its pole")
        return qmul(qmul(a, q) + b, qconj(den) / n2[..., None])

    def jacobian(self, q):
        """4x4 real Jacobian: column k is a e_k w^-1 - T(q) c e_k w^-1, w = cq + d."""
        q = np.asarray(q, dtype=float)
        a, c, d = _q(self.a), _q(self.c), _q(self.d)
        w_inv = qinv(qmul(c, q) + d)
        Tq = self(q)
        cols = []
        for k in range(4):
            e = np.zeros(4)
            e[k] = 1.0
            cols.append(qmul(qmul(a, e), w_inv) - qmul(qmul(Tq, qmul(c, e)), w_inv))
        return np.stack(cols, axis=-1)

    def scaled(self, lam: float) -> "MoebiusMap":
        return MoebiusMap(*(Quaternion.from_array(lam * _q(v)) for v in (self.a, self.b, self.c, self.d)))


def real_family(a=2.0, d=0.0, r=1.0) -> MoebiusMap:
    """T(q) = (a q + a d + r)(q + d)^-1 with real a, d, r; satisfies the covariance constraints."""
    if r == 0:
        raise ContractError("r must be nonzero")
    return MoebiusMap(Quaternion(a), Quaternion(a * d + r), Quaternion(1.0), Quaternion(d))


def moebius_apply(T: MoebiusMap, x) -> Quaternion:
    return Quaternion.from_array(T(np.asarray(x, dtype=float)))


def covariance_constraints_ok(T: MoebiusMap) -> bool:
    """a conj(c), (b - a c^-1 d) conj(c) and d conj(b - a c^-1 d) all real (c != 0)."""
    if not T.c_nonzero:
        return False
    a, c, d = _q(T.a), _q(T.c), _q(T.d)
    delta = T.delta
    scale = float(max(np.abs(np.concatenate([a, _q(T.b), c, d]))))
    prods = [qmul(a, qconj(c)), qmul(delta, qconj(c)), qmul(d, qconj(delta))]
    return all(_is_real(p, scale * scale) for p in prods)


@dataclass(frozen=True)
class CovarianceFactors:
    """A_T = conj(c) and the multiplier B_T.

    ``B`` is the factor that makes G[A_T (g o T)](x) = B(T(x)) G[g](T(x)) hold:
    -(rho / |c|^2) conj(c) (y - a c^-1)^-2 with the real number
    rho = (b - a c^-1 d) conj(c).  ``B_scaled`` is the variant with the scalar
    |c| |b - a c^-1 d| in front; the two agree exactly when rho < 0 and |c| = 1.
    """

    T: MoebiusMap

    @property
    def A(self):
        return qconj(_q(self.T.c))

    @property
    def rho(self) -> float:
        return float(qmul(self.T.delta, qconj(_q(self.T.c)))[0])

    def _core(self, y):
        y = np.asarray(y, dtype=float)
        w = y - self.T.pole
        w2 = qmul(w, w)
        if np.any(qnorm2(w2) <= 1e-300):
            raise SingularPointError("B_T is undefined at y = a c^-1")
        return qmul(self.A, qinv(w2))

    def B(self, y):
        c2 = float(qnorm2(_q(self.T.c)))
        return -(self.rho / c2) * self._core(y)

    def B_scaled(self, y):
        s = float(np.sqrt(qnorm2(_q(self.T.c)) * qnorm2(self.T.delta)))
        return s * self._core(y)


def covariance_factors(T: MoebiusMap) -> CovarianceFactors:
    if not covariance_constraints_ok(T):
        raise ContractError("Moebius map violates the covariance constraints")
    return CovarianceFactors(T)


def compose_moebius(g: JetFn, T: MoebiusMap) -> JetFn:
    """q -> g(T(q)) with the exact Moebius Jacobian."""
    return compose_map(g, T, T.jacobian, f"{g.label}@T")


def _points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ContractError("Moebius covariance is quaternionic: points need 4 components")
    return x


def _scalar_or_array(res, x):
    return float(res) if np.ndim(x) == 1 else res


def conformal_residual_G(T: MoebiusMap, g: JetFn, x, fd_route=False, factor="corrected"):
    """|G[A_T (g o T)](x) - B_T(T(x)) G[g](T(x))|.

    ``factor='scaled'`` uses ``CovarianceFactors.B_scaled`` instead.
    """
    cf = covariance_factors(T)
    x = _points(x)
    lhs_fn = jet_left(cf.A, compose_moebius(g, T))
    if fd_route:
        lhs_fn = lhs_fn.as_fd()
    lhs = G_array(H, lhs_fn.grad(x), x)
    y = T(x)
    B = cf.B(y) if factor == "corrected" else cf.B_scaled(y)
    rhs = qmul(B, G_array(H, g.grad(y), y))
    return _scalar_or_array(H.norm(lhs - rhs), x)


def _ha_sides(T, a: DiffeoMap, g: JetFn, q, fd_route):
    """Both sides of the H_a covariance identity at image-side points q.

    Returns (lhs, rhs, parts) with
    lhs = -q_vec H_a[A (g o T o a)](a^-1 q),
    rhs = -B(Tq) T_vec(q) H_a[g o a](a^-1 T q).
    """
    cf = covariance_factors(T)
    F = jet_left(cf.A, compose_diffeo(compose_moebius(g, T), a))
    ga = compose_diffeo(g, a)
    if fd_route:
        F, ga = F.as_fd(), ga.as_fd()
    x = a.apply_inverse(q)
    a.check_domain(x)
    Tq = T(q)
    xt = a.apply_inverse(Tq)
    a.check_domain(xt)
    gF, gG = F.grad(x), ga.grad(xt)
    qv = H.vector(q[..., 1:])
    Tv = qvec(Tq)
    BT = qmul(cf.B(Tq), Tv)
    lhs = -qmul(qv, H_a_array(H, a, gF, x))
    rhs = -qmul(BT, H_a_array(H, a, gG, xt))
    return lhs, rhs, (x, xt, gF, gG, qv, Tq, BT)


def conformal_residual_Ha(T: MoebiusMap, a: DiffeoMap, g: JetFn, q, fd_route=False):
    """Pointwise residual of the H_a covariance identity (see ``_ha_sides``)."""
    q = _points(q)
    lhs, rhs, _ = _ha_sides(T, a, g, q, fd_route)
    return _scalar_or_array(H.norm(lhs - rhs), q)


def conformal_residual_Du(T: MoebiusMap, a: DiffeoMap, g: JetFn, q, fd_route=False):
    """The H_a identity rewritten with H_a = (1 + a_vec) d/dx0 - D_u on both sides."""
    from .operators import D_u_array

    q = _points(q)
    _, _, (x, xt, gF, gG, qv, Tq, BT) = _ha_sides(T, a, g, q, fd_route)
    one = H.one()
    lhs = -qmul(qv, qmul(one + qv, gF[..., 0, :])) + qmul(qv, D_u_array(H, a, gF, x))
    Tv = qvec(Tq)
    rhs = -qmul(BT, qmul(one + Tv, gG[..., 0, :])) + qmul(BT, D_u_array(H, a, gG, xt))
    return _scalar_or_array(H.norm(lhs - rhs), q)


def kernel_preservation_residual(T: MoebiusMap, g: JetFn, x, fd_route=False):
    """|G[A_T (g o T)](x)| for g in Ker(G): covariance carries kernels to kernels."""
    cf = covariance_factors(T)
    x = _points(x)
    fn = jet_left(cf.A, compose_moebius(g, T))
    if fd_route:
        fn = fn.as_fd()
    return _scalar_or_array(H.norm(G_array(H, fn.grad(x), x)), x)
