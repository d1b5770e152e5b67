"""Global operators G, G_r, H_{a,b}, H_a, H_{a,r} and the material derivative D_u.

Every operator accepts either a single ``Paravector``/``Quaternion`` (and then
returns a value object) or an array of paravector points ``(..., n+1)`` (and
then returns coefficient arrays ``(..., dim)``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import H, Multivector, Paravector, Quaternion, clifford
from .diffeo import DiffeoMap
from .errors import ContractError, DomainError, UnsupportedDimensionError
from .slice import PowerSeriesFn, wrap


@dataclass(frozen=True)
class FDConfig:
    h: float = 1e-5
    richardson: bool = True

    def __post_init__(self):
        if not self.h > 0:
            raise ContractError("finite-difference step must be positive")


DEFAULT_FD = FDConfig()


def fd_grad(fn, x, fd: FDConfig = DEFAULT_FD):
    """Central-difference partials of ``fn`` at points ``x``; shape ``(..., n+1, dim)``.

    Step is h * max(1, |x_k|); with ``richardson`` one extrapolation level
    (4 D(h/2) - D(h)) / 3 lifts the error to O(h^4).
    """
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.shape[-1]):
        step = fd.h * np.maximum(1.0, np.abs(x[..., k]))[..., None]

        def central(hh):
            e = np.zeros_like(x)
            e[..., k] = hh[..., 0]
            return (fn(x + e) - fn(x - e)) / (2 * hh)

        d = central(step)
        if fd.richardson:
            d = (4 * central(step / 2) - d) / 3
        cols.append(d)
    return np.stack(cols, axis=-2)


class JetFn:
    """A hypercomplex-valued function together with its first partials.

    ``value(x)`` maps paravector arrays ``(..., n+1)`` to ``(..., dim)``;
    ``grad(x)`` returns ``(..., n+1, dim)``.  When no derivative oracle is
    supplied, central differences with ``fd`` are used.
    """

    def __init__(self, value: Callable, algebra, grad: Callable | None = None, fd: FDConfig = DEFAULT_FD, label=""):
        self._value = value
        self._grad = grad
        self.algebra = algebra
        self.fd = fd
        self.label = label

    @property
    def exact(self):
        return self._grad is not None

    def value(self, x):
        return self._value(np.asarray(x, dtype=float))

    __call__ = value

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if self._grad is not None:
            return self._grad(x)
        return fd_grad(self._value, x, self.fd)

    def as_fd(self, fd: FDConfig = DEFAULT_FD):
        """Same function with the derivative oracle dropped."""
        return JetFn(self._value, self.algebra, None, fd, self.label)

    def __repr__(self):
        mode = "exact" if self.exact else "fd"
        return f"JetFn({self.label or '?'}, {mode})"

    # -- constructors --------------------------------------------------
    @classmethod
    def from_power_series(cls, ps: PowerSeriesFn):
        return cls(ps, ps.algebra, ps.grad, label="series")

    @classmethod
    def constant(cls, algebra, c):
        c = np.asarray(c, dtype=float)
        if c.ndim == 0:
            c = algebra.scalar(c)

        def val(x):
            return np.broadcast_to(c, np.shape(x)[:-1] + (algebra.dim,)).copy()

        def grad(x):
            return np.zeros(np.shape(x)[:-1] + (algebra.n + 1, algebra.dim))

        return cls(val, algebra, grad, label="const")

    @classmethod
    def identity(cls, algebra):
        """f(x) = x."""
        eye = algebra.embed(np.eye(algebra.n + 1))
        return cls(
            algebra.embed,
            algebra,
            lambda x: np.broadcast_to(eye, np.shape(x)[:-1] + eye.shape).copy(),
            label="x",
        )

    @classmethod
    def conjugate(cls, algebra):
        """f(x) = conj(x)."""
        eye = algebra.conj(algebra.embed(np.eye(algebra.n + 1)))
        return cls(
            lambda x: algebra.conj(algebra.embed(x)),
            algebra,
            lambda x: np.broadcast_to(eye, np.shape(x)[:-1] + eye.shape).copy(),
            label="conj(x)",
        )

    @classmethod
    def coordinate(cls, algebra, k):
        """Real-valued f(x) = x_k."""
        d = np.zeros((algebra.n + 1, algebra.dim))
        d[k, 0] = 1.0
        return cls(
            lambda x: algebra.scalar(np.asarray(x)[..., k]),
            algebra,
            lambda x: np.broadcast_to(d, np.shape(x)[:-1] + d.shape).copy(),
            label=f"x{k}",
        )

    @classmethod
    def from_function(cls, fn, algebra, fd: FDConfig = DEFAULT_FD, label=""):
        return cls(fn, algebra, None, fd, label)


# -- jet combinators -----------------------------------------------------------


def jet_sum(*fs: JetFn) -> JetFn:
    alg = fs[0].algebra
    exact = all(f.exact for f in fs)
    return JetFn(
        lambda x: sum(f.value(x) for f in fs),
        alg,
        (lambda x: sum(f.grad(x) for f in fs)) if exact else None,
        fs[0].fd,
        "+".join(f.label for f in fs),
    )


def jet_scale(s: float, f: JetFn) -> JetFn:
    return JetFn(
        lambda x: s * f.value(x),
        f.algebra,
        (lambda x: s * f.grad(x)) if f.exact else None,
        f.fd,
        f"{s}*{f.label}",
    )


def jet_product(f: JetFn, g: JetFn) -> JetFn:
    """Pointwise product x -> f(x) g(x) with the Leibniz rule."""
    alg = f.algebra

    def grad(x):
        fv, gv = f.value(x)[..., None, :], g.value(x)[..., None, :]
        return alg.mul(f.grad(x), gv) + alg.mul(fv, g.grad(x))

    return JetFn(
        lambda x: alg.mul(f.value(x), g.value(x)),
        alg,
        grad if (f.exact and g.exact) else None,
        f.fd,
        f"({f.label})({g.label})",
    )


def jet_left(c, f: JetFn) -> JetFn:
    """x -> c f(x) for a constant c."""
    alg = f.algebra
    c = np.asarray(c, dtype=float)
    return JetFn(
        lambda x: alg.mul(c, f.value(x)),
        alg,
        (lambda x: alg.mul(c, f.grad(x))) if f.exact else None,
        f.fd,
        f"c*{f.label}",
    )


def jet_right(f: JetFn, c) -> JetFn:
    """x -> f(x) c for a constant c."""
    alg = f.algebra
    c = np.asarray(c, dtype=float)
    return JetFn(
        lambda x: alg.mul(f.value(x), c),
        alg,
        (lambda x: alg.mul(f.grad(x), c)) if f.exact else None,
        f.fd,
        f"{f.label}*c",
    )


def compose_map(g: JetFn, fwd: Callable, jac: Callable | None, label="") -> JetFn:
    """x -> g(fwd(x)) for a map of paravector points with (n+1)x(n+1) Jacobian ``jac``."""

    def val(x):
        return g.value(fwd(x))

    def grad(x):
        gy = g.grad(fwd(x))
        return np.einsum("...mk,...md->...kd", jac(x), gy)

    return JetFn(val, g.algebra, grad if (g.exact and jac is not None) else None, g.fd, label or g.label)


def compose_diffeo(g: JetFn, a: DiffeoMap) -> JetFn:
    """x -> g(a(x)) (g lives on the image side)."""
    return compose_map(g, a.apply, a.jacobian_full, f"{g.label}@{a.name}")


def compose_inverse(f: JetFn, a: DiffeoMap) -> JetFn:
    """y -> f(a^-1(y))."""

    def jac(y):
        y = np.asarray(y, dtype=float)
        J = np.zeros(y.shape[:-1] + (a.n + 1, a.n + 1))
        J[..., 0, 0] = 1.0
        J[..., 1:, 1:] = a.inv_jacobian(y[..., 1:])
        return J

    return compose_map(f, a.apply_inverse, jac, f"{f.label}@{a.name}^-1")


def series_in_map(ps: PowerSeriesFn, a: DiffeoMap) -> JetFn:
    """f(x) = sum a(x)^k c_k; belongs to the kernel of H_a."""
    return compose_diffeo(JetFn.from_power_series(ps), a)


def du_kernel_fn(a: DiffeoMap, phi: JetFn) -> JetFn:
    """f(x) = phi(0, exp(-x0) a_vec(x_vec)), annihilated by D_u.

    Along the flow dx/dx0 = u the image a_vec grows like exp(x0), so the
    argument of phi is a first integral of D_u.
    """
    alg = phi.algebra

    def arg(x):
        x = np.asarray(x, dtype=float)
        p = np.zeros_like(x)
        p[..., 1:] = np.exp(-x[..., :1]) * a.forward(x[..., 1:])
        return p

    def jac(x):
        x = np.asarray(x, dtype=float)
        J = np.zeros(x.shape[:-1] + (a.n + 1, a.n + 1))
        e = np.exp(-x[..., 0])[..., None]
        J[..., 1:, 0] = -e * a.forward(x[..., 1:])
        J[..., 1:, 1:] = e[..., None] * a.jacobian(x[..., 1:])
        return J

    return JetFn(
        lambda x: phi.value(arg(x)),
        alg,
        (lambda x: np.einsum("...mk,...md->...kd", jac(x), phi.grad(arg(x)))) if phi.exact else None,
        phi.fd,
        f"du_kernel({phi.label})",
    )


# -- operator kernels on arrays ------------------------------------------------


def _prepare(x, alg):
    if isinstance(x, Quaternion):
        if alg is not H and not (alg.n == 3):
            raise ContractError("quaternion point for a non-quaternionic function")
        return np.asarray(x), True
    if isinstance(x, Paravector):
        if x.n != alg.n:
            raise ContractError(f"point has n={x.n}, function has n={alg.n}")
        return np.asarray(x), True
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != alg.n + 1:
        raise ContractError(f"points must have {alg.n + 1} components")
    return x, False


def _out(alg, val, single):
    return wrap(alg, val) if single else val


def _check_map(a: DiffeoMap, alg, x):
    if a.n != alg.n:
        raise ContractError(f"map has n={a.n}, function has n={alg.n}")
    if not np.all(a.in_domain(x)):
        raise DomainError(f"point outside the domain of the {a.name} map")


def G_array(alg, grad, x):
    xv = x[..., 1:]
    r2 = np.sum(xv * xv, axis=-1)
    d0 = grad[..., 0, :]
    s = np.einsum("...j,...jd->...d", xv, grad[..., 1:, :])
    return r2[..., None] * d0 + alg.mul(alg.vector(xv), s)


def Gr_array(alg, grad, x):
    xv = x[..., 1:]
    r2 = np.sum(xv * xv, axis=-1)
    d0 = grad[..., 0, :]
    s = np.einsum("...j,...jd->...d", xv, grad[..., 1:, :])
    return r2[..., None] * d0 + alg.mul(s, alg.vector(xv))


def apply_G(f: JetFn, x):
    """|x_vec|^2 df/dx0 + x_vec sum_j x_j df/dx_j."""
    alg = f.algebra
    x, single = _prepare(x, alg)
    return _out(alg, G_array(alg, f.grad(x), x), single)


def apply_G_r(f: JetFn, x):
    """|x_vec|^2 df/dx0 + (sum_j x_j df/dx_j) x_vec."""
    alg = f.algebra
    x, single = _prepare(x, alg)
    return _out(alg, Gr_array(alg, f.grad(x), x), single)


def _velocity_terms(a, grad, x):
    u = a.velocity(x)
    return u, np.einsum("...j,...jd->...d", u, grad[..., 1:, :])


def apply_H_ab(a: DiffeoMap, b: JetFn, f: JetFn, x):
    """(G[b] o a) f + |a_vec|^2 (b o a) df/dx0 + a_vec (b o a) sum_j u_j df/dx_j."""
    alg = f.algebra
    x, single = _prepare(x, alg)
    _check_map(a, alg, x)
    y = a.apply(x)
    gb = G_array(alg, b.grad(y), y)
    bv = b.value(y)
    grad = f.grad(x)
    _, s = _velocity_terms(a, grad, x)
    av = y[..., 1:]
    r2 = np.sum(av * av, axis=-1)
    A = alg.vector(av)
    out = alg.mul(gb, f.value(x)) + r2[..., None] * alg.mul(bv, grad[..., 0, :]) + alg.mul(A, alg.mul(bv, s))
    return _out(alg, out, single)


def H_a_array(alg, a, grad, x):
    _, s = _velocity_terms(a, grad, x)
    A = alg.vector(a.forward(x[..., 1:]))
    return alg.mul(A, grad[..., 0, :]) - s


def H_ar_array(alg, a, grad, x):
    _, s = _velocity_terms(a, grad, x)
    A = alg.vector(a.forward(x[..., 1:]))
    return alg.mul(grad[..., 0, :], A) - s


def D_u_array(alg, a, grad, x):
    _, s = _velocity_terms(a, grad, x)
    return grad[..., 0, :] + s


def apply_H_a(a: DiffeoMap, f: JetFn, x):
    """a_vec df/dx0 - sum_i u_i df/dx_i."""
    alg = f.algebra
    x, single = _prepare(x, alg)
    _check_map(a, alg, x)
    return _out(alg, H_a_array(alg, a, f.grad(x), x), single)


def apply_H_ar(a: DiffeoMap, f: JetFn, x):
    """df/dx0 a_vec - sum_i u_i df/dx_i (quaternions only)."""
    alg = f.algebra
    if alg.n != 3 or a.n != 3:
        raise UnsupportedDimensionError("the right operator is defined for n = 3 only")
    x, single = _prepare(x, alg)
    _check_map(a, alg, x)
    return _out(alg, H_ar_array(alg, a, f.grad(x), x), single)


def apply_D_u(a: DiffeoMap, f: JetFn, x):
    """df/dx0 + sum_j u_j df/dx_j with u the velocity induced by a."""
    alg = f.algebra
    x, single = _prepare(x, alg)
    _check_map(a, alg, x)
    return _out(alg, D_u_array(alg, a, f.grad(x), x), single)


def du_relation_residual(a: DiffeoMap, f: JetFn, x):
    """|D_u f - [(1 + a_vec) df/dx0 - H_a f]|, an algebraic identity."""
    alg = f.algebra
    x, single = _prepare(x, alg)
    _check_map(a, alg, x)
    grad = f.grad(x)
    du = D_u_array(alg, a, grad, x)
    ha = H_a_array(alg, a, grad, x)
    one_plus = alg.one() + alg.vector(a.forward(x[..., 1:]))
    res = alg.norm(du - (alg.mul(one_plus, grad[..., 0, :]) - ha))
    return float(res) if single else res


def conjugation_residual(a: DiffeoMap, b: JetFn, f: JetFn, x, route="chain", fd: FDConfig = DEFAULT_FD):
    """|H_{a,b}[f](x) - G[b (f o a^-1)](a(x))|.

    ``route='chain'`` differentiates the right side through the chain rule
    (exact when the jets are exact); ``route='fd'`` differentiates the
    composite by central differences.
    """
    alg = f.algebra
    x, single = _prepare(x, alg)
    _check_map(a, alg, x)
    lhs = np.asarray(apply_H_ab(a, b, f, x))
    rhs_fn = jet_product(b, compose_inverse(f, a))
    if route == "fd":
        rhs_fn = rhs_fn.as_fd(fd)
    elif route != "chain":
        raise ContractError("route must be 'chain' or 'fd'")
    y = a.apply(x)
    rhs = G_array(alg, rhs_fn.grad(y), y)
    res = alg.norm(lhs - rhs)
    return float(res) if single else res


def gyh_residual(a: DiffeoMap, f: JetFn, x, route="chain", fd: FDConfig = DEFAULT_FD):
    """|G[f o a^-1](a(x)) + a_vec(x) H_a[f](x)|."""
    alg = f.algebra
    x, single = _prepare(x, alg)
    _check_map(a, alg, x)
    g = compose_inverse(f, a)
    if route == "fd":
        g = g.as_fd(fd)
    y = a.apply(x)
    lhs = G_array(alg, g.grad(y), y)
    rhs = -alg.mul(alg.vector(y[..., 1:]), H_a_array(alg, a, f.grad(x), x))
    res = alg.norm(lhs - rhs)
    return float(res) if single else res


def algebra_for(n: int):
    """Quaternions for n = 3, otherwise the Clifford algebra R_{0,n}."""
    return H if n == 3 else clifford(n)
