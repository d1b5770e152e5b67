"""Slice functions: power series, intrinsic pairs, representation and splitting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    H,
    Multivector,
    Paravector,
    Quaternion,
    clifford,
    slice_decompose,
)
from .errors import ContractError, DomainError


def algebra_of(value):
    """Return the array algebra matching a value object or a coefficient length."""
    if isinstance(value, Quaternion):
        return H
    if isinstance(value, Multivector):
        return clifford(value.n)
    raise ContractError(f"cannot infer algebra from {type(value).__name__}")


def point_algebra(x):
    """Algebra and paravector array for a point given as Paravector or Quaternion."""
    if isinstance(x, Quaternion):
        return H, np.asarray(x)
    if isinstance(x, Paravector):
        return clifford(x.n), np.asarray(x)
    raise ContractError(f"expected Paravector or Quaternion, got {type(x).__name__}")


def wrap(alg, arr):
    """Array of coefficients -> Quaternion or Multivector value object."""
    if alg is H:
        return Quaternion.from_array(arr)
    return Multivector.from_array(alg.n, arr)


@dataclass(frozen=True)
class PowerSeriesFn:
    """Polynomial x -> sum x^k a_k (side='left') or sum a_k x^k (side='right').

    Works on whole arrays of paravector points ``(..., n+1)`` and returns
    coefficient arrays ``(..., dim)``.  ``grad`` differentiates the Horner
    recursion exactly.
    """

    coeffs: tuple
    side: str = "left"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ContractError("side must be 'left' or 'right'")
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise ContractError("power series needs at least one coefficient")
        kinds = {type(c) for c in coeffs}
        if len(kinds) != 1 or kinds.pop() not in (Quaternion, Multivector):
            raise ContractError("coefficients must all be Quaternion or all Multivector")
        if isinstance(coeffs[0], Multivector) and len({c.n for c in coeffs}) != 1:
            raise ContractError("coefficients live in different algebras")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def random(cls, rng, degree, algebra=H, side="left", scale=1.0):
        """Series with normally distributed coefficients (used for test corpora)."""
        out = []
        for _ in range(degree + 1):
            c = scale * rng.standard_normal(algebra.dim)
            out.append(wrap(algebra, c))
        return cls(tuple(out), side)

    @property
    def algebra(self):
        return algebra_of(self.coeffs[0])

    @property
    def n(self):
        return self.algebra.n

    def _coeff_arrays(self):
        return [np.asarray(c) for c in self.coeffs]

    def __call__(self, x):
        alg = self.algebra
        X = alg.embed(x)
        cs = self._coeff_arrays()
        p = np.broadcast_to(cs[-1], X.shape).copy()
        for a in reversed(cs[:-1]):
            p = a + (alg.mul(X, p) if self.side == "left" else alg.mul(p, X))
        return p

    def grad(self, x):
        """Exact partial derivatives, shape ``(..., n+1, dim)``."""
        alg = self.algebra
        X = alg.embed(x)
        cs = self._coeff_arrays()
        p = np.broadcast_to(cs[-1], X.shape).copy()
        dps = [np.zeros_like(X) for _ in range(alg.n + 1)]
        units = [alg.embed(np.eye(alg.n + 1)[k]) for k in range(alg.n + 1)]
        for a in reversed(cs[:-1]):
            if self.side == "left":
                dps = [alg.mul(units[k], p) + alg.mul(X, dps[k]) for k in range(alg.n + 1)]
                p = a + alg.mul(X, p)
            else:
                dps = [alg.mul(dps[k], X) + alg.mul(p, units[k]) for k in range(alg.n + 1)]
                p = a + alg.mul(p, X)
        return np.stack(dps, axis=-2)


def eval_power_series(f: PowerSeriesFn, x):
    """Evaluate at a single Paravector / Quaternion and return a value object."""
    alg, arr = point_algebra(x)
    if alg.dim != f.algebra.dim:
        raise ContractError("point and coefficients belong to different algebras")
    return wrap(f.algebra, f(arr))


def _unit_vector(alg, axis):
    axis = np.asarray(axis, dtype=float).ravel()
    if axis.shape != (alg.n,):
        raise ContractError(f"axis must have {alg.n} components")
    nrm = np.linalg.norm(axis)
    if abs(nrm - 1.0) > 1e-12:
        raise ContractError("axis must be a unit 1-vector")
    return axis


def representation_eval(f_on_slice: Callable, x, J):
    """Rebuild f(x) from the two values f(u + Jv), f(u - Jv) on the slice C_J.

    ``f_on_slice`` maps paravector arrays to coefficient arrays.
    """
    alg, xa = point_algebra(x)
    st = slice_decompose(xa)
    J = _unit_vector(alg, J)
    Ix = alg.vector(np.asarray(st.axis))
    Jm = alg.vector(J)
    plus = np.concatenate([[st.u], st.v * J])
    minus = np.concatenate([[st.u], -st.v * J])
    one = alg.one()
    IJ = alg.mul(Ix, Jm)
    val = 0.5 * alg.mul(one - IJ, f_on_slice(plus)) + 0.5 * alg.mul(one + IJ, f_on_slice(minus))
    return wrap(alg, val)


def representation_array(alg, f_on_slice: Callable, x, J):
    """Vectorised representation formula over points ``(..., n+1)`` and axes ``(..., n)``."""
    x = np.asarray(x, dtype=float)
    J = np.asarray(J, dtype=float)
    u = x[..., :1]
    vec = x[..., 1:]
    v = np.linalg.norm(vec, axis=-1, keepdims=True)
    Ix = np.where(v > 0, vec / np.where(v > 0, v, 1.0), np.eye(alg.n)[0])
    plus = np.concatenate([u, v * J], axis=-1)
    minus = np.concatenate([u, -v * J], axis=-1)
    IJ = alg.mul(alg.vector(Ix), alg.vector(J))
    one = alg.one()
    return 0.5 * alg.mul(one - IJ, f_on_slice(plus)) + 0.5 * alg.mul(one + IJ, f_on_slice(minus))


# -- splitting ----------------------------------------------------------------


@dataclass(frozen=True)
class SplitComponent:
    """Complex-valued component F_A on the slice C_I (z = u + iv <-> u + Iv)."""

    index: tuple
    _fn: Callable = field(repr=False)

    def __call__(self, z):
        return self._fn(z)


def _anticommuting_frame(alg, I, completion):
    frame = [_unit_vector(alg, I)] + [_unit_vector(alg, c) for c in completion]
    # in H the third unit is I I_2, so only one completion vector is free
    want = 2 if alg is H else alg.n
    if len(frame) != want:
        raise ContractError(f"completion must supply {want - 1} vector(s)")
    vs = [alg.vector(f) for f in frame]
    for r, s in itertools.product(range(len(vs)), repeat=2):
        anti = alg.mul(vs[r], vs[s]) + alg.mul(vs[s], vs[r])
        target = alg.scalar(-2.0 if r == s else 0.0)
        if np.max(np.abs(anti - target)) > 1e-12:
            raise ContractError("completion does not satisfy I_r I_s + I_s I_r = -2 delta_rs")
    return vs


def _blade_products(alg, vs, subsets):
    out = []
    for A in subsets:
        p = alg.one()
        for r in A:
            p = alg.mul(p, vs[r - 1])
        out.append(p)
    return out


def splitting_extract(f: Callable, I, completion: Sequence, algebra=None):
    """Components F_A with f(z) = sum_A F_A(z) I_A on the slice C_I.

    ``f`` maps paravector arrays to coefficient arrays.  Subsets A range over
    {2..n} in graded order (over {2} alone for quaternions); ``I_A`` is the ordered product of the completion
    vectors.  Returns a list of ``SplitComponent``.
    """
    alg = algebra if algebra is not None else (H if len(np.ravel(I)) == 3 else clifford(len(np.ravel(I))))
    vs = _anticommuting_frame(alg, I, completion)
    rest = list(range(2, len(vs) + 1))
    subsets = [A for k in range(len(rest) + 1) for A in itertools.combinations(rest, k)]
    IA = _blade_products(alg, vs, subsets)
    IIA = [alg.mul(vs[0], b) for b in IA]
    # columns: I_A then I I_A; an orthonormal frame yields an orthogonal matrix
    basis = np.stack(IA + IIA, axis=-1)
    solve = np.linalg.inv(basis)
    I_arr = np.asarray(vs[0][1 : alg.n + 1])
    m = len(subsets)

    def point(z):
        z = np.asarray(z, dtype=complex)
        return np.concatenate([z.real[..., None], z.imag[..., None] * I_arr], axis=-1)

    def make(k):
        def F(z):
            vals = f(point(z))
            c = vals @ solve.T
            return c[..., k] + 1j * c[..., k + m]

        return F

    return [SplitComponent(A, make(k)) for k, A in enumerate(subsets)]


def splitting_reassemble(components, I, completion, z, algebra=None):
    """sum_A F_A(z) I_A as a coefficient array."""
    alg = algebra if algebra is not None else (H if len(np.ravel(I)) == 3 else clifford(len(np.ravel(I))))
    vs = _anticommuting_frame(alg, I, completion)
    IA = _blade_products(alg, vs, [c.index for c in components])
    z = np.asarray(z, dtype=complex)
    total = 0.0
    for comp, blade in zip(components, IA):
        Fz = comp(z)
        total = total + Fz.real[..., None] * blade + Fz.imag[..., None] * alg.mul(vs[0], blade)
    return total


# -- intrinsic pairs ----------------------------------------------------------


@dataclass(frozen=True)
class AxSymDomain:
    """Axially symmetric set described by a predicate on the half-plane v >= 0."""

    predicate: Callable
    bbox: tuple = ((-np.inf, np.inf), (0.0, np.inf))

    @classmethod
    def everything(cls):
        return cls(lambda u, v: np.ones(np.broadcast(u, v).shape, dtype=bool))

    @classmethod
    def box(cls, u_range, v_range):
        (u0, u1), (v0, v1) = u_range, v_range

        def pred(u, v):
            u, v = np.asarray(u), np.asarray(v)
            return (u > u0) & (u < u1) & (np.abs(v) > v0) & (np.abs(v) < v1)

        return cls(pred, ((u0, u1), (v0, v1)))

    def contains_uv(self, u, v):
        return np.asarray(self.predicate(u, np.abs(v)))

    def contains(self, x):
        """Membership of paravector points ``(..., n+1)``; depends on (u, |x|) only."""
        x = np.asarray(x, dtype=float)
        return self.contains_uv(x[..., 0], np.linalg.norm(x[..., 1:], axis=-1))


@dataclass(frozen=True)
class IntrinsicPair:
    """Pair (alpha, beta) of (u, v)-evaluators with alpha even and beta odd in v."""

    alpha: Callable
    beta: Callable
    alpha_even: bool = True
    beta_odd: bool = True
    domain: AxSymDomain | None = None

    @classmethod
    def from_function(cls, f: Callable, algebra, domain=None):
        """alpha = (f(u+Iv) + f(u-Iv))/2, beta = I (f(u-Iv) - f(u+Iv))/2 with I = e1."""
        e1 = algebra.vector(np.eye(algebra.n)[0])

        def pt(u, v, sgn):
            u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
            x = np.zeros(u.shape + (algebra.n + 1,))
            x[..., 0] = u
            x[..., 1] = sgn * v
            return x

        def alpha(u, v):
            return 0.5 * (f(pt(u, v, 1)) + f(pt(u, v, -1)))

        def beta(u, v):
            return 0.5 * algebra.mul(e1, f(pt(u, v, -1)) - f(pt(u, v, 1)))

        return cls(alpha, beta, domain=domain)

    @classmethod
    def from_complex(cls, F: Callable, domain=None):
        """Real and imaginary parts of a complex function of z = u + iv."""
        return cls(
            lambda u, v: np.real(F(np.asarray(u) + 1j * np.asarray(v))),
            lambda u, v: np.imag(F(np.asarray(u) + 1j * np.asarray(v))),
            alpha_even=False,
            beta_odd=False,
            domain=domain,
        )

    def symmetry_residual(self, u, v):
        """max(|alpha(u,v) - alpha(u,-v)|, |beta(u,v) + beta(u,-v)|)."""
        ra = np.max(np.abs(np.asarray(self.alpha(u, v)) - self.alpha(u, -np.asarray(v))))
        rb = np.max(np.abs(np.asarray(self.beta(u, v)) + self.beta(u, -np.asarray(v))))
        return float(max(ra, rb))


def cr_residual(p: IntrinsicPair, u: float, v: float, h: float) -> float:
    """Central-difference Cauchy-Riemann defect of an intrinsic pair at (u, v)."""
    if h <= 0:
        raise ContractError("step must be positive")
    if p.domain is not None:
        us = np.array([u - h, u + h, u, u])
        vs = np.array([v, v, v - h, v + h])
        if not np.all(p.domain.contains_uv(us, vs)):
            raise DomainError(f"stencil at (u={u}, v={v}) leaves the domain")
    a, b = p.alpha, p.beta
    da_du = (np.asarray(a(u + h, v)) - a(u - h, v)) / (2 * h)
    da_dv = (np.asarray(a(u, v + h)) - a(u, v - h)) / (2 * h)
    db_du = (np.asarray(b(u + h, v)) - b(u - h, v)) / (2 * h)
    db_dv = (np.asarray(b(u, v + h)) - b(u, v - h)) / (2 * h)
    r1 = np.max(np.abs(da_du - db_dv))
    r2 = np.max(np.abs(da_dv + db_du))
    return float(max(r1, r2))
