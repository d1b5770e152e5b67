"""Structural maps a(x) = x0 + sum a_i(x_vec) e_i acting on the spatial part.

A ``DiffeoMap`` carries the forward map, its inverse and both Jacobians on
arrays of spatial points ``(..., n)``.  Built-in families ship exact
derivatives; user maps fall back to central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import qconj, qmul, Paravector, Quaternion
from .errors import ContractError, DegeneracyError, DomainError


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box, one (lo, hi) interval per coordinate."""

    bounds: tuple

    @classmethod
    def full(cls, n):
        return cls(((-math.inf, math.inf),) * n)

    @classmethod
    def uniform(cls, n, lo, hi):
        return cls(((lo, hi),) * n)

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return np.all((p > lo) & (p < hi), axis=-1)

    def sample(self, rng, size, cap=4.0):
        """Uniform samples; infinite sides are clipped to +-cap around the finite end."""
        lo = np.array([b[0] for b in self.bounds], dtype=float)
        hi = np.array([b[1] for b in self.bounds], dtype=float)
        lo_c = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi - 2 * cap, -cap))
        hi_c = np.where(np.isfinite(hi), hi, lo_c + 2 * cap)
        return lo_c + (hi_c - lo_c) * rng.random((size, len(self.bounds)))


def _fd_jacobian(fn, p, h=1e-5):
    """Central-difference Jacobian d fn_i / d p_j, step h * max(1, |p_j|)."""
    p = np.asarray(p, dtype=float)
    n = p.shape[-1]
    cols = []
    for j in range(n):
        step = h * np.maximum(1.0, np.abs(p[..., j]))
        e = np.zeros_like(p)
        e[..., j] = step
        cols.append((fn(p + e) - fn(p - e)) / (2 * step[..., None]))
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class DiffeoMap:
    """Spatial diffeomorphism a: U -> V extended by x0 -> x0.

    ``jacobian(x)`` returns d a_i / d x_j with shape ``(..., n, n)``;
    ``inv_jacobian(y)`` returns d (a^-1)_i / d y_j.
    """

    name: str
    n: int
    forward: Callable
    inverse: Callable
    domainU: Box
    codomainV: Box
    jacobian_fn: Callable | None = None
    inv_jacobian_fn: Callable | None = None
    interval: tuple = (-math.inf, math.inf)
    params: dict = field(default_factory=dict)

    def jacobian(self, x):
        if self.jacobian_fn is not None:
            return self.jacobian_fn(np.asarray(x, dtype=float))
        return _fd_jacobian(self.forward, x)

    def inv_jacobian(self, y):
        if self.inv_jacobian_fn is not None:
            return self.inv_jacobian_fn(np.asarray(y, dtype=float))
        return _fd_jacobian(self.inverse, y)

    def inv_partials(self, i, j, y):
        """d (a^-1)_i / d y_j at y (1-based i, j)."""
        return self.inv_jacobian(y)[..., i - 1, j - 1]

    def in_domain(self, x):
        """Membership of paravector points in (s,t) x U."""
        x = np.asarray(x, dtype=float)
        s, t = self.interval
        return (x[..., 0] > s) & (x[..., 0] < t) & self.domainU.contains(x[..., 1:])

    def in_codomain(self, y):
        y = np.asarray(y, dtype=float)
        s, t = self.interval
        return (y[..., 0] > s) & (y[..., 0] < t) & self.codomainV.contains(y[..., 1:])

    def check_domain(self, x):
        if not np.all(self.in_domain(x)):
            raise DomainError(f"point outside the domain of the {self.name} map")

    def check_codomain(self, y):
        if not np.all(self.in_codomain(y)):
            raise DomainError(f"point outside the image of the {self.name} map")

    # paravector-level helpers, shape (..., n+1)
    def apply(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        out[..., 0] = x[..., 0]
        out[..., 1:] = self.forward(x[..., 1:])
        return out

    def apply_inverse(self, y):
        y = np.asarray(y, dtype=float)
        out = np.empty_like(y)
        out[..., 0] = y[..., 0]
        out[..., 1:] = self.inverse(y[..., 1:])
        return out

    def jacobian_full(self, x):
        """(n+1) x (n+1) Jacobian of the paravector map, block diag(1, Ja)."""
        x = np.asarray(x, dtype=float)
        J = np.zeros(x.shape[:-1] + (self.n + 1, self.n + 1))
        J[..., 0, 0] = 1.0
        J[..., 1:, 1:] = self.jacobian(x[..., 1:])
        return J

    def velocity(self, x):
        """u_i = sum_j a_j(x) d(a^-1)_i/dy_j (a(x)) for paravector points."""
        x = np.asarray(x, dtype=float)
        y = self.forward(x[..., 1:])
        Jinv = self.inv_jacobian(y)
        return np.einsum("...ij,...j->...i", Jinv, y)


def _diag(fn):
    def jac(p):
        d = fn(p)
        return d[..., :, None] * np.eye(d.shape[-1])

    return jac


def _vec(values, n, name):
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 1:
        v = np.full(n, float(v[0]))
    if v.shape != (n,):
        raise ContractError(f"{name} needs {n} entries, got {v.size}")
    return v


def identity(n=3) -> DiffeoMap:
    full = Box.full(n)
    return DiffeoMap(
        "identity", n,
        lambda p: np.array(p, dtype=float),
        lambda q: np.array(q, dtype=float),
        full, full,
        _diag(lambda p: np.ones_like(p)),
        _diag(lambda q: np.ones_like(q)),
    )


def affine(r=2.0, s=1.0, n=3) -> DiffeoMap:
    """y_j = r_j x_j + s_j with r_j != 0."""
    r = _vec(r, n, "r")
    s = _vec(s, n, "s")
    if np.any(r == 0):
        raise ContractError("affine family needs nonzero r_j")
    full = Box.full(n)
    return DiffeoMap(
        "affine", n,
        lambda p: r * p + s,
        lambda q: (q - s) / r,
        full, full,
        _diag(lambda p: np.broadcast_to(r, p.shape).copy()),
        _diag(lambda q: np.broadcast_to(1.0 / r, q.shape).copy()),
        params={"r": tuple(r), "s": tuple(s)},
    )


def power(alpha=2.0, n=3) -> DiffeoMap:
    """y_j = x_j ** alpha_j on x_j > 0."""
    al = _vec(alpha, n, "alpha")
    if np.any(al == 0):
        raise ContractError("power family needs nonzero exponents")
    pos = Box.uniform(n, 0.0, math.inf)
    return DiffeoMap(
        "power", n,
        lambda p: p ** al,
        lambda q: q ** (1.0 / al),
        pos, pos,
        _diag(lambda p: al * p ** (al - 1.0)),
        _diag(lambda q: q ** (1.0 / al - 1.0) / al),
        params={"alpha": tuple(al)},
    )


def exp_map(n=3) -> DiffeoMap:
    """y_j = exp(x_j) on x_j > 0, so V = (1, inf)^n."""
    return DiffeoMap(
        "exp", n,
        np.exp, np.log,
        Box.uniform(n, 0.0, math.inf), Box.uniform(n, 1.0, math.inf),
        _diag(np.exp),
        _diag(lambda q: 1.0 / q),
    )


def sin_map(n=3) -> DiffeoMap:
    """y_j = sin(x_j); restricted to (0, pi/2)^n where sin is invertible."""
    return DiffeoMap(
        "sin", n,
        np.sin, np.arcsin,
        Box.uniform(n, 0.0, math.pi / 2), Box.uniform(n, 0.0, 1.0),
        _diag(np.cos),
        _diag(lambda q: 1.0 / np.sqrt(1.0 - q * q)),
    )


def log_map(n=3) -> DiffeoMap:
    """y_j = ln(x_j) on x_j > 0."""
    return DiffeoMap(
        "log", n,
        np.log, np.exp,
        Box.uniform(n, 0.0, math.inf), Box.full(n),
        _diag(lambda p: 1.0 / p),
        _diag(np.exp),
    )


def _rotation_matrix(c):
    """Matrix of x_vec -> c x_vec conj(c) for a unit quaternion c."""
    cols = []
    for e in np.eye(3):
        v = np.concatenate([[0.0], e])
        cols.append(qmul(qmul(c, v), qconj(c))[1:])
    return np.stack(cols, axis=-1)


def rotation(c=(0.5, 0.5, 0.5, 0.5)) -> DiffeoMap:
    """Quaternionic rotation x_vec -> c x_vec conj(c), c a unit quaternion."""
    c = np.asarray(c, dtype=float)
    if c.shape != (4,) or abs(np.linalg.norm(c) - 1.0) > 1e-12:
        raise ContractError("rotation needs a unit quaternion c")
    R = _rotation_matrix(c)
    full = Box.full(3)
    return DiffeoMap(
        "rotation", 3,
        lambda p: np.asarray(p) @ R.T,
        lambda q: np.asarray(q) @ R,
        full, full,
        lambda p: np.broadcast_to(R, np.shape(p)[:-1] + (3, 3)).copy(),
        lambda q: np.broadcast_to(R.T, np.shape(q)[:-1] + (3, 3)).copy(),
        params={"c": tuple(c)},
    )


def generic(n, forward, inverse, domainU=None, codomainV=None, name="custom") -> DiffeoMap:
    """User map with forward and inverse only; derivatives by central differences."""
    return DiffeoMap(
        name, n, forward, inverse,
        domainU or Box.full(n), codomainV or Box.full(n),
    )


FAMILIES = {
    "identity": lambda **kw: identity(),
    "affine": lambda r=2.0, s=1.0, **kw: affine(r, s),
    "power": lambda alpha=2.0, **kw: power(alpha),
    "exp": lambda **kw: exp_map(),
    "sin": lambda **kw: sin_map(),
    "log": lambda **kw: log_map(),
    "rotation": lambda c=(0.5, 0.5, 0.5, 0.5), **kw: rotation(c),
}


def family(name, **params) -> DiffeoMap:
    """Build a quaternionic (n=3) built-in family by name."""
    try:
        maker = FAMILIES[name]
    except KeyError:
        raise ContractError(f"unknown diffeomorphism family {name!r}") from None
    return maker(**params)


# -- operations on single points ---------------------------------------------


def _point(x):
    if isinstance(x, (Paravector, Quaternion)):
        return np.asarray(x)
    return np.asarray(x, dtype=float)


def diffeo_apply(a: DiffeoMap, x) -> Paravector:
    arr = _point(x)
    a.check_domain(arr)
    return Paravector.from_array(a.apply(arr))


def material_velocity(a: DiffeoMap, x) -> np.ndarray:
    arr = _point(x)
    a.check_domain(arr)
    return a.velocity(arr)


def volume_factor(a: DiffeoMap, x) -> float:
    """M_a = |det Ja| at x; raises ``DegeneracyError`` when the map is singular."""
    arr = _point(x)
    a.check_domain(arr)
    J = a.jacobian(arr[..., 1:])
    det = abs(float(np.linalg.det(J)))
    scale = float(np.max(np.abs(J))) ** a.n if np.any(J) else 0.0
    if not np.isfinite(det) or det <= 1e-14 * max(scale, 1e-300):
        raise DegeneracyError("Jacobian is singular: not a local diffeomorphism here")
    return det


def volume_factor_array(a: DiffeoMap, x):
    x = np.asarray(x, dtype=float)
    return np.abs(np.linalg.det(a.jacobian(x[..., 1:])))


def rotation_bracket(c, x) -> np.ndarray:
    """sum_j (y e_j + e_j y)(conj(c) e_j c e_i + e_i conj(c) e_j c) with y = c x_vec conj(c).

    Each factor is a real scalar; the sum equals 4 x_i, four times the velocity
    of the rotation map.
    """
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    xv = np.concatenate([[0.0], x[1:]])
    y = qmul(qmul(c, xv), qconj(c))
    E = np.eye(4)[1:]
    out = np.zeros(3)
    for i in range(3):
        total = np.zeros(4)
        for j in range(3):
            left = qmul(y, E[j]) + qmul(E[j], y)
            cjc = qmul(qmul(qconj(c), E[j]), c)
            right = qmul(cjc, E[i]) + qmul(E[i], cjc)
            total += qmul(left, right)
        out[i] = total[0]
    return out
