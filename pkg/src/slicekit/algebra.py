"""Real Clifford algebras R_{0,n}, paravectors, quaternions and slice decomposition.

Two layers live here.  The array layer (``CliffordAlgebra``, ``QuaternionAlgebra``
and the ``q*`` helpers) works on numpy arrays whose last axis holds the
coefficients, so that every operator and quadrature routine can evaluate whole
node sets at once.  The value layer (``Multivector``, ``Paravector``,
``Quaternion``, ``SliceTriple``) wraps single elements for the in-process API
and the CLI; each value converts to an array through ``np.asarray``.

Blades of R_{0,n} are stored in graded-lexicographic order:
1, e1, ..., en, e12, e13, ..., e(n-1)n, e123, ...
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError, SingularInputError

MAX_DIMENSION = 8
_TINY = 1e-300


def _blade_sign(a: int, b: int) -> int:
    """Sign of e_A e_B for bitmask blades A, B with e_i^2 = -1."""
    swaps = 0
    t = a >> 1
    while t:
        swaps += bin(t & b).count("1")
        t >>= 1
    contractions = bin(a & b).count("1")
    return -1 if (swaps + contractions) % 2 else 1


@lru_cache(maxsize=None)
def _blade_masks(n: int) -> tuple[int, ...]:
    masks = []
    for grade in range(n + 1):
        for combo in itertools.combinations(range(n), grade):
            masks.append(sum(1 << i for i in combo))
    return tuple(masks)


class CliffordAlgebra:
    """Array arithmetic in R_{0,n}, 1 <= n <= 8.

    Coefficient arrays have shape ``(..., 2**n)``; paravector points have shape
    ``(..., n + 1)``.
    """

    def __init__(self, n: int):
        if not 1 <= n <= MAX_DIMENSION:
            raise ContractError(f"Clifford dimension must be in 1..{MAX_DIMENSION}, got {n}")
        self.n = n
        self.dim = 2 ** n
        masks = _blade_masks(n)
        self.masks = masks
        self._index = {m: i for i, m in enumerate(masks)}
        perm = np.empty((self.dim, self.dim), dtype=np.intp)
        sign = np.empty((self.dim, self.dim))
        for i, a in enumerate(masks):
            for j, b in enumerate(masks):
                perm[i, j] = self._index[a ^ b]
                sign[i, j] = _blade_sign(a, b)
        self._perm = perm
        self._sign = sign
        grades = np.array([bin(m).count("1") for m in masks])
        self.grades = grades
        self._conj_sign = np.where((grades * (grades + 1) // 2) % 2 == 1, -1.0, 1.0)

    def __repr__(self):
        return f"CliffordAlgebra(n={self.n})"

    def blade_index(self, indices) -> int:
        """Position of the blade e_{i1...ik} (1-based generator indices)."""
        mask = 0
        for i in indices:
            if not 1 <= i <= self.n:
                raise ContractError(f"generator e{i} not in R_0,{self.n}")
            mask |= 1 << (i - 1)
        return self._index[mask]

    def blade_name(self, index: int) -> str:
        mask = self.masks[index]
        if mask == 0:
            return "1"
        return "e" + "".join(str(i + 1) for i in range(self.n) if mask >> i & 1)

    def mul(self, a, b):
        """Clifford product of coefficient arrays (broadcasting over leading axes)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape[-1] != self.dim or b.shape[-1] != self.dim:
            raise ContractError(
                f"operands must have {self.dim} coefficients, got {a.shape[-1]} and {b.shape[-1]}"
            )
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.zeros(shape)
        for i in range(self.dim):
            ai = a[..., i : i + 1]
            if not np.any(ai):
                continue
            out[..., self._perm[i]] += self._sign[i] * ai * b
        return out

    def conj(self, a):
        """Clifford conjugation; on paravectors x0 + x -> x0 - x."""
        return np.asarray(a, dtype=float) * self._conj_sign

    def embed(self, x):
        """Paravector array ``(..., n+1)`` to coefficient array ``(..., 2**n)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (self.dim,))
        out[..., : self.n + 1] = x
        return out

    def vector(self, v):
        """1-vector array ``(..., n)`` to coefficient array."""
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape[:-1] + (self.dim,))
        out[..., 1 : self.n + 1] = v
        return out

    def paravector_part(self, a):
        return np.asarray(a)[..., : self.n + 1]

    def scalar(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape + (self.dim,))
        out[..., 0] = s
        return out

    def one(self):
        return self.scalar(1.0)

    def scale(self, s, a):
        """Multiply coefficient arrays by real scalars broadcast over the last axis."""
        return np.asarray(s, dtype=float)[..., None] * a

    def norm(self, a):
        return np.sqrt(np.sum(np.square(a), axis=-1))

    def paravector_inverse(self, x):
        """Inverse of paravector coefficient arrays: conj(x) / |x|^2."""
        x = np.asarray(x, dtype=float)
        n2 = np.sum(np.square(x[..., : self.n + 1]), axis=-1)
        if np.any(n2 <= _TINY):
            raise SingularInputError("paravector with zero norm has no inverse")
        return self.conj(x) / n2[..., None]


class QuaternionAlgebra:
    """Hamilton quaternions as ``(..., 4)`` arrays ``(w, x, y, z)``, e1 e2 = e3.

    Exposes the same surface as ``CliffordAlgebra`` so that operators can be
    written once for both settings.  Paravector points ``(x0, x1, x2, x3)`` are
    the quaternions themselves.
    """

    n = 3
    dim = 4

    def __repr__(self):
        return "QuaternionAlgebra()"

    def mul(self, a, b):
        return qmul(a, b)

    def conj(self, a):
        return qconj(a)

    def embed(self, x):
        return np.array(x, dtype=float)

    def vector(self, v):
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape[:-1] + (4,))
        out[..., 1:] = v
        return out

    def paravector_part(self, a):
        return np.asarray(a)

    def scalar(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape + (4,))
        out[..., 0] = s
        return out

    def one(self):
        return self.scalar(1.0)

    def scale(self, s, a):
        return np.asarray(s, dtype=float)[..., None] * a

    def norm(self, a):
        return np.sqrt(np.sum(np.square(a), axis=-1))

    def paravector_inverse(self, x):
        return qinv(x)


H = QuaternionAlgebra()


@lru_cache(maxsize=None)
def clifford(n: int) -> CliffordAlgebra:
    """Shared ``CliffordAlgebra`` instance for dimension ``n``."""
    return CliffordAlgebra(n)


# -- quaternion array helpers ------------------------------------------------


def qmul(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    w1, x1, y1, z1 = np.moveaxis(p, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def qconj(q):
    return np.asarray(q, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm2(q):
    return np.sum(np.square(q), axis=-1)


def qinv(q):
    n2 = qnorm2(q)
    if np.any(n2 <= _TINY):
        raise SingularInputError("zero quaternion has no inverse")
    return qconj(q) / n2[..., None]


def qvec(q):
    """Vector part as a quaternion array (real part zeroed)."""
    out = np.array(q, dtype=float)
    out[..., 0] = 0.0
    return out


def qreal(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape + (4,))
    out[..., 0] = s
    return out


# -- value types --------------------------------------------------------------


@dataclass(frozen=True)
class Multivector:
    """Dense element of R_{0,n}; ``coeffs`` in graded-lexicographic blade order."""

    n: int
    coeffs: tuple

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIMENSION:
            raise ContractError(f"dimension must be in 1..{MAX_DIMENSION}, got {self.n}")
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(coeffs) != 2 ** self.n:
            raise ContractError(f"expected {2 ** self.n} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_array(cls, n, arr):
        return cls(n, tuple(np.asarray(arr, dtype=float).ravel()))

    @classmethod
    def scalar(cls, n, value=1.0):
        c = [0.0] * 2 ** n
        c[0] = value
        return cls(n, tuple(c))

    @classmethod
    def blade(cls, n, *indices, value=1.0):
        """``Multivector.blade(3, 1, 2)`` is e12 in R_{0,3}."""
        alg = clifford(n)
        c = [0.0] * 2 ** n
        c[alg.blade_index(indices)] = value
        return cls(n, tuple(c))

    @property
    def algebra(self) -> CliffordAlgebra:
        return clifford(self.n)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coeffs, dtype=dtype or float)

    def _check(self, other):
        if not isinstance(other, Multivector):
            return None
        if other.n != self.n:
            raise ContractError(f"dimension mismatch: R_0,{self.n} vs R_0,{other.n}")
        return other

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Multivector.scalar(self.n, other)
        other = self._check(other)
        if other is None:
            return NotImplemented
        return Multivector.from_array(self.n, np.asarray(self) + np.asarray(other))

    __radd__ = __add__

    def __neg__(self):
        return Multivector.from_array(self.n, -np.asarray(self))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector.from_array(self.n, np.asarray(self) * other)
        if self._check(other) is None:
            return NotImplemented
        return mv_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector.from_array(self.n, np.asarray(self) * other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Multivector.from_array(self.n, np.asarray(self) / other)
        return NotImplemented

    def conj(self):
        return Multivector.from_array(self.n, self.algebra.conj(np.asarray(self)))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def isclose(self, other, rtol=1e-12, atol=1e-12):
        """Coefficient-wise closeness; exact when both sides hold integers."""
        other = self._check(other)
        a, b = np.asarray(self), np.asarray(other)
        return bool(np.all(np.abs(a - b) <= atol + rtol * np.maximum(np.abs(a), np.abs(b))))

    def __str__(self):
        alg = self.algebra
        terms = [
            f"{c:+g}" + ("" if i == 0 else alg.blade_name(i))
            for i, c in enumerate(self.coeffs)
            if c != 0.0
        ]
        return " ".join(terms) if terms else "0"


@dataclass(frozen=True)
class Paravector:
    """x = x0 + x1 e1 + ... + xn en."""

    x0: float
    vec: tuple

    def __post_init__(self):
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "vec", tuple(float(v) for v in self.vec))
        if not 1 <= len(self.vec) <= MAX_DIMENSION:
            raise ContractError("paravector needs 1..8 vector components")

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float).ravel()
        return cls(arr[0], tuple(arr[1:]))

    @property
    def n(self):
        return len(self.vec)

    def __array__(self, dtype=None, copy=None):
        return np.array((self.x0,) + self.vec, dtype=dtype or float)

    def norm2(self):
        return self.x0 ** 2 + sum(v * v for v in self.vec)

    def conjugate(self):
        return Paravector(self.x0, tuple(-v for v in self.vec))

    def to_multivector(self) -> Multivector:
        return Multivector.from_array(self.n, clifford(self.n).embed(np.asarray(self)))


@dataclass(frozen=True)
class Quaternion:
    """q = w + x e1 + y e2 + z e3 with Hamilton's e1 e2 = e3."""

    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for f in ("w", "x", "y", "z"):
            object.__setattr__(self, f, float(getattr(self, f)))

    @classmethod
    def from_array(cls, arr):
        w, x, y, z = np.asarray(arr, dtype=float).ravel()
        return cls(w, x, y, z)

    def __array__(self, dtype=None, copy=None):
        return np.array((self.w, self.x, self.y, self.z), dtype=dtype or float)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Quaternion(other)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return Quaternion.from_array(np.asarray(self) + np.asarray(other))

    __radd__ = __add__

    def __neg__(self):
        return Quaternion.from_array(-np.asarray(self))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(np.asarray(self) * other)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return quaternion_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(np.asarray(self) * other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(np.asarray(self) / other)
        return NotImplemented

    def conjugate(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self):
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def inverse(self):
        return Quaternion.from_array(qinv(np.asarray(self)))

    def vector(self):
        return Quaternion(0.0, self.x, self.y, self.z)

    def isclose(self, other, rtol=1e-12, atol=1e-12):
        a, b = np.asarray(self), np.asarray(other)
        return bool(np.all(np.abs(a - b) <= atol + rtol * np.maximum(np.abs(a), np.abs(b))))


@dataclass(frozen=True)
class SliceTriple:
    """x = u + axis * v with v >= 0 and a unit 1-vector axis."""

    u: float
    v: float
    axis: tuple

    def reassemble(self) -> Paravector:
        return Paravector(self.u, tuple(self.v * a for a in self.axis))


# -- operations ---------------------------------------------------------------


def mv_mul(a: Multivector, b: Multivector) -> Multivector:
    if a.n != b.n:
        raise ContractError(f"dimension mismatch: R_0,{a.n} vs R_0,{b.n}")
    alg = clifford(a.n)
    return Multivector.from_array(a.n, alg.mul(np.asarray(a), np.asarray(b)))


def paravector_inverse(x: Paravector) -> Multivector:
    """conj(x) / |x|^2; raises ``SingularInputError`` for x = 0."""
    if x.norm2() == 0.0:
        raise SingularInputError("paravector 0 has no inverse")
    return Multivector.from_array(x.n, clifford(x.n).paravector_inverse(clifford(x.n).embed(np.asarray(x))))


def slice_decompose(x) -> SliceTriple:
    """Split a paravector into (u, v, I) with x = u + I v.

    Real points get the axis e1 so that downstream evaluations are reproducible.
    """
    arr = np.asarray(x, dtype=float).ravel()
    u = float(arr[0])
    vec = arr[1:]
    v = float(np.linalg.norm(vec))
    if v > 0.0:
        axis = tuple(float(c) for c in vec / v)
    else:
        axis = (1.0,) + (0.0,) * (len(vec) - 1)
    return SliceTriple(u, v, axis)


def slice_decompose_array(x):
    """Vectorised slice decomposition of ``(..., n+1)`` points.

    Returns ``u``, ``v`` and unit axes of shape ``(..., n)``.
    """
    x = np.asarray(x, dtype=float)
    u = x[..., 0]
    vec = x[..., 1:]
    v = np.linalg.norm(vec, axis=-1)
    default = np.zeros_like(vec)
    default[..., 0] = 1.0
    safe = np.where(v > 0, v, 1.0)
    axis = np.where((v > 0)[..., None], vec / safe[..., None], default)
    return u, v, axis


def quaternion_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    return Quaternion.from_array(qmul(np.asarray(p), np.asarray(q)))


def quaternion_to_multivector(q) -> Multivector:
    """Embed H into R_{0,3} through i -> e1, j -> e2, k -> e12.

    The image is the subalgebra spanned by 1, e1, e2, e12, on which the Clifford
    product reproduces Hamilton's product.
    """
    w, x, y, z = np.asarray(q, dtype=float).ravel()
    alg = clifford(3)
    c = np.zeros(8)
    c[0], c[1], c[2] = w, x, y
    c[alg.blade_index((1, 2))] = z
    return Multivector.from_array(3, c)


def multivector_to_quaternion(m: Multivector) -> Quaternion:
    """Inverse of ``quaternion_to_multivector``; rejects elements outside the image."""
    if m.n != 3:
        raise ContractError("quaternion bridge is defined for R_0,3 only")
    alg = clifford(3)
    c = np.asarray(m)
    k = alg.blade_index((1, 2))
    rest = [i for i in range(8) if i not in (0, 1, 2, k)]
    if np.any(np.abs(c[rest]) > 1e-12 * max(1.0, float(np.max(np.abs(c))))):
        raise ContractError("multivector has components outside span{1, e1, e2, e12}")
    return Quaternion(c[0], c[1], c[2], c[k])
