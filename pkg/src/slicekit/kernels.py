"""Slice Cauchy kernel and the quaternionic reproducing kernels A, B, C, nu.

Array versions (``*_array``) take quaternion arrays of shape ``(..., 4)`` and
broadcast; the single-point functions wrap them and validate preconditions.
"""

from __future__ import annotations

import numpy as np

from .algebra import H, Multivector, Paravector, Quaternion, clifford, qconj, qmul, qnorm2, qreal, qvec
from .errors import SingularKernelError
from .operators import FDConfig, Gr_array, G_array, fd_grad
from .slice import wrap

_PI2 = np.pi ** 2


def _point(x):
    if isinstance(x, Quaternion):
        return H, np.asarray(x)
    if isinstance(x, Paravector):
        return clifford(x.n), np.asarray(x)
    x = np.asarray(x, dtype=float)
    return (H if x.shape[-1] == 4 else clifford(x.shape[-1] - 1)), x


def cauchy_kernel_array(alg, s, x):
    """-(x^2 - 2 Re[s] x + |s|^2)^-1 (x - conj(s)) on paravector arrays."""
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    X = alg.embed(x)
    S = alg.embed(s)
    s0 = s[..., 0]
    ns2 = np.sum(s * s, axis=-1)
    Q = alg.mul(X, X) - 2 * s0[..., None] * X + alg.scalar(ns2)
    q2 = np.sum(Q * Q, axis=-1)
    scale = (np.sum(x * x, axis=-1) + ns2) ** 2
    if np.any(q2 <= 1e-26 * np.maximum(scale, 1e-300)):
        raise SingularKernelError("x lies on the sphere [s]: Cauchy kernel is singular")
    Qinv = alg.conj(Q) / q2[..., None]
    return -alg.mul(Qinv, X - alg.conj(S))


def cauchy_kernel_S(s, x):
    alg, sa = _point(s)
    _, xa = _point(x)
    return wrap(alg, cauchy_kernel_array(alg, sa, xa))


def _check_abc(tau, x, need_tau_vec=True):
    xv2 = np.sum(x[..., 1:] ** 2, axis=-1)
    tv2 = np.sum(tau[..., 1:] ** 2, axis=-1)
    d2 = np.sum((tau - x) ** 2, axis=-1)
    if np.any(xv2 == 0.0):
        raise SingularKernelError("kernel needs a non-real evaluation point")
    if need_tau_vec and np.any(tv2 == 0.0):
        raise SingularKernelError("kernel needs a non-real source point")
    if np.any(d2 == 0.0):
        raise SingularKernelError("kernel is singular at tau = x")


def kernel_A_array(tau, x):
    """x_vec conj(tau - x) tau_vec / (2 pi^2 |x_vec|^2 |tau - x|^4 |tau_vec|^2)."""
    w = tau - x
    num = qmul(qmul(qvec(x), qconj(w)), qvec(tau))
    den = 2 * _PI2 * qnorm2(qvec(x)) * qnorm2(w) ** 2 * qnorm2(qvec(tau))
    return num / den[..., None]


def _bracket_parts(tau, x):
    w = tau - x
    n2 = qnorm2(w)
    first = (tau + 3 * qconj(x) - 4 * qconj(tau)) / (n2 ** 2)[..., None]
    # (x0 - tau) is the quaternion x0 - tau; <., .> is the dot product of vector parts
    c = qreal(x[..., 0]) - tau
    inner = np.sum(tau[..., 1:] * x[..., 1:], axis=-1)
    mid = qmul(c, qvec(tau)) - qreal(inner)
    return w, n2, first, mid


def kernel_B_array(tau, x):
    w, n2, first, mid = _bracket_parts(tau, x)
    second = 4 * qmul(qconj(w), mid) / (n2 ** 3)[..., None]
    X = qvec(x) / qnorm2(qvec(x))[..., None]
    return qmul(X, first + second) / _PI2


def kernel_C_array(x, tau):
    w, n2, first, mid = _bracket_parts(tau, x)
    second = 4 * qmul(mid, qconj(w)) / (n2 ** 3)[..., None]
    X = qvec(x) / qnorm2(qvec(x))[..., None]
    return qmul(first + second, X) / _PI2


def kernel_A(tau, x) -> Quaternion:
    t, xa = np.asarray(tau, dtype=float), np.asarray(x, dtype=float)
    _check_abc(t, xa)
    return Quaternion.from_array(kernel_A_array(t, xa))


def kernel_B(tau, x) -> Quaternion:
    t, xa = np.asarray(tau, dtype=float), np.asarray(x, dtype=float)
    _check_abc(t, xa, need_tau_vec=False)
    return Quaternion.from_array(kernel_B_array(t, xa))


def kernel_C(x, tau) -> Quaternion:
    t, xa = np.asarray(tau, dtype=float), np.asarray(x, dtype=float)
    _check_abc(t, xa, need_tau_vec=False)
    return Quaternion.from_array(kernel_C_array(xa, t))


def nu_array(x, normal):
    """Density of nu against scalar area: 2 n0 + 2 (x_vec / |x_vec|^2) sum_k x_k n_k."""
    x = np.asarray(x, dtype=float)
    normal = np.asarray(normal, dtype=float)
    xv2 = np.sum(x[..., 1:] ** 2, axis=-1)
    proj = np.sum(x[..., 1:] * normal[..., 1:], axis=-1)
    out = 2 * qvec(x) * (proj / xv2)[..., None]
    out[..., 0] += 2 * normal[..., 0]
    return out


def nu_weight(x, normal) -> Quaternion:
    xa = np.asarray(x, dtype=float)
    na = np.asarray(normal, dtype=float)
    if np.sum(xa[1:] ** 2) == 0.0:
        raise SingularKernelError("nu is undefined on the real axis")
    if abs(np.linalg.norm(na) - 1.0) > 1e-12:
        raise SingularKernelError("normal must be a unit 4-vector")
    return Quaternion.from_array(nu_array(xa, na))


def kernel_membership_residual(s, x, h=1e-5, richardson=False):
    """Return (|G_x[S^-1(s, .)](x)|, |G_r,s[S^-1(., x)](s)|) with central differences.

    Both variable assignments are reported.  Without Richardson the
    differentiation error is O(h^2), so a vanishing residual shrinks by about
    four when h halves.
    """
    alg, sa = _point(s)
    _, xa = _point(x)
    if np.sum(xa[1:] ** 2) == 0.0 or np.sum(sa[1:] ** 2) == 0.0:
        raise SingularKernelError("membership test needs non-real s and x")
    cauchy_kernel_array(alg, sa, xa)
    fd = FDConfig(h=h, richardson=richardson)
    gx = fd_grad(lambda p: cauchy_kernel_array(alg, sa, p), xa, fd)
    gs = fd_grad(lambda p: cauchy_kernel_array(alg, p, xa), sa, fd)
    r1 = float(alg.norm(G_array(alg, gx, xa)))
    r2 = float(alg.norm(Gr_array(alg, gs, sa)))
    return r1, r2
