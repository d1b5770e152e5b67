import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slicekit.algebra import H, Quaternion, qinv, qmul, qnorm2, qvec
from slicekit.errors import SingularKernelError
from slicekit.kernels import (
    cauchy_kernel_S,
    cauchy_kernel_array,
    kernel_A,
    kernel_A_array,
    kernel_B,
    kernel_B_array,
    kernel_C,
    kernel_C_array,
    kernel_membership_residual,
    nu_array,
    nu_weight,
)
from slicekit.operators import FDConfig, G_array, Gr_array, fd_grad

from strategies import nonreal_paravectors, quaternions

PI2 = math.pi ** 2


def q(*c):
    return Quaternion(*c)


# -- Cauchy kernel ----------------------------------------------------------------------


def test_cauchy_kernel_at_origin_is_inverse():
    assert cauchy_kernel_S(q(0, 2), q(0.0)).isclose(q(0, -0.5))


def test_cauchy_kernel_singular_on_sphere():
    with pytest.raises(SingularKernelError):
        cauchy_kernel_S(q(1, 2, 0, 0), q(1, 2, 0, 0))
    with pytest.raises(SingularKernelError):
        cauchy_kernel_S(q(1, 2, 0, 0), q(1, 0, 0, 2))


def test_cauchy_kernel_real_source():
    # -(x^2 - 4x + 4)^-1 (x - 2) = (2 - x)^-1 = (2 + e1) / 5 at x = e1
    assert cauchy_kernel_S(q(2.0), q(0, 1)).isclose(q(0.4, 0.2))


def test_same_slice_reduction(rng):
    I = rng.standard_normal((500, 3))
    I /= np.linalg.norm(I, axis=-1, keepdims=True)
    a, b = rng.uniform(-2, 2, (2, 500, 2))
    s = np.concatenate([a[:, :1], a[:, 1:] * I], axis=-1)
    x = np.concatenate([b[:, :1], b[:, 1:] * I], axis=-1)
    keep = qnorm2(s - x) > 1e-2
    s, x = s[keep], x[keep]
    out = cauchy_kernel_array(H, s, x)
    np.testing.assert_allclose(out, qinv(s - x), rtol=1e-12, atol=1e-12)


# -- A, B, C ------------------------------------------------------------------------------


def test_kernel_A_example():
    expected = q(0, -1, 2, 0) / (100 * PI2)
    assert kernel_A(q(0, 2), q(0, 0, 1)).isclose(expected)


def test_kernel_A_singular_on_diagonal():
    with pytest.raises(SingularKernelError):
        kernel_A(q(0, 1, 1, 0), q(0, 1, 1, 0))
    with pytest.raises(SingularKernelError):
        kernel_A(q(0, 1), q(1.0))


@given(nonreal_paravectors(), nonreal_paravectors())
def test_kernel_A_swap_symmetry_of_norms(t, x):
    if qnorm2(t - x) < 1e-2:
        return
    def probe(a, b):
        return H.norm(kernel_A_array(a, b)) * np.linalg.norm(b[1:]) * qnorm2(a - b) ** 1.5 * np.linalg.norm(a[1:])
    assert probe(t, x) == pytest.approx(probe(x, t), rel=1e-12)
    assert probe(t, x) == pytest.approx(1 / (2 * PI2), rel=1e-12)


@pytest.mark.parametrize("lam", [2.0, 0.5])
def test_homogeneity(lam, rng):
    t, x = rng.uniform(-2, 2, (2, 20, 4))
    # degrees read off the formulas: A is homogeneous of degree -5, B and C of degree -4
    np.testing.assert_allclose(kernel_A_array(lam * t, lam * x), lam ** -5 * kernel_A_array(t, x), rtol=1e-12)
    np.testing.assert_allclose(kernel_B_array(lam * t, lam * x), lam ** -4 * kernel_B_array(t, x), rtol=1e-12)
    np.testing.assert_allclose(kernel_C_array(lam * x, lam * t), lam ** -4 * kernel_C_array(x, t), rtol=1e-12)


def _fd(fn, p):
    return fd_grad(fn, p, FDConfig(1e-4, True))


def test_B_and_C_from_A_through_G(rng):
    for _ in range(10):
        y, x = rng.uniform(-2, 2, (2, 4))
        if qnorm2(y - x) < 0.1 or min(qnorm2(qvec(y)), qnorm2(qvec(x))) < 0.1:
            continue
        # B(y, x) = 2 |y_vec|^-2 G_r,y[|y_vec|^2 A(y, x)] + 4 A(y, x) y_vec
        ay = lambda p: qnorm2(qvec(p))[..., None] * kernel_A_array(p, np.broadcast_to(x, p.shape))
        b = 2 * Gr_array(H, _fd(ay, y), y) / qnorm2(qvec(y)) + 4 * qmul(kernel_A_array(y, x), qvec(y))
        np.testing.assert_allclose(kernel_B_array(y, x), b, rtol=1e-7, atol=1e-9)
        # C(x, y) = -[2 |y_vec|^-2 G_y[|y_vec|^2 A(x, y)] + 4 y_vec A(x, y)]
        ax = lambda p: qnorm2(qvec(p))[..., None] * kernel_A_array(np.broadcast_to(x, p.shape), p)
        c = -(2 * G_array(H, _fd(ax, y), y) / qnorm2(qvec(y)) + 4 * qmul(qvec(y), kernel_A_array(x, y)))
        np.testing.assert_allclose(kernel_C_array(x, y), c, rtol=1e-7, atol=1e-9)


def test_B_and_C_differ():
    t, x = q(0, 2, 1, 0), q(0, 3)
    b, c = kernel_B(t, x), kernel_C(x, t)
    assert np.all(np.isfinite(np.asarray(b))) and np.all(np.isfinite(np.asarray(c)))
    assert not b.isclose(c)


def _slope(fn, seps):
    vals = np.array([fn(s) for s in seps])
    return np.polyfit(np.log(seps), np.log(vals), 1)[0]


def test_B_far_field_decay():
    x = np.array([0.0, 1.0, 0.5, 0.0])
    d = np.array([0.3, 0.5, -0.4, 0.7])
    d /= np.linalg.norm(d)
    seps = np.geomspace(50, 800, 6)
    slope = _slope(lambda s: H.norm(kernel_B_array(x + s * d, x)), seps)
    assert slope == pytest.approx(-3.0, abs=0.05)


def test_B_near_field_blow_up():
    x = np.array([0.0, 2.0, 0.5, 0.3])
    e1 = np.array([0.0, 1.0, 0.0, 0.0])
    seps = np.geomspace(1e-4, 1e-3, 6)
    slope = _slope(lambda s: H.norm(kernel_B_array(x + s * e1, x)), seps)
    # the singularity is one order stronger than the far-field decay
    assert slope == pytest.approx(-4.0, abs=0.05)


def test_B_singular_part_has_zero_spherical_mean(rng):
    x = np.array([0.0, 2.0, 0.0, 0.0])
    m = rng.standard_normal((200000, 4))
    m /= np.linalg.norm(m, axis=-1, keepdims=True)
    eps = 1e-3
    mean = kernel_B_array(x + eps * m, np.broadcast_to(x, m.shape)).mean(axis=0)
    peak = H.norm(kernel_B_array(x + eps * m, np.broadcast_to(x, m.shape))).mean()
    assert H.norm(mean) < 2e-2 * peak


# -- nu -------------------------------------------------------------------------------------


def test_nu_examples():
    assert nu_weight(q(0, 1, 2, 3), np.array([1.0, 0, 0, 0])).isclose(q(2.0))
    assert nu_weight(q(0, 2), np.array([0, 1.0, 0, 0])).isclose(q(0, 2))
    assert nu_weight(q(0, 2), np.array([0, 0, 1.0, 0])).isclose(q(0.0))


def test_nu_rejects_bad_input():
    with pytest.raises(SingularKernelError):
        nu_weight(q(1.0), np.array([1.0, 0, 0, 0]))
    with pytest.raises(SingularKernelError):
        nu_weight(q(0, 1), np.array([1.0, 1.0, 0, 0]))


@given(nonreal_paravectors(), quaternions, quaternions, st.floats(-3, 3))
def test_nu_is_linear_in_normal(x, n1, n2, s):
    lhs = nu_array(x, s * n1 + n2)
    rhs = s * nu_array(x, n1) + nu_array(x, n2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10 * (1 + np.abs(rhs).max()))


# -- membership -----------------------------------------------------------------------------


def test_membership_example():
    r1, r2 = kernel_membership_residual(q(0, 3), q(0, 0, 1))
    assert r1 <= 1e-5


def test_membership_needs_non_real_points():
    with pytest.raises(SingularKernelError):
        kernel_membership_residual(q(0, 3), q(1.0))


def test_membership_converges_at_second_order():
    s, x = q(0.2, 1.5, -0.3, 0.4), q(-0.1, 0.2, 0.9, 0.5)
    r = np.array([kernel_membership_residual(s, x, h) for h in (1e-2, 5e-3, 2.5e-3)])
    orders = np.log2(r[:-1] / r[1:])
    assert np.all(np.abs(orders - 2.0) < 0.05)
