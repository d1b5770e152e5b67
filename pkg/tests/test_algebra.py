import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slicekit.algebra import (
    H,
    Multivector,
    Paravector,
    Quaternion,
    clifford,
    multivector_to_quaternion,
    mv_mul,
    paravector_inverse,
    qmul,
    quaternion_mul,
    quaternion_to_multivector,
    slice_decompose,
)
from slicekit.errors import ContractError, SingularInputError

from strategies import coeffs, paravectors, quaternions


def e(n, *idx):
    return Multivector.blade(n, *idx)


# -- examples -------------------------------------------------------------------


def test_disjoint_generators_concatenate():
    assert mv_mul(e(3, 1), e(3, 2)) == e(3, 1, 2)


def test_generator_squares_to_minus_one():
    assert mv_mul(e(3, 1), e(3, 1)) == Multivector.scalar(3, -1.0)


def test_one_plus_e1_times_one_minus_e1():
    one = Multivector.scalar(3)
    # expanded by hand: 1 - e1 + e1 - e1 e1 = 2
    assert mv_mul(one + e(3, 1), one - e(3, 1)) == Multivector.scalar(3, 2.0)


@pytest.mark.parametrize(
    "x, expected",
    [
        (Paravector(1.0, (0, 0, 0)), np.array([1.0, 0, 0, 0])),
        (Paravector(0.0, (1, 0, 0)), np.array([0.0, -1, 0, 0])),
        (Paravector(1.0, (1, 0, 0)), np.array([0.5, -0.5, 0, 0])),
    ],
)
def test_paravector_inverse_examples(x, expected):
    inv = np.asarray(paravector_inverse(x))
    np.testing.assert_allclose(clifford(3).paravector_part(inv), expected, atol=1e-15)


def test_paravector_inverse_of_zero_raises():
    with pytest.raises(SingularInputError):
        paravector_inverse(Paravector(0.0, (0, 0, 0)))


def test_slice_decompose_examples():
    st = slice_decompose(Paravector(3.0, (0, 4, 0)))
    assert (st.u, st.v, st.axis) == (3.0, 4.0, (0.0, 1.0, 0.0))
    st = slice_decompose(Paravector(5.0, (0, 0, 0)))
    assert (st.u, st.v, st.axis) == (5.0, 0.0, (1.0, 0.0, 0.0))
    st = slice_decompose(Paravector(1.0, (1, 1, 0)))
    assert st.u == 1.0
    assert st.v == pytest.approx(math.sqrt(2), abs=1e-15)
    np.testing.assert_allclose(st.axis, [1 / math.sqrt(2), 1 / math.sqrt(2), 0], atol=1e-15)


def test_quaternion_examples():
    assert quaternion_mul(Quaternion(0, 1), Quaternion(0, 0, 1)) == Quaternion(0, 0, 0, 1)
    q = Quaternion(1, 2)
    # q^-1 = (1 - 2 e1) / 5
    assert q.inverse().isclose(Quaternion(0.2, -0.4))
    assert (q * q.inverse()).isclose(Quaternion(1.0))
    p = Quaternion(1, 0, 1)
    assert (p * p).isclose(Quaternion(0, 0, 2))


def test_multivector_equality_is_exact_for_integers():
    a = Multivector.from_array(2, [1, 2, 3, 4])
    assert a * 2 == Multivector.from_array(2, [2, 4, 6, 8])
    assert a.isclose(a + Multivector.scalar(2, 1e-14))


def test_dimension_limits():
    with pytest.raises(ContractError):
        clifford(9)
    with pytest.raises(ContractError):
        mv_mul(e(2, 1), e(3, 1))


def test_bridge_rejects_elements_outside_image():
    with pytest.raises(ContractError):
        multivector_to_quaternion(e(3, 3))


# -- invariants -------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 6))
def test_generators_anticommute_exhaustively(n):
    alg = clifford(n)
    gens = [alg.vector(np.eye(n)[i]) for i in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        lhs = alg.mul(gens[i], gens[j]) + alg.mul(gens[j], gens[i])
        expected = alg.scalar(-2.0 if i == j else 0.0)
        np.testing.assert_array_equal(lhs, expected)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_associativity_random_triples(n, rng):
    alg = clifford(n)
    a, b, c = rng.standard_normal((3, 1000, alg.dim))
    lhs = alg.mul(alg.mul(a, b), c)
    rhs = alg.mul(a, alg.mul(b, c))
    scale = np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1) * np.linalg.norm(c, axis=-1)
    assert np.max(np.linalg.norm(lhs - rhs, axis=-1) / scale) < 1e-12


def test_quaternion_norm_is_multiplicative(rng):
    p, q = rng.standard_normal((2, 1000, 4))
    lhs = H.norm(qmul(p, q))
    assert np.max(np.abs(lhs - H.norm(p) * H.norm(q)) / (H.norm(p) * H.norm(q))) < 1e-12


def test_clifford_norm_is_not_multiplicative_in_general():
    alg = clifford(4)
    a = alg.one() + alg.mul(alg.vector([1, 0, 0, 0]), alg.mul(alg.vector([0, 1, 0, 0]), alg.mul(alg.vector([0, 0, 1, 0]), alg.vector([0, 0, 0, 1]))))
    # (1 + e1234)^2 = 2 + 2 e1234 since e1234^2 = +1
    assert alg.norm(alg.mul(a, a)) != pytest.approx(alg.norm(a) ** 2)


def test_embedding_agrees_with_hamilton_product(rng):
    alg = clifford(3)
    for p, q in rng.standard_normal((1000, 2, 4)):
        prod = quaternion_to_multivector(p) * quaternion_to_multivector(q)
        back = multivector_to_quaternion(prod)
        assert back.isclose(Quaternion.from_array(qmul(p, q)), rtol=1e-12, atol=1e-12)


@given(quaternions, quaternions)
def test_conjugation_reverses_products(p, q):
    lhs = H.conj(qmul(p, q))
    rhs = qmul(H.conj(q), H.conj(p))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@given(coeffs(16), coeffs(16))
def test_clifford_conjugation_is_anti_automorphism(a, b):
    alg = clifford(4)
    np.testing.assert_allclose(alg.conj(alg.mul(a, b)), alg.mul(alg.conj(b), alg.conj(a)), atol=1e-11)


@given(paravectors(4).filter(lambda x: np.linalg.norm(x) > 1e-3))
def test_paravector_inverse_is_two_sided(x):
    alg = clifford(4)
    X = alg.embed(x)
    inv = alg.paravector_inverse(X)
    np.testing.assert_allclose(alg.mul(X, inv), alg.one(), atol=1e-12)
    np.testing.assert_allclose(alg.mul(inv, X), alg.one(), atol=1e-12)


@given(paravectors(3))
def test_slice_decomposition_reassembles(x):
    st = slice_decompose(Paravector.from_array(x))
    np.testing.assert_allclose(np.asarray(st.reassemble()), x, atol=1e-14)
    assert st.v >= 0
    assert abs(np.linalg.norm(st.axis) - 1.0) < 1e-12


@given(quaternions)
def test_bridge_round_trip(q):
    back = multivector_to_quaternion(quaternion_to_multivector(q))
    np.testing.assert_array_equal(np.asarray(back), q)
