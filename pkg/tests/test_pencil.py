import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcx.numkernel import random_complex, random_hermitian, random_unitary
from mcx.pencil import (
    HermitianPencil,
    MatrixTuple,
    ShapeError,
    build_mixed_pencil,
    conjugation_witness_check,
    decompose_tuple,
    eval_pencil,
    recompose_tuple,
    spectrahedron_member,
    to_selfadjoint_presentation,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def test_eval_at_zero_is_identity():
    P = HermitianPencil((SIGMA_X, SIGMA_Z))
    Z = MatrixTuple((np.zeros((3, 3)), np.zeros((3, 3))), (True, True))
    assert np.array_equal(eval_pencil(P, Z), np.eye(6))


def test_kron_order_coefficient_outside():
    A = np.array([[1, 2], [2, 3]], dtype=complex)
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    L = eval_pencil(HermitianPencil((A,)), MatrixTuple((X,), (True,)))
    assert np.allclose(L, np.eye(4) - np.kron(A, X))


def test_mixed_pencil_scalar_margin():
    P = build_mixed_pencil(1, 0)
    Z = decompose_tuple(MatrixTuple((np.array([[0.5]]),)))
    assert spectrahedron_member(P, Z).margin == pytest.approx(0.5)


def test_arity_and_selfadjoint_checks():
    P = HermitianPencil((SIGMA_X,))
    with pytest.raises(ShapeError):
        eval_pencil(P, MatrixTuple((np.eye(2), np.eye(2)), (True, True)))
    with pytest.raises(ShapeError):
        eval_pencil(P, MatrixTuple((np.array([[0, 1], [0, 0]]),), (False,)))
    with pytest.raises(ShapeError):
        HermitianPencil((np.array([[0, 1j], [1j, 0]]),), field="R", sa_mask=(False,))
    with pytest.raises(ShapeError):
        HermitianPencil((np.array([[0, 1], [0, 0]]),))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_membership_is_unitarily_invariant(seed, n):
    rng = np.random.default_rng(seed)
    P = HermitianPencil(tuple(random_hermitian(2, rng) for _ in range(2)))
    Z = MatrixTuple(tuple(0.3 * random_hermitian(n, rng) for _ in range(2)), (True, True))
    U = random_unitary(n, rng)
    a = spectrahedron_member(P, Z)
    b = spectrahedron_member(P, Z.conjugate_by(U))
    assert a.is_psd == b.is_psd
    assert a.margin == pytest.approx(b.margin, abs=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_direct_sum_margin_is_minimum(seed):
    rng = np.random.default_rng(seed)
    P = HermitianPencil((random_hermitian(3, rng),))
    Z1 = MatrixTuple((0.2 * random_hermitian(2, rng),), (True,))
    Z2 = MatrixTuple((0.2 * random_hermitian(3, rng),), (True,))
    m = spectrahedron_member(P, Z1.direct_sum(Z2)).margin
    assert m == pytest.approx(min(spectrahedron_member(P, Z1).margin, spectrahedron_member(P, Z2).margin), abs=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_selfadjoint_presentation_preserves_value(seed):
    rng = np.random.default_rng(seed)
    A = random_complex(2, rng)
    P = HermitianPencil((A,), (False,))
    T = MatrixTuple((0.3 * random_complex(3, rng),), (False,))
    L1 = eval_pencil(P, T)
    L2 = eval_pencil(to_selfadjoint_presentation(P), decompose_tuple(T))
    assert np.allclose(L1, L2, atol=1e-12)


def test_recompose_inverts_decompose(rng):
    T = MatrixTuple((random_complex(3, rng), random_hermitian(3, rng)), (False, True))
    back = recompose_tuple(decompose_tuple(T), T.sa_mask)
    for a, b in zip(T, back):
        assert np.allclose(a, b)


def test_mixed_pencil_matches_row_norm(rng):
    # ||[T X]|| <= 1 iff the pencil is PSD; the pencil margin is 1 - ||R||
    T = random_complex(3, rng)
    X = random_hermitian(3, rng)
    R = np.hstack([T, X])
    s = 0.8 / np.linalg.norm(R, 2)
    Z = decompose_tuple(MatrixTuple((s * T, s * X), (False, True)))
    res = spectrahedron_member(build_mixed_pencil(1, 1), Z)
    assert res.margin == pytest.approx(0.2, abs=1e-12)


def test_mixed_pencil_field_and_size():
    P = build_mixed_pencil(2, 1)
    assert P.nvars == 5 and P.coeff_dim == 8 and P.field == "C"
    assert build_mixed_pencil(0, 2).field == "R"
    with pytest.raises(ValueError):
        build_mixed_pencil(0, 0)


def test_conjugation_witness_two_row():
    E12 = np.array([[0, 1], [0, 0]], dtype=complex)
    E22 = np.array([[0, 0], [0, 1]], dtype=complex)
    Z = decompose_tuple(MatrixTuple((E12, E22)))
    res = conjugation_witness_check(Z, build_mixed_pencil(2, 0))
    assert res["verdict"] == "witness-violates"
    assert res["margin"] == pytest.approx(0, abs=1e-12)
    # conjugate is the row (E21, E22), whose row norm is sqrt(2)
    assert res["conjugate_margin"] == pytest.approx(1 - np.sqrt(2), abs=1e-12)


def test_conjugation_single_contraction_is_closed():
    E12 = np.array([[0, 1], [0, 0]], dtype=complex)
    Z = decompose_tuple(MatrixTuple((E12,)))
    assert conjugation_witness_check(Z, build_mixed_pencil(1, 0))["verdict"] == "closed-on-witness"


def test_tuple_json_roundtrip(rng):
    T = MatrixTuple((random_complex(2, rng), random_hermitian(2, rng)), (False, True))
    back = MatrixTuple.from_json(T.to_json())
    assert back.sa_mask == T.sa_mask
    assert all(np.array_equal(a, b) for a, b in zip(T, back))
    bad = T.to_json()
    bad["level"] = 3
    with pytest.raises(ShapeError):
        MatrixTuple.from_json(bad)
