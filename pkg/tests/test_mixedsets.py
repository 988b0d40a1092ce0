import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcx.mixedsets import (
    MixedTuple,
    NoFiniteMaximalDilation,
    NonMemberError,
    NotMaximalInputError,
    dilate_to_maximal,
    is_maximal,
    matrix_convex_combine,
    mixed_member,
    random_member,
    trivial_kernel_test,
    witness_dilation,
)
from mcx.numkernel import random_unitary
from mcx.pencil import MatrixTuple, ShapeError

E12 = np.array([[0, 1], [0, 0]], dtype=complex)
E22 = np.array([[0, 0], [0, 1]], dtype=complex)


def _valid_witness(t, w):
    assert mixed_member(w.dilated).margin >= -1e-9
    assert w.dilated.compress(t.level).max_entry_distance(t) <= 1e-9
    assert w.nontriviality > 1e-9


def test_member_margin():
    t = MixedTuple((0.6 * np.eye(2),), (0.8 * np.eye(2),))
    assert mixed_member(t).margin == pytest.approx(0, abs=1e-15)
    assert not mixed_member(t.scaled(1.1)).is_psd


def test_hermitian_slot_enforced():
    with pytest.raises(ShapeError):
        MixedTuple((np.eye(2),), (E12,))


def test_trivial_kernel():
    assert trivial_kernel_test([np.eye(2)])[0]
    ok, smin = trivial_kernel_test([E12, E22])
    assert not ok and smin == pytest.approx(0)


def test_two_row_not_maximal():
    v = is_maximal(MixedTuple((E12, E22)))
    assert not v.is_maximal
    assert v.eq_margin == pytest.approx(0, abs=1e-15)
    assert v.blockrow_rank_deficit == 2
    _valid_witness(MixedTuple((E12, E22)), v.witness)


def test_unitary_maximal_and_scaled_not():
    U = random_unitary(3, np.random.default_rng(0))
    assert is_maximal(MixedTuple((U,))).is_maximal
    t = MixedTuple((0.9 * U,))
    v = is_maximal(t)
    assert not v.is_maximal and v.witness.failed_condition == "sum-square"
    _valid_witness(t, v.witness)


def test_maximal_input_has_no_witness():
    with pytest.raises(NotMaximalInputError):
        witness_dilation(MixedTuple((np.eye(2),)))


def test_input_validation():
    with pytest.raises(NonMemberError):
        is_maximal(MixedTuple((2 * np.eye(2),)))
    with pytest.raises(ShapeError):
        is_maximal(MixedTuple((), (np.eye(2),)))


def test_singular_isometry_in_one_slot():
    # T = E12 with X = E22: sum-square I, but T has a kernel
    t = MixedTuple((E12,), (np.diag([0.0, 1.0]),))
    v = is_maximal(t)
    assert v.eq_margin == pytest.approx(0) and v.blockrow_rank_deficit == 1
    _valid_witness(t, v.witness)


def test_hand_dilation():
    out, shift = dilate_to_maximal(MixedTuple((np.array([[0.5]]),), (np.array([[0.0]]),)))
    S_ref = np.array([[0.5, math.sqrt(3) / 2], [-0.5, 1 / (2 * math.sqrt(3))]])
    assert shift == 0
    assert np.allclose(out.T[0], S_ref, atol=1e-12)
    assert np.allclose(out.X[0], np.diag([0, math.sqrt(2 / 3)]), atol=1e-12)
    assert np.allclose(out.sum_square(), np.eye(2), atol=1e-12)


def test_dilation_without_selfadjoint_slot_is_unitary():
    out, _ = dilate_to_maximal(MixedTuple((np.array([[0.5]]),)))
    S = out.T[0]
    assert np.allclose(S @ S.conj().T, np.eye(2), atol=1e-12)
    assert out.T[0][0, 0] == pytest.approx(0.5)
    # C is positive in the completion
    assert S[1, 1].real > 0 and abs(S[1, 1].imag) < 1e-15


def test_no_finite_maximal_dilation_for_two_rows():
    with pytest.raises(NoFiniteMaximalDilation):
        dilate_to_maximal(MixedTuple((E12, E22)))


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 3), st.integers(1, 5),
       st.sampled_from(["interior", "boundary", "singular"]))
def test_biconditional_property(seed, d, g, n, kind):
    if kind == "singular" and d != 1:
        d = 1
    rng = np.random.default_rng(seed)
    t = random_member(d, g, n, rng, kind)
    v = is_maximal(t)
    if v.boundary_uncertain:
        return
    assert v.is_maximal == (v.witness is None)
    if v.witness is not None:
        _valid_witness(t, v.witness)
    if d >= 2:
        assert not v.is_maximal
        assert v.blockrow_rank_deficit >= (d - 1) * n


@given(st.integers(0, 2**32 - 1), st.integers(0, 3), st.integers(1, 5),
       st.sampled_from(["interior", "boundary", "singular"]))
def test_dilation_property(seed, g, n, kind):
    t = random_member(1, g, n, np.random.default_rng(seed), kind)
    out, shift = dilate_to_maximal(t)
    assert np.linalg.norm(np.eye(out.level) - out.sum_square()) <= 1e-9
    assert is_maximal(out, with_witness=False).is_maximal
    assert out.compress(n).max_entry_distance(t) <= 2e-3
    assert shift < 2e-3


def test_matrix_convex_combine(rng):
    X1 = MatrixTuple((np.diag([1.0, -1.0]),), (True,))
    X2 = MatrixTuple((np.array([[0.5]]),), (True,))
    V1 = np.array([[1.0], [0.0]]) / math.sqrt(2)
    V2 = np.array([[1.0]]) / math.sqrt(2)
    Y = matrix_convex_combine([X1, X2], [V1, V2])
    assert Y[0][0, 0] == pytest.approx(0.75)
    with pytest.raises(ValueError):
        matrix_convex_combine([X1, X2], [V1, 2 * V2])


def test_mixed_json_roundtrip(rng):
    t = random_member(2, 1, 3, rng)
    back = MixedTuple.from_json(t.to_json())
    assert back.d == 2 and back.g == 1
    assert back.max_entry_distance(t) == 0
    obj = t.to_json()
    obj["d"] = 3
    with pytest.raises(ShapeError):
        MixedTuple.from_json(obj)
