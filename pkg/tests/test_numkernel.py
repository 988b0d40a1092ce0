import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcx.numkernel import (
    NumericalError,
    ToleranceConfig,
    column_rank,
    hermitian_eig,
    is_hermitian,
    margin_status,
    matrix_from_json,
    matrix_to_json,
    psd_check,
    psd_sqrt,
    random_hermitian,
    random_unitary,
    skew_part,
    hermitian_part,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_hermitian_eig_example():
    w, V = hermitian_eig([[2, 1j], [-1j, 2]])
    assert np.allclose(w, [1, 3])
    assert np.allclose(V.conj().T @ V, np.eye(2))


def test_psd_margin():
    res = psd_check(np.eye(2) - 0.9 * SIGMA_X)
    assert res.is_psd and res.margin == pytest.approx(0.1)
    res = psd_check(np.eye(2) - 1.1 * SIGMA_X)
    assert not res.is_psd and res.margin == pytest.approx(-0.1)


def test_psd_check_rejects_non_hermitian():
    with pytest.raises(NumericalError):
        psd_check([[1, 1], [0, 1]])


def test_psd_check_relative_cutoff():
    # eigenvalue -1e-8 is tiny against a top eigenvalue of 1e3
    assert psd_check(np.diag([-1e-8, 1e3])).is_psd
    assert not psd_check(np.diag([-1e-8, 1.0])).is_psd


def test_psd_sqrt_squares_back(rng):
    H = random_hermitian(5, rng)
    P = H @ H
    R = psd_sqrt(P)
    assert np.allclose(R @ R, P)
    with pytest.raises(NumericalError):
        psd_sqrt(-np.eye(2))


def test_column_rank():
    E12 = np.array([[0, 1], [0, 0]])
    E22 = np.array([[0, 0], [0, 1]])
    assert column_rank(np.hstack([E12, E22])).rank == 2
    assert column_rank(np.outer([1, 2, 3], [1, 1, 1])).rank == 1
    assert column_rank(np.zeros((3, 3))).rank == 0


def test_is_hermitian_scales_with_entries():
    H = 1e6 * np.eye(2, dtype=complex)
    H[0, 1] = 1e-7
    assert is_hermitian(H)
    H[0, 1] = 1e-3
    assert not is_hermitian(H)


def test_skew_and_hermitian_parts_recompose(rng):
    M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.allclose(hermitian_part(M) + 1j * skew_part(M), M)
    assert is_hermitian(skew_part(M))


def test_margin_status():
    assert margin_status(1.0, 0.1) == "inside"
    assert margin_status(-1.0, 0.1) == "outside"
    assert margin_status(0.05, 0.1) == "boundary-uncertain"


def test_tolerance_config_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(psd_tol=0)
    cfg = ToleranceConfig(psd_tol=1e-8)
    assert ToleranceConfig.from_dict(cfg.to_dict()) == cfg


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_random_unitary_is_unitary(n, seed):
    U = random_unitary(n, np.random.default_rng(seed))
    assert np.allclose(U.conj().T @ U, np.eye(n), atol=1e-12)


@given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False), min_size=6, max_size=6))
def test_matrix_json_roundtrip(vals):
    M = np.array(vals).reshape(2, 3)
    assert np.array_equal(matrix_from_json(matrix_to_json(M)), M)


def test_matrix_json_rejects_bad_shape():
    with pytest.raises(NumericalError):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[0, 0]]})
