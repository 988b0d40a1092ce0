import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcx.convexbody import EuclideanBall, KpBody, LqBall, Polytope, standard_position, subquadratic_certify
from mcx.matrange import (
    DefiniteLastCoordinate,
    MatrixRangeBody,
    NotSupportingHyperplane,
    ZeroBlockError,
    aep_dilation_search,
    ansatz_tuple,
    matrix_range_support,
    paraboloid_bound,
    refute_dilation_kp,
    vector_state,
    w1_membership,
    wmax_membership,
)
from mcx.numkernel import random_hermitian, random_unitary

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
A1 = SX
A2 = np.diag([0.0, 1.0]).astype(complex)


def test_support_examples():
    assert matrix_range_support([SZ, SX], [1, 0])[0] == pytest.approx(1)
    for th in np.linspace(0, 2 * np.pi, 13):
        assert matrix_range_support([SZ, SX], [math.cos(th), math.sin(th)])[0] == pytest.approx(1)
    assert matrix_range_support([A1, A2], [0, -1])[0] == pytest.approx(0, abs=1e-15)
    val, v = matrix_range_support([A1, A2], [3, 4])
    assert np.vdot(v, (0.6 * A1 + 0.8 * A2) @ v).real == pytest.approx(val)


@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10))
def test_support_homogeneous_and_convex(seed, s):
    rng = np.random.default_rng(seed)
    A = [random_hermitian(3, rng) for _ in range(3)]
    u, v = rng.standard_normal(3), rng.standard_normal(3)
    h = lambda c: np.linalg.norm(c) * matrix_range_support(A, c)[0]
    assert h(s * u) == pytest.approx(s * h(u), rel=1e-9, abs=1e-12)
    assert h(u + v) <= h(u) + h(v) + 1e-9


def test_w1_examples():
    r = w1_membership([SZ, SX], [0, 0])
    assert r.member and r.margin == pytest.approx(1)
    r = w1_membership([SZ, SX], [1.1, 0])
    assert not r.member and r.margin == pytest.approx(-0.1)
    assert w1_membership([A1, A2], [0, 0.5]).member


def test_w1_accepts_state_images(rng):
    A = [random_hermitian(3, rng) for _ in range(2)]
    for _ in range(1000):
        G = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        rho = G @ G.conj().T
        rho /= np.trace(rho).real
        x = [np.trace(rho @ E).real for E in A]
        assert w1_membership(A, x).member


def test_ellipse_range_body_is_exact():
    E = MatrixRangeBody([A1, A2])
    th = np.linspace(0, 2 * np.pi, 50)
    boundary = np.column_stack([np.cos(th), (1 + np.sin(th)) / 2])
    assert E.contains(boundary).all()
    assert not E.contains(1.001 * (boundary - [0, 0.5]) + [0, 0.5]).any()


def test_wmax_examples():
    r = wmax_membership(EuclideanBall([0, 0], 1), [SZ, SX])
    assert r.member and abs(r.margin) <= 1e-9
    r = wmax_membership(KpBody(1.5), [np.array([[0.1]]), np.array([[0.5]])])
    assert r.member and r.margin > 0
    assert wmax_membership(KpBody(2), ansatz_tuple([0.2], [0], 0.16)).member


def test_wmax_level_one_matches_contains(rng):
    for K in (KpBody(1.5), EuclideanBall([0, 0], 1), LqBall(3, [0.1, 0], 0.9)):
        P = rng.uniform(-1.3, 1.3, size=(300, 2))
        got = [wmax_membership(K, [x[:1, None], x[1:, None]]).member for x in P]
        assert np.array_equal(got, K.contains(P))


@given(st.integers(0, 2**32 - 1))
def test_wmax_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    X = [0.4 * random_hermitian(3, rng) for _ in range(2)]
    U = random_unitary(3, rng)
    K = EuclideanBall([0, 0], 1)
    a = wmax_membership(K, X)
    b = wmax_membership(K, [U.conj().T @ E @ U for E in X])
    assert a.member == b.member
    assert a.margin == pytest.approx(b.margin, abs=1e-9)


def test_paraboloid_ellipse():
    cert = paraboloid_bound([A1, A2], [0, 0], [0, -1])
    assert cert.M == pytest.approx(0.25, abs=1e-12)
    assert cert.eps == pytest.approx(1) and cert.kernel_dim == 1
    assert abs(cert.B[0][0, 0]) == pytest.approx(1) and abs(cert.C[0][0, 0]) < 1e-15
    assert cert.min_slack >= -1e-9 and cert.verified


def test_paraboloid_scales():
    assert paraboloid_bound([2 * A1, 2 * A2], [0, 0], [0, -1]).M == pytest.approx(1 / 8, abs=1e-12)


def test_paraboloid_disk_certificate():
    # every boundary point of the disk range is exposed; the certificate is
    # M = 1/2, matching the osculating bound 1 - sqrt(1 - x^2) >= x^2 / 2
    for th in np.linspace(0, 2 * np.pi, 8, endpoint=False):
        u = np.array([math.cos(th), math.sin(th)])
        cert = paraboloid_bound([SZ, SX], u, u, samples=2000)
        assert cert.M == pytest.approx(0.5, abs=1e-12)
        assert cert.verified


def test_paraboloid_hypothesis_failures():
    with pytest.raises(DefiniteLastCoordinate):
        paraboloid_bound([A1, A2], [0, -0.5], [0, -1], samples=0)
    with pytest.raises(NotSupportingHyperplane):
        paraboloid_bound([A1, A2], [0, 0.5], [0, -1], samples=0)
    with pytest.raises(ZeroBlockError):
        paraboloid_bound([np.diag([1.0, 0.0]), A2], [0, 0], [0, -1], samples=0)


def test_vector_state_images_in_paraboloid(rng):
    cert = paraboloid_bound([A1, A2], [0, 0], [0, -1], samples=0)
    V = rng.standard_normal((5000, 2)) + 1j * rng.standard_normal((5000, 2))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    x = vector_state([A1, A2], V)
    assert np.all(x[:, 1] >= cert.M * x[:, 0] ** 2 - 1e-9)


def test_search_k2_hit_is_member():
    res = aep_dilation_search(KpBody(2.0))
    assert res["found"] and res["a"][0] > 0
    X = ansatz_tuple(res["a"], res["b"], res["beta"])
    # analytic check on real states: x^2 <= y and y <= 1
    t = np.linspace(0, np.pi, 20001)
    pts = vector_state(X, np.column_stack([np.cos(t), np.sin(t)]).astype(complex))
    assert np.all(pts[:, 0] ** 2 <= pts[:, 1] + 1e-12) and np.all(pts[:, 1] <= 1)


@pytest.mark.parametrize("p", [1.25, 1.5, 1.75])
def test_search_none_found_when_subquadratic(p):
    K = KpBody(p)
    assert subquadratic_certify(standard_position(K, [0, 0], [0, -1]))["verdict"] == "yes"
    res = aep_dilation_search(K)
    assert not res["found"] and res["tested"] == 2600


def test_search_truncated_square_vertex():
    K = Polytope([[0, 0], [1, 1], [0, 2], [-1, 1]])
    assert not aep_dilation_search(K)["found"]


def test_refute_examples():
    r = refute_dilation_kp(1.5, 0.2, 0, 0.16)
    assert r["t"] == 0.5 and r["lhs"] == pytest.approx(0.0721, abs=1e-4) and r["rhs"] == 0.04
    assert refute_dilation_kp(1.5, 0.5, 0, 1)["found"]
    r = refute_dilation_kp(1.5, 0.3, 0, 0)
    assert r["found"] and r["k"] == 1


def test_refute_every_search_candidate():
    from mcx.matrange import DEFAULT_A, DEFAULT_B, DEFAULT_BETA
    for a in DEFAULT_A:
        for b in DEFAULT_B:
            for beta in DEFAULT_BETA:
                r = refute_dilation_kp(1.5, a, b, beta)
                assert r["found"] and r["margin"] > 0


@given(st.floats(1.05, 1.95), st.floats(1e-6, 10), st.floats(-5, 5), st.floats(0, 100))
def test_refute_always_finds_witness(p, a, b, beta):
    r = refute_dilation_kp(p, a, b, beta)
    assert r["found"] and r["margin"] > 0


@pytest.mark.parametrize("A,points", [
    ([A1, A2], [(0, 0), (1, 0.5), (0, 1), (math.cos(1), (1 + math.sin(1)) / 2)]),
    ([SZ, SX], [(1, 0), (0, 1), (math.cos(2), math.sin(2))]),
])
def test_range_bodies_never_certify_subquadratic(A, points):
    K = MatrixRangeBody(A)
    for lam in points:
        lam = np.array(lam, dtype=float)
        u = K._Mpinv.T @ (K._Mpinv @ (lam - K.offset))
        S = standard_position(K, lam, u / np.linalg.norm(u))
        assert subquadratic_certify(S)["verdict"] != "yes"
