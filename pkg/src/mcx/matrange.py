"""Level-one matrix ranges W_1(A), membership in W^max(K), the paraboloid
bound at exposed points, and the 2x2 dilation search/refutation over K_p.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .convexbody import (
    ConvexBody,
    GeometryError,
    NO,
    NotExtremeError,
    _rotation_to_minus_last,
    direction_grid,
)
from .numkernel import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    hermitian_part,
    is_hermitian,
    margin_status,
    matrix_to_json,
    op_norm,
)
from .pencil import MatrixTuple, ShapeError

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def as_sa_tuple(A, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Coerce a MatrixTuple or sequence of matrices to a list of hermitian arrays."""
    entries = list(A.entries) if isinstance(A, MatrixTuple) else [as_matrix(E) for E in A]
    if not entries:
        raise ShapeError("empty tuple")
    n = entries[0].shape[0]
    for j, E in enumerate(entries):
        if E.shape != (n, n):
            raise ShapeError("entries must share one square shape")
        if not is_hermitian(E, tol):
            raise ShapeError(f"entry {j} is not hermitian")
    return [hermitian_part(E) for E in entries]


def _pencil_stack(A: list, C: np.ndarray) -> np.ndarray:
    return np.einsum("mj,jab->mab", C, np.asarray(A))


def matrix_range_support(A, c) -> tuple[float, np.ndarray]:
    """lambda_max(sum c_j A_j) for unit c, with an attaining unit eigenvector."""
    A = as_sa_tuple(A)
    c = np.asarray(c, dtype=float)
    nrm = np.linalg.norm(c)
    if nrm == 0:
        raise ValueError("direction must be nonzero")
    c = c / nrm
    w, V = np.linalg.eigh(_pencil_stack(A, c[None, :])[0])
    return float(w[-1]), V[:, -1]


def support_values(A: list, C: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(_pencil_stack(A, C))[:, -1]


def vector_state(A: list, v: np.ndarray) -> np.ndarray:
    """(v* A_j v)_j for unit vectors v (rows)."""
    V = np.atleast_2d(v)
    return np.real(np.einsum("mi,jik,mk->mj", V.conj(), np.asarray(A), V))


class MatrixRangeBody(ConvexBody):
    """K = W_1(A).  Membership is exact for 2x2 tuples (an affine image of the
    Bloch ball); for larger tuples it falls back to the direction grid, which
    is an outer approximation.
    """

    kind = "matrix_range"

    def __init__(self, A, n_directions: int = 720):
        self.A = as_sa_tuple(A)
        self.dim = len(self.A)
        self.n = self.A[0].shape[0]
        self._grid = direction_grid(self.dim, n2d=n_directions)
        self._exact = False
        if self.n == 2:
            self.offset = np.array([np.trace(E).real / 2 for E in self.A])
            self.M = np.array([[np.trace(E @ P).real / 2 for P in PAULI] for E in self.A])
            if np.linalg.matrix_rank(self.M) == self.dim:
                self._exact = True
                self._Mpinv = np.linalg.pinv(self.M)
                self.extreme_descriptor = "ellipsoid boundary"

    def support(self, c):
        return support_values(self.A, np.atleast_2d(np.asarray(c, dtype=float)))

    def _constraints(self, P):
        if self._exact:
            Y = P - self.offset
            r = np.linalg.norm(Y @ self._Mpinv.T, axis=1)
            s = 1 + r + np.linalg.norm(self._Mpinv, 2) * (np.linalg.norm(P, axis=1) + np.linalg.norm(self.offset))
            return (1 - r)[:, None], s[:, None]
        h = self.support(self._grid)
        CP = P @ self._grid.T
        return h[None, :] - CP, np.abs(h)[None, :] + np.abs(CP)

    def descriptor(self):
        return {"kind": "matrix_range", "tuple": MatrixTuple(tuple(self.A), (True,) * self.dim).to_json()}

    def isolated_at(self, lam):
        if not self._exact:
            return super().isolated_at(lam)
        r = np.linalg.norm(self._Mpinv @ (np.asarray(lam, dtype=float) - self.offset))
        if abs(r - 1) > 1e-9:
            raise NotExtremeError("point is not on the boundary of the range")
        return NO, {"reason": "ellipsoid: every boundary point is extreme, none isolated"}


# --- membership -------------------------------------------------------------

class MembershipResult(NamedTuple):
    member: bool
    margin: float
    status: str
    grid_error: float
    argmin_direction: list


def _grid_spacing(dim: int, count: int) -> float:
    if dim == 1:
        return 0.0
    if dim == 2:
        return 2 * np.pi / count
    return math.sqrt(4 * np.pi / count)


def _membership(hvals: np.ndarray, lam_max: np.ndarray, C: np.ndarray, radius: float, xnorm: float,
                tol: float) -> MembershipResult:
    gaps = hvals - lam_max
    i = int(np.argmin(gaps))
    margin = float(gaps[i])
    grid_err = _grid_spacing(C.shape[1], len(C)) * (radius + xnorm)
    return MembershipResult(margin >= -tol, margin, margin_status(margin, grid_err), grid_err, C[i].tolist())


def w1_membership(A, lam, directions=None, tol: Optional[float] = None) -> MembershipResult:
    """Grid test of lam in W_1(A): min_c lambda_max(sum c_j A_j) - <c, lam>."""
    A = as_sa_tuple(A)
    lam = np.asarray(lam, dtype=float)
    C = direction_grid(len(A)) if directions is None else np.asarray(directions, dtype=float)
    tol = DEFAULT_TOL.psd_tol if tol is None else tol
    h = support_values(A, C)
    radius = max(op_norm(sum(E @ E for E in A)) ** 0.5, 1e-300)
    return _membership(h, C @ lam, C, radius, float(np.linalg.norm(lam)), tol)


def wmax_membership(K: ConvexBody, X, directions=None, tol: Optional[float] = None) -> MembershipResult:
    """Grid test of X in W^max(K): sum c_j X_j <= h_K(c) I for every grid c."""
    Xs = as_sa_tuple(X)
    if len(Xs) != K.dim:
        raise ShapeError(f"tuple has {len(Xs)} entries, body has dimension {K.dim}")
    C = direction_grid(K.dim) if directions is None else np.asarray(directions, dtype=float)
    tol = DEFAULT_TOL.psd_tol if tol is None else tol
    h = K.support(C)
    lam = support_values(Xs, C)
    xnorm = math.sqrt(sum(op_norm(E) ** 2 for E in Xs))
    return _membership(h, lam, C, float(np.max(np.abs(h))), xnorm, tol)


# --- paraboloid bound -------------------------------------------------------

class ParaboloidError(GeometryError):
    pass


class NotSupportingHyperplane(ParaboloidError):
    pass


class DefiniteLastCoordinate(ParaboloidError):
    """The point is not attained: the rotated last coordinate is definite."""


class DegenerateLastCoordinate(ParaboloidError):
    pass


class ZeroBlockError(ParaboloidError):
    """The kernel block does not propagate: the point is not exposed this way."""


@dataclass
class ParaboloidCertificate:
    point: np.ndarray
    direction: np.ndarray
    rotation: np.ndarray
    B: list
    C: list
    D: np.ndarray
    eps: float
    M: float
    kernel_dim: int
    samples: int = 0
    min_slack: float = float("nan")
    verified: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "direction": self.direction.tolist(),
            "rotation": self.rotation.tolist(),
            "B": [matrix_to_json(b) for b in self.B],
            "C": [matrix_to_json(c) for c in self.C],
            "D": matrix_to_json(self.D),
            "eps": self.eps,
            "M": self.M,
            "kernel_dim": self.kernel_dim,
            "samples": self.samples,
            "min_slack": self.min_slack,
            "verified": self.verified,
        }


def standard_position_tuple(A, lam, direction) -> tuple[list, np.ndarray]:
    """Translate by lam and rotate so that ``direction`` becomes -e_g."""
    A = as_sa_tuple(A)
    lam = np.asarray(lam, dtype=float)
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    n = A[0].shape[0]
    shifted = [E - l * np.eye(n) for E, l in zip(A, lam)]
    Q = _rotation_to_minus_last(u)
    rotated = [sum(Q[i, j] * shifted[j] for j in range(len(A))) for i in range(len(A))]
    return rotated, Q


def paraboloid_bound(A, lam, direction, samples: int = 10_000, seed: int = 0,
                     tol: ToleranceConfig = DEFAULT_TOL, check_tol: float = 1e-9) -> ParaboloidCertificate:
    """Constant M with W_1(A) inside {x_g >= M sum_{i<g} x_i^2} in standard position at lam."""
    R, Q = standard_position_tuple(A, lam, direction)
    *others, last = R
    scale = max(1.0, max(op_norm(E) for E in R))
    w, V = np.linalg.eigh(last)
    if w[0] < -tol.psd_tol * scale:
        raise NotSupportingHyperplane(
            f"direction does not support W_1(A) at the point (last coordinate has eigenvalue {w[0]:.3e})")
    if w[-1] <= tol.psd_tol * scale:
        raise DegenerateLastCoordinate("the last coordinate vanishes: the range is flat along the normal")
    k0 = int(np.sum(w <= tol.psd_tol * scale))
    if k0 == 0:
        raise DefiniteLastCoordinate(
            f"the last coordinate is definite (lambda_min = {w[0]:.3e}): the point is not in the range")
    Bs, Cs = [], []
    for i, E in enumerate(others):
        F = V.conj().T @ E @ V
        corner = float(np.max(np.abs(F[:k0, :k0])))
        if corner > tol.eq_tol * scale:
            raise ZeroBlockError(
                f"coordinate {i} has a nonzero kernel block ({corner:.3e}): the point is not exposed by this direction")
        Bs.append(F[:k0, k0:])
        Cs.append(F[k0:, k0:])
    D = np.diag(w[k0:]).astype(complex)
    eps = float(w[k0])
    Minv = sum((2 * op_norm(b) + op_norm(c)) ** 2 for b, c in zip(Bs, Cs)) / eps
    M = 1.0 / Minv if Minv > 0 else math.inf
    cert = ParaboloidCertificate(np.asarray(lam, float), np.asarray(direction, float), Q, Bs, Cs, D, eps, M, k0)
    if samples:
        slack = paraboloid_slack(R, M, samples, seed, V[:, :k0])
        cert.samples = samples
        cert.min_slack = float(slack.min())
        cert.verified = bool(cert.min_slack >= -check_tol)
    return cert


def paraboloid_slack(R: list, M: float, samples: int, seed: int, kernel: Optional[np.ndarray] = None) -> np.ndarray:
    """x_g - M sum x_i^2 over random vector states; half of them near the kernel."""
    rng = np.random.default_rng(seed)
    n = R[0].shape[0]
    V = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    if kernel is not None and kernel.shape[1]:
        half = samples // 2
        coef = rng.standard_normal((half, kernel.shape[1])) + 1j * rng.standard_normal((half, kernel.shape[1]))
        t = 10.0 ** rng.uniform(-6, 0, size=(half, 1))
        V[:half] = coef @ kernel.T + t * V[:half]
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    x = vector_state(R, V)
    return x[:, -1] - M * np.sum(x[:, :-1] ** 2, axis=1)


# --- 2x2 dilation search and refutation -------------------------------------

DEFAULT_A = tuple(np.round(np.arange(1, 21) * 0.05, 10))
DEFAULT_B = (-0.5, -0.25, 0.0, 0.25, 0.5)
DEFAULT_BETA = tuple(np.round(np.arange(26) * 0.04, 10))


def ansatz_tuple(a: Sequence[float], b: Sequence[float], beta: float) -> list:
    """X_i = [[0, a_i], [a_i, b_i]] for i < g, and X_g = diag(0, beta)."""
    out = [np.array([[0, ai], [ai, bi]], dtype=complex) for ai, bi in zip(a, b)]
    out.append(np.array([[0, 0], [0, beta]], dtype=complex))
    return out


def _state_angles(n_uniform: int = 720, n_geometric: int = 1600) -> np.ndarray:
    g = np.pi * 2.0 ** (-np.arange(1, n_geometric + 1) / 4) / 2
    return np.unique(np.concatenate([np.linspace(0, np.pi, n_uniform, endpoint=False), g, np.pi - g]))


def real_state_check(K: ConvexBody, X: list, angles: Optional[np.ndarray] = None) -> tuple[bool, float]:
    """Vector states v = (cos t, sin t) of a real 2x2 tuple trace the boundary of
    its range, so they decide W^max membership; sampled densely near t = 0."""
    t = _state_angles() if angles is None else angles
    V = np.column_stack([np.cos(t), np.sin(t)]).astype(complex)
    pts = vector_state(X, V)
    ok = K.contains(pts)
    return bool(ok.all()), float(K.margin(pts).min())


def aep_dilation_search(K: ConvexBody, a_values=DEFAULT_A, b_values=DEFAULT_B, beta_values=DEFAULT_BETA,
                        directions=None, tol: Optional[float] = None) -> dict:
    """First ansatz tuple with some a_i > 0 lying in W^max(K), in fixed grid order.

    K must be in standard position at the origin.  A candidate counts as a hit
    only if it passes the direction-grid test and the dense real-state test.
    """
    g = K.dim
    if not K.contains(np.zeros(g))[0] or K.support(-np.eye(g)[-1])[0] > 1e-12:
        raise GeometryError("body is not in standard position at the origin")
    tol = DEFAULT_TOL.psd_tol if tol is None else tol
    C = direction_grid(g) if directions is None else directions
    tested = 0
    for a in itertools.product(a_values, repeat=g - 1):
        if not any(ai > 0 for ai in a):
            continue
        for b in itertools.product(b_values, repeat=g - 1):
            for beta in beta_values:
                tested += 1
                X = ansatz_tuple(a, b, beta)
                ok, smargin = real_state_check(K, X)
                if not ok:
                    continue
                res = wmax_membership(K, X, C, tol)
                if res.member:
                    return {"found": True, "a": [float(x) for x in a], "b": [float(x) for x in b],
                            "beta": float(beta), "tested": tested,
                            "wmax_margin": res.margin, "state_margin": smargin,
                            "grid": _grid_meta(a_values, b_values, beta_values)}
    return {"found": False, "tested": tested, "grid": _grid_meta(a_values, b_values, beta_values)}


def _grid_meta(a_values, b_values, beta_values) -> dict:
    return {"a": [float(x) for x in a_values], "b": [float(x) for x in b_values],
            "beta": [float(x) for x in beta_values]}


def refute_dilation_kp(p: float, a: float, b: float, beta: float, kmax: int = 50) -> dict:
    """Find t with |2|a| t sqrt(1-t^2) + b t^2|^p > beta t^2, t = 2^-k.

    The state (sqrt(1-t^2), t) maps the ansatz tuple outside K_p.  Beyond
    k = kmax the comparison is made in logarithms of the divided form
    |2|a| sqrt(1-t^2) + b t|^p t^(p-2) > beta, which cannot underflow.
    """
    if not 1 < p < 2:
        raise ValueError("need 1 < p < 2")
    if a == 0:
        raise ValueError("need a != 0")
    if beta < 0:
        raise ValueError("need beta >= 0")
    for k in range(1, kmax + 1):
        t = 2.0 ** -k
        lhs = abs(2 * abs(a) * t * math.sqrt(1 - t * t) + b * t * t) ** p
        rhs = beta * t * t
        if lhs > rhs:
            return {"found": True, "t": t, "k": k, "lhs": lhs, "rhs": rhs, "margin": lhs - rhs, "form": "direct"}
    for k in range(kmax + 1, 1075):
        t = 2.0 ** -k
        inner = abs(2 * abs(a) * math.sqrt(1 - t * t) + b * t)
        if inner == 0:
            continue
        log_lhs = p * math.log(inner) + (p - 2) * (-k * math.log(2))
        log_rhs = math.log(beta) if beta > 0 else -math.inf
        if log_lhs > log_rhs:
            return {"found": True, "t": t, "k": k, "log_lhs": log_lhs, "log_rhs": log_rhs,
                    "margin": log_lhs - log_rhs, "form": "log-divided"}
    return {"found": False}
