"""Mixed row contractions: tuples (T_1..T_d, X_1..X_g) with X_k hermitian and

    sum_j T_j T_j^* + sum_k X_k^2 <= I.

Includes the maximality classifier, explicit dilation witnesses for
non-maximal tuples, and the d = 1 dilation to a maximal tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .numkernel import (
    DEFAULT_TOL,
    EPS,
    PsdResult,
    ToleranceConfig,
    as_matrix,
    column_rank,
    hermitian_eig,
    hermitian_part,
    is_hermitian,
    matrix_from_json,
    op_norm,
    psd_sqrt,
    random_complex,
    random_hermitian,
    random_unitary,
    singular_values_padded,
)
from .pencil import MatrixTuple, ShapeError


class NotMaximalInputError(ValueError):
    """witness_dilation was asked for a witness of a maximal tuple."""


class NonMemberError(ValueError):
    pass


class NoFiniteMaximalDilation(ValueError):
    """Raised for d >= 2: no finite-dimensional tuple is maximal there."""


@dataclass(frozen=True)
class MixedTuple:
    T: tuple
    X: tuple = ()

    def __post_init__(self):
        T = tuple(as_matrix(M) for M in self.T)
        X = tuple(as_matrix(M) for M in self.X)
        if not T and not X:
            raise ShapeError("need d + g >= 1")
        n = (T + X)[0].shape[0]
        for M in T + X:
            if M.shape != (n, n):
                raise ShapeError(f"all entries must be {n}x{n}, got {M.shape}")
        for k, M in enumerate(X):
            if not is_hermitian(M):
                raise ShapeError(f"X_{k + 1} is not hermitian")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "X", tuple(hermitian_part(M) for M in X))

    @property
    def d(self) -> int:
        return len(self.T)

    @property
    def g(self) -> int:
        return len(self.X)

    @property
    def level(self) -> int:
        return (self.T + self.X)[0].shape[0]

    def sum_square(self) -> np.ndarray:
        S = np.zeros((self.level, self.level), dtype=complex)
        for T in self.T:
            S += T @ T.conj().T
        for X in self.X:
            S += X @ X
        return hermitian_part(S)

    def scaled(self, s: float) -> "MixedTuple":
        return MixedTuple(tuple(s * T for T in self.T), tuple(s * X for X in self.X))

    def compress(self, n: int | None = None) -> "MixedTuple":
        """Top-left n x n corner of every entry."""
        n = self.level if n is None else n
        return MixedTuple(tuple(T[:n, :n] for T in self.T), tuple(X[:n, :n] for X in self.X))

    def max_entry_distance(self, other: "MixedTuple") -> float:
        """Largest operator-norm distance between corresponding entries."""
        return max(op_norm(A - B) for A, B in zip(self.T + self.X, other.T + other.X))

    def block_row(self) -> np.ndarray:
        return np.hstack(self.T) if self.T else np.zeros((self.level, 0), dtype=complex)

    def as_matrix_tuple(self) -> MatrixTuple:
        return MatrixTuple(self.T + self.X, (False,) * self.d + (True,) * self.g)

    def to_json(self) -> dict:
        obj = self.as_matrix_tuple().to_json()
        obj.update({"d": self.d, "g": self.g})
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "MixedTuple":
        try:
            d, g = int(obj["d"]), int(obj["g"])
            entries = [matrix_from_json(e) for e in obj["entries"]]
        except KeyError as exc:
            raise ShapeError(f"mixed tuple object is missing {exc}") from exc
        if len(entries) != d + g:
            raise ShapeError(f"expected d + g = {d + g} entries, got {len(entries)}")
        return cls(tuple(entries[:d]), tuple(entries[d:]))


@dataclass(frozen=True)
class DilationWitness:
    dilated: MixedTuple
    nontriviality: float
    failed_condition: str


@dataclass(frozen=True)
class MaximalityVerdict:
    is_maximal: bool
    eq_margin: float
    injectivity_sigma: tuple
    blockrow_rank_deficit: int
    blockrow_sigma_min: float
    boundary_uncertain: bool
    witness: Optional[DilationWitness] = None

    def summary(self) -> dict:
        out = {
            "is_maximal": self.is_maximal,
            "eq_margin": self.eq_margin,
            "injectivity_sigma": list(self.injectivity_sigma),
            "blockrow_rank_deficit": self.blockrow_rank_deficit,
            "blockrow_sigma_min": self.blockrow_sigma_min,
            "boundary_uncertain": self.boundary_uncertain,
        }
        if self.witness is not None:
            out["witness"] = {
                "failed_condition": self.witness.failed_condition,
                "nontriviality": self.witness.nontriviality,
            }
        return out


def mixed_member(t: MixedTuple, tol: ToleranceConfig = DEFAULT_TOL) -> PsdResult:
    w = np.linalg.eigvalsh(np.eye(t.level) - t.sum_square())
    margin = float(w[0])
    return PsdResult(margin >= -tol.psd_tol, margin)


def trivial_kernel_test(Ts: Sequence, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    """Is the only solution of sum_i T_i W_i = 0 the zero tuple?

    Column by column this is full column rank of the n x dn block row.
    """
    Ts = [as_matrix(T) for T in Ts]
    if not Ts:
        raise ShapeError("need at least one T")
    n = Ts[0].shape[0]
    for T in Ts:
        if T.shape != (n, n):
            raise ShapeError("all T_i must be square of the same size")
    row = np.hstack(Ts)
    dn = row.shape[1]
    rank, _ = column_rank(row, tol)
    sigma_min = float(singular_values_padded(row, dn)[-1])
    return rank == dn, sigma_min


def is_maximal(t: MixedTuple, tol: ToleranceConfig = DEFAULT_TOL, with_witness: bool = True) -> MaximalityVerdict:
    if t.d < 1:
        raise ShapeError("the maximality criterion needs d >= 1")
    member = mixed_member(t, tol)
    if not member.is_psd:
        raise NonMemberError(f"tuple is not a member (margin {member.margin:.3e})")
    n = t.level
    eq_margin = float(np.linalg.norm(np.eye(n) - t.sum_square()))
    inj = tuple(float(singular_values_padded(T, n)[-1]) for T in t.T)
    row = t.block_row()
    rank, _ = column_rank(row, tol)
    deficit = t.d * n - rank
    row_sigma = float(singular_values_padded(row, t.d * n)[-1])

    cut = float(np.linalg.norm(row, 2)) * max(row.shape) * EPS * tol.rank_tol_factor
    uncertain = bool((tol.eq_tol / 10 < eq_margin <= 10 * tol.eq_tol) or (cut / 10 < row_sigma <= 10 * cut))

    maximal = eq_margin <= tol.eq_tol and deficit == 0
    witness = None
    if not maximal and with_witness:
        witness = witness_dilation(t, tol)
    return MaximalityVerdict(maximal, eq_margin, inj, deficit, row_sigma, uncertain, witness)


def _embed(M: np.ndarray, n: int, corner: str = "tl") -> np.ndarray:
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    if corner == "tl":
        out[:n, :n] = M
    elif corner == "tr":
        out[:n, n:] = M
    elif corner == "bl":
        out[n:, :n] = M
    return out


def witness_dilation(t: MixedTuple, tol: ToleranceConfig = DEFAULT_TOL) -> DilationWitness:
    """A nontrivial dilation of t inside the set, at level 2n.

    If the sum-square misses the identity, A = sqrt(I - sum-square) goes in the
    (1,2) block of T_1.  Otherwise a kernel vector of the block row gives B_i
    with sum_i T_i B_i^* = 0, placed in the (2,1) blocks.
    """
    if t.d < 1:
        raise ShapeError("witness dilations need d >= 1")
    n = t.level
    gap = np.eye(n) - t.sum_square()
    if float(np.linalg.norm(gap)) > tol.eq_tol:
        A = psd_sqrt(gap, tol)
        T = [_embed(t.T[0], n) + _embed(A, n, "tr")] + [_embed(M, n) for M in t.T[1:]]
        X = [_embed(M, n) for M in t.X]
        return DilationWitness(MixedTuple(tuple(T), tuple(X)), op_norm(A), "sum-square")

    row = t.block_row()
    rank, _ = column_rank(row, tol)
    if rank == row.shape[1]:
        raise NotMaximalInputError("tuple satisfies every maximality condition; no witness exists")
    # leading kernel direction: right singular vector of the smallest singular value
    _, _, Vh = np.linalg.svd(row)
    w = Vh[-1].conj()
    B_raw = []
    for i in range(t.d):
        B = np.zeros((n, n), dtype=complex)
        B[0, :] = w[i * n:(i + 1) * n].conj()  # B_i = e_1 w_i^*, so T_i B_i^* = T_i w_i e_1^*
        B_raw.append(B)
    scale = 1.0 / (2.0 * op_norm(np.hstack(B_raw)))
    Bs = [scale * B for B in B_raw]
    T = [_embed(M, n) + _embed(B, n, "bl") for M, B in zip(t.T, Bs)]
    X = [_embed(M, n) for M in t.X]
    return DilationWitness(MixedTuple(tuple(T), tuple(X)), op_norm(np.hstack(Bs)), "injectivity-or-range")


def _sigma_min(M: np.ndarray) -> float:
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def dilate_to_maximal(t: MixedTuple, delta: float = 1e-3, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[MixedTuple, float]:
    """Dilate a member with d = 1 to a maximal tuple at level 2n.

    Preprocessing, applied only when needed: shift T by s*I (s = delta/2,
    delta/4, ...) if T is numerically singular, then scale the tuple by
    (1 - delta)/max(1, row norm) if it is not a strict contraction.  The
    total perturbation stays below 2*delta.  Returns the dilation and the
    operator-norm size of the preprocessing perturbation.
    """
    if t.d >= 2:
        raise NoFiniteMaximalDilation(f"d = {t.d}: no finite-dimensional maximal dilation exists")
    if t.d != 1:
        raise ShapeError("dilate_to_maximal needs d = 1")
    if not 0 < delta <= 0.1:
        raise ValueError("delta must lie in (0, 0.1]")
    member = mixed_member(t, tol)
    if not member.is_psd:
        raise NonMemberError(f"tuple is not a member (margin {member.margin:.3e})")
    if is_maximal(t, tol, with_witness=False).is_maximal:
        return t, 0.0

    n = t.level
    T = t.T[0]
    if _sigma_min(T) <= delta * 1e-3:
        s = delta / 2
        for _ in range(64):
            if _sigma_min(T + s * np.eye(n)) > delta * 1e-3:
                break
            s /= 2
        T = T + s * np.eye(n)
    work = MixedTuple((T,), t.X)
    nu = op_norm(np.hstack((T,) + work.X))
    if 1 - nu * nu <= tol.psd_tol:
        work = work.scaled((1.0 - delta) / max(1.0, nu))
        T = work.T[0]
    shift = work.max_entry_distance(t)

    Xs = work.X
    A = psd_sqrt(np.eye(n) - work.sum_square(), tol)
    if Xs:
        TinvA = np.linalg.solve(T, A)
        gamma = 1.0 / (2.0 * max(1.0, op_norm(TinvA)))
        C = gamma * np.eye(n)
        B = -(TinvA @ C.conj().T).conj().T
    else:
        # no self-adjoint slot to absorb the defect, so BB* + CC* = I.  In exact
        # arithmetic C = (I + K*K)^(-1/2), K = T^-1 A; it is computed as the
        # positive-C orthonormal basis of ker [T A], which stays accurate when
        # T is nearly singular.
        _, _, Vh = np.linalg.svd(np.hstack([T, A]))
        kernel_rows = Vh[n:]
        U, _, Wh = np.linalg.svd(kernel_rows[:, n:])
        bottom = (U @ Wh).conj().T @ kernel_rows
        B, C = bottom[:, :n], bottom[:, n:]
    S = np.block([[T, A], [B, C]])
    Ys = []
    if Xs:
        D = psd_sqrt(np.eye(n) - hermitian_part(B @ B.conj().T + C @ C.conj().T), tol)
        Ys.append(np.block([[Xs[0], np.zeros((n, n))], [np.zeros((n, n)), D]]))
        Ys.extend(_embed(X, n) for X in Xs[1:])
    return MixedTuple((S,), tuple(Ys)), shift


def matrix_convex_combine(points: Sequence[MatrixTuple], isometry_blocks: Sequence, tol: ToleranceConfig = DEFAULT_TOL) -> MatrixTuple:
    """Y = sum_i V_i^* X^(i) V_i, requiring sum_i V_i^* V_i = I."""
    if len(points) != len(isometry_blocks) or not points:
        raise ShapeError("need one V_i per point")
    Vs = [as_matrix(V) for V in isometry_blocks]
    m = Vs[0].shape[1]
    G = np.zeros((m, m), dtype=complex)
    for X, V in zip(points, Vs):
        if V.shape != (X.level, m):
            raise ShapeError(f"V_i must be {X.level}x{m}, got {V.shape}")
        G += V.conj().T @ V
    if np.linalg.norm(G - np.eye(m)) > tol.eq_tol:
        raise ValueError("sum of V_i^* V_i is not the identity")
    arity = len(points[0])
    out = []
    for j in range(arity):
        out.append(sum(V.conj().T @ X[j] @ V for X, V in zip(points, Vs)))
    return MatrixTuple(tuple(out), points[0].sa_mask)


# --- random members ---------------------------------------------------------

def random_member(d: int, g: int, n: int, rng: np.random.Generator, kind: str = "interior") -> MixedTuple:
    """Random element of the set.

    kind = "interior": sum-square has norm uniform in (0.05, 0.95).
    kind = "boundary": sum-square equals I; the T block row is
    sqrt(I - sum X^2) times a random co-isometry.
    kind = "singular": sum-square equals I (when g >= 1) but T_1 has a kernel
    vector v, which X_1 covers instead (d = 1 only).
    """
    if kind == "interior":
        t = MixedTuple(tuple(random_complex(n, rng) for _ in range(d)),
                       tuple(random_hermitian(n, rng) for _ in range(g)))
        r = float(np.linalg.norm(t.sum_square(), 2))
        return t.scaled(np.sqrt(rng.uniform(0.05, 0.95) / r))

    I = np.eye(n)
    X = [random_hermitian(n, rng) for _ in range(g)]
    if X:
        sx = np.linalg.norm(sum(M @ M for M in X), 2)
        X = [M * np.sqrt(rng.uniform(0.1, 0.9) / sx) for M in X]

    if kind == "boundary":
        root = psd_sqrt(I - sum((M @ M for M in X), np.zeros((n, n))))
        row = root @ random_unitary(d * n, rng)[:n, :]
        return MixedTuple(tuple(row[:, i * n:(i + 1) * n] for i in range(d)), tuple(X))

    if kind == "singular":
        if d != 1:
            raise ValueError("kind='singular' needs d = 1")
        v = random_unitary(n, rng)[:, :1]
        P = v @ v.conj().T
        Q = I - P
        X = [Q @ M @ Q for M in X]
        if X:
            X[0] = X[0] + P
        rest = Q - Q @ sum((M @ M for M in X), np.zeros((n, n))) @ Q if X else Q
        T1 = Q @ psd_sqrt(hermitian_part(rest)) @ random_unitary(n, rng)
        return MixedTuple((T1,), tuple(X))

    raise ValueError(f"unknown kind {kind!r}")
