"""Tolerance-aware dense linear algebra.

Every exact matrix condition used elsewhere in the package ("is positive
semidefinite", "equals the identity", "is injective") is decided here, against
one explicit :class:`ToleranceConfig`.  Matrices are plain complex numpy arrays.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

EPS = np.finfo(float).eps


class NumericalError(ValueError):
    """Raised when an input violates a tolerance-gated precondition."""


@dataclass(frozen=True)
class ToleranceConfig:
    psd_tol: float = 1e-10
    rank_tol_factor: float = 100.0
    herm_tol: float = 1e-12
    eq_tol: float = 1e-9

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be strictly positive, got {value}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ToleranceConfig":
        return cls(**{k: float(v) for k, v in data.items()})


DEFAULT_TOL = ToleranceConfig()


class PsdResult(NamedTuple):
    is_psd: bool
    margin: float


class RankResult(NamedTuple):
    rank: int
    sigma_min_kept: float


def as_matrix(M) -> np.ndarray:
    """Coerce to a 2-D complex array."""
    A = np.asarray(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2:
        raise NumericalError(f"expected a matrix, got array of shape {A.shape}")
    return A


def _require_square(H: np.ndarray) -> None:
    if H.shape[0] != H.shape[1]:
        raise NumericalError(f"expected a square matrix, got shape {H.shape}")


def hermitian_defect(H) -> float:
    H = as_matrix(H)
    if H.size == 0:
        return 0.0
    return float(np.max(np.abs(H - H.conj().T)))


def is_hermitian(H, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    H = as_matrix(H)
    if H.shape[0] != H.shape[1]:
        return False
    # herm_tol is absolute for unit-scale inputs and relative beyond that
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    return hermitian_defect(H) <= tol.herm_tol * scale


def hermitian_part(M) -> np.ndarray:
    M = as_matrix(M)
    return 0.5 * (M + M.conj().T)


def skew_part(M) -> np.ndarray:
    """Return Im(M) = (M - M*)/(2i), which is hermitian."""
    M = as_matrix(M)
    return (M - M.conj().T) / 2j


def hermitian_eig(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and a unitary eigenframe of the hermitian part of H."""
    H = as_matrix(H)
    _require_square(H)
    try:
        w, V = np.linalg.eigh(hermitian_part(H))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition did not converge: {exc}") from exc
    return w, V


def psd_check(H, tol: ToleranceConfig = DEFAULT_TOL) -> PsdResult:
    H = as_matrix(H)
    _require_square(H)
    if not is_hermitian(H, tol):
        raise NumericalError(
            f"matrix is not hermitian (defect {hermitian_defect(H):.3e} > herm_tol {tol.herm_tol:.1e})"
        )
    if H.size == 0:
        return PsdResult(True, 0.0)
    w = np.linalg.eigvalsh(hermitian_part(H))
    margin = float(w[0])
    cutoff = -tol.psd_tol * max(1.0, float(w[-1]))
    return PsdResult(margin >= cutoff, margin)


def psd_sqrt(H, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues within psd_tol below zero are clamped."""
    w, V = hermitian_eig(H)
    if w.size and w[0] < -tol.psd_tol * max(1.0, float(w[-1])):
        raise NumericalError(f"matrix is not PSD (lambda_min = {w[0]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (V * root) @ V.conj().T


def rank_cutoff(M, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    M = as_matrix(M)
    if M.size == 0:
        return 0.0
    smax = float(np.linalg.norm(M, 2))
    return smax * max(M.shape) * EPS * tol.rank_tol_factor


def column_rank(M, tol: ToleranceConfig = DEFAULT_TOL) -> RankResult:
    """Numerical rank with a cutoff relative to the largest singular value."""
    M = as_matrix(M)
    if M.size == 0:
        return RankResult(0, 0.0)
    s = np.linalg.svd(M, compute_uv=False)
    cutoff = s[0] * max(M.shape) * EPS * tol.rank_tol_factor
    kept = s[s > cutoff]
    return RankResult(int(kept.size), float(kept[-1]) if kept.size else 0.0)


def singular_values_padded(M, count: int) -> np.ndarray:
    """Singular values in descending order, zero-padded to ``count`` entries."""
    s = np.linalg.svd(as_matrix(M), compute_uv=False)
    out = np.zeros(count)
    out[: min(count, s.size)] = s[:count]
    return out


def op_norm(M) -> float:
    M = as_matrix(M)
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def frob_dist(A, B) -> float:
    return float(np.linalg.norm(as_matrix(A) - as_matrix(B)))


def margin_status(margin: float, band: float) -> str:
    """Three-way reading of a signed margin: inside, outside, or too close to call."""
    if margin > band:
        return "inside"
    if margin < -band:
        return "outside"
    return "boundary-uncertain"


# --- random instances -------------------------------------------------------

def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_complex(n: int, rng: np.random.Generator, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    return hermitian_part(random_complex(n, rng))


# --- JSON encoding ----------------------------------------------------------

def matrix_to_json(M) -> dict:
    M = as_matrix(M)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in M.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise NumericalError(f"malformed matrix object: missing {exc}") from exc
    if len(data) != rows * cols:
        raise NumericalError(f"matrix data has {len(data)} entries, expected {rows}x{cols}")
    flat = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    return flat.reshape(rows, cols)
