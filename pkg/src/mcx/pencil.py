"""Hermitian monic linear pencils and free spectrahedron membership.

A pencil is a list of k x k coefficients, one per variable.  Evaluated at a
tuple Z of n x n matrices it gives the kn x kn hermitian matrix

    L(Z) = I - herm(sum_j A_j kron Z_j),

and Z belongs to the free spectrahedron iff L(Z) is PSD.  Variables flagged
self-adjoint take hermitian coefficients and hermitian inputs, for which the
hermitian part is a no-op.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numkernel import (
    DEFAULT_TOL,
    NumericalError,
    PsdResult,
    ToleranceConfig,
    as_matrix,
    hermitian_part,
    is_hermitian,
    matrix_from_json,
    matrix_to_json,
    psd_check,
    skew_part,
)


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class MatrixTuple:
    """Ordered tuple of square matrices of a common size (the level)."""

    entries: tuple
    sa_mask: tuple = None

    def __post_init__(self):
        entries = tuple(as_matrix(E) for E in self.entries)
        if not entries:
            raise ShapeError("a matrix tuple needs at least one entry")
        n = entries[0].shape[0]
        for E in entries:
            if E.shape != (n, n):
                raise ShapeError(f"entries must all be {n}x{n}, got {E.shape}")
        mask = tuple(False for _ in entries) if self.sa_mask is None else tuple(bool(b) for b in self.sa_mask)
        if len(mask) != len(entries):
            raise ShapeError("sa_mask length must equal the number of entries")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "sa_mask", mask)

    @property
    def level(self) -> int:
        return self.entries[0].shape[0]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def validate(self, tol: ToleranceConfig = DEFAULT_TOL) -> "MatrixTuple":
        for j, (E, sa) in enumerate(zip(self.entries, self.sa_mask)):
            if sa and not is_hermitian(E, tol):
                raise ShapeError(f"entry {j} is flagged self-adjoint but is not hermitian")
        return self

    def conj(self) -> "MatrixTuple":
        return MatrixTuple(tuple(E.conj() for E in self.entries), self.sa_mask)

    def conjugate_by(self, U) -> "MatrixTuple":
        """Return (U* Z_j U)_j."""
        U = as_matrix(U)
        return MatrixTuple(tuple(U.conj().T @ E @ U for E in self.entries), self.sa_mask)

    def direct_sum(self, other: "MatrixTuple") -> "MatrixTuple":
        if len(other) != len(self):
            raise ShapeError("direct sum needs tuples of equal length")
        n, m = self.level, other.level
        out = []
        for E, F in zip(self.entries, other.entries):
            S = np.zeros((n + m, n + m), dtype=complex)
            S[:n, :n] = E
            S[n:, n:] = F
            out.append(S)
        return MatrixTuple(tuple(out), self.sa_mask)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "entries": [matrix_to_json(E) for E in self.entries],
            "sa_mask": list(self.sa_mask),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MatrixTuple":
        try:
            entries = tuple(matrix_from_json(e) for e in obj["entries"])
        except KeyError as exc:
            raise NumericalError("tuple object is missing 'entries'") from exc
        t = cls(entries, obj.get("sa_mask"))
        if "level" in obj and int(obj["level"]) != t.level:
            raise ShapeError(f"declared level {obj['level']} does not match entries ({t.level})")
        return t


@dataclass(frozen=True)
class HermitianPencil:
    coeffs: tuple
    sa_mask: tuple = None
    field: str = "C"

    def __post_init__(self):
        coeffs = tuple(as_matrix(A) for A in self.coeffs)
        if not coeffs:
            raise ShapeError("a pencil needs at least one variable")
        k = coeffs[0].shape[0]
        for A in coeffs:
            if A.shape != (k, k):
                raise ShapeError(f"coefficients must all be {k}x{k}, got {A.shape}")
        mask = tuple(True for _ in coeffs) if self.sa_mask is None else tuple(bool(b) for b in self.sa_mask)
        if len(mask) != len(coeffs):
            raise ShapeError("sa_mask length must equal the number of coefficients")
        if self.field not in ("R", "C"):
            raise ShapeError(f"field must be 'R' or 'C', got {self.field!r}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "sa_mask", mask)
        for j, (A, sa) in enumerate(zip(coeffs, mask)):
            if sa and not is_hermitian(A):
                raise ShapeError(f"coefficient {j} belongs to a self-adjoint variable but is not hermitian")
            if self.field == "R" and np.max(np.abs(A.imag), initial=0.0) > DEFAULT_TOL.herm_tol:
                raise ShapeError(f"coefficient {j} has non-real entries in a real pencil")

    @property
    def coeff_dim(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def nvars(self) -> int:
        return len(self.coeffs)

    def to_json(self) -> dict:
        return {
            "level": self.coeff_dim,
            "entries": [matrix_to_json(A) for A in self.coeffs],
            "sa_mask": list(self.sa_mask),
            "field": self.field,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HermitianPencil":
        coeffs = tuple(matrix_from_json(e) for e in obj["entries"])
        return cls(coeffs, obj.get("sa_mask"), obj.get("field", "C"))


def _check_arity(P: HermitianPencil, Z: MatrixTuple, tol: ToleranceConfig) -> None:
    if P.nvars != len(Z):
        raise ShapeError(f"pencil has {P.nvars} variables but tuple has {len(Z)} entries")
    for j, (sa, E) in enumerate(zip(P.sa_mask, Z.entries)):
        if sa and not is_hermitian(E, tol):
            raise ShapeError(f"variable {j} is self-adjoint but entry {j} is not hermitian")


def eval_pencil(P: HermitianPencil, Z: MatrixTuple, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    _check_arity(P, Z, tol)
    k, n = P.coeff_dim, Z.level
    acc = np.zeros((k * n, k * n), dtype=complex)
    for A, E in zip(P.coeffs, Z.entries):
        acc += np.kron(A, E)
    return np.eye(k * n) - hermitian_part(acc)


def spectrahedron_member(P: HermitianPencil, Z: MatrixTuple, tol: ToleranceConfig = DEFAULT_TOL) -> PsdResult:
    return psd_check(eval_pencil(P, Z, tol), tol)


def to_selfadjoint_presentation(P: HermitianPencil) -> HermitianPencil:
    """Replace each non-self-adjoint variable by two self-adjoint ones.

    herm(A kron (X + iY)) = herm(A) kron X - im(A) kron Y, so a coefficient A
    becomes the pair (herm(A), -im(A)) on the coordinates (X, Y).
    """
    coeffs = []
    for A, sa in zip(P.coeffs, P.sa_mask):
        if sa:
            coeffs.append(A)
        else:
            coeffs.extend([hermitian_part(A), -skew_part(A)])
    field = "R" if all(np.max(np.abs(A.imag), initial=0.0) <= DEFAULT_TOL.herm_tol for A in coeffs) else "C"
    return HermitianPencil(tuple(coeffs), tuple(True for _ in coeffs), field)


def decompose_tuple(Z: MatrixTuple) -> MatrixTuple:
    """Split each non-self-adjoint entry T into (herm(T), im(T)); T = herm + i*im."""
    out = []
    for E, sa in zip(Z.entries, Z.sa_mask):
        if sa:
            out.append(E)
        else:
            out.extend([hermitian_part(E), skew_part(E)])
    return MatrixTuple(tuple(out), tuple(True for _ in out))


def recompose_tuple(Z: MatrixTuple, sa_mask: Sequence[bool]) -> MatrixTuple:
    """Inverse of :func:`decompose_tuple` for the original mask ``sa_mask``."""
    out, i = [], 0
    for sa in sa_mask:
        if sa:
            out.append(Z.entries[i])
            i += 1
        else:
            out.append(Z.entries[i] + 1j * Z.entries[i + 1])
            i += 2
    if i != len(Z):
        raise ShapeError("tuple length does not match the decomposition mask")
    return MatrixTuple(tuple(out), tuple(sa_mask))


def _sym(m: int, a: int, b: int, val: complex = 1.0) -> np.ndarray:
    E = np.zeros((m, m), dtype=complex)
    E[a, b] += val
    E[b, a] += np.conj(val)
    return E


def _pm(B: np.ndarray) -> np.ndarray:
    m = B.shape[0]
    out = np.zeros((2 * m, 2 * m), dtype=complex)
    out[:m, :m] = B
    out[m:, m:] = -B
    return out


def build_mixed_pencil(d: int, g: int) -> HermitianPencil:
    """Pencil whose spectrahedron is the set of mixed row contractions.

    Variables, in order: (V_1, W_1, ..., V_d, W_d, X_1, ..., X_g) where
    T_j = V_j + i W_j.  Coefficients are B (+) -B for the hermitian block
    [[0, R], [R*, 0]] with R = [T_1 ... T_d X_1 ... X_g], so L >= 0 is
    exactly ||R|| <= 1.
    """
    if d < 0 or g < 0 or d + g == 0:
        raise ValueError(f"need d, g >= 0 and not both zero, got ({d}, {g})")
    m = d + g + 1
    coeffs = []
    for j in range(1, d + 1):
        coeffs.append(_pm(_sym(m, 0, j)))
        coeffs.append(_pm(_sym(m, 0, j, 1j)))
    for k in range(1, g + 1):
        coeffs.append(_pm(_sym(m, 0, d + k)))
    return HermitianPencil(tuple(coeffs), tuple(True for _ in coeffs), "C" if d else "R")


def conjugation_witness_check(Z: MatrixTuple, P: HermitianPencil, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Test whether Z is a member while its entrywise conjugate is not."""
    here = spectrahedron_member(P, Z, tol)
    there = spectrahedron_member(P, Z.conj(), tol)
    verdict = "witness-violates" if here.is_psd and not there.is_psd else "closed-on-witness"
    return {
        "verdict": verdict,
        "member": here.is_psd,
        "margin": here.margin,
        "conjugate_member": there.is_psd,
        "conjugate_margin": there.margin,
    }
