"""Hadamard, unbiasedness and dephasing predicates.

Matrices are kept with unimodular entries, so a complex Hadamard matrix of
order ``n`` satisfies ``H @ H^* = n I``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import SymbolicMatrix, sym_adjoint, sym_mat_mul

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class DefectReport:
    max_entry_modulus_error: float
    max_gram_error: float

    def ok(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_entry_modulus_error < tol and self.max_gram_error < tol


def _square(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def defect_report(M) -> DefectReport:
    M = _square(M)
    n = M.shape[0]
    gram = M @ M.conj().T - n * np.eye(n)
    return DefectReport(float(np.max(np.abs(np.abs(M) - 1))), float(np.max(np.abs(gram))))


def is_hadamard_numeric(M, tol: float = DEFAULT_TOL) -> tuple[bool, DefectReport]:
    report = defect_report(M)
    return report.ok(tol), report


def is_hadamard_symbolic(M: SymbolicMatrix) -> bool:
    """True iff ``M`` is Hadamard identically in its parameters.

    Every off-diagonal entry of ``M M^*`` must cancel to the zero sum.
    """
    if M.has_zero:
        raise ValueError("symbolic Hadamard test needs all entries unimodular")
    G = sym_mat_mul(M, sym_adjoint(M))
    return all(G.grid[i][j].is_zero() for i in range(M.n) for j in range(M.n) if i != j)


def hadamard_defect(M) -> float:
    """``sum (|h_ij| - 1)^2 + ||H H^* - n I||_F^2``; zero exactly on Hadamard matrices."""
    M = _square(M)
    n = M.shape[0]
    gram = M @ M.conj().T - n * np.eye(n)
    return float(np.sum((np.abs(M) - 1) ** 2) + np.sum(np.abs(gram) ** 2))


def hadamard_defect_many(M: np.ndarray) -> np.ndarray:
    """Batched :func:`hadamard_defect` over a stack of shape ``(S, n, n)``."""
    n = M.shape[-1]
    gram = M @ np.conj(np.swapaxes(M, -1, -2)) - n * np.eye(n)
    return np.sum((np.abs(M) - 1) ** 2, axis=(-2, -1)) + np.sum(np.abs(gram) ** 2, axis=(-2, -1))


def dephase(M) -> np.ndarray:
    """Equivalent matrix ``D1 M D2`` whose first row and column are all ones.

    ``D1`` comes from the first column, ``D2`` from the first row of
    ``D1 M``.
    """
    M = _square(M)
    col = M[:, 0]
    if np.any(np.abs(col) == 0) or np.any(np.abs(M[0]) == 0):
        raise ValueError("cannot dephase: zero entry in first row or column")
    left = np.conj(col) / np.abs(col)
    out = left[:, None] * M
    right = np.conj(out[0]) / np.abs(out[0])
    return out * right[None, :]


def unbiasedness_defect(A, B) -> float:
    """``max_ij | sqrt(d) |<a_i, b_j>| - 1 |`` over unit-normalized columns."""
    A, B = _square(A), _square(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    d = A.shape[0]
    A = A / np.linalg.norm(A, axis=0)
    B = B / np.linalg.norm(B, axis=0)
    overlaps = np.abs(A.conj().T @ B)
    return float(np.max(np.abs(np.sqrt(d) * overlaps - 1)))
