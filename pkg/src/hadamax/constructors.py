"""Block constructions and basis families.

Block constructors accept either :class:`~hadamax.algebra.SymbolicMatrix`
blocks (exact result) or numpy arrays (numeric result).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .algebra import (
    PhaseLinearForm,
    SumMatrix,
    SymbolicMatrix,
    mat_mul,
    sum_blocks,
    sym_adjoint,
    sym_negate,
    symbolic_blocks,
)

Block = Union[SymbolicMatrix, np.ndarray]


class PreconditionError(ValueError):
    pass


def _symbolic(*blocks) -> bool:
    kinds = {isinstance(b, SymbolicMatrix) for b in blocks}
    if len(kinds) > 1:
        raise TypeError("cannot mix symbolic and numeric blocks")
    return kinds.pop()


def _dim(b: Block) -> int:
    return b.n if isinstance(b, SymbolicMatrix) else np.asarray(b).shape[0]


def _check_dims(*blocks):
    dims = {_dim(b) for b in blocks}
    if len(dims) != 1:
        raise ValueError(f"blocks must have equal dimensions, got {sorted(dims)}")
    for b in blocks:
        if not isinstance(b, SymbolicMatrix):
            shape = np.asarray(b).shape
            if len(shape) != 2 or shape[0] != shape[1]:
                raise ValueError(f"blocks must be square, got shape {shape}")


def _assemble(layout: Sequence[str], blocks: dict) -> Block:
    """``layout`` rows like ``"A B -C -D"``; names index ``blocks``."""
    cells = [row.split() for row in layout]
    if _symbolic(*blocks.values()):
        pick = lambda t: sym_negate(blocks[t[1:]]) if t[0] == "-" else blocks[t]
        return symbolic_blocks([[pick(t) for t in row] for row in cells])
    arr = {k: np.asarray(v) for k, v in blocks.items()}
    pick = lambda t: -arr[t[1:]] if t[0] == "-" else arr[t]
    return np.block([[pick(t) for t in row] for row in cells])


def dita_double(A: Block, B: Block, C: Block):
    """The nonlinear doubling ``[[A, B], [C, -C A^* B]] / sqrt(2)``.

    Unitary inputs give a unitary output.  Symbolic inputs yield a
    :class:`SumMatrix` (the lower-right block is a sum of ``d^2`` terms per
    entry before any cancellation).
    """
    _check_dims(A, B, C)
    if _symbolic(A, B, C):
        X = mat_mul(mat_mul(C, sym_adjoint(A)), B)
        X = SumMatrix([[-s for s in row] for row in X.grid], X.params, X.scale_half_log)
        out = sum_blocks([[A, B], [C, X]])
        return SumMatrix(out.grid, out.params, out.scale_half_log - 1)
    A, B, C = (np.asarray(x, dtype=complex) for x in (A, B, C))
    return np.block([[A, B], [C, -C @ A.conj().T @ B]]) / np.sqrt(2)


def elementary_double(A: Block, B: Block, side: str = "left") -> Block:
    """``[[A, B], [A, -B]]`` (left) or ``[[A, A], [B, -B]]`` (right), unscaled."""
    _check_dims(A, B)
    if side == "left":
        return _assemble(["A B", "A -B"], {"A": A, "B": B})
    if side == "right":
        return _assemble(["A A", "B -B"], {"A": A, "B": B})
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def quad_double(A: Block, B: Block, C: Block, D: Block) -> Block:
    _check_dims(A, B, C, D)
    return _assemble(["A B C D", "A -B C -D", "A B -C -D", "A -B -C D"],
                     {"A": A, "B": B, "C": C, "D": D})


_HYBRID = {
    "D2": ["A B C D", "A -B C -D", "C D -A -B", "C -D -A B"],
    "D3": ["A B A B", "B -A B -A", "C D -C -D", "C -D -C D"],
}


def hybrid_double(kind: str, A: Block, B: Block, C: Block, D: Block) -> Block:
    if kind not in _HYBRID:
        raise ValueError(f"kind must be one of {sorted(_HYBRID)}, got {kind!r}")
    _check_dims(A, B, C, D)
    return _assemble(_HYBRID[kind], {"A": A, "B": B, "C": C, "D": D})


@dataclass(frozen=True)
class HybridReport:
    """Numeric validity of a hybrid block matrix.

    ``self_adjoint_violation`` is the largest ``||XY^* - Y X^*||`` over the
    block pairs whose cross terms appear in the Gram matrix; ``balance_violation``
    covers the ``XX^*`` sums that must agree; ``gram_defect`` is the distance
    of the assembled Gram matrix from a multiple of the identity.
    """

    self_adjoint_violation: float
    balance_violation: float
    gram_defect: float
    tol: float

    @property
    def valid(self) -> bool:
        return self.self_adjoint_violation < self.tol and self.balance_violation < self.tol

    @property
    def orthogonal(self) -> bool:
        return self.gram_defect < self.tol


def _gram_scalar_defect(M: np.ndarray) -> float:
    G = M @ M.conj().T
    s = np.trace(G).real / G.shape[0]
    return float(np.max(np.abs(G - s * np.eye(G.shape[0]))))


def check_hybrid(kind: str, A, B, C, D, binding=None, tol: float = 1e-10) -> HybridReport:
    """Evaluate the conditions under which :func:`hybrid_double` is orthogonal.

    Symbolic blocks are evaluated at ``binding`` first.  For ``D2`` the Gram
    matrix is scalar iff ``AC^*`` and ``BD^*`` are self-adjoint,
    ``AA^*+CC^* = BB^*+DD^*`` and the total ``AA^*+BB^*+CC^*+DD^*`` is scalar;
    for ``D3`` iff ``AB^*`` is self-adjoint, ``CC^* = DD^*``,
    ``AA^*+BB^* = CC^*+DD^*`` and that sum is scalar.
    """
    blocks = []
    for X in (A, B, C, D):
        X = X.evaluate(binding) if isinstance(X, SymbolicMatrix) else np.asarray(X, dtype=complex)
        blocks.append(X)
    _check_dims(*blocks)
    A, B, C, D = blocks
    g = lambda X, Y: X @ Y.conj().T
    norm = lambda X: float(np.max(np.abs(X))) if X.size else 0.0
    total = g(A, A) + g(B, B) + g(C, C) + g(D, D)
    scalar = norm(total - np.trace(total).real / total.shape[0] * np.eye(total.shape[0]))
    if kind == "D2":
        sa = max(norm(g(A, C) - g(C, A)), norm(g(B, D) - g(D, B)))
        bal = max(norm(g(A, A) + g(C, C) - g(B, B) - g(D, D)), scalar)
    elif kind == "D3":
        sa = norm(g(A, B) - g(B, A))
        bal = max(norm(g(C, C) - g(D, D)), norm(g(A, A) + g(B, B) - g(C, C) - g(D, D)), scalar)
    else:
        raise ValueError(f"kind must be one of {sorted(_HYBRID)}, got {kind!r}")
    M = hybrid_double(kind, A, B, C, D)
    return HybridReport(sa, bal, _gram_scalar_defect(M), tol)


@dataclass(frozen=True)
class WilliamsonReport:
    ok: bool
    failures: tuple = field(default_factory=tuple)


def _as_real_block(X) -> np.ndarray:
    if isinstance(X, SymbolicMatrix):
        if X.params or X.has_zero or any(e.quarter % 2 for row in X.grid for e in row):
            raise PreconditionError("Williamson blocks must be real constant matrices")
        X = X.evaluate()
    X = np.atleast_2d(np.asarray(X))
    if np.iscomplexobj(X):
        if np.any(X.imag != 0):
            raise PreconditionError("Williamson blocks must be real")
        X = X.real
    return X


def williamson_conditions(a, b, c, d) -> WilliamsonReport:
    """Check pairwise symmetry of ``XY^t`` and ``aa^t+bb^t+cc^t+dd^t = 4m I``."""
    blocks = dict(zip("abcd", (_as_real_block(x) for x in (a, b, c, d))))
    m = blocks["a"].shape[0]
    if any(x.shape != (m, m) for x in blocks.values()):
        raise ValueError("Williamson blocks must be square of equal order")
    failures = []
    names = "abcd"
    for i, x in enumerate(names):
        for y in names[i + 1:]:
            X, Y = blocks[x], blocks[y]
            if not np.allclose(X @ Y.T, Y @ X.T, atol=1e-12, rtol=0):
                failures.append(f"{x}{y}^t is not symmetric")
    total = sum(X @ X.T for X in blocks.values())
    if not np.allclose(total, 4 * m * np.eye(m), atol=1e-12, rtol=0):
        failures.append("aa^t+bb^t+cc^t+dd^t != 4m I")
    return WilliamsonReport(not failures, tuple(failures))


def williamson(a, b, c, d, m: int = None) -> SymbolicMatrix:
    """Williamson's ``4m x 4m`` array from four ``m x m`` ``+-1`` blocks."""
    arrs = [_as_real_block(x) for x in (a, b, c, d)]
    if m is not None and any(x.shape != (m, m) for x in arrs):
        raise ValueError(f"blocks must be {m}x{m}")
    if any(not np.all(np.isin(x, (-1, 1))) for x in arrs):
        raise PreconditionError("Williamson blocks must have entries +-1")
    report = williamson_conditions(*arrs)
    if not report.ok:
        raise PreconditionError("; ".join(report.failures))
    sym = {k: SymbolicMatrix.from_signs(x) for k, x in zip("abcd", arrs)}
    return _assemble(["a b c d", "b -a d -c", "c -d -a b", "d c -b -a"], sym)


def sylvester8(a, b, c, d, l, m, n, p) -> np.ndarray:
    """Sylvester's 8-square array; ``S S^t = (a^2 + ... + p^2) I``."""
    return np.array([
        [a, b, c, d, l, m, n, p],
        [b, -a, -d, c, m, -l, p, -n],
        [c, d, -a, -b, n, -p, -l, m],
        [d, -c, b, -a, p, n, -m, -l],
        [l, -m, -n, -p, -a, b, c, d],
        [m, l, p, -n, -b, -a, d, -c],
        [n, -p, l, m, -c, -d, -a, b],
        [p, n, -m, l, -d, c, -b, -a],
    ])


def sylvester2(a, b) -> np.ndarray:
    """Entrywise product of ``[[a, b], [b, a]]`` with ``[[1, 1], [1, -1]]``."""
    return circulant([a, b]) * fourier(2).real


def circulant(row) -> np.ndarray:
    """Each row is the previous one rotated right by one place."""
    row = np.asarray(row)
    if row.ndim != 1 or row.size == 0:
        raise ValueError("circulant needs a non-empty 1-d row")
    n = row.size
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return row[idx]


def bjorck_row(root: int = 1) -> np.ndarray:
    """The 6-term row ``(1, i d, -d, -i, -1/d, i/d)`` with ``d^2 - (1-sqrt 3) d + 1 = 0``.

    Both roots are unimodular and conjugate; ``root=+1`` picks ``Im d > 0``.
    """
    if root not in (1, -1):
        raise ValueError("root must be +1 or -1")
    s = 1 - np.sqrt(3)
    d = complex(s / 2, root * np.sqrt(1 - s * s / 4))
    return np.array([1, 1j * d, -d, -1j, -1 / d, 1j / d])


def zauner_triplet() -> tuple[SymbolicMatrix, SymbolicMatrix, SymbolicMatrix]:
    """Zauner's unbiased 4x4 matrices ``E1(x), E2(y,z), E3(w,z)`` with the factor 1/2."""
    E1 = SymbolicMatrix.from_tokens([
        "1 1 1 1",
        "1 -1 e(x) -e(x)",
        "1 1 -1 -1",
        "1 -1 -e(x) e(x)",
    ], ("x",), -2)
    E2 = SymbolicMatrix.from_tokens([
        "1 1 1 1",
        "e(y) -e(y) e(z) -e(z)",
        "1 1 -1 -1",
        "-e(y) e(y) e(z) -e(z)",
    ], ("y", "z"), -2)
    E3 = SymbolicMatrix.from_tokens([
        "1 1 e(z) -e(z)",
        "1 1 -e(z) e(z)",
        "e(w) -e(w) 1 1",
        "-e(w) e(w) 1 1",
    ], ("w", "z"), -2)
    return E1, E2, E3


def fourier(n: int) -> np.ndarray:
    """Unscaled Fourier matrix ``F_jk = exp(2 pi i jk / n)``."""
    if n < 1:
        raise ValueError("n must be positive")
    jk = np.outer(np.arange(n), np.arange(n)) % n
    # exact values at quarter turns
    out = np.exp(2j * np.pi * jk / n)
    if n % 4 == 0:
        q = (4 * jk) % (4 * n)
        exact = q % n == 0
        out[exact] = np.array([1, 1j, -1, -1j])[(q[exact] // n) % 4]
    elif n % 2 == 0:
        out[(2 * jk) % n == 0] = np.where(((2 * jk) // n % 2)[(2 * jk) % n == 0] == 0, 1, -1)
    return out


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p ** 0.5) + 1))


def prime_mub_set(p: int) -> list[np.ndarray]:
    """``p + 1`` mutually unbiased bases of ``C^p`` as matrices with orthonormal columns.

    Basis 0 is the standard basis.  For odd ``p`` basis ``k+1`` has vectors
    ``v_m(j) = w^(k j^2 + m j) / sqrt(p)``, ``w = e^{2 pi i / p}``.  For ``p = 2``
    the eigenbases of sigma_x and sigma_y are used.
    """
    if not isinstance(p, (int, np.integer)) or not _is_prime(int(p)):
        raise ValueError(f"{p!r} is not a prime")
    if p > 31:
        raise ValueError("prime_mub_set is limited to p <= 31")
    bases = [np.eye(p, dtype=complex)]
    if p == 2:
        bases.append(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
        bases.append(np.array([[1, 1], [1j, -1j]]) / np.sqrt(2))
        return bases
    j = np.arange(p)
    for k in range(p):
        expo = (k * j[:, None] ** 2 + j[:, None] * j[None, :]) % p
        bases.append(np.exp(2j * np.pi * expo / p) / np.sqrt(p))
    return bases
