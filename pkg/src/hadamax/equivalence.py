"""Equivalence invariants: Haagerup sets, orthogonality fingerprints, spectra,
and characteristic-polynomial class comparison.

Two Hadamard matrices are equivalent when ``H2 = P1 D1 H1 D2 P2`` with
permutations ``P`` and diagonal unitaries ``D``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .algebra import SymbolicMatrix, evaluate_many
from .charpoly import char_poly_many
from .props import is_hadamard_numeric

__all__ = [
    "HaagerupSet",
    "Fingerprint",
    "ClassVerdict",
    "haagerup_set",
    "entry_census",
    "fingerprint",
    "fingerprints_match",
    "spectrum",
    "spectra_match",
    "random_equivalent",
    "charpoly_class_compare",
    "class_partition",
]

TWO_PI = 2 * math.pi


def _hadamard_input(M, tol: float) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    ok, report = is_hadamard_numeric(M, tol)
    if not ok:
        raise ValueError(
            f"input is not Hadamard within {tol:g} (modulus {report.max_entry_modulus_error:.3g}, "
            f"gram {report.max_gram_error:.3g})"
        )
    return M


def _wrap(angles: np.ndarray, tol: float) -> np.ndarray:
    """Angles in ``[0, 2 pi)`` with values within ``tol`` of ``2 pi`` sent to 0."""
    a = np.mod(angles, TWO_PI)
    a[a > TWO_PI - tol] = 0.0
    return a


def _circ_dist(x: np.ndarray, y: np.ndarray) -> float:
    d = np.abs(np.mod(x - y + math.pi, TWO_PI) - math.pi)
    return float(np.max(d)) if d.size else 0.0


@dataclass(frozen=True, eq=False)
class HaagerupSet:
    """Sorted angles of ``H_ij H_kl conj(H_il) conj(H_kj)`` over all index quadruples."""

    angles: np.ndarray

    def support(self, tol: float = 1e-9) -> np.ndarray:
        """Distinct angles (merged within ``tol``)."""
        out = []
        for a in self.angles:
            if not out or a - out[-1] > tol:
                out.append(a)
        if len(out) > 1 and TWO_PI - out[-1] + out[0] <= tol:
            out.pop()
        return np.array(out)

    def matches(self, other: "HaagerupSet", tol: float = 1e-9) -> bool:
        if self.angles.shape != other.angles.shape:
            return False
        return _circ_dist(self.angles, other.angles) < tol

    def to_dict(self) -> dict:
        return {"angles_over_pi": [float(a / math.pi) for a in self.angles]}


def haagerup_set(M, tol: float = 1e-8) -> HaagerupSet:
    M = _hadamard_input(M, tol)
    Mc = M.conj()
    prod = np.einsum("ij,kl,il,kj->ijkl", M, M, Mc, Mc)
    return HaagerupSet(np.sort(_wrap(np.angle(prod).ravel(), tol)))


def entry_census(M, tol: float = 1e-9) -> dict[str, int]:
    """Counts of entries equal to ``1, -1, i, -i`` (within ``tol``) and of all others."""
    M = np.asarray(M, dtype=complex)
    out = {}
    hit = np.zeros(M.shape, dtype=bool)
    for key, val in (("1", 1), ("-1", -1), ("i", 1j), ("-i", -1j)):
        m = np.abs(M - val) < tol
        out[key] = int(m.sum())
        hit |= m
    out["other"] = int((~hit).sum())
    return out


def _canonical_legs(angles: np.ndarray, tol: float) -> np.ndarray:
    """Rotate a leg multiset so one leg sits at 0, picking the lexicographically least result."""
    grid = max(tol, 1e-12) * 10
    cands = np.sort(_wrap(angles[None, :] - angles[:, None], tol), axis=1)
    keys = np.round(cands / grid).astype(np.int64)
    best = np.lexsort(keys.T[::-1])[0]
    return cands[best]


@dataclass(frozen=True, eq=False)
class Fingerprint:
    """Canonical leg lists of every unordered row pair and column pair.

    ``rows`` and ``cols`` hold the lists for row and column pairs; in
    ``combined`` mode both are compared as one multiset.
    """

    rows: tuple
    cols: tuple
    mode: str = "combined"

    def lists(self) -> list:
        return list(self.rows) + list(self.cols)

    def to_dict(self) -> dict:
        conv = lambda ls: [[float(a / math.pi) for a in legs] for legs in ls]
        return {"mode": self.mode, "rows_over_pi": conv(self.rows), "cols_over_pi": conv(self.cols)}


def _pair_lists(M: np.ndarray, tol: float) -> tuple:
    n = M.shape[0]
    grid = max(tol, 1e-12) * 10
    key = lambda a: tuple(np.round(a / grid).astype(np.int64))
    out = []
    for j, k in itertools.combinations(range(n), 2):
        legs = _wrap(np.angle(M[:, j] * np.conj(M[:, k])), tol)
        # the pair (k, j) gives the negated legs, so both orientations are folded
        canon = min(_canonical_legs(legs, tol), _canonical_legs(_wrap(-legs, tol), tol), key=key)
        out.append(canon)
    out.sort(key=key)
    return tuple(out)


def fingerprint(M, tol: float = 1e-9, mode: str = "combined") -> Fingerprint:
    """Orthogonality fingerprint of a Hadamard matrix.

    For columns ``j < k`` the legs are the angles of ``H_rj conj(H_rk)``
    over rows ``r``; they sum to zero and trace a closed polygon.  Each leg
    multiset is made free of rotation by :func:`_canonical_legs` and of
    orientation by also trying the mirrored legs, since swapping ``j`` and
    ``k`` negates every angle.  As a consequence the fingerprint cannot
    tell a matrix from its complex conjugate.
    """
    if mode not in ("combined", "separate"):
        raise ValueError(f"mode must be 'combined' or 'separate', got {mode!r}")
    M = _hadamard_input(M, max(tol, 1e-8))
    return Fingerprint(_pair_lists(M.T, tol), _pair_lists(M, tol), mode)


def _greedy_match(a: Sequence[np.ndarray], b: Sequence[np.ndarray], tol: float) -> bool:
    if len(a) != len(b):
        return False
    used = [False] * len(b)
    for x in a:
        for k, y in enumerate(b):
            if not used[k] and x.shape == y.shape and _circ_dist(x, y) < tol:
                used[k] = True
                break
        else:
            return False
    return True


def fingerprints_match(f1: Fingerprint, f2: Fingerprint, tol: float = 1e-9) -> bool:
    """Multiset equality of leg lists within ``tol``; the first argument's mode decides."""
    if f1.mode == "combined":
        return _greedy_match(f1.lists(), f2.lists(), tol)
    return _greedy_match(f1.rows, f2.rows, tol) and _greedy_match(f1.cols, f2.cols, tol)


def spectrum(M, normalize: bool = True) -> np.ndarray:
    """Eigenvalues sorted by angle in ``(-pi, pi]``, then modulus."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if normalize:
        M = M / np.sqrt(M.shape[0])
    ev = np.linalg.eigvals(M)
    ang = np.angle(ev)
    ang[ang <= -math.pi + 1e-9] = math.pi
    order = np.lexsort((np.round(np.abs(ev), 9), np.round(ang, 9)))
    return ev[order]


def spectra_match(s1, s2, tol: float = 1e-9) -> bool:
    s1, s2 = np.asarray(s1), np.asarray(s2)
    if s1.shape != s2.shape:
        return False
    used = np.zeros(len(s2), dtype=bool)
    for z in s1:
        d = np.where(used, np.inf, np.abs(s2 - z))
        k = int(np.argmin(d))
        if d[k] >= tol:
            return False
        used[k] = True
    return True


def random_equivalent(M, rng: np.random.Generator) -> np.ndarray:
    """``P1 D1 M D2 P2`` with random permutations and diagonal phases."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    d1 = np.exp(1j * rng.uniform(0, TWO_PI, n))
    d2 = np.exp(1j * rng.uniform(0, TWO_PI, n))
    out = d1[:, None] * M * d2[None, :]
    return out[rng.permutation(n)][:, rng.permutation(n)]


@dataclass(frozen=True)
class ClassVerdict:
    verdict: str
    shift: Optional[tuple] = None
    renaming: Optional[tuple] = None
    max_mismatch: float = 0.0
    tested_shifts: int = 0

    def __str__(self) -> str:
        return self.verdict


def _family(name):
    from .catalog import catalog_get

    entry = catalog_get(name)
    if not entry.is_symbolic or not entry.param_names or entry.n != 8:
        raise ValueError(f"{name} is not a parametrized 8x8 family")
    return entry.matrix


def charpoly_class_compare(name1: str, name2: str, samples: int = 6, seed: int = 0,
                           tol: float = 1e-8, separation: float = 1e-6,
                           renaming: bool = False, jobs: int = 1) -> ClassVerdict:
    """Compare two families through their characteristic polynomials.

    Every quarter-turn shift vector ``s`` (``4**P`` of them) is tried: the
    families agree under ``s`` if ``charpoly(M1(b)) = charpoly(M2(b + s pi/2))``
    at all sampled bindings within ``tol``.  A shift is ruled out when some
    sample differs by more than ``separation``.  With ``renaming`` the
    parameters of the second family may also be permuted.
    """
    M1, M2 = _family(name1), _family(name2)
    P = len(M1.params)
    if len(M2.params) != P:
        raise ValueError(f"{name1} and {name2} have different parameter counts")
    rng = np.random.default_rng(seed)
    B = rng.uniform(0, TWO_PI, size=(samples, P))
    ref = char_poly_many(evaluate_many(M1, B))
    shifts = np.array(list(itertools.product(range(4), repeat=P)), dtype=float) * (math.pi / 2)
    perms = list(itertools.permutations(range(P))) if renaming else [tuple(range(P))]

    def errors(base, chunk, rows):
        bind = (base[None, rows, :] + chunk[:, None, :]).reshape(-1, P)
        polys = char_poly_many(evaluate_many(M2, bind)).reshape(len(chunk), len(rows), -1)
        return np.max(np.abs(polys - ref[None, rows]), axis=(1, 2))

    def scan(perm):
        # binding of M2 column perm[k] takes M1's parameter k
        base = B[:, np.argsort(perm)]
        # one sample screens every shift; survivors are checked on all samples
        first = errors(base, shifts, [0])
        keep = np.flatnonzero(first <= separation)
        err = errors(base, shifts[keep], list(range(samples))) if keep.size else np.array([])
        hit = np.flatnonzero(err < tol)
        found = None
        if hit.size:
            k = hit[0]
            found = (tuple(int(round(x / (math.pi / 2))) for x in shifts[keep[k]]), float(err[k]))
        unresolved = int(np.sum((err >= tol) & (err <= separation)))
        closest = float(min(first.min(), err.min() if err.size else np.inf))
        return found, unresolved, closest

    if jobs > 1 and len(perms) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(scan, perms))
    else:
        results = [scan(p) for p in perms]
    total = len(shifts) * len(perms)
    for perm, (found, _, _) in zip(perms, results):
        if found is not None:
            return ClassVerdict("same-class", found[0], tuple(M2.params[k] for k in perm) if renaming else None,
                                found[1], total)
    closest = min(r[2] for r in results)
    if any(r[1] for r in results):
        return ClassVerdict("undetermined", max_mismatch=closest, tested_shifts=total)
    return ClassVerdict("distinct", max_mismatch=closest, tested_shifts=total)


def class_partition(names: Iterable[str], **kwargs) -> list[list[str]]:
    """Group families into classes by pairwise :func:`charpoly_class_compare`."""
    names = list(names)
    parent = list(range(len(names)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(names)), 2):
        if find(i) == find(j):
            continue
        if charpoly_class_compare(names[i], names[j], **kwargs).verdict == "same-class":
            parent[find(j)] = find(i)
    groups: dict[int, list[str]] = {}
    for i, name in enumerate(names):
        groups.setdefault(find(i), []).append(name)
    return list(groups.values())
