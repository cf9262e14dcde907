"""Exact phase algebra for matrices with unimodular entries.

Every entry handled here is either zero or ``exp(i*(L + q*pi/2))`` where ``L``
is an integer combination of named real parameters and ``q`` is a quarter-turn
offset.  Products of such matrices become integer combinations of these terms
(:class:`PhaseSum`), which have a canonical form in which cancellation is
exact: distinct linear parts are independent functions of the parameters, so
the only identities are ``e^{i(L+pi)} = -e^{iL}``.

Global numerical factors are tracked as an integer ``scale_half_log`` ``k``
meaning an overall factor ``2**(k/2)``; they never leak into the terms.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

__all__ = [
    "PhaseLinearForm",
    "Entry",
    "SymbolicMatrix",
    "PhaseSum",
    "SumMatrix",
    "UnknownParameterError",
    "MissingParameterError",
    "NotCollapsibleError",
    "parse_entry",
    "format_entry",
    "entry_mul",
    "sym_adjoint",
    "sym_transpose",
    "sym_conj",
    "sym_negate",
    "sym_permute",
    "sym_dress",
    "sym_mat_mul",
    "mat_mul",
    "sum_canonicalize",
    "substitute",
    "evaluate",
    "evaluate_many",
    "symbolic_blocks",
    "sum_blocks",
    "to_sum_matrix",
]

I_POWERS = np.array([1.0 + 0j, 1j, -1.0 + 0j, -1j])

_TERM_RE = re.compile(r"\s*([+-]?)\s*(\d*)\s*\*?\s*([A-Za-z_][A-Za-z0-9_]*)\s*")


class UnknownParameterError(KeyError):
    pass


class MissingParameterError(KeyError):
    pass


class NotCollapsibleError(ValueError):
    pass


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, (bool, np.bool_))


@dataclass(frozen=True)
class PhaseLinearForm:
    """The exponent ``sum_k c_k p_k + quarter*pi/2`` of a unimodular entry.

    ``coeffs`` may be given as a mapping or as ``(name, int)`` pairs; it is
    stored as a sorted tuple without zero coefficients.
    """

    coeffs: tuple = ()
    quarter: int = 0

    def __post_init__(self):
        raw = self.coeffs.items() if isinstance(self.coeffs, Mapping) else self.coeffs
        merged: dict[str, int] = {}
        for name, c in raw:
            if not _is_int(c):
                raise TypeError(f"coefficient of {name!r} must be an integer, got {c!r}")
            merged[str(name)] = merged.get(str(name), 0) + int(c)
        if not _is_int(self.quarter):
            raise TypeError(
                f"constant offset must be an integer number of quarter turns, got {self.quarter!r}"
            )
        object.__setattr__(self, "coeffs", tuple(sorted((k, v) for k, v in merged.items() if v)))
        object.__setattr__(self, "quarter", int(self.quarter) % 4)

    @classmethod
    def var(cls, name: str, quarter: int = 0) -> "PhaseLinearForm":
        return cls(((name, 1),), quarter)

    @classmethod
    def const(cls, quarter: int = 0) -> "PhaseLinearForm":
        return cls((), quarter)

    @classmethod
    def from_offset(cls, coeffs=(), offset: float = 0.0, tol: float = 1e-12) -> "PhaseLinearForm":
        """Build a form from a constant offset in radians; it must be a multiple of pi/2."""
        q = offset / (math.pi / 2)
        if abs(q - round(q)) > tol:
            raise ValueError(f"offset {offset!r} is not a multiple of pi/2")
        return cls(coeffs, int(round(q)))

    @classmethod
    def parse(cls, text: str, quarter: int = 0) -> "PhaseLinearForm":
        """Parse a linear expression such as ``"b+d-a"`` or ``"2a+c"``."""
        text = text.strip()
        if text in ("", "0"):
            return cls((), quarter)
        pos, coeffs = 0, []
        while pos < len(text):
            m = _TERM_RE.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse linear form {text!r}")
            if pos > 0 and not m.group(1):
                raise ValueError(f"missing operator in {text!r}")
            k = int(m.group(2)) if m.group(2) else 1
            coeffs.append((m.group(3), -k if m.group(1) == "-" else k))
            pos = m.end()
        return cls(tuple(coeffs), quarter)

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def coeff(self, name: str) -> int:
        return dict(self.coeffs).get(name, 0)

    def __add__(self, other: "PhaseLinearForm") -> "PhaseLinearForm":
        return PhaseLinearForm(self.coeffs + other.coeffs, self.quarter + other.quarter)

    def __neg__(self) -> "PhaseLinearForm":
        return PhaseLinearForm(tuple((k, -v) for k, v in self.coeffs), -self.quarter)

    def __sub__(self, other: "PhaseLinearForm") -> "PhaseLinearForm":
        return self + (-other)

    def scaled(self, k: int) -> "PhaseLinearForm":
        return PhaseLinearForm(tuple((n, k * v) for n, v in self.coeffs), k * self.quarter)

    def shifted(self, quarters: int) -> "PhaseLinearForm":
        return PhaseLinearForm(self.coeffs, self.quarter + quarters)

    def linear_part(self) -> "PhaseLinearForm":
        return PhaseLinearForm(self.coeffs, 0)

    def substitute(self, name: str, replacement: "PhaseLinearForm") -> "PhaseLinearForm":
        k = self.coeff(name)
        if not k:
            return self
        rest = tuple((n, v) for n, v in self.coeffs if n != name)
        return PhaseLinearForm(rest, self.quarter) + replacement.scaled(k)

    def angle(self, binding: Mapping[str, float]) -> float:
        try:
            return sum(v * binding[n] for n, v in self.coeffs) + self.quarter * math.pi / 2
        except KeyError as exc:
            raise MissingParameterError(f"binding has no value for parameter {exc.args[0]!r}") from None

    def value(self, binding: Mapping[str, float]) -> complex:
        lin = sum(v * binding[n] for n, v in self.coeffs) if self.coeffs else 0.0
        return complex(np.exp(1j * lin) * I_POWERS[self.quarter])

    def sort_key(self):
        return (self.coeffs, self.quarter)

    def expr(self) -> str:
        """The linear part as text, e.g. ``b+d-a``; ``0`` if constant."""
        out = ""
        for name, v in self.coeffs:
            sign = "-" if v < 0 else ("+" if out else "")
            mag = "" if abs(v) == 1 else str(abs(v))
            out += f"{sign}{mag}{name}"
        return out or "0"

    def __str__(self) -> str:
        return format_entry(self)


Entry = Optional[PhaseLinearForm]

_ENTRY_RE = re.compile(r"^([+-]?)(i?)(?:(1)|e\((.*)\)|e\^\{i\((.*)\)\}|e\^\{i([A-Za-z_]\w*)\})?$")


def parse_entry(token: str) -> Entry:
    """Parse one entry token: ``0``, ``1``, ``-i``, ``e(a)``, ``-ie(b+d-a)``, ``e^{i(b-a)}``."""
    t = token.strip().replace(" ", "")
    if t == "0":
        return None
    m = _ENTRY_RE.match(t)
    if not m or (not m.group(2) and not any(m.group(k) for k in (3, 4, 5, 6))):
        raise ValueError(f"cannot parse entry token {token!r}")
    quarter = (2 if m.group(1) == "-" else 0) + (1 if m.group(2) else 0)
    expr = m.group(4) or m.group(5) or m.group(6) or ""
    return PhaseLinearForm.parse(expr, quarter)


def format_entry(e: Entry) -> str:
    """Inverse of :func:`parse_entry` using the ``e^{i(...)}`` notation."""
    if e is None:
        return "0"
    prefix = ("", "i", "-", "-i")[e.quarter]
    if e.is_constant:
        return prefix + "1" if e.quarter in (0, 2) else prefix
    expr = e.expr()
    body = f"e^{{i{expr}}}" if len(e.coeffs) == 1 and e.coeffs[0][1] == 1 else f"e^{{i({expr})}}"
    return prefix + body


def entry_mul(e1: Entry, e2: Entry) -> Entry:
    if e1 is None or e2 is None:
        return None
    return e1 + e2


def _ordered_union(*groups: Iterable[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for g in groups:
        for name in g:
            seen.setdefault(name, None)
    return tuple(seen)


@dataclass(frozen=True)
class SymbolicMatrix:
    """Square grid of zero / unimodular entries over an ordered parameter list."""

    grid: tuple
    params: tuple = None
    scale_half_log: int = 0

    def __post_init__(self):
        grid = tuple(tuple(row) for row in self.grid)
        n = len(grid)
        if n == 0 or any(len(row) != n for row in grid):
            raise ValueError("grid must be a non-empty square")
        for row in grid:
            for e in row:
                if e is not None and not isinstance(e, PhaseLinearForm):
                    raise TypeError(f"entries must be PhaseLinearForm or None, got {e!r}")
        used = _ordered_union(*(e.params for row in grid for e in row if e is not None))
        if self.params is None:
            params = used
        else:
            params = tuple(self.params)
            if len(set(params)) != len(params):
                raise ValueError(f"duplicate parameter names in {params}")
            missing = [p for p in used if p not in params]
            if missing:
                raise ValueError(f"parameters {missing} used in grid but not declared")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "scale_half_log", int(self.scale_half_log))

    @classmethod
    def from_tokens(cls, rows: Sequence[Union[str, Sequence[str]]], params=None, scale_half_log: int = 0):
        grid = [[parse_entry(t) for t in (r.split() if isinstance(r, str) else r)] for r in rows]
        return cls(grid, params, scale_half_log)

    @classmethod
    def from_signs(cls, array, scale_half_log: int = 0) -> "SymbolicMatrix":
        """Build a parameter-free matrix from entries in ``{0, 1, -1, 1j, -1j}``."""
        lookup = {1: 0, 1j: 1, -1: 2, -1j: 3}
        grid = []
        for row in np.asarray(array):
            out = []
            for x in row:
                x = complex(x)
                if x == 0:
                    out.append(None)
                elif x in lookup:
                    out.append(PhaseLinearForm.const(lookup[x]))
                else:
                    raise ValueError(f"entry {x!r} is not in {{0, +-1, +-i}}")
            grid.append(out)
        return cls(grid, (), scale_half_log)

    @property
    def n(self) -> int:
        return len(self.grid)

    def __getitem__(self, ij) -> Entry:
        i, j = ij
        return self.grid[i][j]

    @property
    def has_zero(self) -> bool:
        return any(e is None for row in self.grid for e in row)

    @cached_property
    def _compiled(self):
        n, idx = self.n, {p: k for k, p in enumerate(self.params)}
        K = np.zeros((n, n, len(self.params)))
        Q = np.zeros((n, n), dtype=int)
        mask = np.ones((n, n), dtype=bool)
        for i, row in enumerate(self.grid):
            for j, e in enumerate(row):
                if e is None:
                    mask[i, j] = False
                    continue
                Q[i, j] = e.quarter
                for name, v in e.coeffs:
                    K[i, j, idx[name]] = v
        return K, Q, mask

    def with_scale(self, scale_half_log: int) -> "SymbolicMatrix":
        return SymbolicMatrix(self.grid, self.params, scale_half_log)

    def with_params(self, params: Sequence[str]) -> "SymbolicMatrix":
        return SymbolicMatrix(self.grid, tuple(params), self.scale_half_log)

    def transpose(self) -> "SymbolicMatrix":
        return sym_transpose(self)

    def adjoint(self) -> "SymbolicMatrix":
        return sym_adjoint(self)

    @property
    def T(self) -> "SymbolicMatrix":
        return sym_transpose(self)

    def evaluate(self, binding=None) -> np.ndarray:
        return evaluate(self, binding)

    def __str__(self) -> str:
        cells = [[format_entry(e) for e in row] for row in self.grid]
        width = max(len(c) for row in cells for c in row)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


def sym_transpose(M: SymbolicMatrix) -> SymbolicMatrix:
    return SymbolicMatrix(tuple(zip(*M.grid)), M.params, M.scale_half_log)


def sym_conj(M: SymbolicMatrix) -> SymbolicMatrix:
    grid = [[None if e is None else -e for e in row] for row in M.grid]
    return SymbolicMatrix(grid, M.params, M.scale_half_log)


def sym_adjoint(M: SymbolicMatrix) -> SymbolicMatrix:
    return sym_transpose(sym_conj(M))


def sym_negate(M: SymbolicMatrix) -> SymbolicMatrix:
    grid = [[None if e is None else e.shifted(2) for e in row] for row in M.grid]
    return SymbolicMatrix(grid, M.params, M.scale_half_log)


def sym_permute(M: SymbolicMatrix, rows: Sequence[int] = None, cols: Sequence[int] = None) -> SymbolicMatrix:
    """Return ``M[rows][:, cols]`` (new row ``i`` is old row ``rows[i]``)."""
    rows = range(M.n) if rows is None else rows
    cols = range(M.n) if cols is None else cols
    if sorted(rows) != list(range(M.n)) or sorted(cols) != list(range(M.n)):
        raise ValueError("rows and cols must be permutations")
    return SymbolicMatrix([[M.grid[i][j] for j in cols] for i in rows], M.params, M.scale_half_log)


def sym_dress(M: SymbolicMatrix, left: Sequence[Entry] = None, right: Sequence[Entry] = None,
              params: Sequence[str] = None) -> SymbolicMatrix:
    """Multiply by diagonal phase matrices: ``diag(left) @ M @ diag(right)``."""
    zero = PhaseLinearForm()
    left = [zero] * M.n if left is None else list(left)
    right = [zero] * M.n if right is None else list(right)
    if len(left) != M.n or len(right) != M.n:
        raise ValueError("dressing vectors must match the matrix dimension")
    grid = [[None if e is None else e + left[i] + right[j] for j, e in enumerate(row)]
            for i, row in enumerate(M.grid)]
    extra = _ordered_union(*(f.params for f in left + right))
    return SymbolicMatrix(grid, _ordered_union(M.params, extra, params or ()), M.scale_half_log)


@dataclass(frozen=True)
class PhaseSum:
    """Integer combination ``sum m * e^{i form}`` of unimodular terms.

    ``terms`` is a tuple of ``(PhaseLinearForm, int)`` pairs; it is not
    canonical until passed through :func:`sum_canonicalize`.
    """

    terms: tuple = ()

    def __post_init__(self):
        raw = self.terms.items() if isinstance(self.terms, Mapping) else self.terms
        object.__setattr__(self, "terms", tuple((f, int(m)) for f, m in raw))

    @classmethod
    def single(cls, form: Entry) -> "PhaseSum":
        return cls(() if form is None else ((form, 1),))

    @property
    def params(self) -> tuple[str, ...]:
        return _ordered_union(*(f.params for f, _ in self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PhaseSum") -> "PhaseSum":
        return PhaseSum(self.terms + other.terms)

    def __neg__(self) -> "PhaseSum":
        return PhaseSum(tuple((f, -m) for f, m in self.terms))

    def __mul__(self, other: "PhaseSum") -> "PhaseSum":
        return PhaseSum(tuple((f + g, m * k) for f, m in self.terms for g, k in other.terms))

    def scaled(self, k: int) -> "PhaseSum":
        return PhaseSum(tuple((f, m * k) for f, m in self.terms))

    def canonical(self) -> "PhaseSum":
        return sum_canonicalize(self)

    def is_zero(self) -> bool:
        return not sum_canonicalize(self).terms

    def substitute(self, name: str, replacement: PhaseLinearForm) -> "PhaseSum":
        return PhaseSum(tuple((f.substitute(name, replacement), m) for f, m in self.terms))

    def value(self, binding: Mapping[str, float]) -> complex:
        return sum((m * f.value(binding) for f, m in self.terms), 0j)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for f, m in self.terms:
            tok = format_entry(f)
            parts.append(tok if m == 1 else f"{m}*({tok})")
        return " + ".join(parts)


def sum_canonicalize(s: PhaseSum) -> PhaseSum:
    """Merge equal terms and fold ``e^{i(L+pi)}`` into ``-e^{iL}``; idempotent."""
    acc: dict[PhaseLinearForm, int] = {}
    for f, m in s.terms:
        sign = -1 if f.quarter >= 2 else 1
        key = PhaseLinearForm(f.coeffs, f.quarter % 2)
        acc[key] = acc.get(key, 0) + sign * m
    return PhaseSum(tuple(sorted(((f, m) for f, m in acc.items() if m), key=lambda t: t[0].sort_key())))


@dataclass(frozen=True)
class SumMatrix:
    """Square grid of :class:`PhaseSum` entries times ``2**(scale_half_log/2)``."""

    grid: tuple
    params: tuple = None
    scale_half_log: int = 0

    def __post_init__(self):
        grid = tuple(tuple(row) for row in self.grid)
        n = len(grid)
        if n == 0 or any(len(row) != n for row in grid):
            raise ValueError("grid must be a non-empty square")
        used = _ordered_union(*(s.params for row in grid for s in row))
        params = used if self.params is None else tuple(self.params)
        missing = [p for p in used if p not in params]
        if missing:
            raise ValueError(f"parameters {missing} used in grid but not declared")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "scale_half_log", int(self.scale_half_log))

    @property
    def n(self) -> int:
        return len(self.grid)

    def __getitem__(self, ij) -> PhaseSum:
        i, j = ij
        return self.grid[i][j]

    def canonical(self) -> "SumMatrix":
        return SumMatrix([[sum_canonicalize(s) for s in row] for row in self.grid],
                         self.params, self.scale_half_log)

    def max_terms(self) -> int:
        return max(len(s) for row in self.grid for s in row)

    def is_collapsed(self) -> bool:
        try:
            self.collapse()
        except NotCollapsibleError:
            return False
        return True

    def collapse(self) -> SymbolicMatrix:
        """Rewrite as a :class:`SymbolicMatrix` if every nonzero entry is one
        term and all multiplicities share a common power-of-two modulus."""
        grid, mags = [], set()
        for row in self.grid:
            out = []
            for s in row:
                s = sum_canonicalize(s)
                if not s.terms:
                    out.append(None)
                    continue
                if len(s.terms) != 1:
                    raise NotCollapsibleError(f"entry has {len(s.terms)} terms: {s}")
                f, m = s.terms[0]
                mags.add(abs(m))
                out.append(f.shifted(2) if m < 0 else f)
            grid.append(out)
        if len(mags) > 1:
            raise NotCollapsibleError(f"entries have different multiplicities {sorted(mags)}")
        mag = mags.pop() if mags else 1
        k = mag.bit_length() - 1
        if mag != 1 << k:
            raise NotCollapsibleError(f"multiplicity {mag} is not a power of two")
        return SymbolicMatrix(grid, self.params, self.scale_half_log + 2 * k)

    def evaluate(self, binding=None) -> np.ndarray:
        return evaluate(self, binding)


def to_sum_matrix(M: Union[SymbolicMatrix, SumMatrix]) -> SumMatrix:
    if isinstance(M, SumMatrix):
        return M
    return SumMatrix([[PhaseSum.single(e) for e in row] for row in M.grid], M.params, M.scale_half_log)


def mat_mul(X: Union[SymbolicMatrix, SumMatrix], Y: Union[SymbolicMatrix, SumMatrix]) -> SumMatrix:
    """Exact product of symbolic or sum matrices; entries are canonicalized."""
    if X.n != Y.n:
        raise ValueError(f"dimension mismatch: {X.n} vs {Y.n}")
    Xs, Ys = to_sum_matrix(X), to_sum_matrix(Y)
    n = X.n
    grid = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = PhaseSum()
            for j in range(n):
                acc = acc + Xs.grid[i][j] * Ys.grid[j][k]
            row.append(sum_canonicalize(acc))
        grid.append(row)
    return SumMatrix(grid, _ordered_union(X.params, Y.params), X.scale_half_log + Y.scale_half_log)


def sym_mat_mul(M1: SymbolicMatrix, M2: SymbolicMatrix) -> SumMatrix:
    return mat_mul(M1, M2)


def substitute(M, param: str, replacement: PhaseLinearForm):
    """Replace every occurrence of ``param`` by ``replacement``.

    Works on :class:`SymbolicMatrix` and :class:`SumMatrix`.  ``param`` is
    dropped from ``params`` unless the replacement still uses it; new
    parameters of the replacement are appended.
    """
    if param not in M.params:
        raise UnknownParameterError(f"unknown parameter {param!r}; matrix has {list(M.params)}")
    keep = [p for p in M.params if p != param or param in replacement.params]
    params = _ordered_union(keep, replacement.params)
    if isinstance(M, SymbolicMatrix):
        grid = [[None if e is None else e.substitute(param, replacement) for e in row] for row in M.grid]
        return SymbolicMatrix(grid, params, M.scale_half_log)
    grid = [[s.substitute(param, replacement) for s in row] for row in M.grid]
    return SumMatrix(grid, params, M.scale_half_log)


def _binding_vector(params: Sequence[str], binding) -> np.ndarray:
    if binding is None:
        binding = {}
    if isinstance(binding, Mapping):
        missing = [p for p in params if p not in binding]
        if missing:
            raise MissingParameterError(f"binding has no value for parameters {missing}")
        return np.array([float(binding[p]) for p in params])
    vec = np.asarray(binding, dtype=float)
    if vec.shape != (len(params),):
        raise MissingParameterError(f"expected {len(params)} values for {list(params)}, got shape {vec.shape}")
    return vec


def evaluate(M: Union[SymbolicMatrix, SumMatrix], binding=None) -> np.ndarray:
    """Numeric value of ``M`` at ``binding`` (mapping, or vector in ``M.params`` order)."""
    vec = _binding_vector(M.params, binding)
    if isinstance(M, SymbolicMatrix):
        return evaluate_many(M, vec[None, :])[0]
    named = dict(zip(M.params, vec))
    out = np.array([[s.value(named) for s in row] for row in M.grid], dtype=complex)
    return out * 2.0 ** (M.scale_half_log / 2) if M.scale_half_log else out


def evaluate_many(M: SymbolicMatrix, bindings: np.ndarray) -> np.ndarray:
    """Vectorized evaluation at an ``(S, len(params))`` array of bindings."""
    K, Q, mask = M._compiled
    B = np.atleast_2d(np.asarray(bindings, dtype=float))
    if B.shape[1] != len(M.params):
        raise MissingParameterError(f"expected {len(M.params)} columns for {list(M.params)}")
    if K.shape[2]:
        lin = np.einsum("ijp,sp->sij", K, B)
        out = np.exp(1j * lin)
    else:
        out = np.ones((B.shape[0], M.n, M.n), dtype=complex)
    out = out * I_POWERS[Q] * mask
    if M.scale_half_log:
        out = out * 2.0 ** (M.scale_half_log / 2)
    return out


def symbolic_blocks(blocks: Sequence[Sequence[SymbolicMatrix]]) -> SymbolicMatrix:
    """Assemble equal-size, equal-scale blocks into one matrix."""
    flat = [b for row in blocks for b in row]
    m, scale = flat[0].n, flat[0].scale_half_log
    if any(b.n != m for b in flat):
        raise ValueError("all blocks must have the same dimension")
    if any(b.scale_half_log != scale for b in flat):
        raise ValueError("all blocks must carry the same scale")
    grid = []
    for brow in blocks:
        if len(brow) != len(blocks):
            raise ValueError("block layout must be square")
        for i in range(m):
            grid.append([e for b in brow for e in b.grid[i]])
    return SymbolicMatrix(grid, _ordered_union(*(b.params for b in flat)), scale)


def sum_blocks(blocks: Sequence[Sequence[Union[SymbolicMatrix, SumMatrix]]]) -> SumMatrix:
    """Assemble blocks, rescaling multiplicities so all share the smallest scale.

    Scale differences must be even (integer powers of two).
    """
    flat = [to_sum_matrix(b) for row in blocks for b in row]
    m = flat[0].n
    if any(b.n != m for b in flat):
        raise ValueError("all blocks must have the same dimension")
    base = min(b.scale_half_log for b in flat)
    aligned = []
    for b in flat:
        diff = b.scale_half_log - base
        if diff % 2:
            raise ValueError("block scales differ by an odd power of sqrt(2)")
        factor = 1 << (diff // 2)
        aligned.append([[s.scaled(factor) for s in row] for row in b.grid])
    width = len(blocks[0])
    grid = []
    for r in range(len(blocks)):
        if len(blocks[r]) != width or width != len(blocks):
            raise ValueError("block layout must be square")
        for i in range(m):
            grid.append([s for c in range(width) for s in aligned[r * width + c][i]])
    return SumMatrix(grid, _ordered_union(*(b.params for b in flat)), base)
