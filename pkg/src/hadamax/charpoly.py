"""Characteristic polynomials: exact over the Gaussian integers, numeric in general.

The exact routine uses Berkowitz's algorithm, which needs only ring
operations (no division), so it stays inside ``Z[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = [
    "GaussInt",
    "ExactCharPoly",
    "CharPolySignature",
    "char_poly_exact",
    "char_poly_numeric",
    "char_poly_many",
    "printed_charpoly",
    "printed_charpoly_names",
    "PRINTED_SHIFTED",
]


@dataclass(frozen=True)
class GaussInt:
    re: int = 0
    im: int = 0

    @classmethod
    def coerce(cls, x) -> "GaussInt":
        if isinstance(x, GaussInt):
            return x
        z = complex(x)
        if z.real != int(z.real) or z.imag != int(z.imag):
            raise ValueError(f"{x!r} is not a Gaussian integer")
        return cls(int(z.real), int(z.imag))

    def __add__(self, o: "GaussInt") -> "GaussInt":
        return GaussInt(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "GaussInt") -> "GaussInt":
        return GaussInt(self.re - o.re, self.im - o.im)

    def __neg__(self) -> "GaussInt":
        return GaussInt(-self.re, -self.im)

    def __mul__(self, o: "GaussInt") -> "GaussInt":
        return GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return {1: "i", -1: "-i"}.get(self.im, f"{self.im}i")
        return f"({self.re}{self.im:+d}i)"


_ZERO, _ONE = GaussInt(0, 0), GaussInt(1, 0)


def _gauss_matrix(M) -> list[list[GaussInt]]:
    from .algebra import SymbolicMatrix

    if isinstance(M, SymbolicMatrix):
        if M.params and any(e is not None and not e.is_constant for row in M.grid for e in row):
            raise ValueError("exact characteristic polynomial needs a parameter-free matrix")
        M = M.evaluate({}) if not M.params else M.evaluate({p: 0.0 for p in M.params})
    rows = np.asarray(M)
    if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rows.shape}")
    out = []
    for row in rows:
        vals = []
        for x in row:
            z = complex(x)
            r, i = round(z.real), round(z.imag)
            if abs(z.real - r) > 1e-12 or abs(z.imag - i) > 1e-12:
                raise ValueError(f"entry {z!r} is not a Gaussian integer")
            vals.append(GaussInt(int(r), int(i)))
        out.append(vals)
    return out


def _berkowitz(A: list[list[GaussInt]]) -> list[GaussInt]:
    """Coefficients of ``det(y I - A)``, leading coefficient first."""
    n = len(A)
    poly = [_ONE]
    for k in range(n):
        # A_k is the leading (k+1)x(k+1) block: [[M, col], [row, a]]
        a = A[k][k]
        row = A[k][:k]
        col = [A[i][k] for i in range(k)]
        M = [r[:k] for r in A[:k]]
        # Toeplitz column: 1, -a, -row col, -row M col, ...
        t = [_ONE, -a]
        v = col
        for _ in range(k):
            t.append(-sum((r * c for r, c in zip(row, v)), _ZERO))
            v = [sum((M[i][j] * v[j] for j in range(k)), _ZERO) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = _ZERO
            for j in range(min(i, k) + 1):
                if i - j < len(t):
                    acc = acc + t[i - j] * poly[j]
            new.append(acc)
        poly = new
    return poly


@dataclass(frozen=True)
class ExactCharPoly:
    """``det(y I - M)`` with Gaussian-integer coefficients, highest degree first."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_complex(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs])

    def sympy(self):
        import sympy

        y = sympy.Symbol("y")
        n = self.degree
        return sympy.Add(*[(c.re + sympy.I * c.im) * y ** (n - k) for k, c in enumerate(self.coeffs)])

    def factored(self) -> str:
        """Factorization over ``Q(i)``, e.g. ``(y^2-6)^3``."""
        import sympy

        text = str(sympy.factor(self.sympy(), gaussian=True))
        return text.replace("**", "^").replace(" ", "").replace("*", "").replace("I", "i")

    def __str__(self) -> str:
        return self.factored()


def char_poly_exact(M) -> ExactCharPoly:
    """Exact ``det(y I - M)`` for entries in ``Z[i]`` (e.g. ``{0, +-1, +-i}``)."""
    return ExactCharPoly(tuple(_berkowitz(_gauss_matrix(M))))


@dataclass(frozen=True)
class CharPolySignature:
    """Monic coefficients of ``det(l I - M/sqrt(n))``, highest degree first."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def distance(self, other: "CharPolySignature") -> float:
        return float(np.max(np.abs(self.array() - other.array())))

    def to_dict(self) -> dict:
        return {"degree": self.degree, "coeffs": [[c.real, c.imag] for c in self.array()]}


def _poly_from_roots(roots: np.ndarray) -> np.ndarray:
    """Batched monic coefficients (highest first) from an ``(S, n)`` root array."""
    S, n = roots.shape
    c = np.zeros((S, n + 1), dtype=complex)
    c[:, 0] = 1
    for k in range(n):
        c[:, 1:k + 2] = c[:, 1:k + 2] - roots[:, k:k + 1] * c[:, 0:k + 1]
    return c


def char_poly_many(stack: np.ndarray, normalize: bool = True) -> np.ndarray:
    """Monic characteristic coefficients for a stack of matrices ``(S, n, n)``."""
    stack = np.asarray(stack, dtype=complex)
    n = stack.shape[-1]
    if normalize:
        stack = stack / np.sqrt(n)
    return _poly_from_roots(np.linalg.eigvals(stack))


def char_poly_numeric(M, binding=None, normalize: bool = True) -> CharPolySignature:
    from .algebra import SumMatrix, SymbolicMatrix, evaluate

    if isinstance(M, (SymbolicMatrix, SumMatrix)):
        M = evaluate(M, binding if binding is not None else {})
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return CharPolySignature(tuple(char_poly_many(M[None], normalize)[0]))


# Printed closed forms.  Each is a function of the binding returning ascending
# coefficients, to be multiplied by (1 - l^2)^2 and made monic.

_E = lambda t: np.exp(1j * t)
_R2 = np.sqrt(2)
_BASE = np.array([1, 0, -2, 0, 1])


def _q(c):
    return P.polymul(_BASE, c)


def _qq(quad, rest):
    return P.polymul(_BASE, P.polymul(quad, rest))


def _pA(a, b, c, d, f):
    return _q([-2 * _E(b + c + d + f), _R2 * _E(-a + b + c + d + f), 0, -_R2 * _E(a), 2])


def _pL(a, b, c, d, f, lead):
    return _q([4 * _E(a + b + c + d), _R2 * lead * (_E(a + d) - 2 * _E(b + d) + _E(a + f)),
               -2 * (_E(a + b) + _E(c + f)) * (_E(d - f) + 1),
               _R2 * (_E(b + d - f) - 2 * _E(a) + _E(b)), 4])


_PRINTED: dict[str, Callable] = {
    "D8A5": _pA,
    "D8B5": lambda a, b, c, d, f: _q([2 * _E(a + b + d + f), -_R2 * _E(a + c + d), 0, -_R2 * _E(b - c + f), 2]),
    "D8C5": lambda a, b, c, d, f: _q([-2 * _E(a + b + d + f), _R2 * _E(b + d + f), 0, -_R2 * _E(a), 2]),
    "D8D5": _pA,
    "D8E5": lambda a, b, c, d, f: _q([-2 * _E(a + c + d + f), _R2 * _E(c + d + f), 0, -_R2 * _E(a), 2]),
    "D8F5": lambda a, b, c, d, f: _q([
        -4 * _E(a + b + c + f),
        -_R2 * _E(c) * (_E(a + b) - _E(a + d) - 2 * _E(b + f)),
        2 * (_E(b - d) - 1) * (_E(c + d) + _E(a + f)),
        -_R2 * (2 * _E(a) + _E(b - d + f) - _E(f)),
        4,
    ]),
    "D8G5": lambda a, b, c, d, f: _q([2 * _E(b + c + d + f), -_R2 * _E(-a + b + c + d + f), 0, -_R2 * _E(a), 2]),
    "D8H5": lambda a, b, c, d, f: _qq([_E(c + d), 0, -1],
                                       [-2j * _E(b + f), _R2 * (1j * _E(-a + b + f) - _E(a)), 2]),
    "D8I5": lambda a, b, c, d, f: _qq([_E(c + d), 0, -1], [-2 * _E(b + f), _R2 * (_E(-a + b + f) - _E(a)), 2]),
    "D8J5": lambda a, b, c, d, f: _qq([_E(c + f), 0, 1], [2 * _E(b + d), -_R2 * (_E(-a + b + d) + _E(a)), 2]),
    "D8K5": lambda a, b, c, d, f: _qq([_E(c + f), 0, -1], [-2 * _E(b + d), _R2 * (_E(-a + b + d) - _E(a)), 2]),
    # the cubic coefficient carries e^{ic}; the printed e^{i(c+f)} is not self-reciprocal
    "D8L5": lambda a, b, c, d, f: _pL(a, b, c, d, f, _E(c)),
    "D8L5-printed": lambda a, b, c, d, f: _pL(a, b, c, d, f, _E(c + f)),
    "D8A4": lambda a, b, c, d: _q([2 * _E(2 * a + c + d), -_R2 * _E(a + c + d), 0, -_R2 * _E(a), 2]),
    "D8B4": lambda a, b, c, d: _q([2 * _E(b + c + d), -_R2 * _E(a + c + d), 0, -_R2 * _E(b - a), 2]),
    "D8C4": lambda a, b, c, d: _q([-2j * _E(a + b + 2 * d), 1j * _R2 * _E(b + 2 * d), 0, -_R2 * _E(a), 2]),
    "D8D4": lambda a, b, c, d: _q([-2j * _E(-a + b + 2 * c + 2 * d), 1j * _R2 * _E(b + 2 * c + 2 * d - 2 * a),
                                   0, -_R2 * _E(a), 2]),
    "D8A3": lambda a, b, c: _q([
        -_E(2 * a + b + c),
        (1 + 1j) / (2 * _R2) * _E(a + b + c),
        (1 - 1j) / 2 * _E(b + c) - (1 + 1j) / 2 * _E(2 * a),
        -(1 - 1j) / (2 * _R2) * _E(a),
        1,
    ]),
    # D8A5 with d -> d + pi, and D8G5 with a -> a + pi
    "D8A5@d+pi": lambda a, b, c, d, f: _q([2 * _E(b + c + d + f), -_R2 * _E(-a + b + c + d + f), 0, -_R2 * _E(a), 2]),
    "D8G5@a+pi": lambda a, b, c, d, f: _q([2 * _E(b + c + d + f), _R2 * _E(-a + b + c + d + f), 0, _R2 * _E(a), 2]),
}

# (family, {parameter: quarter turns}) each shifted display refers to
PRINTED_SHIFTED = {"D8A5@d+pi": ("D8A5", {"d": 2}), "D8G5@a+pi": ("D8G5", {"a": 2})}

_PARAMS = {4: "abcd", 3: "abc"}


def printed_charpoly_names() -> list[str]:
    return list(_PRINTED)


def printed_charpoly(name: str, binding: Mapping[str, float]) -> CharPolySignature:
    """Monic normalization of a printed closed-form characteristic polynomial."""
    if name not in _PRINTED:
        raise KeyError(f"no printed polynomial {name!r}; available: {', '.join(_PRINTED)}")
    fn = _PRINTED[name]
    names = "abcdf" if fn.__code__.co_argcount == 5 else _PARAMS[fn.__code__.co_argcount]
    asc = np.asarray(fn(*[binding[p] for p in names]), dtype=complex)
    desc = asc[::-1]
    return CharPolySignature(tuple(desc / desc[0]))


def is_self_reciprocal(coeffs: Sequence[complex], tol: float = 1e-9) -> bool:
    """Unitary spectra give ``p(l) = c * l^n * conj(p(1/conj l))``."""
    c = np.asarray(coeffs, dtype=complex)
    c0 = c[-1]
    if abs(abs(c0) - 1) > tol:
        return False
    return bool(np.max(np.abs(np.conj(c[::-1]) * c0 - c)) < tol)
