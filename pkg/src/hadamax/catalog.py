"""Named complex Hadamard matrices and their standard-form decompositions.

Entries are stored unimodular (unscaled).  ``CatalogEntry.unitary_scale``
records the half-log factor that turns the matrix into a unitary one, e.g.
``-3`` for the 8x8 families (an overall ``1/(2 sqrt 2)``).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .algebra import PhaseLinearForm, SymbolicMatrix, _binding_vector, evaluate_many, sym_transpose
from .constructors import bjorck_row, circulant
from .props import dephase

__all__ = [
    "CatalogEntry",
    "StandardForm",
    "UnknownMatrixError",
    "catalog_get",
    "catalog_list",
    "catalog_names",
    "families",
    "standard_form",
    "standard_form_names",
    "assemble_standard",
    "printed_phases",
    "printed_phase_slips",
    "quantization_census",
    "QuantizationCensus",
]


class UnknownMatrixError(KeyError):
    pass


# Token rows; "e(x)" is exp(i x), an optional leading "-" / "i" / "-i" is a prefactor.
_TABLE = {
    'D8A5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(f) e(d) -e(d) -e(f) -e(a) -1',
        '1 e(b) -e(f) -e(b+d-a) e(b+d-a) e(f) -e(b) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(b) -e(f) e(b+d-a) -e(b+d-a) e(f) e(b) -1',
        '1 -e(a) e(f) -e(d) e(d) -e(f) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8B5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) -e(a) e(d) -e(d) -e(a) e(a) -1',
        '1 e(b) e(b-c+f) -e(d) e(d) -e(b-c+f) -e(b) -1',
        '1 e(c) -e(f) -1 -1 e(f) -e(c) 1',
        '1 -e(c) e(f) -1 -1 -e(f) e(c) 1',
        '1 -e(b) -e(b-c+f) -e(d) e(d) e(b-c+f) e(b) -1',
        '1 -e(a) e(a) e(d) -e(d) e(a) -e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8C5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(a-c+f) e(d) -e(d) -e(a-c+f) -e(a) -1',
        '1 e(b) -e(b) -e(d) e(d) -e(b) e(b) -1',
        '1 e(c) -e(f) -1 -1 e(f) -e(c) 1',
        '1 -e(c) e(f) -1 -1 -e(f) e(c) 1',
        '1 -e(b) e(b) -e(d) e(d) e(b) -e(b) -1',
        '1 -e(a) -e(a-c+f) e(d) -e(d) e(a-c+f) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8D5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(f) e(d) -e(d) -e(f) -e(a) -1',
        '1 e(b) -e(b) -e(d) e(d) -e(b) e(b) -1',
        '1 e(c) -e(c+f-a) -1 -1 e(c+f-a) -e(c) 1',
        '1 -e(c) e(c+f-a) -1 -1 -e(c+f-a) e(c) 1',
        '1 -e(b) e(b) -e(d) e(d) e(b) -e(b) -1',
        '1 -e(a) -e(f) e(d) -e(d) e(f) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8E5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(f) e(a-b+d) -e(a-b+d) -e(f) -e(a) -1',
        '1 e(b) -e(f) -e(d) e(d) e(f) -e(b) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(b) -e(f) e(d) -e(d) e(f) e(b) -1',
        '1 -e(a) e(f) -e(a-b+d) e(a-b+d) -e(f) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8F5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(f) e(d) -e(d) -e(f) -e(a) -1',
        '1 e(a) -e(f) -e(d) e(d) e(f) -e(a) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(a) -e(b-d+f) e(b) -e(b) e(b-d+f) e(a) -1',
        '1 -e(a) e(b-d+f) -e(b) e(b) -e(b-d+f) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8G5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(f) ie(d) -ie(d) -e(f) -e(a) -1',
        '1 e(b) -e(f) -ie(b+d-a) ie(b+d-a) e(f) -e(b) -1',
        '1 ie(c) -ie(c) -1 -1 -ie(c) ie(c) 1',
        '1 -ie(c) ie(c) -1 -1 ie(c) -ie(c) 1',
        '1 -e(b) -e(f) ie(b+d-a) -ie(b+d-a) e(f) e(b) -1',
        '1 -e(a) e(f) -ie(d) ie(d) -e(f) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8H5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) ie(f) e(d) -e(d) -ie(f) -e(a) -1',
        '1 e(b) -ie(b+f-a) -e(d) e(d) ie(b+f-a) -e(b) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(b) ie(b+f-a) -e(d) e(d) -ie(b+f-a) e(b) -1',
        '1 -e(a) -ie(f) e(d) -e(d) ie(f) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'P8': ('abc', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(b) e(c) -e(c) -e(b) -e(a) -1',
        '1 e(a) -e(b) -e(c) e(c) e(b) -e(a) -1',
        '1 1 -1 -1 -1 -1 1 1',
        '1 -1 1 -1 -1 1 -1 1',
        '1 -e(a) e(b) -e(c) e(c) -e(b) e(a) -1',
        '1 -e(a) -e(b) e(c) -e(c) e(b) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8I5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(f) e(d) -e(d) -e(f) -e(a) -1',
        '1 e(b) -e(b+f-a) -e(d) e(d) e(b+f-a) -e(b) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(b) e(b+f-a) -e(d) e(d) -e(b+f-a) e(b) -1',
        '1 -e(a) -e(f) e(d) -e(d) e(f) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'K4i': ('', [
        '1 1 1 1 1 1 1 1',
        '1 1 i i -i -i -1 -1',
        '1 i 1 -i i -1 -i -1',
        '1 i -i -1 -1 -i i 1',
        '1 -i i -1 -1 i -i 1',
        '1 -i -1 -i i 1 i -1',
        '1 -1 -i i -i i 1 -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8J5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) ie(d) ie(f) -ie(f) -ie(d) -e(a) -1',
        '1 ie(b) e(b+d-a) -ie(f) ie(f) -e(b+d-a) -ie(b) -1',
        '1 ie(c) -ie(c) -1 -1 -ie(c) ie(c) 1',
        '1 -ie(c) ie(c) -1 -1 ie(c) -ie(c) 1',
        '1 -ie(b) -e(b+d-a) -ie(f) ie(f) e(b+d-a) ie(b) -1',
        '1 -e(a) -ie(d) ie(f) -ie(f) ie(d) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8K5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(d) e(f) -e(f) -e(d) -e(a) -1',
        '1 e(b) -e(b+d-a) -e(f) e(f) e(b+d-a) -e(b) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(b) e(b+d-a) -e(f) e(f) -e(b+d-a) e(b) -1',
        '1 -e(a) -e(d) e(f) -e(f) e(d) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8L5': ('abcdf', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(b+d-f) e(d) -e(d) -e(b+d-f) -e(a) -1',
        '1 e(a) -e(b+d-f) -e(d) e(d) e(b+d-f) -e(a) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(a) e(b) -e(f) e(f) -e(b) e(a) -1',
        '1 -e(a) -e(b) e(f) -e(f) e(b) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8A4': ('abcd', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) -e(a) e(d) -e(d) -e(a) e(a) -1',
        '1 e(b) e(a) -e(d) e(d) -e(a) -e(b) -1',
        '1 e(c) -e(a-b+c) -1 -1 e(a-b+c) -e(c) 1',
        '1 -e(c) e(a-b+c) -1 -1 -e(a-b+c) e(c) 1',
        '1 -e(b) -e(a) -e(d) e(d) e(a) e(b) -1',
        '1 -e(a) e(a) e(d) -e(d) e(a) -e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8B4': ('abcd', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) -e(a) e(d) -e(d) -e(a) e(a) -1',
        '1 e(b) e(b-a) -e(d) e(d) -e(b-a) -e(b) -1',
        '1 e(c) -e(c-a) -1 -1 e(c-a) -e(c) 1',
        '1 -e(c) e(c-a) -1 -1 -e(c-a) e(c) 1',
        '1 -e(b) -e(b-a) -e(d) e(d) e(b-a) e(b) -1',
        '1 -e(a) e(a) e(d) -e(d) e(a) -e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8C4': ('abcd', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(d) ie(a-c+d) -ie(a-c+d) -e(d) -e(a) -1',
        '1 e(b) -e(d) -ie(b-c+d) ie(b-c+d) e(d) -e(b) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(b) -e(d) ie(b-c+d) -ie(b-c+d) e(d) e(b) -1',
        '1 -e(a) e(d) -ie(a-c+d) ie(a-c+d) -e(d) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8D4': ('abcd', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) ie(c+d-a) e(d) -e(d) -ie(c+d-a) -e(a) -1',
        '1 e(b) -ie(c+d-a) -e(b+d-a) e(b+d-a) ie(c+d-a) -e(b) -1',
        '1 e(c) -e(c) -1 -1 -e(c) e(c) 1',
        '1 -e(c) e(c) -1 -1 e(c) -e(c) 1',
        '1 -e(b) -ie(c+d-a) e(b+d-a) -e(b+d-a) ie(c+d-a) e(b) -1',
        '1 -e(a) ie(c+d-a) -e(d) e(d) -ie(c+d-a) e(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'D8A3': ('abc', [
        '1 1 1 1 1 1 1 1',
        '1 e(a) e(a) ie(c) -ie(c) -e(a) -e(a) -1',
        '1 e(a) -e(a) -ie(c) ie(c) -e(a) e(a) -1',
        '1 e(b) -e(b) -1 -1 e(b) -e(b) 1',
        '1 -e(b) e(b) -1 -1 -e(b) e(b) 1',
        '1 -e(a) -ie(a) -e(c) e(c) e(a) ie(a) -1',
        '1 -e(a) ie(a) e(c) -e(c) e(a) -ie(a) -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'H4': ('a', [
        '1 1 1 1',
        '1 ie(a) -ie(a) -1',
        '1 -ie(a) ie(a) -1',
        '1 -1 -1 1',
    ]),
    'D6A': ('', [
        '1 1 1 1 1 1',
        '1 -1 -1 1 i -i',
        '1 -1 -i -1 1 i',
        '1 1 -1 -i -1 i',
        '1 i 1 -1 -1 -i',
        '1 -i i i -i -1',
    ]),
    'D6B': ('', [
        '1 1 1 1 1 1',
        '1 -1 i i -i -i',
        '1 -i -1 1 -1 i',
        '1 -i 1 -1 i -1',
        '1 i -1 -i 1 -1',
        '1 i -i -1 -1 1',
    ]),
    'h1': ('', [
        '1 1 1 1 1 1 1 1',
        '1 1 1 1 -1 -1 -1 -1',
        '1 1 -1 -1 1 1 -1 -1',
        '1 1 -1 -1 -1 -1 1 1',
        '1 -1 1 -1 -1 1 -1 1',
        '1 -1 -1 1 -1 1 1 -1',
        '1 -1 1 -1 1 -1 1 -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'h2': ('', [
        '1 1 1 1 1 1 1 1',
        '1 1 -1 1 -1 -1 1 -1',
        '1 1 1 -1 1 -1 -1 -1',
        '1 1 -1 -1 -1 1 -1 1',
        '1 -1 1 -1 -1 -1 1 1',
        '1 -1 -1 -1 1 1 1 -1',
        '1 -1 1 1 -1 1 -1 -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'h3': ('', [
        '1 1 1 1 1 1 1 1',
        '1 1 1 1 -1 -1 -1 -1',
        '1 1 -1 -1 1 -1 1 -1',
        '1 1 -1 -1 -1 1 -1 1',
        '1 -1 1 -1 -1 -1 1 1',
        '1 -1 1 -1 1 1 -1 -1',
        '1 -1 -1 1 -1 1 1 -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
    'h4': ('', [
        '1 1 1 1 1 1 1 1',
        '1 1 1 1 -1 -1 -1 -1',
        '1 1 -1 -1 1 1 -1 -1',
        '1 1 -1 -1 -1 -1 1 1',
        '1 -1 1 -1 -1 1 -1 1',
        '1 -1 1 -1 1 -1 1 -1',
        '1 -1 -1 1 -1 1 1 -1',
        '1 -1 -1 1 1 -1 -1 1',
    ]),
}

_NOTES = {
    "H4": "one-parameter 4x4 family; H4(0) is the tensor square of F2 up to equivalence",
    "D8A5": "doubling of the Zauner triplet with diagonal dressings",
    "D8B5": "doubling family, core h2",
    "D8C5": "doubling family, core h3",
    "D8D5": "doubling family; same characteristic polynomial as D8A5",
    "D8E5": "doubling family, core h1",
    "D8F5": "doubling family, core h1",
    "D8G5": "D8A5 with i prefactors; (c, d) -> (c - pi/2, d - pi/2) gives D8A5",
    "D8H5": "D8I5 with i prefactors; f -> f - pi/2 gives D8I5",
    "D8I5": "five-phase extension of P8; its transpose at f=a, d=0 is P8",
    "D8J5": "five-phase family through K4i (all phases zero)",
    "D8K5": "D8J5 with (b, c, d, f) shifted by -pi/2",
    "D8L5": "doubling family, core h4",
    "D8A4": "four-parameter doubling family",
    "D8B4": "four-parameter doubling family",
    "D8C4": "four-parameter doubling family with i prefactors",
    "D8D4": "four-parameter doubling family with i prefactors",
    "D8A3": "three-parameter doubling family",
    "P8": "three-parameter matrix of Beauchamp-Nicoara type after row/column permutations",
    "K4i": "Horadam's quadriphase matrix K4(i), rows and columns permuted",
    "D6A": "constant 6x6 matrix, symmetric",
    "D6B": "constant 6x6 matrix, self-adjoint",
    "C6BF": "dephased circulant on (1, i d, -d, -i, -1/d, i/d), d^2 - (1 - sqrt 3) d + 1 = 0",
    "h1": "real 8x8 Hadamard core",
    "h2": "real 8x8 Hadamard core",
    "h3": "real 8x8 Hadamard core, equivalent to h1",
    "h4": "real 8x8 Sylvester-type Hadamard core",
}

_ORDER = [
    "H4",
    "D8A5", "D8B5", "D8C5", "D8D5", "D8E5", "D8F5", "D8G5", "D8H5", "D8I5", "D8J5", "D8K5", "D8L5",
    "D8A4", "D8B4", "D8C4", "D8D4", "D8A3",
    "P8", "K4i", "D6A", "D6B", "C6BF",
    "h1", "h2", "h3", "h4",
]


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    matrix: Union[SymbolicMatrix, np.ndarray]
    param_names: tuple
    notes: str = ""

    @property
    def n(self) -> int:
        return self.matrix.n if self.is_symbolic else self.matrix.shape[0]

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.matrix, SymbolicMatrix)

    @property
    def unitary_scale(self) -> Optional[int]:
        """Half-log exponent ``k`` with ``2**(k/2) = 1/sqrt(n)``, or None if not a power of two."""
        k = -math.log2(self.n)
        return int(k) if k == int(k) else None

    def evaluate(self, binding=None) -> np.ndarray:
        if self.is_symbolic:
            return self.matrix.evaluate(binding if binding is not None else {})
        return self.matrix.copy()

    def evaluate_many(self, bindings) -> np.ndarray:
        if not self.is_symbolic:
            raise TypeError(f"{self.name} is a numeric entry")
        return evaluate_many(self.matrix, bindings)


@lru_cache(maxsize=None)
def _build() -> dict:
    out = {}
    for name in _ORDER:
        if name == "C6BF":
            M = dephase(circulant(bjorck_row(1)))
            out[name] = CatalogEntry(name, M, (), _NOTES[name])
            continue
        params, rows = _TABLE[name]
        M = SymbolicMatrix.from_tokens(rows, tuple(params))
        out[name] = CatalogEntry(name, M, tuple(params), _NOTES[name])
    return out


def catalog_names() -> list[str]:
    return list(_ORDER)


def catalog_get(name: str) -> CatalogEntry:
    table = _build()
    if name not in table:
        raise UnknownMatrixError(f"unknown matrix {name!r}; available: {', '.join(_ORDER)}")
    return table[name]


def catalog_list() -> list[tuple[str, int, int]]:
    """``(name, dimension, parameter count)`` in catalog order."""
    return [(e.name, e.n, len(e.param_names)) for e in _build().values()]


def families(params: int = None) -> list[str]:
    """Names of the parametrized 8x8 families, optionally with a given parameter count."""
    return [name for name in _ORDER
            if name.startswith("D8") and (params is None or len(_TABLE[name][0]) == params)]


_CORES = {
    "D8A5": "h1", "D8B5": "h2", "D8C5": "h3", "D8E5": "h1",
    "D8F5": "h1", "D8I5": "h4", "D8K5": "h4", "D8L5": "h4",
}

# The phase matrices as printed, kept for comparison only.  "." is a zero
# phase, "?" an entry left blank.  The first and last rows are all zero.
_PRINTED = {
    "D8A5": [". a f d d f a .", ". b f b+d-a b+d-a f b .", ". c c . . c c .",
             ". c c . . c c .", ". c f b+d-a b+d-a f b .", ". a f d d f a ."],
    "D8B5": [". a a d d a a .", ". b b-c+f d d b-c+f b .", ". c f . . f c .",
             ". c f . . f c .", ". b b-c+f d d b-c+f b .", ". a a d d a a ."],
    "D8C5": [". a a-c+f d d a-c+f a .", ". b b d d b b .", ". c f . . f c .",
             ". c f . . f c .", ". b b d d b b .", ". a a-c+f d d a-c+f a ."],
    "D8E5": [". a f a-b+d a-b+d f a .", ". b f d d f b .", ". c c . . c c .",
             ". c c . . c c .", ". b f d d f b .", ". a f a-b+d a-b+d f a ."],
    "D8F5": [". a f d d f a .", ". a f d d f a .", ". c c . . c c .",
             ". c c . . c c .", ". a b-d+f b b b-d+f a .", ". a b-d+f b b b-d+f a ."],
    "D8I5": [". a f d d f a .", ". b b+f-a d d b+f-af a .", ". c c . . c c .",
             ". c c . . c c .", ". ? b+f-a d d b+f-a a .", ". a f d d f a ."],
    "D8K5": [". a d f f d a .", ". b b+d-a f ? b+d-a b .", ". c c . . c c .",
             ". c c . . c c .", ". b b+d-a f f b+d-a b .", ". a d f f d a ."],
    "D8L5": [". a b+d-f d d b+d-f a .", ". a b+d-f d d b+d-f a .", ". c c . . c c .",
             ". c c . . c c .", ". a b f f b a .", ". a b f f b a ."],
}


@dataclass(frozen=True, eq=False)
class StandardForm:
    """``core * exp(i * phases)`` entrywise; ``phases`` holds quarter-free forms."""

    name: str
    core: SymbolicMatrix
    core_name: str
    phases: tuple
    params: tuple

    def phase_matrix(self) -> SymbolicMatrix:
        return SymbolicMatrix(self.phases, self.params)

    def assemble_symbolic(self) -> SymbolicMatrix:
        grid = [[c + p for c, p in zip(crow, prow)] for crow, prow in zip(self.core.grid, self.phases)]
        return SymbolicMatrix(grid, self.params)

    def phase_text(self) -> list[list[str]]:
        return [["." if p.is_constant else p.expr() for p in row] for row in self.phases]


def standard_form_names() -> list[str]:
    return list(_CORES)


def standard_form(name: str) -> StandardForm:
    """Split a family into a real core and a phase matrix, regenerated from the entries."""
    if name not in _CORES:
        raise UnknownMatrixError(f"{name!r} has no standard form; available: {', '.join(_CORES)}")
    M = catalog_get(name).matrix
    core = catalog_get(_CORES[name]).matrix
    phases = []
    for i in range(M.n):
        row = []
        for j in range(M.n):
            r = M[i, j] - core[i, j]
            if r.quarter:
                raise ValueError(f"{name} entry ({i}, {j}) does not match the sign of {_CORES[name]}")
            row.append(r)
        phases.append(tuple(row))
    return StandardForm(name, core, _CORES[name], tuple(phases), M.params)


def assemble_standard(sf: StandardForm, binding=None) -> np.ndarray:
    vec = _binding_vector(sf.params, binding)
    return sf.core.evaluate() * sf.phase_matrix().evaluate(vec)


def printed_phases(name: str) -> list[list[Optional[PhaseLinearForm]]]:
    """The printed phase matrix with ``None`` for blank entries."""
    if name not in _PRINTED:
        raise UnknownMatrixError(f"no printed phase matrix for {name!r}")
    zero = ["."] * 8
    rows = [zero] + [r.split() for r in _PRINTED[name]] + [zero]
    parse = lambda t: None if t == "?" else PhaseLinearForm.parse("0" if t == "." else t)
    return [[parse(t) for t in row] for row in rows]


def printed_phase_slips(name: str) -> list[tuple[int, int, str, str]]:
    """Entries ``(row, col, printed, regenerated)`` where the printed phases disagree (0-based)."""
    sf = standard_form(name)
    out = []
    for i, (prow, rrow) in enumerate(zip(printed_phases(name), sf.phases)):
        for j, (p, r) in enumerate(zip(prow, rrow)):
            if p != r:
                out.append((i, j, "?" if p is None else p.expr(), r.expr()))
    return out


@dataclass(frozen=True)
class QuantizationCensus:
    """Quarter-turn specializations of a family.

    ``distinct`` counts all distinct matrices over the ``4**P`` bindings;
    ``classes`` counts them up to flipping any parameter by ``pi`` (which
    only changes signs), and ``histogram`` maps the number of ``+-i``
    entries to the number of classes.
    """

    name: str
    bindings: int
    distinct: int
    classes: int
    histogram: tuple

    @property
    def multiplicities(self) -> tuple:
        return tuple(count for _, count in self.histogram)


def quantization_census(name: str = "D8A5") -> QuantizationCensus:
    entry = catalog_get(name)
    if not entry.is_symbolic:
        raise TypeError(f"{name} is a numeric entry")
    M = entry.matrix
    P = len(M.params)
    quarters = np.array(list(itertools.product(range(4), repeat=P)), dtype=int)
    K, Q, mask = M._compiled
    if M.has_zero:
        raise ValueError("census needs all entries unimodular")
    # exact quarter count of every entry under every binding
    total = (np.einsum("ijp,sp->sij", K.astype(int), quarters) + Q) % 4
    distinct = len({t.tobytes() for t in total.astype(np.int8)})
    reps = np.all(quarters <= 1, axis=1)
    counts = Counter(int(np.sum(t % 2)) for t in total[reps])
    return QuantizationCensus(name, len(quarters), distinct, int(reps.sum()), tuple(sorted(counts.items())))
