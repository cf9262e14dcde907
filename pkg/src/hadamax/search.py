"""Defect minimization over dressed doubling templates, and symbolic collapse checks.

A template dresses the three blocks of the nonlinear doubling with diagonal
phase matrices; the optimizer looks for phases at which the doubled matrix
is Hadamard.  :func:`collapse_check` asks the exact question: after a set of
linear constraints, does every entry of ``C A^* B`` reduce to one term?
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .algebra import (
    PhaseLinearForm,
    SumMatrix,
    SymbolicMatrix,
    UnknownParameterError,
    evaluate_many,
    mat_mul,
    substitute,
    sym_adjoint,
    sym_dress,
)
from .constructors import dita_double, zauner_triplet
from .props import hadamard_defect_many, is_hadamard_numeric

__all__ = [
    "DressingTemplate",
    "SearchOptions",
    "SearchResult",
    "d2_template",
    "zauner_template",
    "defect_minimize",
    "run_restarts",
    "collapse_check",
    "apply_constraints",
    "doubling_split",
    "dressed_product",
    "inner_constraints",
    "tangent_dimension",
    "quarter_relations",
    "fit_h4",
]

_SIDES = ("left", "right")


@dataclass(frozen=True, eq=False)
class DressingTemplate:
    """Base triple ``(A, B, C)`` and the diagonal dressings applied to each.

    ``dressings`` maps block names ``"A"``, ``"B"``, ``"C"`` to the sides
    (``"left"``, ``"right"``) that carry a free phase vector.  The phases of
    block ``X`` on side ``s`` are named ``X{s[0]}{k}``, e.g. ``Cr2``.
    """

    A: SymbolicMatrix
    B: SymbolicMatrix
    C: SymbolicMatrix
    dressings: tuple = (("A", ("left", "right")), ("B", ("left", "right")), ("C", ("left", "right")))

    def __post_init__(self):
        d = self.A.n
        if self.B.n != d or self.C.n != d:
            raise ValueError("template blocks must have equal dimensions")
        dress = dict(self.dressings)
        for name, sides in dress.items():
            if name not in "ABC" or any(s not in _SIDES for s in sides):
                raise ValueError(f"bad dressing specification {name!r}: {sides!r}")
        clash = set(self.base_params) & set(self.dressing_params)
        if clash:
            raise ValueError(f"dressing parameters clash with base parameters: {sorted(clash)}")
        object.__setattr__(self, "dressings", tuple((k, tuple(v)) for k, v in dress.items()))

    @property
    def d(self) -> int:
        return self.A.n

    @property
    def base_params(self) -> tuple:
        seen = {}
        for X in (self.A, self.B, self.C):
            for p in X.params:
                seen.setdefault(p, None)
        return tuple(seen)

    def _vector(self, block: str, side: str) -> list[str]:
        return [f"{block}{side[0]}{k}" for k in range(self.d)]

    @property
    def dressing_params(self) -> tuple:
        return tuple(p for name, sides in self.dressings for s in sides for p in self._vector(name, s))

    @property
    def params(self) -> tuple:
        return self.base_params + self.dressing_params

    def dressed(self) -> tuple[SymbolicMatrix, SymbolicMatrix, SymbolicMatrix]:
        out = []
        sides = dict(self.dressings)
        for name, X in zip("ABC", (self.A, self.B, self.C)):
            vec = {s: [PhaseLinearForm.var(p) for p in self._vector(name, s)] for s in sides.get(name, ())}
            out.append(sym_dress(X, vec.get("left"), vec.get("right")))
        return tuple(out)

    def doubled(self) -> SumMatrix:
        return dita_double(*self.dressed())

    def evaluate_many(self, bindings: np.ndarray) -> np.ndarray:
        """Doubled matrices at ``(S, len(params))`` bindings, rescaled to unimodular entries."""
        B = np.atleast_2d(bindings)
        idx = {p: k for k, p in enumerate(self.params)}
        blocks = []
        for X in self.dressed():
            blocks.append(evaluate_many(X, B[:, [idx[p] for p in X.params]]))
        A, Bm, C = blocks
        X = -C @ np.conj(np.swapaxes(A, -1, -2)) @ Bm
        top = np.concatenate([A, Bm], axis=-1)
        bottom = np.concatenate([C, X], axis=-1)
        return np.concatenate([top, bottom], axis=-2) * np.sqrt(self.d)


def d2_template() -> DressingTemplate:
    """2x2 unitary triple ``F2/sqrt2``, ``[[1,1],[i,-i]]/sqrt2``, ``[[1,i],[1,-i]]/sqrt2``, all dressed."""
    A = SymbolicMatrix.from_tokens(["1 1", "1 -1"], (), -1)
    B = SymbolicMatrix.from_tokens(["1 1", "i -i"], (), -1)
    C = SymbolicMatrix.from_tokens(["1 i", "1 -i"], (), -1)
    return DressingTemplate(A, B, C)


def zauner_template() -> DressingTemplate:
    """Zauner triplet ``A=E1, B=E2, C=E3`` with ``B`` dressed on the left and ``C`` on the right."""
    E1, E2, E3 = zauner_triplet()
    return DressingTemplate(E1, E2, E3, (("B", ("left",)), ("C", ("right",))))


@dataclass(frozen=True)
class SearchOptions:
    max_iters: int = 3000
    step_init: float = 0.05
    restarts: int = 1
    tol: float = 1e-8
    stop: float = 1e-24
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be positive")
        if self.step_init <= 0 or self.tol <= 0:
            raise ValueError("step_init and tol must be positive")


@dataclass(frozen=True, eq=False)
class SearchResult:
    binding: dict
    defect: float
    iterations: int
    converged: bool
    seed: int = 0
    restart: int = 0
    trace: tuple = ()

    def vector(self, params: Sequence[str]) -> np.ndarray:
        return np.array([self.binding[p] for p in params])

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "restart": self.restart,
            "binding": {k: float(v) for k, v in self.binding.items()},
            "defect": float(self.defect),
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": [float(t) for t in self.trace],
        }


Target = Union[DressingTemplate, SymbolicMatrix]


def _objective(target: Target):
    if isinstance(target, DressingTemplate):
        return target.params, lambda X: hadamard_defect_many(target.evaluate_many(X))
    if isinstance(target, SymbolicMatrix):
        return target.params, lambda X: hadamard_defect_many(evaluate_many(target, X))
    raise TypeError(f"cannot search over {type(target).__name__}")


def _descend(f, x: np.ndarray, opts: SearchOptions) -> tuple[np.ndarray, float, int, list]:
    """Gradient descent with central-difference gradients and a monotone Armijo search."""
    P = x.size
    h = opts.fd_step
    eye = np.eye(P) * h
    fx = float(f(x[None])[0])
    trace = [fx]
    step = opts.step_init
    g_prev = x_prev = None
    it = 0
    for it in range(1, opts.max_iters + 1):
        if fx < opts.stop:
            break
        vals = f(np.concatenate([x + eye, x - eye]))
        g = (vals[:P] - vals[P:]) / (2 * h)
        gg = float(g @ g)
        if gg == 0.0:
            break
        if g_prev is not None:
            s, yv = x - x_prev, g - g_prev
            sy = float(s @ yv)
            if sy > 0:
                step = float(s @ s) / sy
        t = step
        accepted = False
        for _ in range(60):
            cand = x - t * g
            fc = float(f(cand[None])[0])
            if fc <= fx - 1e-4 * t * gg:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        x_prev, g_prev = x, g
        x, fx = cand, fc
        trace.append(fx)
    return x, fx, it, trace


def _one_run(target: Target, seed_seq: np.random.SeedSequence, opts: SearchOptions,
             x0, restart: int, seed: int) -> SearchResult:
    params, f = _objective(target)
    rng = np.random.default_rng(seed_seq)
    if x0 is not None and restart == 0:
        x = np.asarray([x0[p] for p in params] if isinstance(x0, Mapping) else x0, dtype=float)
        if x.shape != (len(params),):
            raise ValueError(f"start point must have {len(params)} entries")
    else:
        x = rng.uniform(0, 2 * math.pi, len(params))
    x, fx, it, trace = _descend(f, x, opts)
    thin = trace if len(trace) <= 50 else trace[:: max(1, len(trace) // 50)] + [trace[-1]]
    return SearchResult(dict(zip(params, map(float, x))), fx, it, fx < opts.tol, seed, restart, tuple(thin))


def run_restarts(target: Target, seed: int = 0, opts: SearchOptions = SearchOptions(),
                 x0=None, jobs: int = 1) -> list[SearchResult]:
    """All restarts, each seeded from an independent child of ``SeedSequence(seed)``."""
    children = np.random.SeedSequence(seed).spawn(opts.restarts)
    work = [(target, children[r], opts, x0, r, seed) for r in range(opts.restarts)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(lambda a: _one_run(*a), work))
    return [_one_run(*a) for a in work]


def defect_minimize(target: Target, seed: int = 0, opts: SearchOptions = SearchOptions(),
                    x0=None, jobs: int = 1) -> SearchResult:
    """Best result over ``opts.restarts`` runs; non-convergence is reported, not raised."""
    runs = run_restarts(target, seed, opts, x0, jobs)
    return min(runs, key=lambda r: r.defect)


def _parse_constraint(c) -> tuple[str, PhaseLinearForm]:
    if isinstance(c, str):
        if "=" not in c:
            raise ValueError(f"constraint {c!r} must look like 'param=expr'")
        lhs, rhs = c.split("=", 1)
        return lhs.strip(), PhaseLinearForm.parse(rhs)
    try:
        name, form = c
    except (TypeError, ValueError):
        raise ValueError(f"malformed constraint {c!r}") from None
    if isinstance(form, str):
        form = PhaseLinearForm.parse(form)
    if not isinstance(name, str) or not isinstance(form, PhaseLinearForm):
        raise ValueError(f"malformed constraint {c!r}")
    return name, form


def apply_constraints(M, constraints):
    for c in constraints:
        name, form = _parse_constraint(c)
        M = substitute(M, name, form)
    return M


def collapse_check(product: SumMatrix, constraints=()) -> bool:
    """True iff every entry becomes a single term after substituting ``constraints``.

    Each constraint is ``(param, PhaseLinearForm)`` or a string ``"param=expr"``;
    an unknown parameter raises :class:`UnknownParameterError`.
    """
    return apply_constraints(product, constraints).canonical().is_collapsed()


def doubling_split(M: SymbolicMatrix, seed: int = 0):
    """Row and column halves exhibiting ``M`` as an unscaled doubling.

    Returns ``(rows, cols, A, B, C)`` where ``A = M[rows, cols]``,
    ``B = M[rows, cols']``, ``C = M[rows', cols]`` (scaled by ``1/sqrt(d)``
    to be unitary) and the remaining block equals ``-C A^* B``.  Halves are screened numerically at a random
    binding and confirmed symbolically.
    """
    n = M.n
    if n % 2 or M.has_zero:
        raise ValueError("need an even-order matrix without zero entries")
    d = n // 2
    rng = np.random.default_rng(seed)
    H = M.evaluate(rng.uniform(0, 2 * math.pi, len(M.params)))
    had = lambda X: is_hadamard_numeric(X, 1e-9)[0]
    k = -int(math.log2(d))
    if 2 ** -k != d:
        raise ValueError("block order must be a power of two")
    # blocks carry the unitary scale 1/sqrt(d)
    pick = lambda rows, cols: SymbolicMatrix([[M.grid[i][j] for j in cols] for i in rows], M.params, k)
    for rows in itertools.combinations(range(n), d):
        if 0 not in rows:
            continue
        rc = [i for i in range(n) if i not in rows]
        for cols in itertools.combinations(range(n), d):
            if 0 not in cols:
                continue
            cc = [j for j in range(n) if j not in cols]
            A, B, C = H[np.ix_(rows, cols)], H[np.ix_(rows, cc)], H[np.ix_(rc, cols)]
            if not (had(A) and had(B) and had(C)):
                continue
            if np.max(np.abs(H[np.ix_(rc, cc)] + C @ A.conj().T @ B / d)) > 1e-9:
                continue
            As, Bs, Cs = pick(rows, cols), pick(rows, cc), pick(rc, cols)
            X = mat_mul(mat_mul(Cs, sym_adjoint(As)), Bs).canonical()
            target = pick(rc, cc)
            if X.is_collapsed():
                Xc = X.collapse()
                if Xc.scale_half_log == k and all(
                    x.shifted(2) == t for xr, tr in zip(Xc.grid, target.grid) for x, t in zip(xr, tr)
                ):
                    return tuple(rows), tuple(cols), As, Bs, Cs
    raise ValueError("matrix is not a doubling of its blocks")


def dressed_product(A: SymbolicMatrix, B: SymbolicMatrix, C: SymbolicMatrix) -> tuple[SumMatrix, DressingTemplate]:
    """``C A^* B`` with every block dressed on both sides by fresh phases."""
    t = DressingTemplate(A, B, C)
    Ad, Bd, Cd = t.dressed()
    return mat_mul(mat_mul(Cd, sym_adjoint(Ad)), Bd), t


def inner_constraints(t: DressingTemplate) -> list[tuple[str, PhaseLinearForm]]:
    """Equate the inner dressings: right of ``C`` with right of ``A``, left of ``B`` with left of ``A``."""
    out = []
    for k in range(t.d):
        out.append((f"Cr{k}", PhaseLinearForm.var(f"Ar{k}")))
        out.append((f"Bl{k}", PhaseLinearForm.var(f"Al{k}")))
    return out


def tangent_dimension(name_or_matrix, binding=None, tol: float = 1e-6, h: float = 1e-4,
                      seed: int = 0) -> int:
    """Parameter directions along which the defect's second-order model is flat.

    The Hessian of the defect in the family parameters is estimated by
    central differences; the count of eigenvalues below ``tol`` (relative to
    the matrix order) is returned.
    """
    if isinstance(name_or_matrix, str):
        from .catalog import catalog_get

        M = catalog_get(name_or_matrix).matrix
    else:
        M = name_or_matrix
    P = len(M.params)
    if binding is None:
        x = np.random.default_rng(seed).uniform(0, 2 * math.pi, P)
    elif isinstance(binding, Mapping):
        x = np.array([binding[p] for p in M.params], dtype=float)
    else:
        x = np.asarray(binding, dtype=float)
    f = lambda X: hadamard_defect_many(evaluate_many(M, X))
    eye = np.eye(P) * h
    pts = [x]
    for i in range(P):
        for j in range(P):
            pts += [x + eye[i] + eye[j], x + eye[i] - eye[j], x - eye[i] + eye[j], x - eye[i] - eye[j]]
    vals = f(np.array(pts))[1:].reshape(P, P, 4)
    Hs = (vals[..., 0] - vals[..., 1] - vals[..., 2] + vals[..., 3]) / (4 * h * h)
    Hs = (Hs + Hs.T) / 2
    ev = np.linalg.eigvalsh(Hs)
    return int(np.sum(np.abs(ev) < tol * M.n ** 2))


def quarter_relations(binding: Mapping[str, float], tol: float = 1e-6) -> list[tuple[str, str, int]]:
    """Pairs ``(p, q, k)`` with ``p - q`` within ``tol`` of ``k pi/2`` modulo ``2 pi``."""
    out = []
    for p, q in itertools.combinations(sorted(binding), 2):
        r = (binding[p] - binding[q]) / (math.pi / 2)
        k = round(r)
        if abs(r - k) * math.pi / 2 < tol:
            out.append((p, q, int(k) % 4))
    return out


def fit_h4(M, tol: float = 1e-6) -> Optional[tuple[float, float]]:
    """Find ``a`` with ``M`` equivalent to ``H4(a)`` by permutations and dephasing.

    Returns ``(a, residual)`` for the best permutation pair, or None if no
    permutation brings the dephased matrix within ``tol`` of the family.
    """
    from .catalog import catalog_get
    from .props import dephase

    M = np.asarray(M, dtype=complex)
    if M.shape != (4, 4):
        raise ValueError("fit_h4 needs a 4x4 matrix")
    H4 = catalog_get("H4").matrix
    best = None
    for rows in itertools.permutations(range(4)):
        for cols in itertools.permutations(range(4)):
            D = dephase(M[list(rows)][:, list(cols)])
            a = float(np.angle(D[1, 1] / 1j))
            res = float(np.max(np.abs(D - H4.evaluate([a]))))
            if best is None or res < best[1]:
                best = (a % (2 * math.pi), res)
    return best if best[1] < tol else None
