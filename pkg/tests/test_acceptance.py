"""Acceptance gate: one test group per criterion, collected under the ``criterion`` marker.

The terminal summary prints one ``[PASS]``/``[FAIL]`` line per criterion.
"""

import math

import numpy as np
import pytest

from hadamax.algebra import PhaseLinearForm, mat_mul, substitute, sym_adjoint, sym_transpose
from hadamax.catalog import catalog_get, families, quantization_census
from hadamax.charpoly import PRINTED_SHIFTED, char_poly_exact, char_poly_many, printed_charpoly
from hadamax.constructors import bjorck_row, dita_double, prime_mub_set, zauner_triplet
from hadamax.equivalence import (
    class_partition,
    entry_census,
    fingerprint,
    fingerprints_match,
    haagerup_set,
    random_equivalent,
    spectra_match,
    spectrum,
)
from hadamax.props import is_hadamard_numeric, is_hadamard_symbolic, unbiasedness_defect
from hadamax.search import SearchOptions, d2_template, fit_h4, run_restarts

crit = pytest.mark.criterion
TWO_PI = 2 * math.pi


def haar_unitary(d, rng):
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


# AC-1 -------------------------------------------------------------------------

AC1 = "symbolic + numeric Hadamard verification of every parametrized family"


@crit("AC-1", AC1)
def test_ac1_family_counts():
    # letters A..L: twelve five-parameter families (the partition of AC-5 names all twelve)
    assert [n[2] for n in families(5)] == list("ABCDEFGHIJKL")
    assert len(families(4)) == 4 and len(families(3)) == 1


@crit("AC-1", AC1)
@pytest.mark.parametrize("name", families())
def test_ac1_family_is_hadamard(name, rng):
    M = catalog_get(name).matrix
    assert is_hadamard_symbolic(M)
    for b in rng.uniform(0, TWO_PI, (100, len(M.params))):
        ok, report = is_hadamard_numeric(M.evaluate(b), 1e-10)
        assert ok, report


# AC-2 -------------------------------------------------------------------------


@crit("AC-2", "dita_double of random unitary triples is unitary within 1e-12")
@pytest.mark.parametrize("d", [2, 3, 4])
def test_ac2_doubling_unitary(d, rng):
    for _ in range(100):
        U = dita_double(*(haar_unitary(d, rng) for _ in range(3)))
        assert np.max(np.abs(U @ U.conj().T - np.eye(2 * d))) < 1e-12


# AC-3 -------------------------------------------------------------------------

AC3 = "exact and printed spectra of D6A, D6B, h1..h4"
R2, R6, R14, R17, R30 = map(math.sqrt, (2, 6, 14, 17, 30))
PRINTED_SPECTRA = {
    "D6A": [-1, 1, 1j * (-R6 + 1j * R30) / 6, 1j * (-R6 - 1j * R30) / 6, (-R6 + 1j * R30) / 6, (-R6 - 1j * R30) / 6],
    "D6B": [-1] * 3 + [1] * 3,
    "h1": [-1] * 3 + [1] * 3 + [(R2 + 1j * R14) / 4, (R2 - 1j * R14) / 4],
    "h3": [-1] * 3 + [1] * 3 + [(R2 + 1j * R14) / 4, (R2 - 1j * R14) / 4],
    "h2": [-1] * 2 + [1] * 2 + [
        ((1 + R17) / R2 + 1j * math.sqrt(7 - R17)) / 4, ((1 + R17) / R2 - 1j * math.sqrt(7 - R17)) / 4,
        ((1 - R17) / R2 + 1j * math.sqrt(7 + R17)) / 4, ((1 - R17) / R2 - 1j * math.sqrt(7 + R17)) / 4,
    ],
    "h4": [-1] * 4 + [1] * 4,
}


@crit("AC-3", AC3)
@pytest.mark.parametrize("name,expected", [("D6B", "(y^2-6)^3"), ("h4", "(y^2-8)^4")])
def test_ac3_exact(name, expected):
    assert char_poly_exact(catalog_get(name).evaluate()).factored() == expected


@crit("AC-3", AC3)
@pytest.mark.parametrize("name", sorted(PRINTED_SPECTRA))
def test_ac3_printed_spectrum(name):
    assert spectra_match(spectrum(catalog_get(name).evaluate()), np.array(PRINTED_SPECTRA[name]), 1e-9)


@crit("AC-3", AC3)
def test_ac3_spectral_classes():
    sp = {k: spectrum(catalog_get(k).evaluate()) for k in ("h1", "h2", "h3", "h4")}
    assert spectra_match(sp["h1"], sp["h3"], 1e-9)
    for a, b in [("h1", "h2"), ("h2", "h4"), ("h1", "h4")]:
        assert not spectra_match(sp[a], sp[b], 1e-3)


# AC-4 -------------------------------------------------------------------------

PRINTED_POLYS = [f"D8{c}5" for c in "ABCDEFGHIJKL"] + ["D8A4", "D8B4", "D8C4", "D8D4", "D8A3"] + list(PRINTED_SHIFTED)


@crit("AC-4", "printed characteristic polynomials match at 50 random bindings within 1e-8")
@pytest.mark.parametrize("name", PRINTED_POLYS)
def test_ac4_printed_charpoly(name, rng):
    family, shift = PRINTED_SHIFTED.get(name, (name, {}))
    M = catalog_get(family).matrix
    B = rng.uniform(0, TWO_PI, (50, len(M.params)))
    shifted = B + np.array([shift.get(p, 0) * math.pi / 2 for p in M.params])
    numeric = char_poly_many(catalog_get(family).evaluate_many(shifted))
    for b, got in zip(B, numeric):
        want = printed_charpoly(name, dict(zip(M.params, b))).array()
        assert np.max(np.abs(got - want)) < 1e-8


# AC-5 -------------------------------------------------------------------------


@crit("AC-5", "charpoly class partition of the twelve five-parameter families")
def test_ac5_partition():
    parts = class_partition(families(5))
    got = {frozenset(n[2] for n in p) for p in parts}
    want = {frozenset(s) for s in ("ADG", "HI", "JK", "B", "C", "E", "F", "L")}
    assert got == want


# AC-6 -------------------------------------------------------------------------

AC6 = "specializations to P8, K4(i) and D8A5 entrywise within 1e-12"


@crit("AC-6", AC6)
def test_ac6_i_to_p8(rng):
    M = catalog_get("D8I5").matrix
    M = substitute(M, "f", PhaseLinearForm.var("a"))
    M = substitute(M, "d", PhaseLinearForm())
    T = sym_transpose(M)
    P8 = catalog_get("P8")
    for b in rng.uniform(0, TWO_PI, (100, 3)):
        bind = dict(zip("abc", b))
        assert np.max(np.abs(T.evaluate({p: bind[p] for p in T.params}) - P8.evaluate(bind))) < 1e-12


@crit("AC-6", AC6)
def test_ac6_j_to_k4i():
    assert np.max(np.abs(catalog_get("D8J5").evaluate(np.zeros(5)) - catalog_get("K4i").evaluate())) < 1e-12


@crit("AC-6", AC6)
def test_ac6_g_to_a(rng):
    G = catalog_get("D8G5").matrix
    for p in "cd":
        G = substitute(G, p, PhaseLinearForm.var(p, -1))
    A = catalog_get("D8A5").matrix
    for b in rng.uniform(0, TWO_PI, (100, 5)):
        assert np.max(np.abs(G.evaluate(b) - A.evaluate(b))) < 1e-12


# AC-7 -------------------------------------------------------------------------

AC7 = "entry census and symmetry of D6A and D6B"


@crit("AC-7", AC7)
@pytest.mark.parametrize("name", ["D6A", "D6B"])
def test_ac7_census(name):
    c = entry_census(catalog_get(name).evaluate())
    assert c["-1"] == 9 and c["i"] + c["-i"] == 12 and c["other"] == 0


@crit("AC-7", AC7)
def test_ac7_symmetry():
    A, B = catalog_get("D6A").matrix, catalog_get("D6B").matrix
    assert sym_transpose(A) == A
    assert sym_adjoint(B) == B


# AC-8 -------------------------------------------------------------------------


@crit("AC-8", "quarter-turn census of D8A5: 32 classes, multiplicities 1, 8, 14, 8, 1")
def test_ac8_census():
    c = quantization_census("D8A5")
    assert c.bindings == 1024
    assert c.classes == 32
    assert all(k % 8 == 0 for k, _ in c.histogram)
    assert c.histogram == ((0, 1), (8, 8), (16, 14), (24, 8), (32, 1))
    assert c.multiplicities == (1, 8, 14, 8, 1)


# AC-9 -------------------------------------------------------------------------


@crit("AC-9", "circulant example is Hadamard with normalized spectrum +-1 each x3")
def test_ac9_circulant():
    row = bjorck_row(1)
    d = -row[2]
    assert abs(d * d - (1 - math.sqrt(3)) * d + 1) < 1e-12
    M = catalog_get("C6BF").evaluate()
    assert is_hadamard_numeric(M, 1e-9)[0]
    assert spectra_match(spectrum(M), np.array([-1, -1, -1, 1, 1, 1]), 1e-9)


# AC-10 ------------------------------------------------------------------------

AC10 = "Zauner triplet identity and unbiasedness; prime MUB sets"


@crit("AC-10", AC10)
def test_ac10_zauner_identity():
    E1, E2, E3 = zauner_triplet()
    prod = mat_mul(sym_adjoint(E1), E2).canonical().collapse()
    E3s = substitute(E3, "w", PhaseLinearForm.parse("y-x"))
    assert prod.with_params(E3s.params) == E3s


@crit("AC-10", AC10)
def test_ac10_zauner_unbiased(rng):
    E1, E2, E3 = zauner_triplet()
    I4 = np.eye(4)
    for x, y, z in rng.uniform(0, TWO_PI, (100, 3)):
        A, B = E1.evaluate({"x": x}), E2.evaluate({"y": y, "z": z})
        C = E3.evaluate({"w": y - x, "z": z})
        for X, Y in [(I4, A), (I4, B), (I4, C), (A, B)]:
            assert unbiasedness_defect(X, Y) < 1e-12


@crit("AC-10", AC10)
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_ac10_prime_mubs(p):
    bases = prime_mub_set(p)
    assert len(bases) == p + 1
    for i, X in enumerate(bases):
        assert np.allclose(X.conj().T @ X, np.eye(p), atol=1e-12)
        for Y in bases[i + 1:]:
            assert unbiasedness_defect(X, Y) < 1e-10


# AC-11 ------------------------------------------------------------------------

AC11 = "Haagerup set and fingerprint invariance; H4(0) fingerprint"


@crit("AC-11", AC11)
@pytest.mark.parametrize("name", ["H4", "D6A", "C6BF", "D8A5"])
def test_ac11_invariance(name, rng):
    e = catalog_get(name)
    M = e.evaluate(rng.uniform(0, TWO_PI, len(e.param_names)))
    H, F = haagerup_set(M), fingerprint(M)
    for _ in range(500):
        N = random_equivalent(M, rng)
        assert H.matches(haagerup_set(N), 1e-9)
        assert fingerprints_match(F, fingerprint(N), 1e-9)


@crit("AC-11", AC11)
def test_ac11_h4_fingerprint():
    F = fingerprint(catalog_get("H4").evaluate({"a": 0.0}), mode="separate")
    square = np.array([0, 0.5, 1, 1.5]) * math.pi  # O -> A -> B -> C -> O
    point = np.array([0, 0, 1, 1]) * math.pi  # legs cancel in pairs: the degenerate polygon at O
    for lists in (F.rows, F.cols):
        kinds = sorted("square" if np.allclose(l, square) else "point" if np.allclose(l, point) else "?"
                       for l in lists)
        assert kinds == ["point"] * 2 + ["square"] * 4


# AC-12 ------------------------------------------------------------------------


@crit("AC-12", "d=2 template search reaches defect < 1e-8 and lands in H4(a)")
def test_ac12_search():
    t = d2_template()
    runs = run_restarts(t, seed=0, opts=SearchOptions(restarts=20))
    good = [r for r in runs if r.defect < 1e-8]
    assert good
    best = min(good, key=lambda r: r.defect)
    M = t.evaluate_many(best.vector(t.params))[0]
    fit = fit_h4(M, tol=1e-6)
    assert fit is not None and fit[1] < 1e-6
