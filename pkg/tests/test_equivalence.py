import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamax.catalog import catalog_get
from hadamax.constructors import fourier
from hadamax.equivalence import (
    charpoly_class_compare,
    Fingerprint,
    entry_census,
    fingerprint,
    fingerprints_match,
    haagerup_set,
    random_equivalent,
    spectra_match,
    spectrum,
)
from hadamax.props import is_hadamard_numeric

QUARTERS = np.array([0, 0.5, 1, 1.5]) * math.pi


def brute_haagerup(M):
    n = M.shape[0]
    out = []
    for i, j, k, l in itertools.product(range(n), repeat=4):
        z = M[i, j] * M[k, l] * np.conj(M[i, l]) * np.conj(M[k, j])
        out.append(np.angle(z) % (2 * math.pi))
    out = np.array(out)
    out[out > 2 * math.pi - 1e-8] = 0
    return np.sort(out)


class TestHaagerup:
    def test_f2_support(self):
        H = haagerup_set(fourier(2))
        assert np.allclose(H.support(), [0, math.pi])
        assert np.allclose(H.angles, brute_haagerup(fourier(2).astype(complex)))

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0, 2 * math.pi))
    def test_brute_force_h4(self, a):
        M = catalog_get("H4").evaluate({"a": a})
        got = haagerup_set(M).angles
        ref = brute_haagerup(M)
        d = np.abs(np.mod(got - ref + math.pi, 2 * math.pi) - math.pi)
        assert np.max(d) < 1e-9

    def test_d6_supports_coincide(self):
        a = haagerup_set(catalog_get("D6A").evaluate()).support()
        b = haagerup_set(catalog_get("D6B").evaluate()).support()
        assert np.allclose(a, QUARTERS) and np.allclose(b, QUARTERS)

    def test_invariant(self, rng):
        M = catalog_get("H4").evaluate({"a": 0.0})
        H = haagerup_set(M)
        for _ in range(50):
            assert H.matches(haagerup_set(random_equivalent(M, rng)))

    def test_separates_h4_members(self):
        H = lambda a: haagerup_set(catalog_get("H4").evaluate({"a": a}))
        assert not H(0.3).matches(H(1.1))

    def test_requires_hadamard(self):
        with pytest.raises(ValueError):
            haagerup_set(np.eye(3))


class TestCensus:
    def test_d6(self):
        assert entry_census(catalog_get("D6A").evaluate()) == {"1": 15, "-1": 9, "i": 6, "-i": 6, "other": 0}

    def test_h4(self):
        c = entry_census(catalog_get("h4").evaluate())
        assert c["1"] + c["-1"] == 64 and c["i"] == c["-i"] == 0


class TestFingerprint:
    def test_h4_pairs(self):
        F = fingerprint(catalog_get("H4").evaluate({"a": 0.0}), mode="separate")
        assert len(F.rows) == len(F.cols) == 6
        assert any(np.allclose(l, QUARTERS) for l in F.cols)
        assert any(np.allclose(l, [0, 0, math.pi, math.pi]) for l in F.cols)

    def test_legs_close(self, rng):
        M = catalog_get("D8E5").evaluate(rng.uniform(0, 6, 5))
        for legs in fingerprint(M).lists():
            assert abs(np.sum(np.exp(1j * legs))) < 1e-9

    def test_d6b_invariant(self, rng):
        M = catalog_get("D6B").evaluate()
        F = fingerprint(M)
        for _ in range(50):
            assert fingerprints_match(F, fingerprint(random_equivalent(M, rng)))

    def test_conjugate_and_transpose(self, rng):
        M = catalog_get("D8A5").evaluate(rng.uniform(0, 6, 5))
        F = fingerprint(M)
        assert fingerprints_match(F, fingerprint(M.conj()))
        assert fingerprints_match(F, fingerprint(M.T))
        S = fingerprint(M, mode="separate")
        St = fingerprint(M.T, mode="separate")
        assert fingerprints_match(S, Fingerprint(St.cols, St.rows, "separate"))

    def test_b_c_differ(self, rng):
        for _ in range(5):
            B = catalog_get("D8B5").evaluate(rng.uniform(0, 6, 5))
            C = catalog_get("D8C5").evaluate(rng.uniform(0, 6, 5))
            assert not fingerprints_match(fingerprint(B), fingerprint(C))

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            fingerprint(fourier(2), mode="both")

    def test_to_dict(self):
        d = fingerprint(fourier(2)).to_dict()
        assert d["mode"] == "combined" and d["cols_over_pi"] == [[0.0, 1.0]]


class TestSpectrum:
    def test_f2(self):
        assert spectra_match(spectrum(fourier(2)), [1, -1])

    def test_d6a(self):
        r6, r30 = math.sqrt(6), math.sqrt(30)
        want = [-1, 1] + [s * (-r6 + t * 1j * r30) / 6 for s in (1, 1j) for t in (1, -1)]
        assert spectra_match(spectrum(catalog_get("D6A").evaluate()), want, 1e-9)

    def test_order(self):
        ev = spectrum(catalog_get("D8A5").evaluate(np.ones(5)))
        ang = np.angle(ev)
        ang[ang <= -math.pi + 1e-9] = math.pi
        assert np.all(np.diff(np.round(ang, 9)) >= 0)

    def test_shape_mismatch(self):
        assert not spectra_match([1, -1], [1])


class TestRandomEquivalent:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_stays_hadamard(self, seed):
        M = catalog_get("D6A").evaluate()
        assert is_hadamard_numeric(random_equivalent(M, np.random.default_rng(seed)))[0]


class TestClassCompare:
    @pytest.mark.parametrize("a,b,verdict", [
        ("D8A5", "D8G5", "same-class"),
        ("D8B5", "D8C5", "distinct"),
        ("D8H5", "D8I5", "same-class"),
        ("D8A4", "D8B4", "distinct"),
        ("D8C4", "D8D4", "distinct"),
    ])
    def test_verdicts(self, a, b, verdict):
        v = charpoly_class_compare(a, b)
        assert v.verdict == verdict
        assert v.tested_shifts == 4 ** len(catalog_get(a).param_names)

    def test_shift_is_witness(self, rng):
        v = charpoly_class_compare("D8A5", "D8G5")
        from hadamax.charpoly import char_poly_numeric

        A, G = catalog_get("D8A5").matrix, catalog_get("D8G5").matrix
        b = rng.uniform(0, 6, 5)
        shifted = b + np.array(v.shift) * math.pi / 2
        assert char_poly_numeric(A, b).distance(char_poly_numeric(G, shifted)) < 1e-9

    def test_renaming_merges_c_and_e(self):
        # C and E differ by swapping b and c, so renaming is off by default
        assert charpoly_class_compare("D8C5", "D8E5").verdict == "distinct"
        v = charpoly_class_compare("D8C5", "D8E5", renaming=True, jobs=2)
        assert v.verdict == "same-class" and v.renaming is not None

    def test_errors(self):
        with pytest.raises(ValueError):
            charpoly_class_compare("D8A5", "D8A4")
        with pytest.raises(ValueError):
            charpoly_class_compare("D6A", "D6B")
