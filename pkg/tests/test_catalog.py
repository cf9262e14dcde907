import numpy as np
import pytest

from hadamax.algebra import PhaseLinearForm, SymbolicMatrix, format_entry
from hadamax.catalog import (
    UnknownMatrixError,
    assemble_standard,
    catalog_get,
    catalog_list,
    catalog_names,
    families,
    printed_phase_slips,
    printed_phases,
    quantization_census,
    standard_form,
    standard_form_names,
)
from hadamax.props import is_hadamard_numeric, is_hadamard_symbolic


class TestLookup:
    def test_d8a5_entries(self):
        M = catalog_get("D8A5").matrix
        assert M.n == 8
        assert M[1, 1] == PhaseLinearForm.var("a")
        assert format_entry(M[1, 7]) == "-1"

    def test_k4i(self):
        e = catalog_get("K4i")
        K = e.evaluate()
        assert e.param_names == () and K.shape == (8, 8)
        assert np.all(np.min(np.abs(K[..., None] - np.array([1, -1, 1j, -1j])), axis=-1) < 1e-15)
        assert np.allclose(K[0], 1) and np.allclose(K[:, 0], 1)

    def test_unknown(self):
        with pytest.raises(UnknownMatrixError) as exc:
            catalog_get("X9Z")
        assert "D8A5" in str(exc.value) and "h4" in str(exc.value)

    def test_listing(self):
        names = catalog_names()
        assert [f"D8{c}5" for c in "ABCDEFGHIJKL"] == families(5)
        for n in ("h1", "h2", "h3", "h4", "D6A", "D6B", "H4", "P8", "K4i", "C6BF"):
            assert n in names
        dims = {name: (n, p) for name, n, p in catalog_list()}
        assert dims["D8A5"] == (8, 5) and dims["D6A"] == (6, 0) and dims["H4"] == (4, 1)

    def test_unitary_scale(self):
        assert catalog_get("D8A5").unitary_scale == -3
        assert catalog_get("D6A").unitary_scale is None
        U = catalog_get("D8B5").matrix.with_scale(-3).evaluate(np.ones(5))
        assert np.allclose(U @ U.conj().T, np.eye(8))

    def test_numeric_entry(self):
        e = catalog_get("C6BF")
        assert not e.is_symbolic
        with pytest.raises(TypeError):
            e.evaluate_many(np.zeros((1, 0)))


@pytest.mark.parametrize("name", catalog_names())
def test_every_entry_is_hadamard(name, rng):
    e = catalog_get(name)
    if e.is_symbolic:
        assert is_hadamard_symbolic(e.matrix)
    M = e.evaluate(rng.uniform(0, 6, len(e.param_names)) if e.param_names else None)
    assert is_hadamard_numeric(M, 1e-10)[0]
    assert e.notes


class TestStandardForm:
    @pytest.mark.parametrize("name,core", [("D8A5", "h1"), ("D8B5", "h2"), ("D8K5", "h4"), ("D8L5", "h4")])
    def test_cores(self, name, core):
        assert standard_form(name).core_name == core

    def test_zero_binding_is_core(self):
        sf = standard_form("D8A5")
        assert np.array_equal(assemble_standard(sf, np.zeros(5)), catalog_get("h1").evaluate())

    @pytest.mark.parametrize("name", standard_form_names())
    def test_reassembles(self, name, rng):
        sf = standard_form(name)
        assert sf.assemble_symbolic() == catalog_get(name).matrix
        b = rng.uniform(0, 6, 5)
        assert np.allclose(assemble_standard(sf, b), catalog_get(name).evaluate(b), atol=1e-12)
        assert all(p.quarter == 0 for row in sf.phases for p in row)

    def test_phase_text(self):
        text = standard_form("D8A5").phase_text()
        assert text[0] == ["."] * 8 and text[2][3] == "-a+b+d"

    def test_no_form(self):
        with pytest.raises(UnknownMatrixError):
            standard_form("H4")


class TestPrintedPhases:
    def test_blanks(self):
        assert printed_phases("D8K5")[2][4] is None

    @pytest.mark.parametrize("name,slips", [
        ("D8A5", [(5, 1, "c", "b")]),
        ("D8I5", [(2, 5, "-af+b+f", "-a+b+f"), (2, 6, "a", "b"), (5, 1, "?", "b"), (5, 6, "a", "b")]),
        ("D8K5", [(2, 4, "?", "f")]),
        ("D8B5", []), ("D8C5", []), ("D8E5", []), ("D8F5", []), ("D8L5", []),
    ])
    def test_slips(self, name, slips):
        assert printed_phase_slips(name) == slips


class TestCensus:
    def test_d8a5(self):
        c = quantization_census("D8A5")
        assert c.bindings == 1024 and c.distinct == 1024 and c.classes == 32

    def test_constant(self):
        c = quantization_census("D6A")
        assert c.bindings == 1 and c.classes == 1 and c.histogram == ((12, 1),)

    def test_numeric(self):
        with pytest.raises(TypeError):
            quantization_census("C6BF")

    def test_pi_shift_changes_signs_only(self, rng):
        M = catalog_get("D8A5")
        b = rng.integers(0, 2, 5) * np.pi / 2
        for k in range(5):
            s = b.copy()
            s[k] += np.pi
            assert np.allclose(np.abs(M.evaluate(s).real), np.abs(M.evaluate(b).real), atol=1e-12)
