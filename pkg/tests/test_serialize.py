import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hadamax.algebra import PhaseLinearForm, SymbolicMatrix
from hadamax.catalog import catalog_get, catalog_names
from hadamax.serialize import SchemaError, from_json, import_matrix, parse_grid, to_grid, to_json, to_latex

forms = st.builds(PhaseLinearForm, st.dictionaries(st.sampled_from("abc"), st.integers(-3, 3), max_size=3),
                  st.integers(0, 3))
sym = st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.one_of(st.none(), forms), min_size=n, max_size=n), min_size=n, max_size=n),
    st.integers(-6, 6),
)).map(lambda t: SymbolicMatrix(t[0], ("a", "b", "c"), t[1]))


@pytest.mark.parametrize("name", catalog_names())
def test_catalog_round_trip(name):
    M = catalog_get(name).matrix
    back = from_json(to_json(M))
    if isinstance(M, SymbolicMatrix):
        assert back == M
    else:
        assert np.array_equal(back, M)


def test_file_round_trip(tmp_path):
    p = tmp_path / "d8a5.json"
    p.write_text(to_json(catalog_get("D8A5").matrix, indent=2))
    assert import_matrix(p) == catalog_get("D8A5").matrix


@settings(max_examples=50, deadline=None)
@given(sym)
def test_symbolic_round_trip(M):
    assert from_json(to_json(M)) == M


@settings(max_examples=30, deadline=None)
@given(arrays(np.complex128, (3, 3), elements=st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)))
def test_numeric_round_trip(M):
    assert np.array_equal(from_json(to_json(M)), M)


def test_numeric_pairs():
    M = from_json('{"n": 1, "entries": [[[0.5, -1.0]]]}')
    assert isinstance(M, np.ndarray) and M[0, 0] == 0.5 - 1j


def _doc():
    return json.loads(to_json(catalog_get("H4").matrix))


class TestErrors:
    def test_quarter_seven(self):
        doc = _doc()
        doc["grid"][0][0]["quarter"] = 7
        with pytest.raises(SchemaError) as exc:
            from_json(json.dumps(doc))
        assert exc.value.path == "$.grid[0][0].quarter"

    def test_bad_json(self):
        with pytest.raises(SchemaError) as exc:
            from_json('{"n": 2,\n "grid": [[1,]]}')
        assert exc.value.line == 2

    def test_shape(self):
        doc = _doc()
        doc["grid"] = doc["grid"][:3]
        with pytest.raises(SchemaError, match="rows"):
            from_json(json.dumps(doc))

    def test_unknown_param(self):
        doc = _doc()
        doc["params"] = []
        with pytest.raises(SchemaError):
            from_json(json.dumps(doc))

    def test_top_level(self):
        with pytest.raises(SchemaError):
            from_json("[1, 2]")

    def test_extra_field(self):
        doc = _doc()
        doc["colour"] = "red"
        with pytest.raises(SchemaError):
            from_json(json.dumps(doc))

    def test_non_finite(self):
        with pytest.raises(ValueError):
            to_json(np.array([[np.inf]]))


class TestText:
    def test_k4i_grid(self):
        text = to_grid(catalog_get("K4i").matrix)
        rows = [r.split() for r in text.splitlines()]
        assert len(rows) == 8 and all(len(r) == 8 for r in rows)
        assert {t for r in rows for t in r} <= {"1", "-1", "i", "-i"}
        assert rows[0] == ["1"] * 8

    def test_grid_round_trip(self):
        M = catalog_get("D8I5").matrix
        assert parse_grid(to_grid(M), M.params) == M

    def test_numeric_grid(self):
        assert to_grid(np.array([[1, 1j], [0.5, -1]])).split() == ["1", "i", "0.5+0i", "-1"]

    def test_latex(self):
        tex = to_latex(catalog_get("h1").matrix)
        lines = tex.splitlines()
        assert lines[0] == r"\left[\begin{array}{rrrrrrrr}"
        body = lines[1:-1]
        assert len(body) == 8
        assert all(set(c.strip() for c in l.rstrip("\\ ").split("&")) <= {"1", "-1"} for l in body)

    def test_latex_phase(self):
        tex = to_latex(SymbolicMatrix.from_tokens(["-ie(a)"]))
        assert r"-i\,e^{ia}" in tex
