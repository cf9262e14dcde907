import json

import pytest

from hadamax.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog_list(capsys):
    code, out, _ = call(capsys, "catalog")
    assert code == 0 and "D8A5" in out and "C6BF" in out


def test_catalog_show(capsys):
    code, out, _ = call(capsys, "catalog", "H4")
    assert code == 0 and "e^{ia}" in out


def test_verify(capsys):
    code, out, _ = call(capsys, "verify", "D8A5", "--samples", "100")
    assert code == 0 and out.strip() == "OK: Hadamard (symbolic + 100 numeric samples)"


def test_verify_file(capsys, tmp_path):
    doc = {"n": 2, "params": [], "scaleHalfLog": 0,
           "grid": [[{"coeffs": {}, "quarter": 0}] * 2] * 2}
    p = tmp_path / "ones.json"
    p.write_text(json.dumps(doc))
    code, out, _ = call(capsys, "verify", str(p))
    assert code == 1 and out.startswith("FAIL")


def test_spectrum_exact(capsys):
    code, out, _ = call(capsys, "spectrum", "D6B", "--exact")
    assert code == 0 and out.strip() == "(y^2-6)^3"


def test_spectrum_numeric(capsys):
    code, out, err = call(capsys, "spectrum", "H4", "--set", "a=pi/2")
    assert code == 0 and out.strip() and not err


def test_unset_parameter_warns(capsys):
    code, _, err = call(capsys, "spectrum", "H4")
    assert code == 0 and "a" in err


def test_compare(capsys):
    code, out, _ = call(capsys, "compare", "D8B5", "D8C5", "--method", "charpoly")
    assert code == 0 and out.strip() == "distinct"
    code, out, _ = call(capsys, "compare", "D8A5", "D8G5")
    assert out.startswith("same-class")


@pytest.mark.parametrize("method", ["spectrum", "haagerup", "fingerprint"])
def test_compare_real_hadamards(capsys, method):
    # all 8x8 real Hadamard matrices are equivalent; only spectra tell h1 from h2
    code, out, _ = call(capsys, "compare", "h1", "h2", "--method", method)
    assert code == 0
    assert out.strip() == ("distinct" if method == "spectrum" else "not separated")
    assert call(capsys, "compare", "h1", "h3", "--method", method)[1].strip() == "not separated"


@pytest.mark.parametrize("kind", ["haagerup", "fingerprint", "census"])
def test_invariants(capsys, kind):
    code, out, _ = call(capsys, "invariants", kind, "D6A", "--json")
    assert code == 0
    json.loads(out)


def test_standard_form(capsys):
    code, out, _ = call(capsys, "standard-form", "D8A5", "--printed")
    assert code == 0 and "h1" in out


def test_search(capsys):
    code, out, _ = call(capsys, "search", "d2", "--restarts", "3", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["best"]["converged"] and doc["converged_runs"] >= 1
    assert doc["h4_fit_a_over_pi"] is not None


def test_export_import(capsys, tmp_path):
    p = tmp_path / "m.json"
    code, _, _ = call(capsys, "export", "D8A5", "-o", str(p))
    assert code == 0
    code, out, _ = call(capsys, "import-check", str(p))
    assert code == 0 and out.startswith("OK")


@pytest.mark.parametrize("fmt,needle", [("grid", "-i"), ("latex", r"\begin{array}")])
def test_export_text(capsys, fmt, needle):
    code, out, _ = call(capsys, "export", "K4i", "--format", fmt)
    assert code == 0 and needle in out


def test_import_schema_error(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 1, "params": [], "scaleHalfLog": 0, "grid": [[{"coeffs": {}, "quarter": 7}]]}')
    code, out, _ = call(capsys, "import-check", str(p))
    assert code == 1 and "$.grid[0][0].quarter" in out


def test_unknown_name(capsys):
    code, _, err = call(capsys, "verify", "X9Z")
    assert code == 2 and "D8A5" in err


def test_bad_usage(capsys):
    assert call(capsys, "verify", "D8A5", "--samples", "0")[0] == 2
    assert call(capsys, "nonsense")[0] == 2
    assert call(capsys, "spectrum", "H4", "--set", "a")[0] == 2
