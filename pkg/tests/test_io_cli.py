import json

import numpy as np
import pytest

from binrank import io
from binrank.cli import main
from binrank.critical import critical_rank_k
from binrank.forms import BinaryForm, LinearForm

from conftest import kostlan


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# io


def test_form_round_trip(rng):
    for complex_ in (False, True):
        f = kostlan(rng, 5, complex_)
        text = io.dumps(io.form_to_json(f))
        g = io.form_from_json(json.loads(text))
        assert np.array_equal(f.coeffs, g.coeffs)
        assert g.field == f.field


def test_seventeen_digits():
    assert io.dumps(0.1) == "0.10000000000000001"
    assert io.dumps([1.0, 2]) == "[\n  1.0,\n  2\n]"


def test_form_errors():
    with pytest.raises(io.FormatError):
        io.form_from_json({"coeffs": [1, 2], "degree": 3})
    with pytest.raises(io.FormatError):
        io.form_from_json({"coeffs": [[1, 2]], "field": "real"})
    with pytest.raises(io.FormatError):
        io.form_from_json("x")
    with pytest.raises(io.FormatError):
        io.load_form("[1, 2")


def test_load_form_from_file(tmp_path):
    p = tmp_path / "f.json"
    p.write_text('{"degree": 2, "coeffs": [1, 0, [0, 1]], "field": "complex"}')
    f = io.load_form(str(p))
    assert f.is_complex and f.coeffs[2] == 1j


def test_critical_round_trip(rng):
    f = kostlan(rng, 4)
    for c in critical_rank_k(f, 2):
        back = io.critical_from_json(json.loads(io.dumps(io.critical_to_json(c))), 4)
        assert back.distance == c.distance
        assert np.array_equal(back.tensor.coeffs, c.tensor.coeffs)


def test_linear_round_trip():
    l = LinearForm(0.5, 1 - 2j)
    assert io.linear_from_json(json.loads(io.dumps(io.linear_to_json(l)))) == l


# ---------------------------------------------------------------------------
# cli


def test_eigen_json(capsys):
    code, out, _ = run(capsys, "eigen", "--form", "[1,0,0,0,1]")
    assert code == 0
    lams = sorted(e["lambda"] for e in json.loads(out))
    np.testing.assert_allclose(lams, [0.5, 0.5, 1, 1], atol=1e-12)


def test_eigen_text(capsys):
    code, out, _ = run(capsys, "eigen", "--form", "[1,0,0,0,1]", "--text")
    assert code == 0 and "lambda" in out


def test_critical_deterministic(capsys):
    argv = ["critical", "--form", "[2,0,0,1,0]", "--degree", "4", "--seed", "3"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    pts = json.loads(out1)
    assert len(pts) == 7 and sum(p["boundary"] for p in pts) == 1


def test_global_flags_before_subcommand(capsys):
    code, out, _ = run(capsys, "--text", "--seed", "1", "critical", "--form", "[2,0,0,1,0]")
    assert code == 0 and "boundary" in out


def test_best(capsys):
    code, out, _ = run(capsys, "best", "--form", "[1,0,0,0,1]", "--k", "1")
    assert code == 0
    assert json.loads(out)["distance"] == pytest.approx(1.0)


def test_spectral_and_rez(capsys):
    code, out, _ = run(capsys, "spectral", "--form", "[1,0,0,0,0,1]")
    assert code == 0 and json.loads(out)["residual"] <= 1e-10
    code, out, _ = run(capsys, "rez", "--d", "4", "--phi", "0.37")
    assert code == 0 and json.loads(out)["c_d"] == pytest.approx(8 / 9, abs=1e-12)


@pytest.mark.parametrize("argv,code", [
    (["eigen", "--form", "[1,0,"], 2),
    (["eigen", "--form", "[1,0,1]", "--degree", "3"], 2),
    (["eigen", "--form", "[0,0,0]"], 3),
    (["spectral", "--form", "[1,0,2,0,1]"], 4),
    (["critical", "--form", "[1,0,2,0,1]"], 4),
    (["critical", "--form", "[1,2,3,4,5]", "--budget", "1"], 6),
    (["rez", "--d", "3"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_parse_errors_exit_two():
    for argv in (["bogus"], ["eigen"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2


def test_budget_exhausted_reports_partial(capsys):
    code, out, err = run(capsys, "critical", "--form", "[1,2,3,4,5]", "--budget", "1")
    assert code == 6
    obj = json.loads(out)
    assert obj["budget_exhausted"] and obj["expected"] == 7
    assert len(obj["points"]) < 7
    assert "found" in err


def test_maccioni_cli(capsys):
    code, out, _ = run(capsys, "maccioni", "--samples", "50", "--d", "3")
    assert code == 0
    obj = json.loads(out)
    assert obj["violations"] == 0 and obj["checked"] + obj["skipped"] == 50


def test_table_cli_deterministic(capsys):
    argv = ["table", "--samples", "15", "--climb-steps", "0", "--open-steps", "0", "--time-limit", "1000"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert len(json.loads(out1)["rows"]) == 11
