import csv
import json

import pytest

from zcorr import reference
from zcorr.cli import fmt, main
from zcorr.correlators import kappa_point_closed


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_closed_matches_library(capsys):
    code, out, err = run(capsys, "eval", "--m", "3", "--k", "3", "--r", "1.0", "--method", "closed")
    assert code == 0
    assert float(out) == pytest.approx(kappa_point_closed(1.0, 3), rel=1e-14)
    assert out.strip() == fmt(kappa_point_closed(1.0, 3))
    assert json.loads(err)["method"] == "closed"


def test_eval_far_pair(capsys):
    code, out, _ = run(capsys, "eval", "--m", "2", "--k", "2", "--r", "10", "--method", "berezin")
    assert code == 0 and abs(float(out) - 1) < 1e-10


def test_eval_negative_r(capsys):
    code, out, err = run(capsys, "eval", "--m", "1", "--k", "1", "--r", "-1", "--method", "closed")
    assert code == 2 and out == ""
    assert "r > 0" in err.splitlines()[-1]


@pytest.mark.parametrize("method", ["berezin", "expansion", "closed", "wick"])
def test_eval_methods_agree(capsys, method):
    _, out, _ = run(capsys, "eval", "--m", "2", "--k", "2", "--r", "0.8", "--method", method)
    assert float(out) == pytest.approx(kappa_point_closed(0.8, 2), rel=1e-12)


def test_eval_json_envelope(capsys):
    _, out, _ = run(capsys, "eval", "--m", "1", "--k", "1", "--r", "1", "--json")
    env = json.loads(out)
    assert env["config"]["command"] == "eval"
    assert env["result"]["kappa"] == pytest.approx(kappa_point_closed(1.0, 1))


def test_eval_points_file(capsys, tmp_path):
    f = tmp_path / "pts.json"
    f.write_text(json.dumps([[[0, 0], [0, 0]], [[0.9, 0], [0, 0]]]))
    _, out, _ = run(capsys, "eval", "--m", "2", "--k", "2", "--points", str(f))
    assert float(out) == pytest.approx(kappa_point_closed(0.9, 2), rel=1e-10)


def test_points_file_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "eval", "--m", "2", "--k", "1", "--points", str(tmp_path / "nope"))
    assert code == 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([[[0, 0]]]))
    code, _, err = run(capsys, "eval", "--m", "2", "--k", "1", "--points", str(bad))
    assert code == 2 and "m = 2" in err


def test_eval_mc(capsys):
    code, out, _ = run(capsys, "eval", "--m", "1", "--k", "1", "--r", "1", "--method", "mc",
                       "--samples", "20000", "--seed", "0x2a")
    mean, se = map(float, out.split())
    assert code == 0 and abs(mean - kappa_point_closed(1.0, 1)) < 4 * se


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["eval", "--m", "1", "--k", "1", "--r", "1", "--bogus"])
    assert info.value.code == 2


def test_curve_csv(capsys, tmp_path):
    out_path = tmp_path / "k33.csv"
    code, _, _ = run(capsys, "curve", "--m", "3", "--k", "3", "--rmin", "0.2", "--rmax", "4",
                     "--steps", "200", "--out", str(out_path))
    assert code == 0
    text = out_path.read_text()
    assert text.splitlines()[0] == "r,kappa"
    rows = list(csv.DictReader(text.splitlines()))
    assert len(rows) == 200
    k = [float(r["kappa"]) for r in rows]
    assert k[0] > 20 and abs(k[-1] - 1) < 1e-4 and min(k) > 0


def test_curve_zero_repulsion(capsys):
    _, out, _ = run(capsys, "curve", "--m", "1", "--k", "1", "--rmin", "0.1", "--rmax", "1",
                    "--steps", "5")
    rows = list(csv.DictReader(out.splitlines()))
    assert float(rows[0]["kappa"]) < 0.01


def test_curve_byte_identical(capsys):
    a = run(capsys, "curve", "--m", "2", "--k", "1", "--steps", "20")[1]
    b = run(capsys, "curve", "--m", "2", "--k", "1", "--steps", "20")[1]
    assert a == b


def test_curve_errors(capsys, tmp_path):
    assert run(capsys, "curve", "--m", "3", "--k", "3", "--rmin", "2", "--rmax", "1")[0] == 2
    assert run(capsys, "curve", "--m", "3", "--k", "3", "--steps", "1")[0] == 2
    assert run(capsys, "curve", "--m", "3", "--k", "3", "--steps", "3",
               "--out", str(tmp_path / "missing" / "x.csv"))[0] == 3


def test_series_text_and_json(capsys):
    code, out, _ = run(capsys, "series", "--m", "1", "--k", "1", "--order", "10")
    assert code == 0 and "u^11 -691/8382528000" in out
    _, out, _ = run(capsys, "series", "--m", "2", "--k", "2", "--order", "4", "--json")
    res = json.loads(out)["result"]
    assert res == {"var": "u", "valuation": 0, "coeffs": ["3/4", "0", "1/24", "0", "-1/288"]}


def test_series_unsupported(capsys):
    code, _, err = run(capsys, "series", "--m", "5", "--k", "4")
    assert code == 2 and "berezin" in err


def test_mc_subcommand_deterministic(capsys, monkeypatch):
    args = ("mc", "--m", "2", "--k", "1", "--r", "0.5", "--samples", "40000", "--seed", "7",
            "--json")
    monkeypatch.setenv("ZCORR_THREADS", "1")
    a = json.loads(run(capsys, *args)[1])["result"]
    monkeypatch.setenv("ZCORR_THREADS", "4")
    b = json.loads(run(capsys, *args)[1])["result"]
    assert a == b


def test_ensemble_subcommand(capsys):
    code, out, _ = run(capsys, "ensemble", "--N", "30", "--trials", "20", "--centers", "1.0",
                       "--width", "0.4")
    rec = json.loads(out.splitlines()[0])
    assert code == 0 and rec["bin_center"] == pytest.approx(1.0) and rec["pairs_counted"] > 0


@pytest.fixture(scope="module")
def fast_report():
    from zcorr.validation import run_validation
    return run_validation("fast")


def test_validate_fast_checks_all_pass(fast_report):
    # every fast check, including the kappa_33 curve check, must pass for exit 0
    failed = [(r.name, r.detail) for r in fast_report if not r.passed]
    assert not failed


def test_validate_names_perturbed_coefficient(capsys, monkeypatch):
    table = {p: c for p, c in reference.POINT_SERIES[3].items()}
    table[3] += 1
    monkeypatch.setitem(reference.POINT_SERIES, 3, table)
    from zcorr.validation import check_point_series
    passed, detail = check_point_series()
    assert not passed and "(3,3,u^3)" in detail


def test_validate_exit_code_on_failure(capsys, monkeypatch):
    import zcorr.validation as v
    monkeypatch.setattr(v, "FAST_CHECKS", (("always fails", lambda seed: (False, "boom")),))
    code, out, _ = run(capsys, "validate", "--level", "fast")
    assert code == 1 and "FAIL" in out and "boom" in out
    monkeypatch.setattr(v, "FAST_CHECKS", (("fine", lambda seed: (True, "ok")),))
    code, out, _ = run(capsys, "validate")
    assert code == 0 and out.endswith("1/1 checks passed\n")
