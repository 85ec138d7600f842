import subprocess
import sys

import pytest

from flagcohom.cli import run
from flagcohom.config import build_config, parse_config_text


def records(lines, kind):
    return [l for l in lines if l.startswith(f"record={kind} ")]


def test_cohomology_command():
    code, out = run(["cohomology", "--scheme", "pn", "--n", "2", "--d", "-3"])
    assert code == 0
    assert "h^2 = 1" in out
    assert records(out, "cohomology")[0].endswith("h0=0 h1=0 h2=1 boundary_contact=0")


def test_verbose_dumps_exponents():
    code, out = run(["cohomology", "--scheme", "p1", "--d", "-3", "--verbose"])
    assert code == 0
    assert records(out, "exponent") == ["record=exponent e=(-2) b0=0 b1=1",
                                        "record=exponent e=(-1) b0=0 b1=1"]


def test_unreliable_window_exit_code():
    code, out = run(["cohomology", "--scheme", "p1", "--d", "5", "--window", "[-2,2]"])
    assert code == 3
    assert any("warning" in l for l in out)


@pytest.mark.parametrize("argv", [
    ["cohomology", "--scheme", "pn", "--n", "7"],
    ["cohomology", "--field", "fp:12"],
    ["cohomology", "--window", "[-2,2]"],
    ["cohomology", "--bogus"],
    ["krichever", "--scheme", "elliptic", "--a", "0", "--b", "0"],
    ["reconstruct", "--scheme", "pn", "--n", "2"],
    ["cohomology", "--scheme", "p1", "--n", "2"],
])
def test_usage_errors(argv):
    code, out = run(argv)
    assert code == 2
    assert out[-1] == "record=error kind=usage"


def test_precision_exit_code():
    code, out = run(["krichever", "--scheme", "elliptic", "--a", "1", "--b", "1", "--prec", "12"])
    assert code == 4 and out[-1] == "record=error kind=precision"


def test_verify_passes_and_corrupted_sign_fails():
    assert run(["verify", "--scheme", "pn", "--n", "2", "--d", "1"])[0] == 0
    code, out = run(["verify", "--scheme", "pn", "--n", "2", "--corrupt-sign"])
    assert code == 1
    assert "record=law check=d_squared_zero verdict=fail sign=constant" in out


def test_verify_ideal_point_reports_violation():
    code, out = run(["verify", "--scheme", "ideal", "--position", "off-y1"])
    assert code == 1
    assert any("check=intersections verdict=fail" in l for l in out)


def test_krichever_elliptic():
    code, out = run(["krichever", "--scheme", "elliptic", "--a", "2", "--b", "3", "--m", "1..10"])
    assert code == 0
    assert "record=gaps values={1}" in out
    assert "record=hilbert m=1..10 dims=1,2,3,4,5,6,7,8,9,10 unreliable=0" in out


def test_krichever_verbose_lists_witnesses():
    code, out = run(["krichever", "--scheme", "elliptic", "--a", "2", "--b", "3", "--verbose"])
    assert code == 0
    assert len(records(out, "witness")) == 2 * 10


def test_reduce_command():
    code, out = run(["reduce", "--scheme", "pn", "--n", "2", "--m", "0..5"])
    assert code == 0 and "record=reduce_summary agree=1" in out


def test_reconstruct_command():
    code, out = run(["reconstruct", "--scheme", "elliptic", "--a", "1/2", "--b", "-3"])
    assert code == 0
    assert "record=reconstruct kind=elliptic genus=1 gaps={1} a=1/2 b=-3" in out


def test_reconstruct_inconsistent_hint():
    code, out = run(["reconstruct", "--scheme", "p1", "--hint", "elliptic"])
    assert code == 1 and "record=reconstruct verdict=inconsistent" in out


@pytest.mark.parametrize("position", ["off-y1", "on-y1-off-y2"])
def test_counterexample_command(position):
    code, out = run(["counterexample", "--position", position])
    assert code == 0
    recs = records(out, "counterexample")
    assert "sheaf=mQ" in recs[0] and "violated=1" in recs[0]
    assert "sheaf=O" in recs[1] and "violated=0" in recs[1]


def test_config_file_and_override(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# P^2 with a negative twist\nscheme = pn { n = 2, d = -3 }\n"
                    "field = Fp(1000000007)\nwindow = [-8,8]x[-8,8]\n")
    code, out = run(["cohomology", "--config", str(conf)])
    assert code == 0 and "h^2 = 1" in out
    code, out = run(["cohomology", "--config", str(conf), "--d", "-4"])
    assert "h^2 = 3" in out
    assert "field=Fp(1000000007)" in records(out, "cohomology")[0]


def test_config_for_other_command_rejected(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("command = reduce\nscheme = pn { n = 2 }\n")
    assert run(["cohomology", "--config", str(conf)])[0] == 2


@pytest.mark.parametrize("argv", [
    ["cohomology", "--scheme", "pn", "--n", "3", "--d", "-4", "--verbose"],
    ["krichever", "--scheme", "elliptic", "--a", "-2", "--b", "5", "--field", "fp:1000000007"],
    ["reduce", "--scheme", "pn", "--n", "2", "--d", "1", "--m", "0..3"],
    ["counterexample", "--position", "off-y1"],
])
def test_persisted_config_reproduces_output(tmp_path, argv):
    out_file = tmp_path / "run.txt"
    code, _ = run(argv + ["--out", str(out_file)])
    first = out_file.read_text()
    conf = tmp_path / "run.txt.conf"
    again = tmp_path / "again.txt"
    code2, _ = run([argv[0], "--config", str(conf), "--out", str(again)])
    assert code == code2
    assert again.read_text() == first


def test_runs_are_deterministic():
    argv = ["cohomology", "--scheme", "pn", "--n", "2", "--d", "-4", "--verbose"]
    assert run(argv) == run(argv)


def test_config_text_round_trip():
    cfg = build_config({"command": "krichever", "scheme": "elliptic { a = 1, b = -1 }",
                        "field": "q", "precision": "32"})
    again = build_config(parse_config_text(cfg.to_text()))
    assert again.to_text() == cfg.to_text()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "flagcohom", "cohomology", "--scheme", "p1", "--d", "-2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "h^1 = 1" in proc.stdout


@pytest.mark.parametrize("argv,code,needle", [
    (["cohomology", "--scheme", "pn", "--n", "1", "--d", "0"], 0, "h^0 = 1"),
    (["cohomology", "--scheme", "pn", "--n", "3", "--d", "-4"], 0, "h^3 = 1"),
    (["krichever", "--scheme", "elliptic", "--a", "1", "--b", "2", "--prec", "40"], 0, "record=gaps values={1}"),
    (["krichever", "--scheme", "p1", "--d", "0"], 0, "ring_closure: pass"),
    (["krichever", "--scheme", "elliptic", "--a", "1", "--b", "2", "--prec", "6"], 4, "record=error kind=precision"),
    (["verify", "--scheme", "pn", "--n", "1", "--d", "-2"], 0, "d_squared_zero: pass"),
    (["reconstruct", "--scheme", "elliptic", "--a", "0", "--b", "1"], 0, "a=0 b=1"),
])
def test_documented_invocations(argv, code, needle):
    got, out = run(argv)
    assert got == code
    assert any(needle in l for l in out), out
