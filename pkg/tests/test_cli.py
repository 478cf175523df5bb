import json
import subprocess
import sys

import pytest

from conjugate_ifs.cli import main
from conjugate_ifs.csvio import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("ref,code", [
    ("lebesgue:1/3", 0), ("overlap:3/4,1/2", 2), ("moebius_parametric:2", 3),
])
def test_check_exit_codes(capsys, ref, code):
    got, out, _ = run(capsys, "check", "--system", ref)
    assert got == code and "status:" in out


def test_malformed_input_exits_one(capsys):
    assert run(capsys, "check")[0] == 1
    assert run(capsys, "eval", "--system", "bogus", "--x", "0.5")[0] == 1
    assert run(capsys, "eval", "--system", "lebesgue:1/3", "--x", "2")[0] == 1
    assert run(capsys, "render", "--system", "lebesgue:1/3", "--depth", "0")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1


def test_eval_prints_value_and_bound(capsys):
    code, out, _ = run(capsys, "eval", "--system", "question_mark", "--x", "2/5")
    assert code == 0 and out.split() == ["0.375", "0"]


def test_render_and_measure_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "render", "--system", "lebesgue:1/3", "--depth", "3")
    header, data = read_csv(out)
    assert code == 0 and header == ["x", "y", "err_bound"] and len(data) == 9
    dest = tmp_path / "m.csv"
    assert run(capsys, "measure", "--system", "gasket", "--samples", "500", "--out", str(dest))[0] == 0
    header, data = read_csv(dest)
    assert header == ["x1", "x2"] and data.shape == (500, 2)


def test_numeric_commands(capsys):
    code, out, _ = run(capsys, "dim", "--system", "lebesgue:1/4")
    assert code == 0 and abs(float(out) - 0.8112781245) < 1e-8
    code, out, _ = run(capsys, "holder", "--system", "lebesgue:1/3", "--samples", "1000")
    assert code == 0 and out.startswith("alpha_star 1.08496")
    code, out, _ = run(capsys, "probe", "--system", "lebesgue:1/3", "--depth", "5")
    assert code == 0 and len(out.splitlines()) == 6


def test_stability_cases(capsys):
    code, out, _ = run(capsys, "stability", "--case", "deform", "--n", "2,4")
    assert code == 0 and out.splitlines()[0] == "n,distance"
    code, out, _ = run(capsys, "stability", "--case", "discrete", "--system", "lebesgue:1/3", "--n", "1,2")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "stability", "--case", "uniform", "--system", "lebesgue:1/3",
                       "--other", "lebesgue:0.34", "--depth", "6")
    assert code == 0 and out.startswith("sup_diff")


def test_catalog_export_and_config(capsys, tmp_path):
    code, out, _ = run(capsys, "catalog", "--export", str(tmp_path))
    assert code == 0 and "question_mark" in out
    cfg = tmp_path / "overlap_i.json"
    assert json.loads(cfg.read_text())["kind"] == "generic"
    assert run(capsys, "check", "--config", str(cfg))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "conjugate_ifs", "check", "--system", "lebesgue:1/2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "compatible" in proc.stdout
