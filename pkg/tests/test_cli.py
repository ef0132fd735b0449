import json
import math
import os
import subprocess
import sys

import pytest

from densemeas.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def record(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_rounds_theorem3(capsys):
    code, rec = record(capsys, "rounds", "--theorem", "3", "--n", "1000", "--k", "10", "--gamma", "1", "--log-base", "10")
    assert code == 0 and rec["R"] == 30
    assert rec["p"] == pytest.approx(1 - 2 * math.exp(-30), rel=1e-12)
    assert rec["log_base"] == "10"


def test_rounds_theorem2_auto_z(capsys):
    code, rec = record(capsys, "rounds", "--theorem", "2", "--n", "1000", "--k", "2", "--alpha", "2.47e-4", "--z", "auto", "--log-base", "10")
    assert code == 0 and rec["R"] == 41 and rec["z"] == pytest.approx(math.sqrt(1000))


def test_rounds_bad_xi(capsys):
    code, _, err = run(capsys, "rounds", "--theorem", "3", "--n", "1000", "--k", "10", "--xi", "2")
    assert code != 0 and "xi" in err


def test_missing_flag_is_usage_error(capsys):
    code, _, err = run(capsys, "rounds", "--theorem", "3")
    assert code == 1 and "--n" in err


def test_bad_choice_exits_one(capsys):
    code, _, _ = run(capsys, "run", "--basis", "fourier")
    assert code == 1


def test_run_full_rank_hook(capsys):
    code, rec = record(capsys, "run", "--procedure", "2", "--n", "8", "--k", "1", "--r", "8", "--basis", "identity", "--mode", "raw01", "--identity-ensemble")
    assert code == 0 and rec["exact"] is True


def test_run_zero_rounds(capsys):
    code, rec = record(capsys, "run", "--n", "50", "--k", "2", "--r", "0")
    assert code == 2 and rec["exact"] is False


def test_run_inconsistent_config(capsys):
    code, _, err = run(capsys, "run", "--n", "12", "--k", "1", "--r", "5", "--basis", "walsh")
    assert code == 1 and "power of two" in err
    code, _, _ = run(capsys, "run", "--n", "8", "--k", "1", "--r", "5", "--identity-ensemble")
    assert code == 1


def test_run_twice_byte_identical(capsys):
    argv = ["run", "--procedure", "1", "--n", "32", "--k", "2", "--r", "20", "--basis", "walsh", "--seed", "4"]
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b and a[1]


def test_text_and_json_have_same_fields(capsys):
    argv = ["rounds", "--theorem", "1", "--n", "100", "--k", "3", "--chi", "0.5", "--eps", "0.1"]
    _, text, _ = run(capsys, *argv)
    _, rec = record(capsys, *argv)
    keys = {line.split("=", 1)[0] for line in text.splitlines()}
    assert keys == set(rec)


def test_record_embeds_defaults(capsys):
    _, rec = record(capsys, "run", "--n", "16", "--k", "1", "--r", "10")
    for key in ("procedure", "basis", "mode", "seed", "tol", "max_iter", "value_dist", "scaled"):
        assert key in rec


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 9, "run": {"n": 16, "k": 1, "r": 10, "basis": "walsh"}}))
    _, rec = record(capsys, "run", "--config", str(cfg), "--r", "12")
    assert (rec["n"], rec["r"], rec["basis"], rec["seed"]) == (16, 12, "walsh", 9)


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, _ = run(capsys, "run", "--config", str(cfg), "--n", "8", "--k", "1", "--r", "4")
    assert code == 1


def test_rip_identity(capsys):
    code, rec = record(capsys, "rip", "--identity", "--n", "6", "--k", "2")
    assert code == 0 and rec["delta"] == 0.0


def test_rip_from_file(tmp_path, capsys):
    from densemeas.measurement import assemble_ensemble, write_ensemble
    from densemeas.analysis import rip_constant

    ens = assemble_ensemble(6, 8, None, "centered", True, 31)
    p = tmp_path / "e.txt"
    write_ensemble(p, ens)
    code, rec = record(capsys, "rip", "--ensemble", str(p), "--k", "2")
    assert code == 0 and rec["delta"] == rip_constant(ens.sensing_matrix, 2)


def test_rip_guard_refuses(capsys):
    code, _, err = run(capsys, "rip", "--n", "40", "--r", "10", "--k", "8")
    assert code == 1 and "limit" in err


def test_subgauss_rademacher(capsys):
    code, rec = record(capsys, "subgauss", "--source", "rademacher", "--grid", "0.5,1.0,1.5", "--trials", "100000")
    assert code == 0 and rec["satisfied"] is True and rec["tails"][2] == 0.0


def test_curve_export(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code, rec = record(capsys, "curve", "--procedure", "2", "--n", "40", "--k", "2", "--r-list", "4:20:4", "--trials", "5", "--seed", "7", "--out", str(out))
    assert code == 0 and rec["rows"] == 5
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert sum(1 for ln in lines if ln and ln[0].isdigit()) == 5


def test_curve_unwritable(capsys):
    code, _, _ = run(capsys, "curve", "--n", "20", "--k", "1", "--r-list", "2,4", "--trials", "2", "--out", "/nonexistent/dir/c.csv")
    assert code == 1


def test_concentration_command(capsys):
    code, rec = record(capsys, "concentration", "--r", "40", "--trials", "200")
    assert code == 0 and 0.0 <= rec["tail"] <= 1.0


def test_module_entry_point():
    env = dict(os.environ)
    p = subprocess.run([sys.executable, "-m", "densemeas", "rip", "--identity", "--n", "3", "--k", "1"], capture_output=True, text=True, env=env)
    assert p.returncode == 0 and "delta=0.0" in p.stdout
