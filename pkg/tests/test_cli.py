import json
import subprocess
import sys

import pytest

from reachged.cli import SWEEP_COLUMNS, main, render

SMALL = """
[ensemble]
K = 16
N = 16
L = 64
p_D = 0.2
p_E = 0.2
[run]
replications = 40
instances = 40
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.ini"
    p.write_text(SMALL)
    return str(p)


def test_decide_default_and_raw(capsys):
    assert main(["decide"]) == 0
    assert capsys.readouterr().out == "s=-0.717 variant=threshold_aware action=maximize_q\n"
    assert main(["decide", "--slope-variant", "raw_pF"]) == 0
    assert capsys.readouterr().out == "s=-0.775 variant=raw_pF action=maximize_q\n"


def test_decide_flips(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[costs]\nc_minus = 0.25\nc_plus = 10\n")
    assert main(["decide", "--config", str(cfg)]) == 0
    assert "minimize_q_subject_to_recall" in capsys.readouterr().out


def test_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    knee = [line for line in lines[1:] if ",true," in line]
    assert knee and all(line.split(",")[1] == "0.2" for line in knee)


def test_sweep_json_matches_csv(tmp_path):
    c, j = tmp_path / "s.csv", tmp_path / "s.json"
    assert main(["sweep", "--output", str(c), "--no-envelope"]) == 0
    assert main(["sweep", "--output", str(j), "--format", "json", "--no-envelope"]) == 0
    rows = json.loads(j.read_text())
    lines = c.read_text().splitlines()[1:]
    assert len(rows) == len(lines)
    assert list(rows[0]) == list(SWEEP_COLUMNS)
    first = lines[0].split(",")
    assert float(first[5]) == pytest.approx(rows[0]["q"], rel=1e-11)
    assert any(r["q"] is None for r in rows)


def test_render_formats():
    rows = [{"a": 0.1 + 0.2, "b": None, "c": True, "d": "x,y"}]
    assert render(rows, "abcd", "csv") == 'a,b,c,d\n0.3,,true,"x,y"\n'
    assert render(rows, "abcd", "json") == '[\n  {"a": 0.30000000000000004, "b": null, "c": true, "d": "x,y"}\n]\n'
    assert render([], "ab", "json") == "[\n]\n"


def test_validation_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[ensemble]\nwat = 1\n")
    assert main(["decide", "--config", str(bad)]) == 2
    assert "wat" in capsys.readouterr().err
    assert main(["decide", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["verify-bounds", "--instances", "0"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["decide", "--format", "xml"])
    assert info.value.code == 2


def test_verify_bounds_ok(small_cfg, capsys):
    assert main(["verify-bounds", "--config", small_cfg, "--seed", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "bound,checked,violations,tight,min_rel_slack,gated"
    assert all(line.split(",")[2] == "0" for line in out[1:])


def test_verify_theory_small(small_cfg, tmp_path):
    out = tmp_path / "t.json"
    code = main(["verify-theory", "--config", small_cfg, "--format", "json", "--output", str(out)])
    rows = json.loads(out.read_text())
    gated = [r for r in rows if r["gated"]]
    assert {r["experiment"] for r in gated} == {"risk_exact", "reach_dense", "ged_decoupled"}
    assert code == (0 if all(r["passed"] for r in gated) else 3)


@pytest.mark.parametrize("cmd", ["verify-bounds", "verify-theory", "sweep", "decide"])
def test_byte_identical_across_workers(small_cfg, tmp_path, cmd):
    outs = []
    for workers in ("1", "4", "1"):
        out = tmp_path / f"{cmd}-{workers}-{len(outs)}.txt"
        main([cmd, "--config", small_cfg, "--workers", workers, "--output", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_env_workers_override(small_cfg, tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["verify-theory", "--config", small_cfg, "--output", str(a)])
    monkeypatch.setenv("REACHGED_WORKERS", "3")
    main(["verify-theory", "--config", small_cfg, "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "reachged.cli", "decide", "--slope-variant", "raw_pF"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("s=-0.775")


def test_verify_theory_failure_exit(small_cfg, monkeypatch, capsys):
    from reachged import cli
    monkeypatch.setattr(cli, "Z_LIMIT", 0.0)
    assert main(["verify-theory", "--config", small_cfg, "--seed", "77"]) == 3
    assert "--seed 77" in capsys.readouterr().err


def test_verify_bounds_failure_prints_reproducer(small_cfg, monkeypatch, capsys):
    from reachged import bounds, cli
    real = bounds.run_battery

    def broken(*args, **kwargs):
        res = real(*args, **kwargs)
        res.violations.append({"seed": 5, "index": 2, "bound": "triangle"})
        return res

    monkeypatch.setattr(cli.bounds, "run_battery", broken)
    assert main(["verify-bounds", "--config", small_cfg, "--seed", "5"]) == 3
    err = capsys.readouterr().err
    assert '"index": 2' in err and "--seed 5" in err
