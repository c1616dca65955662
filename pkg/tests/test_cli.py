import json
import subprocess
import sys

import pytest

from threatsim.cli import CliError, _DEFAULTS, dispatch, main, resolve_config


def run_cli(tmp_path, command, **kw):
    flags = dict(_DEFAULTS)
    flags.update(kw)
    if flags.get("out") is None:
        flags["out"] = str(tmp_path / f"{command}.csv")
    cfg = resolve_config(_DEFAULTS, None, flags)
    return dispatch(command, cfg)


def read_lines(path):
    with open(path) as fh:
        return fh.read().splitlines()


# ---------------------------------------------------------------------------
# config resolution


def test_flag_overrides_default():
    cfg = resolve_config(_DEFAULTS, None, {"variant": "pdc", "q": "3"})
    assert cfg["q"] == 3.0 and cfg["T"] == 2.0


def test_file_then_flag_precedence(tmp_path):
    cfile = tmp_path / "c.json"
    cfile.write_text(json.dumps({"variant": "threat3", "beta": 1.0, "q": 2.5}))
    cfg = resolve_config(_DEFAULTS, str(cfile), {"beta": 5.0})
    assert cfg["beta"] == 5.0  # flag wins
    assert cfg["q"] == 2.5  # file wins over default
    assert cfg["variant"] == "threat3"


def test_unknown_config_key_rejected(tmp_path):
    cfile = tmp_path / "c.json"
    cfile.write_text(json.dumps({"variant": "pdc", "qq": 1}))
    with pytest.raises(CliError, match="unknown config key: qq"):
        resolve_config(_DEFAULTS, str(cfile), {})


def test_invalid_variant_lists_choices():
    with pytest.raises(CliError, match="pdc, threat3, threat4"):
        resolve_config(_DEFAULTS, None, {"variant": "threat9"})


def test_variant_required():
    with pytest.raises(CliError, match="variant is required"):
        resolve_config(_DEFAULTS, None, {})


def test_axis_syntax_only_for_sweep(tmp_path):
    with pytest.raises(CliError, match="only valid for the sweep"):
        run_cli(tmp_path, "phase", variant="pdc", q="0:5:1", grid=5)


# ---------------------------------------------------------------------------
# command outputs


def test_phase_grid_50_row_count(tmp_path):
    out = run_cli(tmp_path, "phase", variant="threat3", grid=50)
    lines = read_lines(out)
    assert lines[0].startswith("# threatsim")
    assert lines[1].split(",")[:3] == ["x_PT", "x_D", "x_DT"]
    assert len(lines) == 2 + 1326


def test_phase_threat4_has_face_column(tmp_path):
    out = run_cli(tmp_path, "phase", variant="threat4", grid=6)
    lines = read_lines(out)
    assert lines[1].split(",")[-1] == "face"
    assert len(lines) == 2 + 4 * 28


def test_restpoints_contains_half_punishers(tmp_path):
    out = run_cli(tmp_path, "restpoints", variant="pdc", grid=12)
    lines = read_lines(out)
    header = lines[1].split(",")
    assert header[:3] == ["x_P", "x_D", "x_C"]
    closed = [ln for ln in lines[2:] if ",closed-form," in ln]
    assert any(ln.startswith("0.5,0.5,0,") for ln in closed)
    assert any(",numeric," in ln for ln in lines[2:])


def test_trajectory_output(tmp_path):
    out = run_cli(tmp_path, "trajectory", variant="threat3", x0="0.1,0.1,0.8",
                  dt=0.02, steps=50)
    lines = read_lines(out)
    assert lines[1] == "t,x_PT,x_D,x_DT"
    assert len(lines) == 2 + 51
    assert lines[2].startswith("0,0.1,0.1,0.8")


def test_trajectory_requires_x0(tmp_path):
    with pytest.raises(CliError, match="x0"):
        run_cli(tmp_path, "trajectory", variant="threat3")


def test_abm_timeseries_format_and_determinism(tmp_path):
    out_a = run_cli(tmp_path, "abm", variant="threat4", gens=300, window=100,
                    runs=2, seed=7, out=str(tmp_path / "a.csv"))
    out_b = run_cli(tmp_path, "abm", variant="threat4", gens=300, window=100,
                    runs=2, seed=7, out=str(tmp_path / "b.csv"))
    bytes_a = open(out_a, "rb").read()
    bytes_b = open(out_b, "rb").read()
    assert bytes_a == bytes_b
    lines = read_lines(out_a)
    assert lines[1] == "run,generation,n_PT,n_D,n_DT,n_C,coop_strategy_freq,coop_act_freq,welfare"
    assert len(lines) == 2 + 2 * 300


def test_sweep_csv_axis_and_ratio_columns(tmp_path):
    out = run_cli(tmp_path, "sweep", variant="threat4", q="0:2:1", runs=2,
                  gens=100, window=50, N=30)
    lines = read_lines(out)
    header = lines[1].split(",")
    assert header[0] == "q" and header[1] == "q_over_p" and header[2] == "runs"
    assert "mean_coop_strategy_freq" in header and "std_welfare" in header
    assert len(lines) == 2 + 3
    first = lines[2].split(",")
    assert first[0] == "0" and first[1] == "0"  # q=0, q/p=0


def test_oracle_csv(tmp_path):
    out = run_cli(tmp_path, "oracle", variant="threat3", x0="8,6,6", runs=200, seed=3)
    lines = read_lines(out)
    assert lines[1] == "strategy,count,mean_payoff,std_error,analytic_paper,analytic_corrected"
    assert len(lines) == 2 + 3
    d_row = lines[3].split(",")
    assert d_row[0] == "D" and d_row[2] == d_row[4]


def test_oracle_requires_integer_counts(tmp_path):
    with pytest.raises(CliError, match="integer"):
        run_cli(tmp_path, "oracle", variant="threat3", x0="0.5,0.3,0.2")


def test_sidecar_roundtrip_reproduces_output(tmp_path):
    out_a = run_cli(tmp_path, "phase", variant="pdc", grid=10,
                    out=str(tmp_path / "a.csv"))
    sidecar = out_a + ".meta.json"
    meta = json.loads(open(sidecar).read())
    assert meta["command"] == "phase" and meta["variant"] == "pdc"
    cfg = resolve_config(_DEFAULTS, sidecar, {"out": str(tmp_path / "b.csv")})
    out_b = dispatch("phase", cfg)
    assert open(out_a, "rb").read() == open(out_b, "rb").read()


def test_main_error_path_is_single_line(tmp_path, capsys):
    rc = main(["phase", "--variant", "pdc", "--config", str(tmp_path / "nope.json")])
    assert rc == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and err.count("\n") == 1


def test_cli_subprocess_smoke(tmp_path):
    out = tmp_path / "phase.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "threatsim", "phase", "--variant", "threat3",
         "--grid", "8", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
    proc = subprocess.run(
        [sys.executable, "-m", "threatsim", "phase", "--variant", "bogus"],
        capture_output=True, text=True,
    )
    assert proc.returncode != 0
