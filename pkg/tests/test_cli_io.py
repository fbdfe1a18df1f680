import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subradiance import cli, core, defaults
from subradiance.config import RunConfig, parse_config, parse_list
from subradiance.errors import ConfigError
from subradiance.experiments import CSV_COLUMNS, ComparisonRecord, SweepSpec, run_sweep
from subradiance.io import OutputError, StageTimer, read_csv, read_json, write_csv, write_json


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


# -- config ---------------------------------------------------------------------

def test_spectrum_flag_mapping():
    args = cli.build_parser().parse_args(["spectrum", "--n", "100", "--d", "0.25", "--gamma", "0", "--xi", "1"])
    cfg = cli.config_from_args(args)
    assert isinstance(cfg, RunConfig)
    assert (cfg.command, cfg.n, cfg.d, cfg.gamma, cfg.xi) == ("spectrum", (100,), (0.25,), (0.0,), (1,))
    assert cfg.eig_tol == defaults.EIG_TOL


def test_figure_dispatch_config():
    args = cli.build_parser().parse_args(["figure", "fig4", "--out", "results/"])
    cfg = cli.config_from_args(args)
    assert cfg.command == "figure" and cfg.figure == "fig4" and cfg.out == "results/"


def test_negative_gamma_in_file_names_key(tmp_path):
    path = _write(tmp_path, "[params]\nn = 10\ngamma = -0.1\n")
    with pytest.raises(ConfigError) as info:
        parse_config(path, {"command": "sweep"})
    assert info.value.key == "gamma"
    assert ">= 0" in info.value.accepted
    assert info.value.location == f"{path}:3"


def test_unknown_key_has_location(tmp_path):
    path = _write(tmp_path, "[run]\ncommand = sweep\n\n[params]\nn = 10\nspin = 2\n")
    with pytest.raises(ConfigError) as info:
        parse_config(path)
    assert info.value.key == "spin"
    assert info.value.location.endswith(":6")


@pytest.mark.parametrize("text,key", [
    ("[params]\nn = ten\n", "n"),
    ("[params]\nn = 10\nd = 0\n", "d"),
    ("[params]\nn = 10\nxi = 11\n", "xi"),
    ("[run]\neig_tol = 1e-3\n[params]\nn = 10\n", "eig_tol"),
    ("[run]\nworkers = 0\n[params]\nn = 10\n", "workers"),
    ("[run]\nformat = xml\n[params]\nn = 10\n", "format"),
    ("[params]\n", "n"),
    ("n = 10\n", "n"),
    ("[colors]\n", "colors"),
])
def test_config_errors(tmp_path, text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(_write(tmp_path, text), {"command": "sweep"})
    assert info.value.key == key


def test_flags_override_file(tmp_path):
    path = _write(tmp_path, "# comment\n[run]\ncommand = sweep\nworkers = 3\n[params]\nn = 20:30:5\nd = 0.02, 0.1\n")
    cfg = parse_config(path, {"d": "0.05", "workers": None})
    assert cfg.n == (20, 25, 30)
    assert cfg.d == (0.05,)
    assert cfg.workers == 3
    assert cfg.sources["d"] == "command line"


def test_workers_env_fallback(monkeypatch):
    monkeypatch.setenv("SUBRADIANCE_WORKERS", "4")
    assert parse_config(None, {"command": "verify"}).workers == 4
    assert parse_config(None, {"command": "verify", "workers": "2"}).workers == 2


def test_parse_list_ranges():
    assert parse_list("n", "20:200:5", int)[-1] == 200
    assert len(parse_list("n", "20:200:5", int)) == 37
    assert parse_list("d", "0.1:0.3:0.1") == (0.1, 0.2, 0.3)
    assert parse_list("n", "1, 5:7:1,9", int) == (1, 5, 6, 7, 9)
    with pytest.raises(ConfigError):
        parse_list("n", "5:1:1", int)
    with pytest.raises(ConfigError):
        parse_list("n", "1:2", int)


def test_help_states_defaults(capsys):
    with pytest.raises(SystemExit):
        cli.main(["spectrum", "--help"])
    out = capsys.readouterr().out
    for key in ("gamma", "d", "eig_tol"):
        assert key in out
    assert "0.1" in out and "0.02" in out and "1e-10" in out


# -- io ------------------------------------------------------------------------

def _records():
    return run_sweep(SweepSpec((12,), (0.02,), (0.1,), (1, 2)))


def test_one_record_csv_has_two_lines(tmp_path):
    path = write_csv(_records()[:1], tmp_path / "one.csv", CSV_COLUMNS)
    text = path.read_bytes().decode()
    assert "\r" not in text
    lines = text.splitlines()
    assert len(lines) == 2
    assert lines[0] == ",".join(CSV_COLUMNS)


def test_csv_round_trip_exact(tmp_path):
    recs = _records()
    path = write_csv(recs, tmp_path / "r.csv", CSV_COLUMNS)
    assert [ComparisonRecord.from_row(r) for r in read_csv(path)] == recs


def test_json_round_trip(tmp_path):
    recs = _records()
    path = write_json(recs, tmp_path / "r.json", CSV_COLUMNS)
    back = [ComparisonRecord.from_row(r) for r in read_json(path)]
    assert back == recs
    doc = json.loads(path.read_text())
    assert list(doc[0]) == list(CSV_COLUMNS)


@settings(max_examples=50)
@given(st.lists(st.floats(allow_infinity=False), min_size=1, max_size=5))
def test_json_round_trip_floats(tmp_path_factory, xs):
    path = tmp_path_factory.mktemp("j") / "x.json"
    rows = [{"v": x} for x in xs]
    back = read_json(write_json(rows, path))
    for a, b in zip(xs, back):
        assert (math.isnan(a) and math.isnan(b["v"])) or a == b["v"]


def test_write_failure_has_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError) as info:
        write_csv([], blocker / "sub" / "x.csv", ("a",))
    assert str(blocker) in str(info.value)


def test_stage_timer():
    t = StageTimer()
    with t.stage("a"):
        pass
    with t.stage("a"):
        pass
    assert set(t.stages) == {"a"} and t.stages["a"] >= 0


# -- commands ------------------------------------------------------------------

def test_spectrum_command(tmp_path, capsys):
    code = cli.main(["spectrum", "--n", "100", "--d", "0.25", "--gamma", "0", "--xi", "1",
                     "--out", str(tmp_path), "--eig-tol", "1e-9"])
    assert code == 0
    rows = read_csv(tmp_path / "spectrum.csv")
    assert float(rows[0]["Gamma_num"]) == pytest.approx(9.877371834882033e-06, rel=1e-8)
    manifest = json.loads((tmp_path / "run_manifest.json").read_text())
    assert manifest["config"]["eig_tol"] == 1e-9
    assert manifest["version"] and set(manifest["wall_clock_s"]) >= {"build", "solve", "write"}
    assert len(read_csv(tmp_path / "spectrum_modes.csv")) == 100


def test_sweep_command_deterministic_bytes(tmp_path):
    args = ["sweep", "--n", "20:30:5", "--d", "0.02", "--gamma", "0.1", "--xi", "1,2"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b"), "--workers", "2"]) == 0
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()
    assert len(a.decode().splitlines()) == 1 + 3 * 2
    manifest = json.loads((tmp_path / "a" / "run_manifest.json").read_text())
    assert manifest["config"]["eig_tol"] == defaults.EIG_TOL


def test_sweep_json_format(tmp_path):
    assert cli.main(["sweep", "--n", "10", "--d", "0.1", "--format", "json", "--out", str(tmp_path)]) == 0
    rows = read_json(tmp_path / "sweep.json")
    assert len(rows) == 1 and list(rows[0]) == list(CSV_COLUMNS)


def test_fit_command(tmp_path):
    assert cli.main(["sweep", "--n", "40:200:20", "--d", "0.25", "--gamma", "0",
                     "--out", str(tmp_path)]) == 0
    assert cli.main(["fit", str(tmp_path / "sweep.csv"), "--out", str(tmp_path / "fit")]) == 0
    (row,) = read_csv(tmp_path / "fit" / "fits.csv")
    assert float(row["slope"]) == pytest.approx(-3.0, abs=0.1)


def test_config_error_exit_code(tmp_path, capsys):
    path = _write(tmp_path, "[params]\ngamma = -0.1\n")
    assert cli.main(["sweep", "--n", "10", "--config", str(path)]) == 2
    assert "gamma" in capsys.readouterr().err


def test_missing_fit_input_exit_code(tmp_path):
    assert cli.main(["fit", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 2


def test_solver_error_exit_code(monkeypatch, tmp_path):
    from subradiance import spectrum
    from subradiance.errors import SolverError

    def broken(*a, **k):
        raise SolverError("forced")

    monkeypatch.setattr(spectrum, "eigendecompose", broken)
    monkeypatch.setattr("subradiance.experiments.sweep.eigendecompose", broken)
    assert cli.main(["spectrum", "--n", "5", "--out", str(tmp_path)]) == 3
    assert cli.main(["sweep", "--n", "5", "--out", str(tmp_path)]) == 3


def test_verify_command_passes(capsys):
    assert cli.main(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    for name in ("kernel_reciprocity", "angular_identity", "autocorrelation_oracle",
                 "alternating_series", "eigenvalue_sum_rule"):
        assert name in out


def test_verify_catches_kernel_sign_bug(monkeypatch, capsys):
    real = core.kernel_kfs

    def flipped(x):
        return real(x) * np.where(np.asarray(x) > 1.0, -1.0, 1.0)

    monkeypatch.setattr(core, "kernel_kfs", flipped)
    assert cli.main(["verify", "--quick"]) == 4
    captured = capsys.readouterr()
    assert "kernel_reciprocity" in captured.err
    assert "kernel_reciprocity       FAIL" in captured.out


def test_no_command_is_usage_error(capsys):
    assert cli.main([]) == 2
