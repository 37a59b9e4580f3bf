import csv
import io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from kinkstatics import UsageError, __version__
from kinkstatics import cli


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_valid():
    cfg = cli.parse_args("relax --model phi4 --pair ka --r-start 4 --r-end 1.5".split(), environ={})
    assert (cfg.command, cfg.model, cfg.pair, cfg.r_start, cfg.r_end) == ("relax", "phi4", "ka", 4.0, 1.5)


@pytest.mark.parametrize("argv,needle", [
    ("relax --model phi4 --pair kk", "pair = kk requires model = sine-gordon"),
    ("exact --q-max 0.9", "q_max"),
    ("exact --dq 0", "dq"),
    ("relax --dr -1", "dr"),
    ("exact --bogus 1", "unrecognized"),
    ("modes --n-modes 0", "n_modes"),
])
def test_invalid_configs_exit_2(argv, needle, capsys):
    code, out, err = _run(argv.split(), capsys)
    assert code == 2 and out == ""
    assert needle in err


def test_missing_command_is_usage_error():
    with pytest.raises(UsageError):
        cli.parse_args([], environ={})


def test_config_file_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# comment\nmodel = sine-gordon\npair = kk\nr-start = 5   # trailing\n\ndr = 0.01\n")
    cfg = cli.parse_args(["relax", "--config", str(conf), "--r-start", "4.5"], environ={})
    assert (cfg.model, cfg.pair, cfg.r_start, cfg.dr) == ("sine-gordon", "kk", 4.5, 0.01)
    # the environment variable names a default config file
    cfg = cli.parse_args(["relax"], environ={cli.CONFIG_ENV: str(conf)})
    assert cfg.r_start == 5.0 and cfg.pair == "kk"
    # an explicit --config wins over the environment
    other = tmp_path / "other.conf"
    other.write_text("model = phi4\n")
    cfg = cli.parse_args(["relax", "--config", str(other)], environ={cli.CONFIG_ENV: str(conf)})
    assert cfg.model == "phi4" and cfg.r_start is None


@pytest.mark.parametrize("text", ["nonsense line\n", "colour = red\n", "dr = fast\n"])
def test_bad_config_file(tmp_path, text):
    conf = tmp_path / "bad.conf"
    conf.write_text(text)
    with pytest.raises(UsageError):
        cli.parse_args(["relax", "--config", str(conf)], environ={})


def test_missing_config_file(tmp_path):
    with pytest.raises(UsageError):
        cli.read_config_file(str(tmp_path / "absent.conf"))


@settings(max_examples=30)
@given(st.floats(-2, 2), st.floats(0.01, 1.0))
def test_frange_hits_endpoint(start, step):
    stop = start + 7 * step
    vals = cli._frange(start, stop, step)
    assert len(vals) == 8 and vals[-1] == stop and vals[0] == start


def test_exact_single_row(capsys):
    code, out, _ = _run("exact --model phi4 --q-min 0 --q-max 0 --dq 1".split(), capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == list(cli.HEADERS["exact"])
    assert len(rows) == 2
    assert float(rows[1][1]) == pytest.approx(4.0 / 3.0, abs=1e-15)
    assert rows[1][1] == format(4.0 / 3.0, ".17g")


def test_asymptotic_single_row(capsys):
    argv = "asymptotic --model sine-gordon --pair kk --r-start 3 --r-end 3 --dr 1".split()
    code, out, _ = _run(argv, capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["r", "A", "B", "E_eq22", "E_ode"] and len(rows) == 2
    assert float(rows[1][3]) - 16.0 == pytest.approx(32 * math.exp(-6), rel=1e-9)
    assert rows[1][4] == rows[1][3]


def test_asymptotic_sweep(capsys):
    code, out, _ = _run("asymptotic --model phi4 --r-start 4 --r-end 3 --dr 0.25".split(), capsys)
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert code == 0 and [float(r[0]) for r in rows] == [4.0, 3.75, 3.5, 3.25, 3.0]
    assert rows[0][4] == rows[0][3]
    assert all(float(r[4]) < 8.0 / 3.0 for r in rows)


def test_modes_default_lists_bound_states(capsys):

    def lines(model):
        code, out, _ = _run(["modes", "--model", model], capsys)
        assert code == 0
        return list(csv.reader(io.StringIO(out)))

    rows = lines("phi4")
    assert rows[0] == ["index", "eigenvalue"] and len(rows) == 3
    assert abs(float(rows[1][1])) < 1e-3 and float(rows[2][1]) == pytest.approx(3.0, abs=1e-3)
    assert len(lines("sine-gordon")) == 2


def test_relax_csv_and_json(tmp_path, capsys):
    base = "relax --model phi4 --r-start 3 --r-end 2.9".split()
    code, out, _ = _run(base, capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == list(cli.HEADERS["relax"]) and len(rows) == 22
    path = tmp_path / "out.json"
    assert cli.main(base + ["--format", "json", "--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert doc["meta"]["version"] == __version__
    assert doc["meta"]["model"] == "phi4" and doc["meta"]["pair"] == "ka"
    assert doc["meta"]["grid"][1] == 0.0 and doc["meta"]["stopped"] is None
    assert len(doc["records"]) == 21
    assert list(doc["records"][0]) == list(cli.HEADERS["relax"])


def test_undefined_distance_serialisation():
    cfg = cli.RunConfig(command="relax").validate()
    row = (1.0, 2.0, 3.0, 4.0, 5.0, None)
    assert cli.render(cfg, [row], {}).splitlines()[1].endswith(",")
    cfg.format = "json"
    doc = json.loads(cli.render(cfg, [row, (1.0, float("nan"), 0, 0, 0, 2.0)], {}))
    assert doc["records"][0]["natural_distance"] is None
    assert doc["records"][1]["E_full"] is None


def test_solver_usage_errors_exit_2(capsys):
    # a seed below 3/m is refused by the solver, not the parser
    code, _, err = _run("relax --model phi4 --r-start 1.0 --r-end 0.5".split(), capsys)
    assert code == 2 and "3/m" in err
    # a grid too short for the pair is a solver-level usage error
    code, _, err = _run("relax --model phi4 --r-start 3 --r-end 2 --x-min -5".split(), capsys)
    assert code == 2


def test_stepfailure_maps_to_exit_1(monkeypatch, capsys):
    from kinkstatics import StepFailure

    def boom(*a, **k):
        raise StepFailure("Newton did not converge", 2.0, 1.0)

    monkeypatch.setattr(cli, "solve_pair", boom)
    code, _, err = _run("relax --model phi4".split(), capsys)
    assert code == 1 and "relax failed" in err and "StepFailure" in err


def test_verify_exit_code(capsys):
    code, out, _ = _run(["verify", "--model", "phi4"], capsys)
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines()[:-1])


def test_deterministic_files(tmp_path):
    argv = "relax --model sine-gordon --pair kk --r-start 4 --r-end 3.5".split()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kinkstatics.cli", "exact", "--q-min", "0.1",
                           "--q-max", "0.1", "--dq", "1"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("q,E_closed")
