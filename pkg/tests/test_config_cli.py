"""Configuration parsing and the command-line front end."""

import hashlib
import json
import math

import numpy as np
import pytest

from porolab.cli import entry
from porolab.config import load_config
from porolab.elliptic import build_grid, write_gridfunction_csv, GridFunction
from porolab.errors import ConfigError

MINIMAL = """
[series]
kind = log
"""

FULL = """
[domain]
dim = 2
x0 = 0.0
x1 = 2.0
y0 = -1.0
y1 = 1.0
n_cells = 16
n_cells_y = 12

[coeff]
kind = linear-ramp
base = 1.5
slope_x = 0.25
slope_y = 0.5

[data]
kind = bump
center_x = 1.0
center_y = 0.0
width = 0.3
amplitude = 2.0
lambda_scale = 4.0

[series]
kind = geometric
ratio = 0.5
m_max = 64

[solver]
tol_linear = 1e-11
tol_eig = 1e-9
jacobi = yes

[run]
n_schedule = 1 2 4 8
stop_tol = 1e-7
m = 1.5
"""


def _write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def test_minimal_config_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, MINIMAL))
    assert cfg.dim == 1
    assert cfg.n_cells == 128
    assert cfg.series_kind == "log"
    assert cfg.lambda_scale == 1.0
    assert cfg.stop_tol == 1e-8
    assert cfg.n_schedule[0] == 1 and cfg.n_schedule[-1] == 1024
    assert cfg.tolerances.tol_linear == 1e-12
    assert len(cfg.config_hash) == 64


def test_full_config_values(tmp_path):
    cfg = load_config(_write(tmp_path, FULL))
    assert cfg.dim == 2
    assert (cfg.x0, cfg.x1, cfg.y0, cfg.y1) == (0.0, 2.0, -1.0, 1.0)
    assert (cfg.n_cells, cfg.n_cells_y) == (16, 12)
    assert cfg.coeff_kind == "linear-ramp"
    assert cfg.f_kind == "bump"
    assert cfg.lambda_scale == 4.0
    assert cfg.series_ratio == 0.5
    assert cfg.tolerances.tol_linear == 1e-11
    assert cfg.tolerances.m_max == 64
    assert cfg.jacobi is True
    assert cfg.n_schedule == (1, 2, 4, 8)
    assert cfg.tail_M == 1.5


def test_config_hash_is_sha256_of_bytes(tmp_path):
    path = _write(tmp_path, MINIMAL)
    cfg = load_config(path)
    digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
    assert cfg.config_hash == digest


def test_config_builds_runtime_objects(tmp_path):
    cfg = load_config(_write(tmp_path, FULL))
    p = cfg.problem()
    assert p.grid.dim == 2
    assert p.lambda_scale == 4.0
    # bump datum peaks at the configured center with the configured amplitude
    j = np.argmin(np.abs(p.grid.ys - 0.0))
    i = np.argmin(np.abs(p.grid.xs - 1.0))
    assert p.f.values[j, i] == pytest.approx(2.0, rel=1e-12)
    seq = cfg.sequence()
    assert seq.kind == "geometric"


def test_bump_profile_formula(tmp_path):
    text = MINIMAL + "\n[data]\nkind = bump\ncenter_x = 0.5\nwidth = 0.2\namplitude = 3.0\n"
    cfg = load_config(_write(tmp_path, text))
    f = cfg.problem().f
    xs = cfg.grid().xs
    expect = 3.0 * np.exp(-((xs - 0.5) ** 2) / (2 * 0.2**2))
    np.testing.assert_allclose(f.values, expect, rtol=1e-12)


def test_file_datum_resolved_relative_to_config(tmp_path):
    g = build_grid(1, n_cells=16)
    u = GridFunction(grid=g, values=np.linspace(0, 1, g.n_nodes))
    write_gridfunction_csv(u, str(tmp_path / "f.csv"))
    text = "[domain]\nn_cells = 16\n\n[series]\nkind = harmonic\n\n[data]\nkind = file\npath = f.csv\n"
    cfg = load_config(_write(tmp_path, text))
    f = cfg.problem().f
    np.testing.assert_allclose(f.values, u.values)


def test_series_tol_precedence(tmp_path):
    # series.tol applies unless solver.tol_series overrides it
    only_series = MINIMAL + "tol = 1e-6\n"
    cfg = load_config(_write(tmp_path, only_series))
    assert cfg.tolerances.tol_series == 1e-6
    both = only_series + "\n[solver]\ntol_series = 1e-5\n"
    cfg = load_config(_write(tmp_path, both, name="b.ini"))
    assert cfg.tolerances.tol_series == 1e-5


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[nosuch]\nx = 1\n", "unknown section"),
        ("[series]\nkind = log\ncolor = red\n", "series.color"),
        ("[series]\nkind = fibonacci\n", "series.kind"),
        ("[series]\n", "series.kind is required"),
        (MINIMAL + "\n[domain]\ndim = 3\n", "domain.dim"),
        (MINIMAL + "\n[domain]\nn_cells = many\n", "domain.n_cells"),
        (MINIMAL + "\n[domain]\nn_cells = 2\n", "at least 4"),
        (MINIMAL + "\n[data]\nlambda_scale = -2\n", "data.lambda_scale"),
        (MINIMAL + "\n[data]\nvalue = -1\n", "data.value"),
        (MINIMAL + "\n[data]\nkind = file\n", "data.path"),
        (MINIMAL + "\n[run]\nn_schedule = 4 2\n", "n_schedule"),
        (MINIMAL + "\n[run]\nstop_tol = 0\n", "run.stop_tol"),
        (MINIMAL + "\n[solver]\njacobi = maybe\n", "solver.jacobi"),
        (MINIMAL + "\n[solver]\ntol_linear = -1e-9\n", "solver.tol_linear"),
    ],
)
def test_config_errors_name_the_key(tmp_path, text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        load_config(_write(tmp_path, text))


def test_missing_file_datum_rejected(tmp_path):
    text = MINIMAL + "\n[data]\nkind = file\npath = nowhere.csv\n"
    with pytest.raises(ConfigError, match="does not exist"):
        load_config(_write(tmp_path, text))


def test_missing_config_file():
    with pytest.raises(ConfigError, match="not found"):
        load_config("/no/such/config.ini")


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

ANALYZE_INI = """
[domain]
n_cells = 64

[data]
lambda_scale = 10.0

[series]
kind = log
"""

SOLVE_INI = """
[domain]
n_cells = 64

[data]
value = 2.0

[series]
kind = harmonic

[run]
n_schedule = 1 2 4 8 16 32 64
"""

FLAT_INI = """
[domain]
n_cells = 64

[data]
value = 32.0

[series]
kind = log
"""


def test_cli_analyze_stdout(tmp_path, capsys):
    cfgfile = _write(tmp_path, ANALYZE_INI)
    assert entry(["analyze", "--config", cfgfile]) == 0
    out = capsys.readouterr().out
    assert "verdict: ExistsCertified" in out
    assert "lambda_exist=" in out and "lambda_nonexist=" in out
    body = "\n".join(l for l in out.splitlines() if not l.startswith(("verdict", "bracket", "half", "#")))
    report = json.loads(body)
    assert report["verdict"] == "ExistsCertified"
    assert report["K_value"] == pytest.approx(2.0, abs=1e-7)


def test_cli_analyze_json_is_deterministic(tmp_path, capsys):
    cfgfile = _write(tmp_path, ANALYZE_INI)
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    assert entry(["analyze", "--config", cfgfile, "--out", str(out1)]) == 0
    assert entry(["analyze", "--config", cfgfile, "--out", str(out2)]) == 0
    capsys.readouterr()
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    cfg = load_config(cfgfile)
    assert b1.decode().splitlines()[0] == f"# porolab 0.1.0 config-sha256={cfg.config_hash}"


def test_cli_solve_writes_solution(tmp_path, capsys):
    cfgfile = _write(tmp_path, SOLVE_INI)
    out = tmp_path / "u.csv"
    assert entry(["solve", "--config", cfgfile, "--n", "64", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "converged" in text
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# porolab")
    assert lines[1] == "x,value"
    data = np.array([[float(t) for t in l.split(",")] for l in lines[2:]])
    x = data[:, 0]
    exact = -np.expm1(-x * (1 - x))
    assert np.max(np.abs(data[:, 1] - exact)) <= 1e-6


def test_cli_sweep_csv(tmp_path, capsys):
    cfgfile = _write(tmp_path, ANALYZE_INI)
    out = tmp_path / "s.csv"
    code = entry(
        ["sweep", "--config", cfgfile, "--lambda-min", "8", "--lambda-max", "20",
         "--steps", "4", "--out", str(out)]
    )
    assert code == 0
    assert "bracket:" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    assert lines[1] == "lambda,verdict"
    rows = [l.split(",") for l in lines[2:]]
    assert len(rows) == 4
    assert rows[0][1] == "ExistsCertified"
    assert rows[-1][1] == "NonexistenceProven"


def test_cli_flatzone_ok(tmp_path, capsys):
    cfgfile = _write(tmp_path, FLAT_INI)
    out = tmp_path / "zone.csv"
    assert entry(["flatzone", "--config", cfgfile, "--n-max", "200", "--out", str(out)]) == 0
    assert "flat zone: OK" in capsys.readouterr().out
    mask_lines = out.read_text().splitlines()
    assert mask_lines[1] == "x,value"
    summary = json.loads(
        "\n".join(l for l in (tmp_path / "zone.json").read_text().splitlines() if not l.startswith("#"))
    )
    assert summary["status"] == "OK"
    assert abs(summary["measure"] - math.sqrt(2) / 2) <= 2 / 64
    assert summary["n_large"] == 200


def test_cli_flatzone_not_applicable(tmp_path, capsys):
    cfgfile = _write(tmp_path, SOLVE_INI)
    out = tmp_path / "zone.csv"
    assert entry(["flatzone", "--config", cfgfile, "--n-max", "10", "--out", str(out)]) == 0
    assert "NotApplicable" in capsys.readouterr().out
    summary = json.loads(
        "\n".join(l for l in (tmp_path / "zone.json").read_text().splitlines() if not l.startswith("#"))
    )
    assert summary["status"] == "NotApplicable"
    # mask CSV still written, all zeros
    data = [l for l in out.read_text().splitlines()[2:]]
    assert all(float(l.split(",")[1]) == 0.0 for l in data)


def test_cli_exit_codes(tmp_path, capsys):
    # 1: configuration problems, including usage errors
    assert entry(["analyze", "--config", "/no/such.ini"]) == 1
    assert entry(["analyze"]) == 1
    assert entry([]) == 1
    cfgfile = _write(tmp_path, ANALYZE_INI)
    assert entry(
        ["sweep", "--config", cfgfile, "--lambda-min", "5", "--lambda-max", "1",
         "--steps", "3", "--out", str(tmp_path / "x.csv")]
    ) == 1
    err = capsys.readouterr().err
    assert "error (config)" in err

    # 3: invalid sequence
    bad = _write(tmp_path, "[series]\nkind = custom\nvalues = 0, 1\n", name="bad.ini")
    assert entry(["analyze", "--config", bad]) == 3
    assert "error (series)" in capsys.readouterr().err

    # 2: solver failure (iteration cap of 1)
    slow = _write(
        tmp_path,
        ANALYZE_INI + "\n[solver]\nmax_linear_iter = 1\n",
        name="slow.ini",
    )
    assert entry(["analyze", "--config", slow]) == 2
    assert "error (solver)" in capsys.readouterr().err


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        entry(["--version"])
    assert exc.value.code == 0
    assert "porolab 0.1.0" in capsys.readouterr().out
