import re
import subprocess
import sys

import numpy as np
import pytest

from felix import make_er, write_edgelist
from felix.cli import (
    EXIT_INVALID,
    EXIT_IO,
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    EXIT_UNKNOWN_KIND,
    EXIT_USAGE,
    main,
)
from felix.experiments.config import ConfigError, UnknownKind, format_config, parse_config, resolve
from felix.experiments.output import Table, format_csv, read_csv

SMALL_PD = """\
experiment.kind = cg_pd
experiment.seed = 3
experiment.replicates = 3
experiment.require_convergence = false
graph.n = 6
game.c = 1.0
init.kind = uniform
dynamics.lam = 0.05
dynamics.max_steps = 400
"""

SMALL_TOC = """\
experiment.kind = toc_sweep
toc.n = 20
toc.n_c = 6
toc.q_points = 5
toc.numeric = true
"""


@pytest.fixture
def write(tmp_path):
    def _write(text, name="run.cfg"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


# -- parsing ---------------------------------------------------------------------


def test_parse_values_and_comments():
    raw = parse_config('# top\na.b = 1\na.c = 2.5 \na.d = true\na.e = "x y"\na.f = word\na.g = [1, 2.5]\n\n')
    assert raw == {"a.b": 1, "a.c": 2.5, "a.d": True, "a.e": "x y", "a.f": "word", "a.g": [1, 2.5]}


@pytest.mark.parametrize("text", ["nodot = 1\n", "a.b 1\n", "a.b = 1\na.b = 2\n", "a.b = two words\n", "a.b = [1,\n"])
def test_parse_rejects_malformed_lines(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_resolve_rejects_unknown_and_misplaced_keys():
    with pytest.raises(ConfigError, match="unknown key"):
        resolve({"experiment.kind": "cg_pd", "graph.size": 3})
    with pytest.raises(ConfigError, match="not used"):
        resolve({"experiment.kind": "toc_sweep", "graph.n": 3})
    with pytest.raises(UnknownKind):
        resolve({"experiment.kind": "lattice_pd"})
    with pytest.raises(ConfigError, match="type int"):
        resolve({"experiment.kind": "cg_pd", "graph.n": 6.5})
    with pytest.raises(ConfigError, match="one of"):
        resolve({"experiment.kind": "cg_pd", "dynamics.rule": "euler"})
    with pytest.raises(ConfigError):
        resolve({"experiment.kind": "er_dynamics", "graph.kind": "erdos_renyi", "graph.n": 10, "graph.mean_degree": 10})


def test_resolved_config_round_trips_through_text():
    cfg = resolve(parse_config(SMALL_PD))
    again = resolve({k: v for k, v in parse_config(format_config(cfg)).items()})
    assert again == cfg
    assert cfg["dynamics.rule"] == "ascent" and cfg["graph.kind"] == "complete"


# -- CSV ---------------------------------------------------------------------------


def test_csv_header_units_and_float_format(tmp_path):
    t = Table(["t", "x", "ok"], ["step", "payoff", "-"], [[0, 0.1, True], [1, 1 / 3, False]])
    text = format_csv(t)
    assert text.splitlines()[0] == "# t [step],x [payoff],ok [-]"
    assert text.splitlines()[1] == "0,0.10000000000000001,1"
    assert float(text.splitlines()[2].split(",")[1]) == 1 / 3
    path = tmp_path / "t.csv"
    path.write_text(text)
    cols, rows = read_csv(path)
    assert cols == ["t", "x", "ok"] and len(rows) == 2


def test_table_needs_a_unit_per_column():
    with pytest.raises(ValueError):
        Table(["a", "b"], ["-"])


# -- command line --------------------------------------------------------------


def test_help_documents_exit_codes(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    for code in (EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_UNKNOWN_KIND, EXIT_IO, EXIT_NO_CONVERGENCE):
        assert re.search(rf"^\s+{code}\s+\w", out, re.M)
    assert "FELIX_THREADS" in out


def test_validate_prints_resolved_config(write, capsys):
    assert main(["validate", "--config", write(SMALL_PD)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "dynamics.rule = \"ascent\"" in out and "graph.n = 6" in out


def test_exit_codes(write, tmp_path, monkeypatch, capsys):
    out = str(tmp_path / "o")
    assert main(["dynamics", "--config", str(tmp_path / "missing.cfg"), "--out", out]) == EXIT_IO
    assert main(["dynamics", "--config", write("experiment.kind = cg_pd\nbogus.key = 1\n"), "--out", out]) == EXIT_INVALID
    assert main(["dynamics", "--config", write("experiment.kind = lattice\n"), "--out", out]) == EXIT_UNKNOWN_KIND
    assert main(["toc", "--config", write(SMALL_PD), "--out", out]) == EXIT_INVALID
    assert main(["dynamics", "--bogus"]) == EXIT_USAGE
    monkeypatch.setenv("FELIX_THREADS", "zero")
    assert main(["dynamics", "--config", write(SMALL_PD), "--out", out]) == EXIT_USAGE
    monkeypatch.setenv("FELIX_THREADS", "1")
    relaxed = SMALL_PD.replace("max_steps = 400", "max_steps = 2")
    assert main(["dynamics", "--config", write(relaxed), "--out", out, "--quiet"]) == EXIT_OK
    strict = relaxed.replace("require_convergence = false", "require_convergence = true")
    assert main(["dynamics", "--config", write(strict), "--out", out, "--quiet"]) == EXIT_NO_CONVERGENCE
    assert (tmp_path / "o" / "manifest.cfg").exists()
    capsys.readouterr()


def test_out_directory_that_is_a_file_is_an_io_error(write, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["toc", "--config", write(SMALL_TOC), "--out", str(blocker), "--quiet"]) == EXIT_IO


def test_overrides_reach_the_manifest(write, tmp_path):
    out = tmp_path / "o"
    argv = ["dynamics", "--config", write(SMALL_PD), "--out", str(out), "--seed", "9", "--replicates", "2", "--quiet"]
    assert main(argv) == EXIT_OK
    manifest = parse_config((out / "manifest.cfg").read_text())
    assert manifest["experiment.seed"] == 9 and manifest["experiment.replicates"] == 2
    assert manifest["manifest.version"]


def test_graph_file_flag(write, tmp_path):
    g = make_er(12, 3, 1)
    path = tmp_path / "g.txt"
    write_edgelist(g, path)
    cfg = SMALL_PD.replace("cg_pd", "er_dynamics").replace("graph.n = 6\n", "")
    out = tmp_path / "o"
    assert main(["dynamics", "--config", write(cfg), "--graph-file", str(path), "--out", str(out), "--quiet"]) == EXIT_OK
    cols, rows = read_csv(out / "runs.csv")
    rec = dict(zip(cols, rows[0]))
    assert int(rec["n"]) == 12 and int(rec["edges"]) == g.num_edges
    missing = tmp_path / "nope.txt"
    assert main(["dynamics", "--config", write(cfg), "--graph-file", str(missing), "--out", str(out)]) == EXIT_IO


def _run_and_read(argv, out):
    assert main(argv + ["--out", str(out), "--quiet"]) in (EXIT_OK, EXIT_NO_CONVERGENCE)
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


@pytest.mark.parametrize("command,text", [("dynamics", SMALL_PD), ("toc", SMALL_TOC)])
def test_manifest_rerun_is_byte_identical(command, text, write, tmp_path, monkeypatch):
    monkeypatch.setenv("FELIX_THREADS", "1")
    first = _run_and_read([command, "--config", write(text)], tmp_path / "a")
    monkeypatch.setenv("FELIX_THREADS", "2")
    second = _run_and_read([command, "--config", str(tmp_path / "a" / "manifest.cfg")], tmp_path / "b")
    assert first == second


def test_sweep_appends_the_swept_value(write, tmp_path, monkeypatch):
    monkeypatch.setenv("FELIX_THREADS", "1")
    text = SMALL_PD + "sweep.key = game.c\nsweep.values = [0.5, 1.5]\n"
    assert main(["dynamics", "--config", write(text), "--out", str(tmp_path / "x")]) == EXIT_INVALID
    assert main(["sweep", "--config", write(text), "--out", str(tmp_path / "o"), "--quiet"]) == EXIT_OK
    cols, rows = read_csv(tmp_path / "o" / "runs.csv")
    assert cols[0] == "sweep_value"
    assert sorted({r[0] for r in rows}) == ["0.5", "1.5"]
    assert main(["sweep", "--config", write(SMALL_PD), "--out", str(tmp_path / "y")]) == EXIT_INVALID


def test_summary_file_matches_trajectory(write, tmp_path):
    out = tmp_path / "o"
    text = SMALL_PD + "output.stride = 1\n"
    assert main(["dynamics", "--config", write(text), "--out", str(out), "--quiet"]) == EXIT_OK
    tcols, trows = read_csv(out / "trajectory.csv")
    scols, srows = read_csv(out / "summary.csv")
    traj = [dict(zip(tcols, r)) for r in trows]
    summ = {(r[scols.index("replicate")], r[scols.index("t")]): dict(zip(scols, r)) for r in srows}
    for (rep, t), row in summ.items():
        nodes = [x for x in traj if x["replicate"] == rep and x["t"] == t]
        pi = np.array([float(x["pi"]) for x in nodes])
        assert float(row["mean_pi"]) == pi.mean()
        assert float(row["std_pi"]) == pi.std()


def test_module_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "felix", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("felix ")
