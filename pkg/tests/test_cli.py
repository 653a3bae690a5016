import csv
import json

import numpy as np
import pytest

from ccaa import cli
from ccaa.core import Bounds, ContractError, Problem
from ccaa.stats import Verdict

SMALL = {"smart_n": 6, "neighbor_n": 3, "iteration_n": 12}


def small_run(tmp_path, problem="F1", **kw):
    cfg = cli.ExperimentConfig(problem, kw.pop("dimension", 5), kw.pop("runs", 3), dict(SMALL),
                               out_dir=str(tmp_path), **kw)
    return cli.run_experiment(cfg)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_report_layout(tmp_path):
    rep = small_run(tmp_path)
    d = tmp_path / "F1-d5"
    assert rep.directory == d
    for name in ("summary.csv", "runs.csv", "positions.csv", "manifest.json"):
        assert (d / name).exists()
    runs = read_csv(d / "runs.csv")
    assert runs[0] == ["run", "seed", "status", "best_fitness", "evaluations"]
    assert len(runs) == 4 and all(r[2] == "ok" for r in runs[1:])
    assert len(read_csv(d / "positions.csv")[1]) == 6
    summary = dict(read_csv(d / "summary.csv")[1:])
    assert int(summary["n"]) == 3 and int(summary["failures"]) == 0
    assert float(summary["best"]) == min(float(r[3]) for r in runs[1:])


def test_convergence_files(tmp_path):
    small_run(tmp_path)
    for k in range(3):
        rows = read_csv(tmp_path / "F1-d5" / "convergence" / f"run_{k:03d}.csv")[1:]
        assert [int(r[0]) for r in rows] == list(range(1, SMALL["iteration_n"] + 1))
        best = [float(r[1]) for r in rows]
        assert all(b <= a for a, b in zip(best, best[1:]))


def test_rerun_is_byte_identical(tmp_path):
    small_run(tmp_path / "a")
    small_run(tmp_path / "b")
    a, b = tmp_path / "a" / "F1-d5", tmp_path / "b" / "F1-d5"
    files = sorted(p.relative_to(a) for p in a.rglob("*.csv"))
    assert len(files) == 6
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes()
    ma, mb = (json.loads((d / "manifest.json").read_text()) for d in (a, b))
    for m in (ma, mb):
        m.pop("created"), m.pop("wall_clock_seconds")
    assert ma == mb


def test_parallel_matches_serial(tmp_path):
    small_run(tmp_path / "s")
    small_run(tmp_path / "p", workers=2)
    f = "F1-d5/runs.csv"
    assert (tmp_path / "s" / f).read_bytes() == (tmp_path / "p" / f).read_bytes()


def test_manifest_round_trip(tmp_path):
    rep = small_run(tmp_path / "first", master_seed=7)
    m = rep.manifest
    assert m["master_seed"] == 7 and m["runs"] == 3 and len(m["seeds"]) == 3
    assert m["config"]["smart_n"] == 6
    cfg = cli.config_from_manifest(rep.directory, out_dir=str(tmp_path / "again"))
    again = cli.run_experiment(cfg)
    assert (again.directory / "runs.csv").read_bytes() == (rep.directory / "runs.csv").read_bytes()


def test_cli_manifest_flag(tmp_path):
    rep = small_run(tmp_path / "first")
    assert cli.main(["run", "--manifest", str(rep.directory / "manifest.json"), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "b" / "F1-d5" / "runs.csv").read_bytes() == (rep.directory / "runs.csv").read_bytes()


def test_design_budget_is_respected(tmp_path):
    rep = cli.run_experiment(cli.ExperimentConfig("cbd", runs=2, max_evaluations=300, out_dir=str(tmp_path)))
    assert all(r.evaluations <= 300 for r in rep.results)
    assert rep.manifest["max_evaluations"] == 300


def test_iir_runs_get_distinct_inputs():
    e = cli.resolve_problem("iir-6")
    a, b = e.factory(1), e.factory(2)
    x = np.array([0.5, -0.3, 0.2])
    assert a.evaluate(x) != b.evaluate(x)
    assert e.config.smart_n == 20 and e.runs == 50


@pytest.mark.parametrize("pid", ["F99", "iir-11", "xyz", ""])
def test_unknown_problem(pid):
    with pytest.raises(ContractError):
        cli.resolve_problem(pid)


def test_fixed_dimension_rejects_dim():
    with pytest.raises(ContractError):
        cli.resolve_problem("gtd", 4)


@pytest.mark.parametrize("kw", [{"runs": 0}, {"master_seed": -1}, {"overrides": {"bogus": 1}}, {"workers": 0}])
def test_invalid_config(kw, tmp_path):
    with pytest.raises(ContractError):
        cli.ExperimentConfig("F1", out_dir=str(tmp_path), **kw).validate()


def test_failed_runs_are_recorded(tmp_path, monkeypatch):
    real = cli.resolve_problem

    def boom(x):
        return float("nan")

    def fake(pid, dimension=None):
        entry = real("F1", 3)
        bad = Problem("bad", boom, Bounds.uniform(-1, 1, 3))
        return cli.ProblemEntry("F1", "benchmark", "bad", lambda seed: bad, entry.config, 2, None, 3)

    monkeypatch.setattr(cli, "resolve_problem", fake)
    rep = cli.run_experiment(cli.ExperimentConfig("F1", runs=2, overrides=dict(SMALL), out_dir=str(tmp_path)))
    assert [r.status for r in rep.results] == ["failed", "failed"]
    assert rep.summary is None and rep.manifest["failures"] == [0, 1]
    summary = dict(read_csv(tmp_path / "bad" / "summary.csv")[1:])
    assert summary == {"failures": "2"}


def test_list_problems(capsys):
    assert cli.main(["list-problems"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    ids = [r[0] for r in rows[1:]]
    assert len(ids) == 33 + 5 + 10
    assert {"F1", "F33", "gtd", "pvd-gauge", "iir-1", "iir-10"} <= set(ids)


def test_main_exit_codes(tmp_path, capsys):
    assert cli.main(["run", "F1", "--dim", "3", "--runs", "2", "--iterations", "5", "--out", str(tmp_path)]) == 0
    assert "n=2" in capsys.readouterr().out
    assert cli.main(["run", "nope", "--out", str(tmp_path)]) == 1
    assert "ccaa: error:" in capsys.readouterr().err
    assert cli.main(["run", "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def _write_report(root, name, data):
    for pid, values in data.items():
        d = root / name / pid
        d.mkdir(parents=True)
        with open(d / "runs.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["run", "seed", "status", "best_fitness", "evaluations"])
            for k, v in enumerate(values):
                w.writerow([k, k, "ok", v, 10])
    return root / name


def test_compare_identical_reports(tmp_path):
    data = {"P1": np.linspace(0, 1, 10), "P2": np.linspace(5, 6, 10)}
    a = _write_report(tmp_path, "a", data)
    b = _write_report(tmp_path, "b", data)
    comp = cli.compare_reports([cli.load_report(a), cli.load_report(b)])
    assert all(v is Verdict.APPROX for v in comp.verdicts[0])
    assert np.all(comp.ranks == 1) and comp.net == [0]
    assert list(comp.overall_rank) == [1, 1]


def test_compare_dominance(tmp_path, capsys):
    good = {f"P{k}": np.zeros(10) + 0.01 * np.arange(10) for k in range(4)}
    bad = {f"P{k}": np.ones(10) + 0.01 * np.arange(10) for k in range(4)}
    a = _write_report(tmp_path, "good", good)
    b = _write_report(tmp_path, "bad", bad)
    out = tmp_path / "cmp.csv"
    assert cli.main(["compare", str(a), str(b), "--names", "ccaa,other", "--csv", str(out)]) == 0
    assert "ccaa_mean" in capsys.readouterr().out
    rows = read_csv(out)
    assert rows[0][:4] == ["problem", "ccaa_mean", "ccaa_std", "ccaa_rank"]
    assert [r[-1] for r in rows[1:5]] == ["+"] * 4
    assert rows[-2][-1] == "4"
    comp = cli.compare_reports([cli.load_report(a), cli.load_report(b)])
    assert comp.net == [4] and list(comp.overall_rank) == [1, 2]


def test_compare_mismatched_problems(tmp_path):
    a = _write_report(tmp_path, "a", {"P1": np.zeros(5)})
    b = _write_report(tmp_path, "b", {"P2": np.zeros(5)})
    with pytest.raises(ContractError):
        cli.compare_reports([cli.load_report(a), cli.load_report(b)])
    assert cli.main(["compare", str(a), str(b)]) == 1


def test_compare_missing_directory(tmp_path):
    assert cli.main(["compare", str(tmp_path / "x"), str(tmp_path / "y")]) == 1
