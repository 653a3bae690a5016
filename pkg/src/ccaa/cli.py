"""Command-line experiment runner.

``ccaa run`` executes independent seeded runs of one problem and writes a
report directory; ``ccaa compare`` ranks several reports against a reference;
``ccaa list-problems`` prints the problem registry.

Report layout (one directory per problem)::

    summary.csv              statistic,value
    runs.csv                 run,seed,status,best_fitness,evaluations
    positions.csv            run,x0,x1,...
    convergence/run_000.csv  iteration,best
    manifest.json            configuration echo, seeds, wall-clock
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import benchmarks, engineering, iir
from .core import CcaaConfig, ContractError, EvaluationError, Problem, derive_seed
from .optimizer import ccaa_run_budgeted
from .stats import Verdict, rank_sum_test, rank_table, summarize, wrst_net

log = logging.getLogger("ccaa")

BENCHMARK_RUNS = 30
DESIGN_RUNS = 50
IIR_RUNS = 50
IIR_CONFIG = CcaaConfig(smart_n=20, neighbor_n=5, iteration_n=500, elitism_n=2)

CONFIG_FIELDS = tuple(f for f in CcaaConfig.__dataclass_fields__ if f != "seed")


# ---------------------------------------------------------------- problem registry

@dataclass(frozen=True)
class ProblemEntry:
    id: str
    family: str
    label: str
    factory: Callable[[int], Problem]   # run seed -> problem
    config: CcaaConfig
    runs: int
    max_evaluations: Optional[int] = None
    dimension: Optional[int] = None


def resolve_problem(pid: str, dimension: Optional[int] = None) -> ProblemEntry:
    """Look up a benchmark ("F1".."F33"), design ("gtd", ...) or IIR ("iir-1".."iir-10") id."""
    key = pid.strip()
    if key.upper() in benchmarks.REGISTRY:
        spec = benchmarks.spec_of(key.upper(), dimension)
        fid = spec.id
        dim = spec.dimension
        label = f"{fid}-d{dim}" if spec.scalable else fid
        return ProblemEntry(fid, "benchmark", label, lambda seed: benchmarks.make_problem(fid, dim),
                            CcaaConfig(), BENCHMARK_RUNS, None, dim)
    if dimension is not None:
        raise ContractError(f"problem {pid!r} has a fixed dimension")
    if key.lower() in engineering.REGISTRY:
        setup = engineering.setup_of(key)
        problem = setup.problem.as_problem()
        return ProblemEntry(key.lower(), "design", key.lower(), lambda seed: problem,
                            setup.config(), DESIGN_RUNS, setup.max_evaluations, setup.problem.bounds.dim)
    if key.lower().startswith("iir-"):
        example = iir.example_of(key)
        name = key.lower()
        # each run gets a fresh excitation from its own seed
        return ProblemEntry(name, "iir", name,
                            lambda seed: iir.plant_registry(example, iir.input_rng(seed)).as_problem(),
                            IIR_CONFIG, IIR_RUNS, None, iir.plant_registry(example).structure.size)
    raise ContractError(f"unknown problem id {pid!r}; see 'ccaa list-problems'")


def all_problem_ids() -> list:
    return list(benchmarks.IDS) + list(engineering.IDS) + list(iir.REGISTRY_IDS)


# ---------------------------------------------------------------- experiments

@dataclass
class ExperimentConfig:
    problem: str
    dimension: Optional[int] = None
    runs: Optional[int] = None
    overrides: dict = field(default_factory=dict)
    master_seed: int = 0
    max_evaluations: Optional[int] = None
    out_dir: str = "out"
    workers: int = 1

    def validate(self) -> ProblemEntry:
        entry = resolve_problem(self.problem, self.dimension)
        if self.runs is not None and self.runs < 1:
            raise ContractError("runs must be at least 1")
        if self.master_seed < 0:
            raise ContractError("master seed must be non-negative")
        unknown = set(self.overrides) - set(CONFIG_FIELDS)
        if unknown:
            raise ContractError(f"unknown configuration fields: {', '.join(sorted(unknown))}")
        if self.workers < 1:
            raise ContractError("workers must be at least 1")
        return entry


@dataclass
class RunResult:
    index: int
    seed: int
    status: str
    best_fitness: float
    evaluations: int
    position: Optional[list] = None
    convergence: Optional[list] = None
    error: str = ""


@dataclass
class ExperimentReport:
    directory: Path
    results: list
    summary: Optional[object]
    manifest: dict

    @property
    def values(self) -> np.ndarray:
        return np.array([r.best_fitness for r in self.results if r.status == "ok"])


def _run_one(task: tuple) -> RunResult:
    pid, dimension, config_dict, max_evals, index, seed = task
    entry = resolve_problem(pid, dimension)
    config = CcaaConfig(**config_dict).replace(seed=seed)
    try:
        rec = ccaa_run_budgeted(entry.factory(seed), config, max_evals)
    except EvaluationError as exc:
        return RunResult(index, seed, "failed", math.nan, 0, error=str(exc))
    return RunResult(index, seed, "ok", rec.best_fitness, rec.evaluations_used,
                     rec.best_position.tolist(), rec.convergence.tolist())


def _fmt(v: float) -> str:
    return repr(float(v))


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run ``cfg.runs`` seeded CCAA runs and write the report directory."""
    entry = cfg.validate()
    runs = cfg.runs if cfg.runs is not None else entry.runs
    config = entry.config.replace(**cfg.overrides)
    max_evals = cfg.max_evaluations if cfg.max_evaluations is not None else entry.max_evaluations
    if max_evals is not None and max_evals < config.smart_n:
        raise ContractError("max evaluations must be at least the number of smart cells")
    seeds = [derive_seed(cfg.master_seed, i) for i in range(runs)]

    out = Path(cfg.out_dir) / entry.label
    try:
        (out / "convergence").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ContractError(f"cannot create output directory {out}: {exc}") from exc

    config_dict = {k: getattr(config, k) for k in CONFIG_FIELDS}
    tasks = [(entry.id, cfg.dimension, config_dict, max_evals, i, s) for i, s in enumerate(seeds)]
    start = time.time()
    if cfg.workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, runs)) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    elapsed = time.time() - start
    # keyed by index so the report never depends on completion order
    results.sort(key=lambda r: r.index)

    failures = [r for r in results if r.status != "ok"]
    for r in failures:
        log.warning("run %d (seed %d) failed and is excluded from the summary: %s", r.index, r.seed, r.error)
    ok = [r.best_fitness for r in results if r.status == "ok"]
    summary = summarize(ok) if ok else None

    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["statistic", "value"])
        if summary is not None:
            for k, v in summary.as_dict().items():
                w.writerow([k, v if k == "n" else _fmt(v)])
        w.writerow(["failures", len(failures)])
    with open(out / "runs.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["run", "seed", "status", "best_fitness", "evaluations"])
        for r in results:
            w.writerow([r.index, r.seed, r.status, _fmt(r.best_fitness), r.evaluations])
    with open(out / "positions.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        dim = entry.dimension or 0
        w.writerow(["run"] + [f"x{k}" for k in range(dim)])
        for r in results:
            if r.position is not None:
                w.writerow([r.index] + [_fmt(v) for v in r.position])
    for r in results:
        if r.convergence is None:
            continue
        with open(out / "convergence" / f"run_{r.index:03d}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "best"])
            for it, v in enumerate(r.convergence, start=1):
                w.writerow([it, _fmt(v)])

    manifest = {
        "problem": entry.id,
        "family": entry.family,
        "dimension": cfg.dimension,
        "runs": runs,
        "master_seed": cfg.master_seed,
        "max_evaluations": max_evals,
        "config": config_dict,
        "overrides": dict(cfg.overrides),
        "seeds": seeds,
        "failures": [r.index for r in failures],
        "wall_clock_seconds": round(elapsed, 3),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return ExperimentReport(out, results, summary, manifest)


def config_from_manifest(path, out_dir: Optional[str] = None, workers: int = 1) -> ExperimentConfig:
    """Experiment configuration that reproduces the runs recorded in a manifest."""
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.json"
    try:
        m = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise ContractError(f"cannot read manifest {path}: {exc}") from exc
    overrides = dict(m.get("config", {}))
    return ExperimentConfig(
        problem=m["problem"],
        dimension=m.get("dimension"),
        runs=m["runs"],
        overrides=overrides,
        master_seed=m["master_seed"],
        max_evaluations=m.get("max_evaluations"),
        out_dir=out_dir if out_dir is not None else str(path.parent.parent),
        workers=workers,
    )


# ---------------------------------------------------------------- comparison

@dataclass
class Report:
    """Per-problem final fitness values of one algorithm."""

    name: str
    values: dict


def load_report(directory, name: Optional[str] = None) -> Report:
    """Read every ``runs.csv`` under ``directory`` (itself or one level down)."""
    directory = Path(directory)
    files = [directory / "runs.csv"] if (directory / "runs.csv").exists() else sorted(directory.glob("*/runs.csv"))
    if not files:
        raise ContractError(f"no runs.csv found under {directory}")
    values = {}
    for f in files:
        with open(f, newline="") as fh:
            rows = [r for r in csv.DictReader(fh) if r["status"] == "ok"]
        values[f.parent.name] = np.array([float(r["best_fitness"]) for r in rows])
    return Report(name or directory.name, values)


@dataclass
class Comparison:
    names: list
    problems: list
    means: np.ndarray          # reports x problems
    stds: np.ndarray
    ranks: np.ndarray
    verdicts: list             # per other report, per problem
    average_rank: np.ndarray
    overall_rank: np.ndarray
    net: list                  # per other report

    def rows(self) -> list:
        header = ["problem"]
        for k, n in enumerate(self.names):
            header += [f"{n}_mean", f"{n}_std", f"{n}_rank"]
            if k > 0:
                header.append(f"{n}_test")
        rows = [header]
        for j, p in enumerate(self.problems):
            row = [p]
            for k in range(len(self.names)):
                row += [_fmt(self.means[k, j]), _fmt(self.stds[k, j]), int(self.ranks[k, j])]
                if k > 0:
                    row.append(self.verdicts[k - 1][j].value)
            rows.append(row)
        avg = ["average_rank"]
        ovr = ["overall_rank"]
        for k in range(len(self.names)):
            avg += ["", "", f"{self.average_rank[k]:.2f}"]
            ovr += ["", "", int(self.overall_rank[k])]
            if k > 0:
                avg.append(self.net[k - 1])
                ovr.append("")
        return rows + [avg, ovr]

    def text(self) -> str:
        rows = [[str(c) for c in r] for r in self.rows()]
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows)


def compare_reports(reports: Sequence[Report], rank_method: str = "dense") -> Comparison:
    """Compare ``reports[1:]`` against the reference ``reports[0]``.

    Verdicts are from the reference's point of view: ``+`` means the
    reference is significantly better on that problem.
    """
    if len(reports) < 2:
        raise ContractError("need at least two reports to compare")
    problems = sorted(reports[0].values)
    for r in reports[1:]:
        if sorted(r.values) != problems:
            raise ContractError(f"report {r.name!r} covers a different problem set than {reports[0].name!r}")
    for r in reports:
        for p in problems:
            if len(r.values[p]) == 0:
                raise ContractError(f"report {r.name!r} has no successful runs for {p}")
    means = np.array([[np.mean(r.values[p]) for p in problems] for r in reports])
    stds = np.array([[summarize(r.values[p]).std for p in problems] for r in reports])
    table = rank_table(means, rank_method)
    ref = reports[0]
    verdicts = [[rank_sum_test(ref.values[p], r.values[p]).verdict for p in problems] for r in reports[1:]]
    return Comparison(
        names=[r.name for r in reports],
        problems=problems,
        means=means,
        stds=stds,
        ranks=table.ranks,
        verdicts=verdicts,
        average_rank=table.average,
        overall_rank=table.overall,
        net=[wrst_net(v) for v in verdicts],
    )


# ---------------------------------------------------------------- command line

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("algorithm parameters (defaults depend on the problem)")
    g.add_argument("--smart-n", type=int, dest="smart_n")
    g.add_argument("--neighbor-n", type=int, dest="neighbor_n")
    g.add_argument("--iterations", type=int, dest="iteration_n")
    g.add_argument("--elitism", type=int, dest="elitism_n")
    g.add_argument("--lower-p", type=float, dest="lower_p")
    g.add_argument("--upper-p", type=float, dest="upper_p")
    g.add_argument("--dist-M", type=float, dest="dist_M")
    g.add_argument("--dist-m", type=float, dest="dist_m")
    g.add_argument("--lower-d", type=int, dest="lower_d")
    g.add_argument("--upper-d", type=int, dest="upper_d")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccaa", description="Cellular-automata-inspired optimizer experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run independent seeded optimizations of one problem")
    run.add_argument("problem", nargs="?", help="problem id, see list-problems")
    run.add_argument("--dim", type=int, help="dimension of a scalable benchmark (default 30)")
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    run.add_argument("--max-evals", type=int, dest="max_evaluations")
    run.add_argument("--out", default="out", help="output root directory (default ./out)")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--manifest", help="re-run the experiment recorded in this manifest")
    _add_config_flags(run)

    cmp_ = sub.add_parser("compare", help="compare reports against the first one")
    cmp_.add_argument("reports", nargs="+", help="report directories; the first is the reference")
    cmp_.add_argument("--names", help="comma-separated display names")
    cmp_.add_argument("--csv", help="write the comparison table here")
    cmp_.add_argument("--ranking", choices=("dense", "competition"), default="dense")

    sub.add_parser("list-problems", help="print every problem id")
    return parser


def _cmd_run(args) -> int:
    if args.manifest:
        cfg = config_from_manifest(args.manifest, args.out, args.workers)
    else:
        if not args.problem:
            raise ContractError("a problem id or --manifest is required")
        overrides = {k: getattr(args, k) for k in CONFIG_FIELDS if getattr(args, k) is not None}
        cfg = ExperimentConfig(args.problem, args.dim, args.runs, overrides, args.seed,
                               args.max_evaluations, args.out, args.workers)
    report = run_experiment(cfg)
    s = report.summary
    if s is None:
        print(f"{report.directory}: every run failed")
        return 1
    print(f"{report.directory}: n={s.n} best={s.best:.6e} mean={s.mean:.6e} "
          f"median={s.median:.6e} worst={s.worst:.6e} std={s.std:.6e}")
    return 0


def _cmd_compare(args) -> int:
    names = args.names.split(",") if args.names else [None] * len(args.reports)
    if len(names) != len(args.reports):
        raise ContractError("--names must list one name per report")
    comp = compare_reports([load_report(d, n) for d, n in zip(args.reports, names)], args.ranking)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh).writerows(comp.rows())
    print(comp.text())
    return 0


def _cmd_list(args) -> int:
    w = csv.writer(sys.stdout)
    w.writerow(["id", "family", "dimension", "default_runs", "max_evaluations"])
    for pid in all_problem_ids():
        e = resolve_problem(pid)
        w.writerow([pid, e.family, e.dimension, e.runs, e.max_evaluations or ""])
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    handlers = {"run": _cmd_run, "compare": _cmd_compare, "list-problems": _cmd_list}
    try:
        return handlers[args.command](args)
    except (ContractError, OSError) as exc:
        print(f"ccaa: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
