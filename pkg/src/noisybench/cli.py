"""Command-line entry point: run sweeps, summarise results, replay trials.

Config documents are flat JSON objects; an empty document selects the full
default grid (n=10, budget 500, 10,000 trials, r = 1..50, both problems, both
algorithms, both stopping rules). Keys:

    n              problem dimension (int >= 1; <= 62 when "pmax" is used)
    trials         trials per grid cell (int >= 1)
    budget         raw noisy evaluations allowed per trial (int >= 1)
    master_seed    64-bit unsigned int; root of every trial's stream
    problems       subset of ["onemax", "pmax"]
    algorithms     subset of ["rmhc", "opo-ea"]
    rules          subset of ["fht", "fixed-budget"]
    r_values       strictly ascending positive ints
    noise_mean     Gaussian noise mean for "onemax" (default 0.0)
    noise_stddev   Gaussian noise stddev for "onemax" (default 1.0, >= 0)
    mutation_prob  "opo-ea" per-bit flip probability in (0, 1]; null -> 1/n

Outputs of ``run``: results.csv (one row per cell), summary.csv (best rate
and best r per cell group), manifest.json (resolved config + seed + version;
enough to reproduce the run bit-for-bit).

Exit codes: 0 success, 1 config error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from csv import reader as csv_reader, writer as csv_writer
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .algorithms import OnePlusOneEA, RMHC, run_trial
from .engine import trial_rng
from .experiment import (
    BestRSummary,
    ExperimentConfig,
    ResultRow,
    algorithm_id,
    best_r_summary,
    grid_cells,
    problem_id,
    rule_id,
    run_experiment,
)
from .harness import StoppingRule
from .problems import MAX_PMAX_DIMENSION, NoiseModel, OneMaxGaussian, PMax

RESULTS_COLUMNS = [
    "problem", "algorithm", "rule", "r", "trials", "successes",
    "success_rate", "ci_low", "ci_high", "mean_evals_used", "mean_first_hit_evals",
]
SUMMARY_COLUMNS = ["problem", "algorithm", "rule", "best_rate", "best_r"]

_PROBLEM_NAMES = ("onemax", "pmax")
_ALGORITHM_NAMES = ("rmhc", "opo-ea")
_RULE_NAMES = tuple(rule.value for rule in StoppingRule)

_DEFAULTS: dict = {
    "n": 10,
    "trials": 10_000,
    "budget": 500,
    "master_seed": 104_729,
    "problems": list(_PROBLEM_NAMES),
    "algorithms": list(_ALGORITHM_NAMES),
    "rules": list(_RULE_NAMES),
    "r_values": list(range(1, 51)),
    "noise_mean": 0.0,
    "noise_stddev": 1.0,
    "mutation_prob": None,
}


class ConfigError(ValueError):
    """A config document failed to parse or validate."""


def _require_int(data: dict, key: str, minimum: int, maximum: int | None = None) -> int:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if value < minimum or (maximum is not None and value > maximum):
        bound = f">= {minimum}" if maximum is None else f"in [{minimum}, {maximum}]"
        raise ConfigError(f"{key}: must be {bound}, got {value}")
    return value


def _require_number(data: dict, key: str) -> float:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _require_names(data: dict, key: str, allowed: tuple[str, ...]) -> list[str]:
    value = data[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a non-empty list, got {value!r}")
    for name in value:
        if name not in allowed:
            raise ConfigError(f"{key}: unknown entry {name!r}, expected one of {list(allowed)}")
    if len(set(value)) != len(value):
        raise ConfigError(f"{key}: duplicate entries are not allowed")
    return list(value)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config document, applying defaults.

    An empty document yields the full default grid.
    """
    stripped = text.strip()
    if not stripped:
        data = {}
    else:
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config document: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = sorted(set(data) - set(_DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    merged = {**_DEFAULTS, **data}

    n = _require_int(merged, "n", 1)
    trials = _require_int(merged, "trials", 1, 1 << 32)
    budget = _require_int(merged, "budget", 1)
    master_seed = _require_int(merged, "master_seed", 0, (1 << 64) - 1)

    problem_names = _require_names(merged, "problems", _PROBLEM_NAMES)
    algorithm_names = _require_names(merged, "algorithms", _ALGORITHM_NAMES)
    rule_names = _require_names(merged, "rules", _RULE_NAMES)

    r_values = merged["r_values"]
    if not isinstance(r_values, list) or not r_values:
        raise ConfigError(f"r_values: expected a non-empty list, got {r_values!r}")
    for r in r_values:
        if isinstance(r, bool) or not isinstance(r, int) or r < 1:
            raise ConfigError(f"r_values: entries must be positive integers, got {r!r}")
    if len(set(r_values)) != len(r_values):
        raise ConfigError("r_values: duplicate values are not allowed")
    if r_values != sorted(r_values):
        raise ConfigError("r_values: must be sorted ascending")

    noise_mean = _require_number(merged, "noise_mean")
    noise_stddev = _require_number(merged, "noise_stddev")
    if noise_stddev < 0:
        raise ConfigError(f"noise_stddev: must be >= 0, got {noise_stddev}")

    mutation_prob = merged["mutation_prob"]
    if mutation_prob is not None:
        mutation_prob = _require_number(merged, "mutation_prob")
        if not 0 < mutation_prob <= 1:
            raise ConfigError(f"mutation_prob: must be in (0, 1], got {mutation_prob}")

    if "pmax" in problem_names and n > MAX_PMAX_DIMENSION:
        raise ConfigError(f"n: must be <= {MAX_PMAX_DIMENSION} when 'pmax' is selected, got {n}")

    noise = NoiseModel(mean=noise_mean, stddev=noise_stddev)
    problems = tuple(
        OneMaxGaussian(n=n, noise=noise) if name == "onemax" else PMax(n=n)
        for name in problem_names
    )
    algorithms = tuple(
        RMHC() if name == "rmhc" else OnePlusOneEA(mutation_prob=mutation_prob)
        for name in algorithm_names
    )
    rules = tuple(StoppingRule(name) for name in rule_names)
    return ExperimentConfig(
        problems=problems,
        algorithms=algorithms,
        rules=rules,
        r_values=tuple(r_values),
        trials=trials,
        budget_total=budget,
        master_seed=master_seed,
    )


def serialize_config(cfg: ExperimentConfig) -> dict:
    """Config document (round-trips through parse_config)."""
    dims = {spec.n for spec in cfg.problems}
    if len(dims) != 1:
        raise ValueError("config documents express a single problem dimension")
    noise = next(
        (spec.noise for spec in cfg.problems if isinstance(spec, OneMaxGaussian)),
        NoiseModel(),
    )
    mutation_prob = next(
        (alg.mutation_prob for alg in cfg.algorithms if isinstance(alg, OnePlusOneEA)),
        None,
    )
    return {
        "n": dims.pop(),
        "trials": cfg.trials,
        "budget": cfg.budget_total,
        "master_seed": cfg.master_seed,
        "problems": [problem_id(spec) for spec in cfg.problems],
        "algorithms": [algorithm_id(alg) for alg in cfg.algorithms],
        "rules": [rule_id(rule) for rule in cfg.rules],
        "r_values": list(cfg.r_values),
        "noise_mean": noise.mean,
        "noise_stddev": noise.stddev,
        "mutation_prob": mutation_prob,
    }


def default_config() -> ExperimentConfig:
    return parse_config("")


def _fmt(value: float) -> str:
    # repr is the shortest digit string that round-trips the exact double.
    return repr(float(value))


def write_summary_csv(summaries: list[BestRSummary], path: Path) -> None:
    with open(path, "w", newline="") as f:
        out = csv_writer(f, lineterminator="\n")
        out.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            out.writerow([s.problem, s.algorithm, s.rule, _fmt(s.best_rate), s.best_r])


def write_results(
    rows: list[ResultRow],
    summaries: list[BestRSummary],
    destination: str | Path,
    config: ExperimentConfig,
) -> list[Path]:
    """Write results.csv, summary.csv and manifest.json into ``destination``."""
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)

    results_path = dest / "results.csv"
    with open(results_path, "w", newline="") as f:
        out = csv_writer(f, lineterminator="\n")
        out.writerow(RESULTS_COLUMNS)
        for row in rows:
            out.writerow([
                row.problem, row.algorithm, row.rule, row.r, row.trials, row.successes,
                _fmt(row.success_rate), _fmt(row.ci_low), _fmt(row.ci_high),
                _fmt(row.mean_evals_used),
                "" if row.mean_first_hit_evals is None else _fmt(row.mean_first_hit_evals),
            ])

    summary_path = dest / "summary.csv"
    write_summary_csv(summaries, summary_path)

    manifest_path = dest / "manifest.json"
    manifest = {
        "format": "noisybench-run-manifest",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "master_seed": config.master_seed,
        "config": serialize_config(config),
        "grid": {
            "cells": len(grid_cells(config)),
            "trials_per_cell": config.trials,
            "cell_order": "problems > algorithms > rules > r_values",
        },
        "outputs": {"results": "results.csv", "summary": "summary.csv"},
    }
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")

    return [results_path, summary_path, manifest_path]


def read_results_csv(path: str | Path) -> list[ResultRow]:
    """Read a results.csv written by ``write_results``."""
    with open(path, newline="") as f:
        records = list(csv_reader(f))
    if not records or records[0] != RESULTS_COLUMNS:
        raise ConfigError(f"{path}: not a results.csv (unexpected header)")
    rows = []
    for record in records[1:]:
        rows.append(ResultRow(
            problem=record[0],
            algorithm=record[1],
            rule=record[2],
            r=int(record[3]),
            trials=int(record[4]),
            successes=int(record[5]),
            success_rate=float(record[6]),
            ci_low=float(record[7]),
            ci_high=float(record[8]),
            mean_evals_used=float(record[9]),
            mean_first_hit_evals=float(record[10]) if record[10] else None,
        ))
    return rows


def _cmd_run(args: argparse.Namespace) -> int:
    text = Path(args.config).read_text() if args.config else ""
    cfg = parse_config(text)
    if args.seed is not None:
        if not 0 <= args.seed < 1 << 64:
            raise ConfigError(f"--seed must be a 64-bit unsigned int, got {args.seed}")
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    rows = run_experiment(cfg, workers=args.threads)
    summaries = best_r_summary(rows)
    paths = write_results(rows, summaries, args.out, cfg)
    for s in summaries:
        print(
            f"{s.problem:8s} {s.algorithm:8s} {s.rule:13s} "
            f"best rate {100 * s.best_rate:6.2f}% at r={s.best_r}"
        )
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    rows = read_results_csv(args.results)
    summaries = best_r_summary(rows)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "summary.csv"
    write_summary_csv(summaries, path)
    print(f"wrote {path}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    with open(args.manifest) as f:
        try:
            manifest = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed manifest: {exc}") from exc
    if "config" not in manifest:
        raise ConfigError("manifest has no 'config' entry")
    cfg = parse_config(json.dumps(manifest["config"]))

    cell = next(
        (
            c for c in grid_cells(cfg)
            if problem_id(c.problem) == args.problem
            and algorithm_id(c.algorithm) == args.algorithm
            and rule_id(c.rule) == args.rule
            and c.r == args.r
        ),
        None,
    )
    if cell is None:
        raise ConfigError(
            f"no grid cell ({args.problem}, {args.algorithm}, {args.rule}, r={args.r}) in this run"
        )
    if not 0 <= args.trial < cfg.trials:
        raise ConfigError(f"--trial must be in [0, {cfg.trials - 1}], got {args.trial}")

    rng = trial_rng(cfg.master_seed, cell.ordinal, args.trial)
    result = run_trial(cell.algorithm, cell.problem, cell.rule, cell.r, cfg.budget_total, rng)
    print(f"cell ordinal:    {cell.ordinal}")
    print(f"trial:           {args.trial}")
    print(f"returned:        {''.join(str(int(b)) for b in result.returned)}")
    print(f"success:         {result.success}")
    print(f"evals used:      {result.evals_used}")
    print(f"first hit evals: {result.first_hit_evals}")
    print(f"iterations:      {result.iterations}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisybench",
        description="Benchmark resampling optimisers on noisy binary problems.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment grid and write results")
    run_p.add_argument("--config", help="config JSON path (omit for the full default grid)")
    run_p.add_argument("--out", default="results", help="output directory (default: results)")
    run_p.add_argument("--seed", type=int, help="override the config's master_seed")
    run_p.add_argument(
        "--threads", type=int, default=1,
        help="worker processes for cells; 0 = one per CPU (default: 1)",
    )
    run_p.set_defaults(func=_cmd_run)

    sum_p = sub.add_parser("summarize", help="best-r summary from an existing results.csv")
    sum_p.add_argument("--results", required=True, help="path to results.csv")
    sum_p.add_argument("--out", default="results", help="output directory (default: results)")
    sum_p.set_defaults(func=_cmd_summarize)

    replay_p = sub.add_parser("replay", help="re-run one trial from a run manifest")
    replay_p.add_argument("--manifest", required=True, help="path to manifest.json")
    replay_p.add_argument("--problem", required=True, choices=_PROBLEM_NAMES)
    replay_p.add_argument("--algorithm", required=True, choices=_ALGORITHM_NAMES)
    replay_p.add_argument("--rule", required=True, choices=_RULE_NAMES)
    replay_p.add_argument("--r", required=True, type=int)
    replay_p.add_argument("--trial", required=True, type=int)
    replay_p.set_defaults(func=_cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
