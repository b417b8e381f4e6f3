"""Grid sweep over (problem, algorithm, stopping rule, resampling rate).

Cells are enumerated problems x algorithms x rules x r_values, nested in that
order (r varying fastest); a cell's ordinal is its position in that
enumeration. Every trial draws from its own random stream keyed by
(master_seed, cell ordinal, trial ordinal) -- see ``engine.trial_key`` -- so
streams never collide, any trial can be replayed in isolation, and results
are identical for any worker count or execution schedule.

Per-cell aggregation uses exact integer sums before any division, which keeps
the emitted rows bit-identical across schedules as well.
"""

from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import engine
from .algorithms import AlgorithmSpec, OnePlusOneEA, RMHC
from .engine import CellResult, trial_key, trial_rng
from .harness import StoppingRule
from .problems import OneMaxGaussian, PMax, ProblemSpec

DEFAULT_CONFIDENCE = 0.95

__all__ = [
    "BestRSummary",
    "ExperimentConfig",
    "GridCell",
    "ResultRow",
    "algorithm_id",
    "best_r_summary",
    "grid_cells",
    "problem_id",
    "rule_id",
    "run_experiment",
    "run_paired_trials",
    "trial_key",
    "trial_rng",
    "wilson_interval",
]


def problem_id(spec: ProblemSpec) -> str:
    if isinstance(spec, OneMaxGaussian):
        return "onemax"
    if isinstance(spec, PMax):
        return "pmax"
    raise TypeError(f"unknown problem spec: {spec!r}")


def algorithm_id(alg: AlgorithmSpec) -> str:
    if isinstance(alg, RMHC):
        return "rmhc"
    if isinstance(alg, OnePlusOneEA):
        return "opo-ea"
    raise TypeError(f"unknown algorithm spec: {alg!r}")


def rule_id(rule: StoppingRule) -> str:
    return rule.value


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved description of one experiment grid."""

    problems: tuple[ProblemSpec, ...]
    algorithms: tuple[AlgorithmSpec, ...]
    rules: tuple[StoppingRule, ...]
    r_values: tuple[int, ...]
    trials: int
    budget_total: int
    master_seed: int

    def __post_init__(self) -> None:
        for name in ("problems", "algorithms", "rules", "r_values"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        for r in self.r_values:
            if r < 1:
                raise ValueError(f"r_values must be positive, got {r}")
        if list(self.r_values) != sorted(set(self.r_values)):
            raise ValueError("r_values must be strictly ascending with no duplicates")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.trials > 1 << 32:
            raise ValueError(f"trials must fit a 32-bit ordinal, got {self.trials}")
        if self.budget_total < 1:
            raise ValueError(f"budget_total must be >= 1, got {self.budget_total}")
        if not 0 <= self.master_seed < 1 << 64:
            raise ValueError(
                f"master_seed must be a 64-bit unsigned int, got {self.master_seed}"
            )


@dataclass(frozen=True)
class GridCell:
    ordinal: int
    problem: ProblemSpec
    algorithm: AlgorithmSpec
    rule: StoppingRule
    r: int


@dataclass(frozen=True)
class ResultRow:
    """Aggregated success statistics for one grid cell."""

    problem: str
    algorithm: str
    rule: str
    r: int
    trials: int
    successes: int
    success_rate: float
    ci_low: float
    ci_high: float
    mean_evals_used: float
    mean_first_hit_evals: float | None


@dataclass(frozen=True)
class BestRSummary:
    """Best success rate in a (problem, algorithm, rule) group and the
    smallest r attaining it."""

    problem: str
    algorithm: str
    rule: str
    best_rate: float
    best_r: int


def grid_cells(cfg: ExperimentConfig) -> list[GridCell]:
    """The grid in ordinal order."""
    cells = []
    ordinal = 0
    for problem in cfg.problems:
        for algorithm in cfg.algorithms:
            for rule in cfg.rules:
                for r in cfg.r_values:
                    cells.append(GridCell(ordinal, problem, algorithm, rule, r))
                    ordinal += 1
    return cells


def wilson_interval(
    successes: int, trials: int, confidence: float = DEFAULT_CONFIDENCE
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must be in [0, {trials}], got {successes}")
    if not 0 < confidence < 1:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    z = statistics.NormalDist().inv_cdf(0.5 + confidence / 2)
    p_hat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p_hat + z2 / (2 * trials)) / denom
    half_width = (z / denom) * math.sqrt(
        p_hat * (1 - p_hat) / trials + z2 / (4 * trials * trials)
    )
    # The bounds are exact at the extremes; avoid rounding residue there.
    low = 0.0 if successes == 0 else max(0.0, center - half_width)
    high = 1.0 if successes == trials else min(1.0, center + half_width)
    return low, high


def _aggregate(outcome: CellResult) -> tuple[int, int, int, int]:
    # Exact integer sums; schedule-independent.
    successes = int(outcome.successes.sum())
    evals_sum = int(outcome.evals_used.sum())
    hit_mask = outcome.first_hit_evals >= 0
    hits = int(hit_mask.sum())
    hit_evals_sum = int(outcome.first_hit_evals[hit_mask].sum())
    return successes, evals_sum, hits, hit_evals_sum


def _run_cell_task(task) -> tuple[int, int, int, int]:
    cell, trials, budget_total, master_seed = task
    outcome = engine.run_cell(
        cell.problem, cell.algorithm, cell.rule, cell.r,
        budget_total, trials, master_seed, cell.ordinal,
    )
    return _aggregate(outcome)


def _make_row(cell: GridCell, trials: int, counts: tuple[int, int, int, int]) -> ResultRow:
    successes, evals_sum, hits, hit_evals_sum = counts
    ci_low, ci_high = wilson_interval(successes, trials)
    return ResultRow(
        problem=problem_id(cell.problem),
        algorithm=algorithm_id(cell.algorithm),
        rule=rule_id(cell.rule),
        r=cell.r,
        trials=trials,
        successes=successes,
        success_rate=successes / trials,
        ci_low=ci_low,
        ci_high=ci_high,
        mean_evals_used=evals_sum / trials,
        mean_first_hit_evals=hit_evals_sum / hits if hits > 0 else None,
    )


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[ResultRow]:
    """Run every grid cell and aggregate one row per cell.

    ``workers`` > 1 spreads cells over a process pool; 0 means one worker per
    CPU. Output is bit-identical for any worker count.
    """
    if workers < 0:
        raise ValueError(f"workers must be >= 0, got {workers}")
    cells = grid_cells(cfg)
    tasks = [(cell, cfg.trials, cfg.budget_total, cfg.master_seed) for cell in cells]
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(cells) <= 1:
        all_counts = [_run_cell_task(task) for task in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            all_counts = list(pool.map(_run_cell_task, tasks, chunksize=chunk))
    return [
        _make_row(cell, cfg.trials, counts) for cell, counts in zip(cells, all_counts)
    ]


def run_paired_trials(
    problem: ProblemSpec,
    algorithm: AlgorithmSpec,
    r: int,
    budget_total: int,
    trials: int,
    master_seed: int,
    pair_ordinal: int = 0,
) -> tuple[CellResult, CellResult]:
    """Run both stopping rules over identical per-trial streams.

    Returns (first-hitting-time outcomes, fixed-budget outcomes). Shared
    streams make the two runs pointwise comparable: a fixed-budget success
    implies a first-hitting-time success on the same trial. The default grid
    does not share streams between rules; this entry point exists for that
    dominance property.
    """
    fht = engine.run_cell(
        problem, algorithm, StoppingRule.FIRST_HITTING_TIME, r,
        budget_total, trials, master_seed, pair_ordinal,
    )
    fixed = engine.run_cell(
        problem, algorithm, StoppingRule.FIXED_BUDGET, r,
        budget_total, trials, master_seed, pair_ordinal,
    )
    return fht, fixed


def best_r_summary(rows: list[ResultRow]) -> list[BestRSummary]:
    """Per (problem, algorithm, rule) group: max success rate, smallest r wins
    ties. Groups appear in first-appearance order."""
    if not rows:
        raise ValueError("no rows to summarise")
    best: dict[tuple[str, str, str], ResultRow] = {}
    for row in rows:
        key = (row.problem, row.algorithm, row.rule)
        current = best.get(key)
        if (
            current is None
            or row.success_rate > current.success_rate
            or (row.success_rate == current.success_rate and row.r < current.r)
        ):
            best[key] = row
    return [
        BestRSummary(
            problem=key[0],
            algorithm=key[1],
            rule=key[2],
            best_rate=row.success_rate,
            best_r=row.r,
        )
        for key, row in best.items()
    ]
