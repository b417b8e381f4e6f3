"""Resampling (1+1)-style optimisers over noisy binary problems.

Both optimisers keep a single incumbent, mutate it into a challenger, and
accept the challenger when its mean over r fresh noisy samples is at least
the incumbent's mean over r fresh samples of its own. The incumbent is
re-sampled at every comparison; nothing is cached. Every noisy sample costs
one unit of the evaluation budget, so one comparison costs exactly 2r, and an
iteration starts only if the remaining budget covers it.

A trial consumes randomness in a fixed order -- initial bits, then per
iteration: mutation draws, challenger samples, incumbent samples -- so a
trial's outcome is an exact function of its arguments and generator state.
``engine`` runs the identical sequence compiled; the two are equivalence
tested.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .harness import StopDecision, StoppingRule, should_stop
from .problems import Genotype, ProblemSpec, is_optimal, noisy_eval, random_genotype


@dataclass(frozen=True)
class RMHC:
    """Hill climber that flips exactly one uniformly chosen bit per step."""


@dataclass(frozen=True)
class OnePlusOneEA:
    """Mutates each bit independently; probability defaults to 1/n at run time."""

    mutation_prob: float | None = None

    def __post_init__(self) -> None:
        p = self.mutation_prob
        if p is not None and not 0 < p <= 1:
            raise ValueError(f"mutation_prob must be in (0, 1], got {p}")

    def resolved_mutation_prob(self, n: int) -> float:
        return 1.0 / n if self.mutation_prob is None else self.mutation_prob


AlgorithmSpec = RMHC | OnePlusOneEA


@dataclass
class BudgetMeter:
    """Counts raw noisy-fitness evaluations against a fixed total."""

    total: int
    used: int = 0

    def __post_init__(self) -> None:
        if self.total < 1:
            raise ValueError(f"budget total must be >= 1, got {self.total}")
        if not 0 <= self.used <= self.total:
            raise ValueError(f"used must be in [0, {self.total}], got {self.used}")

    def remaining(self) -> int:
        return self.total - self.used

    def charge(self, amount: int) -> None:
        if amount < 0:
            raise ValueError(f"charge must be >= 0, got {amount}")
        if amount > self.remaining():
            raise ValueError(
                f"charge of {amount} exceeds remaining budget {self.remaining()}"
            )
        self.used += amount


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one optimisation trial.

    ``first_hit_evals`` is the number of evaluations consumed before the
    optimum was first constructed; present only under FIRST_HITTING_TIME and
    only when that hit ended the trial.
    """

    returned: Genotype
    success: bool
    evals_used: int
    first_hit_evals: int | None
    iterations: int


def mutate_rmhc(x: Genotype, rng: np.random.Generator) -> Genotype:
    """Copy of x with one uniformly chosen bit flipped; x is left unmodified."""
    if x.size == 0:
        raise ValueError("cannot mutate an empty genotype")
    y = x.copy()
    d = int(rng.integers(0, x.size))
    y[d] ^= 1
    return y


def mutate_ea(x: Genotype, p: float, rng: np.random.Generator) -> Genotype:
    """Copy of x with each bit independently flipped with probability p.

    Draws one uniform per bit; zero flips is a legal outcome (no retry).
    """
    if not 0 < p <= 1:
        raise ValueError(f"mutation probability must be in (0, 1], got {p}")
    flips = rng.random(x.size) < p
    y = x.copy()
    y[flips] ^= 1
    return y


def _ordered_sum(samples: np.ndarray) -> float:
    # Sequential accumulation; keeps ties bit-identical with the compiled engine.
    total = 0.0
    for v in samples:
        total += v
    return total


def compare_resampled(
    spec: ProblemSpec,
    challenger: Genotype,
    incumbent: Genotype,
    r: int,
    meter: BudgetMeter,
    rng: np.random.Generator,
) -> bool:
    """Mean-of-r comparison: challenger samples drawn first, then incumbent.

    Charges exactly 2r evaluations; ties accept the challenger. Raises before
    drawing anything if the remaining budget cannot cover the comparison.
    """
    if r < 1:
        raise ValueError(f"resampling rate must be >= 1, got {r}")
    if meter.remaining() < 2 * r:
        raise ValueError(
            f"comparison needs {2 * r} evaluations, only {meter.remaining()} remain"
        )
    challenger_samples = noisy_eval(spec, challenger, rng, size=r)
    incumbent_samples = noisy_eval(spec, incumbent, rng, size=r)
    meter.charge(2 * r)
    return _ordered_sum(challenger_samples) >= _ordered_sum(incumbent_samples)


def _mutate(alg: AlgorithmSpec, x: Genotype, p: float, rng: np.random.Generator) -> Genotype:
    if isinstance(alg, RMHC):
        return mutate_rmhc(x, rng)
    return mutate_ea(x, p, rng)


def run_trial(
    alg: AlgorithmSpec,
    spec: ProblemSpec,
    rule: StoppingRule,
    r: int,
    budget_total: int,
    rng: np.random.Generator,
    initial: Genotype | None = None,
) -> TrialResult:
    """One optimisation trial under the given stopping rule.

    Starts from a uniformly random genotype (or ``initial``, e.g. for tests).
    Under FIRST_HITTING_TIME the starting point and every freshly mutated
    challenger are checked against the optimum before any evaluation is
    spent; a hit returns immediately. An iteration (one 2r comparison) runs
    only while the remaining budget covers it; the incumbent is returned once
    it no longer does.
    """
    if r < 1:
        raise ValueError(f"resampling rate must be >= 1, got {r}")
    if isinstance(alg, OnePlusOneEA):
        p = alg.resolved_mutation_prob(spec.n)
        if not 0 < p <= 1:
            raise ValueError(f"mutation_prob must be in (0, 1], got {p}")
    else:
        p = 0.0

    if initial is None:
        x = random_genotype(spec.n, rng)
    else:
        if initial.shape != (spec.n,) or not np.all((initial == 0) | (initial == 1)):
            raise ValueError("initial genotype must be a 0/1 vector of length n")
        x = initial.astype(np.uint8)

    meter = BudgetMeter(total=budget_total)
    iterations = 0

    decision = should_stop(rule, x, spec, meter, r)
    if decision is StopDecision.RETURN_HIT:
        return TrialResult(x, True, 0, 0, 0)

    while decision is StopDecision.CONTINUE:
        challenger = _mutate(alg, x, p, rng)
        if should_stop(rule, challenger, spec, meter, r) is StopDecision.RETURN_HIT:
            return TrialResult(
                returned=challenger,
                success=True,
                evals_used=meter.used,
                first_hit_evals=meter.used,
                iterations=iterations,
            )
        if compare_resampled(spec, challenger, x, r, meter, rng):
            x = challenger
        iterations += 1
        decision = should_stop(rule, x, spec, meter, r)

    return TrialResult(
        returned=x,
        success=is_optimal(spec, x),
        evals_used=meter.used,
        first_hit_evals=None,
        iterations=iterations,
    )
