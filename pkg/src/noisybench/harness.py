"""Stopping protocols and the success observable for optimisation trials.

Two protocols are supported:

* ``FIRST_HITTING_TIME`` ("fht") -- the trial returns the optimum the moment
  the search constructs it, which presumes the optimum is recognisable on
  sight. The budget cap still applies.
* ``FIXED_BUDGET`` ("fixed-budget") -- the trial runs until the evaluation
  budget cannot pay for another comparison and returns whatever incumbent it
  holds, never inspecting optimality along the way.

Either way, success means the returned solution is the optimum.
"""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING

from .problems import Genotype, ProblemSpec, is_optimal

if TYPE_CHECKING:
    from .algorithms import BudgetMeter, TrialResult


class StoppingRule(Enum):
    """How a trial decides it is finished."""

    FIRST_HITTING_TIME = "fht"
    FIXED_BUDGET = "fixed-budget"


class StopDecision(Enum):
    """Outcome of a stop check: keep going, return a recognised optimum, or
    return the incumbent because the budget cannot fund another comparison."""

    CONTINUE = "continue"
    RETURN_HIT = "return-hit"
    RETURN_INCUMBENT = "return-incumbent"


def should_stop(
    rule: StoppingRule,
    candidate: Genotype,
    spec: ProblemSpec,
    meter: "BudgetMeter",
    r: int,
) -> StopDecision:
    """Stop decision for the current candidate and remaining budget.

    Pure: draws no randomness and leaves the meter untouched. The optimum
    check is only ever made under FIRST_HITTING_TIME; it takes precedence
    over the budget gate because recognising a hit costs nothing.
    """
    if rule is StoppingRule.FIRST_HITTING_TIME and is_optimal(spec, candidate):
        return StopDecision.RETURN_HIT
    if meter.remaining() < 2 * r:
        return StopDecision.RETURN_INCUMBENT
    return StopDecision.CONTINUE


def trial_success(rule: StoppingRule, result: "TrialResult", spec: ProblemSpec) -> bool:
    """Whether the trial returned the optimal solution."""
    return is_optimal(spec, result.returned)
