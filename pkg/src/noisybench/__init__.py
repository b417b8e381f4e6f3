"""Benchmark harness for resampling optimisers on noisy binary problems.

Two noisy test problems (Gaussian-noise OneMax and a Bernoulli win/loss
landscape), two resampling optimisers (a random-mutation hill climber and a
(1+1) evolutionary algorithm), and two ways of scoring a run: stop at the
first visit to the optimum, or judge only the solution held when a fixed
evaluation budget runs out. The experiment grid sweeps resampling rates and
reports success rates with confidence intervals, deterministically for a
given master seed.
"""

__version__ = "0.1.0"

from .algorithms import (
    AlgorithmSpec,
    BudgetMeter,
    OnePlusOneEA,
    RMHC,
    TrialResult,
    compare_resampled,
    mutate_ea,
    mutate_rmhc,
    run_trial,
)
from .experiment import (
    BestRSummary,
    ExperimentConfig,
    ResultRow,
    best_r_summary,
    run_experiment,
    wilson_interval,
)
from .harness import StopDecision, StoppingRule, should_stop, trial_success
from .problems import (
    NoiseModel,
    OneMaxGaussian,
    PMax,
    ProblemSpec,
    genotype_value,
    is_optimal,
    noisy_eval,
    random_genotype,
    true_fitness,
)

__all__ = [
    "AlgorithmSpec",
    "BestRSummary",
    "BudgetMeter",
    "ExperimentConfig",
    "NoiseModel",
    "OnePlusOneEA",
    "OneMaxGaussian",
    "PMax",
    "ProblemSpec",
    "RMHC",
    "ResultRow",
    "StopDecision",
    "StoppingRule",
    "TrialResult",
    "best_r_summary",
    "compare_resampled",
    "genotype_value",
    "is_optimal",
    "mutate_ea",
    "mutate_rmhc",
    "noisy_eval",
    "random_genotype",
    "run_experiment",
    "run_trial",
    "should_stop",
    "trial_success",
    "true_fitness",
    "wilson_interval",
]
