"""Compiled execution engine for running many trials fast.

One grid cell (problem, algorithm, stopping rule, r) runs all of its trials
inside a single jitted loop. Each trial draws from its own counter-based
random stream, keyed by (master_seed, cell ordinal, trial ordinal) via
``trial_key``, so any single trial can be re-run in isolation and results
never depend on scheduling.

The trial loop here consumes randomness in exactly the same order as the
pure-Python reference ``algorithms.run_trial`` (numba's generator methods
draw bit-identically to numpy's); the test suite pins that equivalence.

Cell runs rekey one scratch generator per process and are serialised with a
lock; use process-based workers for parallelism (``experiment`` does).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
from numba import njit, objmode

from .algorithms import AlgorithmSpec, OnePlusOneEA, RMHC, TrialResult
from .harness import StoppingRule
from .problems import OneMaxGaussian, PMax, ProblemSpec

PROBLEM_ONEMAX = 0
PROBLEM_PMAX = 1
ALG_RMHC = 0
ALG_EA = 1
RULE_FHT = 0
RULE_FIXED_BUDGET = 1

_KEY_WORD = 1 << 64
_ORDINAL_SPAN = 1 << 32


@dataclass(frozen=True)
class CellResult:
    """Per-trial outcomes for one grid cell (index = trial ordinal)."""

    successes: np.ndarray  # bool
    evals_used: np.ndarray  # int64
    first_hit_evals: np.ndarray  # int64, -1 where no hit ended the trial
    iterations: np.ndarray  # int64


def trial_key(master_seed: int, cell_ordinal: int, trial_ordinal: int) -> int:
    """128-bit stream key: master seed in the high word, (cell, trial) packed
    into the low word.

    Distinct (master_seed, cell, trial) triples give distinct keys by
    construction, and distinct keys select independent Philox streams.
    """
    if not 0 <= master_seed < _KEY_WORD:
        raise ValueError(f"master_seed must be a 64-bit unsigned int, got {master_seed}")
    if not 0 <= cell_ordinal < _ORDINAL_SPAN:
        raise ValueError(f"cell_ordinal out of range: {cell_ordinal}")
    if not 0 <= trial_ordinal < _ORDINAL_SPAN:
        raise ValueError(f"trial_ordinal out of range: {trial_ordinal}")
    return (master_seed << 64) | (cell_ordinal << 32) | trial_ordinal


def trial_rng(master_seed: int, cell_ordinal: int, trial_ordinal: int) -> np.random.Generator:
    """The random stream a given trial draws from."""
    return np.random.Generator(
        np.random.Philox(key=trial_key(master_seed, cell_ordinal, trial_ordinal))
    )


def _problem_params(spec: ProblemSpec) -> tuple[int, int, float, float]:
    if isinstance(spec, OneMaxGaussian):
        return PROBLEM_ONEMAX, spec.n, spec.noise.mean, spec.noise.stddev
    if isinstance(spec, PMax):
        return PROBLEM_PMAX, spec.n, 0.0, 0.0
    raise TypeError(f"unknown problem spec: {spec!r}")


def _algorithm_params(alg: AlgorithmSpec, n: int) -> tuple[int, float]:
    if isinstance(alg, RMHC):
        return ALG_RMHC, 0.0
    if isinstance(alg, OnePlusOneEA):
        p = alg.resolved_mutation_prob(n)
        if not 0 < p <= 1:
            raise ValueError(f"mutation_prob must be in (0, 1], got {p}")
        return ALG_EA, p
    raise TypeError(f"unknown algorithm spec: {alg!r}")


def _rule_code(rule: StoppingRule) -> int:
    return RULE_FHT if rule is StoppingRule.FIRST_HITTING_TIME else RULE_FIXED_BUDGET


@njit(cache=True)
def _trial_kernel(problem, n, mu, sigma, alg, mut_p, rule, r, budget_total, rng, bits):
    """One trial; fills ``bits`` with the returned genotype.

    Returns (evals_used, first_hit_evals or -1, iterations, ones-count of the
    returned genotype). Draw order per trial: n init bits, then per iteration
    mutation draws, r challenger samples, r incumbent samples.
    """
    ones = 0
    value = np.int64(0)
    for i in range(n):
        b = np.uint8(rng.integers(0, 2))
        bits[i] = b
        ones += b
        if problem == PROBLEM_PMAX:
            value = value * 2 + b
    denom = 1.0
    if problem == PROBLEM_PMAX:
        denom = float((np.int64(1) << np.int64(n)) - np.int64(1))

    used = 0
    iterations = 0

    if rule == RULE_FHT and ones == n:
        return 0, np.int64(0), 0, ones

    challenger = np.empty(n, dtype=np.uint8)
    while used + 2 * r <= budget_total:
        c_ones = ones
        c_value = value
        for i in range(n):
            challenger[i] = bits[i]
        if alg == ALG_RMHC:
            d = rng.integers(0, n)
            flipped = np.uint8(1) - challenger[d]
            challenger[d] = flipped
            if flipped == 1:
                c_ones += 1
            else:
                c_ones -= 1
            if problem == PROBLEM_PMAX:
                w = np.int64(1) << np.int64(n - 1 - d)
                c_value = c_value + w if flipped == 1 else c_value - w
        else:
            for d in range(n):
                if rng.random() < mut_p:
                    flipped = np.uint8(1) - challenger[d]
                    challenger[d] = flipped
                    if flipped == 1:
                        c_ones += 1
                    else:
                        c_ones -= 1
                    if problem == PROBLEM_PMAX:
                        w = np.int64(1) << np.int64(n - 1 - d)
                        c_value = c_value + w if flipped == 1 else c_value - w

        if rule == RULE_FHT and c_ones == n:
            for i in range(n):
                bits[i] = challenger[i]
            return used, np.int64(used), iterations, c_ones

        sum_c = 0.0
        sum_i = 0.0
        if problem == PROBLEM_ONEMAX:
            for _ in range(r):
                sum_c += c_ones + rng.normal(mu, sigma)
            for _ in range(r):
                sum_i += ones + rng.normal(mu, sigma)
        else:
            p_c = c_value / denom
            p_i = value / denom
            for _ in range(r):
                if rng.random() < p_c:
                    sum_c += 1.0
            for _ in range(r):
                if rng.random() < p_i:
                    sum_i += 1.0
        used += 2 * r
        iterations += 1
        if sum_c >= sum_i:
            ones = c_ones
            value = c_value
            for i in range(n):
                bits[i] = challenger[i]

    return used, np.int64(-1), iterations, ones


# One scratch generator per process; rekeyed once per trial by the cell loop.
_SCRATCH_BITGEN = np.random.Philox(key=0)
_SCRATCH_RNG = np.random.Generator(_SCRATCH_BITGEN)
_SCRATCH_LOCK = threading.Lock()


def _rekey_scratch(key_lo, key_hi):
    state = _SCRATCH_BITGEN.state
    state["state"]["key"][0] = key_lo
    state["state"]["key"][1] = key_hi
    state["state"]["counter"][:] = 0
    state["buffer_pos"] = 4
    state["has_uint32"] = 0
    state["uinteger"] = 0
    _SCRATCH_BITGEN.state = state


@njit(cache=True)
def _cell_kernel(
    problem, n, mu, sigma, alg, mut_p, rule, r, budget_total,
    rng, key_lo, key_hi, successes, evals_used, first_hits, iterations,
):
    bits = np.empty(n, dtype=np.uint8)
    for t in range(key_lo.shape[0]):
        lo = key_lo[t]
        hi = key_hi[t]
        with objmode():
            _rekey_scratch(lo, hi)
        used, hit, iters, ones = _trial_kernel(
            problem, n, mu, sigma, alg, mut_p, rule, r, budget_total, rng, bits
        )
        successes[t] = ones == n
        evals_used[t] = used
        first_hits[t] = hit
        iterations[t] = iters


def run_single(
    problem: ProblemSpec,
    algorithm: AlgorithmSpec,
    rule: StoppingRule,
    r: int,
    budget_total: int,
    rng: np.random.Generator,
) -> TrialResult:
    """One compiled trial on a caller-supplied generator.

    Drop-in equivalent of ``algorithms.run_trial`` (without the initial-
    genotype hook); used for equivalence testing and replay cross-checks.
    """
    if r < 1:
        raise ValueError(f"resampling rate must be >= 1, got {r}")
    if budget_total < 1:
        raise ValueError(f"budget total must be >= 1, got {budget_total}")
    p_code, n, mu, sigma = _problem_params(problem)
    a_code, mut_p = _algorithm_params(algorithm, n)
    bits = np.empty(n, dtype=np.uint8)
    used, hit, iters, ones = _trial_kernel(
        p_code, n, mu, sigma, a_code, mut_p, _rule_code(rule), r, budget_total, rng, bits
    )
    return TrialResult(
        returned=bits,
        success=ones == n,
        evals_used=int(used),
        first_hit_evals=int(hit) if hit >= 0 else None,
        iterations=int(iters),
    )


def run_cell(
    problem: ProblemSpec,
    algorithm: AlgorithmSpec,
    rule: StoppingRule,
    r: int,
    budget_total: int,
    trials: int,
    master_seed: int,
    cell_ordinal: int,
) -> CellResult:
    """All trials of one grid cell, each on its own derived stream."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if r < 1:
        raise ValueError(f"resampling rate must be >= 1, got {r}")
    if budget_total < 1:
        raise ValueError(f"budget total must be >= 1, got {budget_total}")
    # Validates ranges for the whole batch (first and last trial ordinals).
    trial_key(master_seed, cell_ordinal, 0)
    trial_key(master_seed, cell_ordinal, trials - 1)

    p_code, n, mu, sigma = _problem_params(problem)
    a_code, mut_p = _algorithm_params(algorithm, n)

    key_lo = np.uint64(cell_ordinal << 32) + np.arange(trials, dtype=np.uint64)
    key_hi = np.full(trials, master_seed, dtype=np.uint64)
    successes = np.zeros(trials, dtype=np.bool_)
    evals_used = np.zeros(trials, dtype=np.int64)
    first_hits = np.zeros(trials, dtype=np.int64)
    iterations = np.zeros(trials, dtype=np.int64)

    with _SCRATCH_LOCK:
        _cell_kernel(
            p_code, n, mu, sigma, a_code, mut_p, _rule_code(rule), r, budget_total,
            _SCRATCH_RNG, key_lo, key_hi, successes, evals_used, first_hits, iterations,
        )
    return CellResult(successes, evals_used, first_hits, iterations)
