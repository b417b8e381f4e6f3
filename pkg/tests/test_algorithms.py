"""Tests for the resampling optimisers and the trial loop."""

import math
import statistics

import numpy as np
import pytest

from noisybench.algorithms import (
    BudgetMeter,
    OnePlusOneEA,
    RMHC,
    compare_resampled,
    mutate_ea,
    mutate_rmhc,
    run_trial,
)
from noisybench.harness import StoppingRule
from noisybench.problems import NoiseModel, OneMaxGaussian, PMax

FHT = StoppingRule.FIRST_HITTING_TIME
FIXED = StoppingRule.FIXED_BUDGET


def bits(s: str) -> np.ndarray:
    return np.array([int(c) for c in s], dtype=np.uint8)


# ---------------------------------------------------------------------------
# budget meter
# ---------------------------------------------------------------------------

def test_budget_meter_accounting():
    meter = BudgetMeter(total=10)
    assert meter.remaining() == 10
    meter.charge(4)
    meter.charge(6)
    assert meter.used == 10 and meter.remaining() == 0
    with pytest.raises(ValueError):
        meter.charge(1)
    with pytest.raises(ValueError):
        BudgetMeter(total=0)
    with pytest.raises(ValueError):
        BudgetMeter(total=5, used=6)


# ---------------------------------------------------------------------------
# mutation operators
# ---------------------------------------------------------------------------

def test_mutate_rmhc_flips_exactly_one_bit():
    rng = np.random.default_rng(0)
    x = np.zeros(10, dtype=np.uint8)
    y = mutate_rmhc(x, rng)
    assert y.sum() == 1
    assert x.sum() == 0  # input untouched
    for _ in range(200):
        x = (np.random.default_rng(int(rng.integers(1 << 30))).random(10) < 0.5).astype(np.uint8)
        y = mutate_rmhc(x, rng)
        assert int(np.sum(x != y)) == 1


def test_mutate_rmhc_rejects_empty():
    with pytest.raises(ValueError):
        mutate_rmhc(np.array([], dtype=np.uint8), np.random.default_rng(0))


def test_mutate_rmhc_picks_positions_uniformly():
    rng = np.random.default_rng(1)
    x = bits("1011001010")
    calls = 100_000
    counts = np.zeros(10, dtype=np.int64)
    for _ in range(calls):
        y = mutate_rmhc(x, rng)
        counts[int(np.flatnonzero(x != y)[0])] += 1
    freqs = counts / calls
    assert np.all(np.abs(freqs - 0.1) < 0.006)  # ~6 SE of Bernoulli(0.1)


def test_mutate_ea_prob_one_is_complement():
    rng = np.random.default_rng(2)
    x = bits("1100101001")
    y = mutate_ea(x, 1.0, rng)
    assert np.array_equal(y, 1 - x)


def test_mutate_ea_rejects_bad_probability():
    rng = np.random.default_rng(3)
    x = bits("1010")
    for p in (0.0, -0.5, 1.0001):
        with pytest.raises(ValueError):
            mutate_ea(x, p, rng)


def test_mutate_ea_flip_statistics():
    # P(no flip) = 0.9^10 and E[flips] = 1 for n=10, p=0.1.
    rng = np.random.default_rng(4)
    x = bits("1010101010")
    calls = 100_000
    flip_counts = np.empty(calls, dtype=np.int64)
    for i in range(calls):
        flip_counts[i] = int(np.sum(x != mutate_ea(x, 0.1, rng)))
    zero_rate = float(np.mean(flip_counts == 0))
    assert abs(zero_rate - 0.9**10) < 0.009
    assert abs(float(flip_counts.mean()) - 1.0) < 0.018


def test_mutate_ea_zero_flips_possible():
    rng = np.random.default_rng(5)
    x = bits("1111100000")
    assert any(np.array_equal(x, mutate_ea(x, 0.1, rng)) for _ in range(200))


# ---------------------------------------------------------------------------
# resampled comparison
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("r", [1, 3, 10])
def test_compare_pmax_sure_winner(r):
    spec = PMax(n=10)
    rng = np.random.default_rng(6)
    ones = np.ones(10, dtype=np.uint8)
    zeros = np.zeros(10, dtype=np.uint8)
    for _ in range(50):
        meter = BudgetMeter(total=2 * r)
        assert compare_resampled(spec, ones, zeros, r, meter, rng)
        assert meter.used == 2 * r


def test_compare_charges_exactly_2r():
    spec = OneMaxGaussian(n=10)
    rng = np.random.default_rng(7)
    x = bits("1111100000")
    for r in (1, 7, 25):
        meter = BudgetMeter(total=1000)
        compare_resampled(spec, x, x, r, meter, rng)
        assert meter.used == 2 * r


def test_compare_insufficient_budget_raises_without_charging():
    spec = OneMaxGaussian(n=10)
    rng = np.random.default_rng(8)
    x = bits("1111100000")
    meter = BudgetMeter(total=5)
    with pytest.raises(ValueError):
        compare_resampled(spec, x, x, 3, meter, rng)
    assert meter.used == 0


def test_compare_zero_noise_tie_accepts_challenger():
    # Equal true fitness and no noise: the >= acceptance always replaces.
    spec = OneMaxGaussian(n=10, noise=NoiseModel(0.0, 0.0))
    rng = np.random.default_rng(9)
    challenger = bits("1111100000")
    incumbent = bits("0000011111")
    for r in (1, 4):
        meter = BudgetMeter(total=100)
        assert compare_resampled(spec, challenger, incumbent, r, meter, rng)


def test_compare_gaussian_acceptance_probability():
    # True-fitness gap 1 at r=1, sigma=1: acceptance = Phi(sqrt(1/2)).
    spec = OneMaxGaussian(n=10)
    rng = np.random.default_rng(10)
    challenger = np.ones(10, dtype=np.uint8)
    incumbent = bits("1111111110")
    expected = statistics.NormalDist().cdf(math.sqrt(0.5))
    trials = 100_000
    accepted = 0
    for _ in range(trials):
        meter = BudgetMeter(total=2)
        accepted += compare_resampled(spec, challenger, incumbent, 1, meter, rng)
    assert abs(accepted / trials - expected) < 0.009


def test_compare_pmax_equal_genotypes_near_half():
    # Accept = 1 - p(1-p) for identical genotypes at r=1; ~3/4 at p ~ 0.5.
    spec = PMax(n=10)
    rng = np.random.default_rng(11)
    x = bits("1000000000")  # win probability 512/1023
    trials = 40_000
    accepted = 0
    for _ in range(trials):
        meter = BudgetMeter(total=2)
        accepted += compare_resampled(spec, x, x, 1, meter, rng)
    assert abs(accepted / trials - 0.75) < 0.015


# ---------------------------------------------------------------------------
# trial loop
# ---------------------------------------------------------------------------

def test_trial_too_small_budget_returns_initial():
    spec = OneMaxGaussian(n=10)
    for rule in (FHT, FIXED):
        rng = np.random.Generator(np.random.Philox(key=12))
        result = run_trial(RMHC(), spec, rule, 1, 1, rng)
        assert result.evals_used == 0
        assert result.iterations == 0
        assert result.returned.shape == (10,)


def test_trial_fht_optimal_initial_is_free():
    spec = PMax(n=10)
    rng = np.random.Generator(np.random.Philox(key=13))
    result = run_trial(
        OnePlusOneEA(), spec, FHT, 5, 500, rng, initial=np.ones(10, dtype=np.uint8)
    )
    assert result.success
    assert result.evals_used == 0
    assert result.first_hit_evals == 0
    assert result.iterations == 0


def test_trial_fixed_budget_never_returns_early():
    spec = OneMaxGaussian(n=10)
    rng = np.random.Generator(np.random.Philox(key=14))
    result = run_trial(
        RMHC(), spec, FIXED, 1, 500, rng, initial=np.ones(10, dtype=np.uint8)
    )
    assert result.evals_used == 500
    assert result.first_hit_evals is None


def test_trial_budget_accounting():
    spec = OneMaxGaussian(n=10)
    for r, budget in ((1, 500), (7, 500), (25, 499), (3, 6)):
        rng = np.random.Generator(np.random.Philox(key=15))
        result = run_trial(RMHC(), spec, FIXED, r, budget, rng)
        expected = 2 * r * (budget // (2 * r))
        assert result.evals_used == expected
        assert result.evals_used == 2 * r * result.iterations


def test_trial_fht_hit_consistency():
    spec = OneMaxGaussian(n=10)
    hits = 0
    for key in range(60):
        rng = np.random.Generator(np.random.Philox(key=key))
        result = run_trial(RMHC(), spec, FHT, 1, 500, rng)
        assert result.evals_used <= 500
        if result.first_hit_evals is not None:
            hits += 1
            assert result.success
            assert result.first_hit_evals == result.evals_used
            assert np.all(result.returned == 1)
        else:
            assert result.evals_used == 2 * result.iterations
    assert hits > 0  # most seeds hit on this problem


def test_trial_noise_free_hill_climb_succeeds():
    spec = OneMaxGaussian(n=10, noise=NoiseModel(0.0, 0.0))
    successes = 0
    for key in range(200):
        rng = np.random.Generator(np.random.Philox(key=key))
        successes += run_trial(RMHC(), spec, FIXED, 1, 500, rng).success
    assert successes / 200 >= 0.95


def test_trial_is_deterministic():
    spec = PMax(n=10)
    a = run_trial(OnePlusOneEA(), spec, FIXED, 2, 500, np.random.Generator(np.random.Philox(key=16)))
    b = run_trial(OnePlusOneEA(), spec, FIXED, 2, 500, np.random.Generator(np.random.Philox(key=16)))
    assert np.array_equal(a.returned, b.returned)
    assert (a.success, a.evals_used, a.first_hit_evals, a.iterations) == (
        b.success, b.evals_used, b.first_hit_evals, b.iterations
    )


def test_trial_validates_arguments():
    spec = OneMaxGaussian(n=10)
    rng = np.random.default_rng(17)
    with pytest.raises(ValueError):
        run_trial(RMHC(), spec, FIXED, 0, 500, rng)
    with pytest.raises(ValueError):
        run_trial(RMHC(), spec, FIXED, 1, 500, rng, initial=np.ones(9, dtype=np.uint8))
    with pytest.raises(ValueError):
        run_trial(RMHC(), spec, FIXED, 1, 500, rng, initial=np.full(10, 2, dtype=np.uint8))
    with pytest.raises(ValueError):
        OnePlusOneEA(mutation_prob=0.0)


def test_default_mutation_prob_is_one_over_n():
    assert OnePlusOneEA().resolved_mutation_prob(10) == 0.1
    assert OnePlusOneEA(mutation_prob=0.25).resolved_mutation_prob(10) == 0.25
