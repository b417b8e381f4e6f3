"""Tests for the two noisy fitness landscapes."""

import math

import numpy as np
import pytest

from noisybench.problems import (
    MAX_PMAX_DIMENSION,
    NoiseModel,
    OneMaxGaussian,
    PMax,
    genotype_value,
    is_optimal,
    noisy_eval,
    random_genotype,
    true_fitness,
)


def bits(s: str) -> np.ndarray:
    return np.array([int(c) for c in s], dtype=np.uint8)


def all_genotypes(n: int):
    for v in range(1 << n):
        yield np.array([(v >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def test_spec_validation():
    with pytest.raises(ValueError):
        NoiseModel(stddev=-0.1)
    with pytest.raises(ValueError):
        OneMaxGaussian(n=0)
    with pytest.raises(ValueError):
        PMax(n=0)
    with pytest.raises(ValueError):
        PMax(n=MAX_PMAX_DIMENSION + 1)
    PMax(n=MAX_PMAX_DIMENSION)  # boundary is allowed
    NoiseModel(stddev=0.0)


def test_genotype_value_is_msb_first():
    assert genotype_value(bits("1000000000")) == 512
    assert genotype_value(bits("0000000001")) == 1
    assert genotype_value(bits("1111111111")) == 1023
    assert genotype_value(bits("0")) == 0


def test_true_fitness_onemax():
    spec = OneMaxGaussian(n=10)
    assert true_fitness(spec, np.ones(10, dtype=np.uint8)) == 10.0
    assert true_fitness(spec, np.zeros(10, dtype=np.uint8)) == 0.0
    assert true_fitness(spec, bits("1010101010")) == 5.0


def test_true_fitness_pmax():
    spec = PMax(n=10)
    assert true_fitness(spec, np.ones(10, dtype=np.uint8)) == 1.0
    assert true_fitness(spec, np.zeros(10, dtype=np.uint8)) == 0.0
    value_512 = true_fitness(spec, bits("1000000000"))
    assert value_512 == 512 / 1023
    assert abs(value_512 - 0.500489) < 1e-6


def test_true_fitness_is_deterministic():
    spec = PMax(n=10)
    x = bits("1011001110")
    assert true_fitness(spec, x) == true_fitness(spec, x)


@pytest.mark.parametrize("spec", [OneMaxGaussian(n=10), PMax(n=10)])
def test_dimension_mismatch_rejected(spec):
    rng = np.random.default_rng(0)
    short = np.ones(9, dtype=np.uint8)
    with pytest.raises(ValueError):
        true_fitness(spec, short)
    with pytest.raises(ValueError):
        noisy_eval(spec, short, rng)
    with pytest.raises(ValueError):
        is_optimal(spec, short)


def test_pmax_extremes_are_deterministic():
    spec = PMax(n=10)
    rng = np.random.default_rng(1)
    zeros = np.zeros(10, dtype=np.uint8)
    ones = np.ones(10, dtype=np.uint8)
    assert all(noisy_eval(spec, zeros, rng) == 0.0 for _ in range(200))
    assert all(noisy_eval(spec, ones, rng) == 1.0 for _ in range(200))


def test_pmax_samples_are_binary():
    spec = PMax(n=10)
    rng = np.random.default_rng(2)
    samples = noisy_eval(spec, bits("1001101011"), rng, size=5000)
    assert set(np.unique(samples)) <= {0.0, 1.0}


def test_noisy_eval_mean_converges_onemax():
    # Monte-Carlo check of the additive-noise model at 6 standard errors.
    spec = OneMaxGaussian(n=10, noise=NoiseModel(0.0, 1.0))
    rng = np.random.default_rng(3)
    n_samples = 100_000
    samples = noisy_eval(spec, np.ones(10, dtype=np.uint8), rng, size=n_samples)
    assert abs(samples.mean() - 10.0) < 0.02  # ~6 * sigma / sqrt(n_samples)


@pytest.mark.parametrize("genotype", ["1000000000", "1111100000", "0000000001"])
def test_noisy_eval_mean_converges_pmax(genotype):
    spec = PMax(n=10)
    rng = np.random.default_rng(4)
    x = bits(genotype)
    p = true_fitness(spec, x)
    n_samples = 100_000
    samples = noisy_eval(spec, x, rng, size=n_samples)
    tol = 6 * math.sqrt(p * (1 - p) / n_samples)
    assert abs(samples.mean() - p) < tol


def test_noisy_eval_scalar_batch_stream_equivalence():
    # A size-r batch consumes the generator exactly like r scalar draws.
    for spec in (OneMaxGaussian(n=8), PMax(n=8)):
        x = bits("10110100")
        r1 = np.random.Generator(np.random.Philox(key=9))
        r2 = np.random.Generator(np.random.Philox(key=9))
        batch = noisy_eval(spec, x, r1, size=16)
        scalars = np.array([noisy_eval(spec, x, r2) for _ in range(16)])
        assert np.array_equal(batch, scalars)


def test_is_optimal_structural():
    for spec in (OneMaxGaussian(n=10), PMax(n=10)):
        assert is_optimal(spec, np.ones(10, dtype=np.uint8))
        assert not is_optimal(spec, bits("1111111110"))
        assert not is_optimal(spec, np.zeros(10, dtype=np.uint8))


@pytest.mark.parametrize("n", [4, 10])
def test_optimum_is_unique_maximiser_exhaustively(n):
    for spec in (OneMaxGaussian(n=n), PMax(n=n)):
        fitnesses = {}
        for x in all_genotypes(n):
            fitnesses[genotype_value(x)] = (true_fitness(spec, x), is_optimal(spec, x))
        best = max(f for f, _ in fitnesses.values())
        for value, (f, optimal) in fitnesses.items():
            assert optimal == (f == best)
            assert optimal == (value == (1 << n) - 1)


@pytest.mark.parametrize("n", [4, 10, 12])
def test_pmax_win_probabilities_cover_the_full_ladder(n):
    spec = PMax(n=n)
    denom = (1 << n) - 1
    observed = {true_fitness(spec, x) for x in all_genotypes(n)}
    assert observed == {k / denom for k in range(denom + 1)}


def test_random_genotype_shape_and_values():
    rng = np.random.default_rng(5)
    x = random_genotype(12, rng)
    assert x.shape == (12,) and x.dtype == np.uint8
    assert set(np.unique(x)) <= {0, 1}
    with pytest.raises(ValueError):
        random_genotype(0, rng)


def test_random_genotype_is_uniform():
    rng = np.random.default_rng(6)
    draws = 20_000
    ones = sum(random_genotype(10, rng).sum() for _ in range(draws))
    freq = ones / (10 * draws)
    assert abs(freq - 0.5) < 6 * math.sqrt(0.25 / (10 * draws))
