"""Noisy binary fitness landscapes behind one uniform problem contract.

Two maximisation problems over n-bit strings, both with the all-ones string as
their unique optimum:

* ``OneMaxGaussian`` -- the count of 1-bits corrupted by additive Gaussian
  noise.
* ``PMax`` -- a win/loss sampler: each evaluation returns 1 with probability
  ``value(x) / (2**n - 1)`` (the bit string read as a binary number, first bit
  most significant), else 0.

Each problem exposes a deterministic noise-free fitness, a noisy sampler, and
a structural optimum test. All operations are pure given their random
generator argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# PMax value arithmetic uses 64-bit integers; 2**n - 1 must not overflow.
MAX_PMAX_DIMENSION = 62

Genotype = np.ndarray  # 1-D uint8 array of 0/1 values, length = problem dimension


@dataclass(frozen=True)
class NoiseModel:
    """Additive Gaussian noise with a given mean and standard deviation."""

    mean: float = 0.0
    stddev: float = 1.0

    def __post_init__(self) -> None:
        if self.stddev < 0:
            raise ValueError(f"noise stddev must be >= 0, got {self.stddev}")


@dataclass(frozen=True)
class OneMaxGaussian:
    """Count of 1-bits plus one fresh Gaussian noise draw per evaluation."""

    n: int
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")


@dataclass(frozen=True)
class PMax:
    """Bernoulli win/loss outcome with win probability value(x) / (2**n - 1)."""

    n: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_PMAX_DIMENSION:
            raise ValueError(
                f"dimension must be in [1, {MAX_PMAX_DIMENSION}], got {self.n}"
            )


ProblemSpec = OneMaxGaussian | PMax


def random_genotype(n: int, rng: np.random.Generator) -> Genotype:
    """Uniform random bit string of length n (one int64 draw per bit)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return rng.integers(0, 2, size=n).astype(np.uint8)


def genotype_value(x: Genotype) -> int:
    """Integer value of the bit string, first bit most significant."""
    value = 0
    for b in x:
        value = (value << 1) | int(b)
    return value


def _check_genotype(spec: ProblemSpec, x: Genotype) -> None:
    if x.ndim != 1 or x.shape[0] != spec.n:
        raise ValueError(
            f"genotype has shape {x.shape}, expected ({spec.n},) for this problem"
        )


def _win_probability(spec: PMax, x: Genotype) -> float:
    return genotype_value(x) / ((1 << spec.n) - 1)


def true_fitness(spec: ProblemSpec, x: Genotype) -> float:
    """Noise-free fitness. Deterministic; draws no randomness, costs no budget."""
    _check_genotype(spec, x)
    if isinstance(spec, OneMaxGaussian):
        return float(np.sum(x, dtype=np.int64))
    return _win_probability(spec, x)


def noisy_eval(
    spec: ProblemSpec,
    x: Genotype,
    rng: np.random.Generator,
    size: int | None = None,
) -> float | np.ndarray:
    """One noisy fitness sample (or ``size`` independent samples at once).

    Every call draws fresh randomness; consecutive calls on the same genotype
    are independent. Batched draws consume the generator exactly like the
    equivalent sequence of scalar draws.
    """
    _check_genotype(spec, x)
    if isinstance(spec, OneMaxGaussian):
        ones = float(np.sum(x, dtype=np.int64))
        if size is None:
            return ones + rng.normal(spec.noise.mean, spec.noise.stddev)
        return ones + rng.normal(spec.noise.mean, spec.noise.stddev, size=size)
    p_win = _win_probability(spec, x)
    if size is None:
        return 1.0 if rng.random() < p_win else 0.0
    return (rng.random(size=size) < p_win).astype(np.float64)


def is_optimal(spec: ProblemSpec, x: Genotype) -> bool:
    """True only for the all-ones string; judged structurally, never via fitness."""
    _check_genotype(spec, x)
    return bool(np.all(x == 1))
