"""Shared fixtures: the design-example configuration and random problem factories."""

import math

import numpy as np
import pytest

from app.config import config_from_dict
from app.core_model import BandSpec, FilterBank, SamplingPattern, SignalTrace
from app.designer import DesignProblem


@pytest.fixture
def example_band():
    """Carrier 5.15*pi, bandwidth 0.8*pi: band edges 4.75*pi and 5.55*pi."""
    return BandSpec.from_normalized(5.15, 0.8)


@pytest.fixture
def example_pattern():
    return SamplingPattern(2, (0.0, -0.15))


@pytest.fixture
def example_problem(example_pattern, example_band):
    return DesignProblem(example_pattern, example_band, 60)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def random_problem(rng):
    """
    Factory for well-conditioned random problems: wide bands and moderate skews
    keep the Gram matrix far from singular at small orders.
    """
    def make(M=None, N=None, max_skew=0.3):
        M = int(rng.integers(1, 6)) if M is None else M
        N = int(rng.choice([6, 8, 10, 12, 14])) if N is None else N
        skews = tuple(rng.uniform(-max_skew, max_skew, size=M))
        B = rng.uniform(0.8, 0.9) * math.pi
        if M == 1:
            omega_c = 0.5 * math.pi
        else:
            omega_c = B / 2 + rng.uniform(0.05, 3.0) * math.pi
        return DesignProblem(SamplingPattern(M, skews), BandSpec(omega_c, B), N)
    return make


@pytest.fixture
def random_bank(rng, random_problem):
    """
    Factory for a bank with random complex rows (the reconstruction paths accept
    any coefficients) plus a random complex input trace.
    """
    def make(M, N=None, length=4096, start=0):
        N = int(rng.choice(np.arange(8, 42, 2))) if N is None else N
        problem = random_problem(M=M, N=N)
        subset = M % 2 == 0
        rows = {n: rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)
                for n in range(M) if not (subset and n % 2)}
        bank = FilterBank(M=M, N=N, rows=rows, band=problem.band, pattern=problem.pattern,
                          designed_subset=subset)
        samples = rng.standard_normal(length) + 1j * rng.standard_normal(length)
        return bank, SignalTrace(samples, start)
    return make


@pytest.fixture
def example_config(tmp_path):
    """Design-example run configuration writing into a temporary directory."""
    return config_from_dict({"output_dir": str(tmp_path / "out")})
