import numpy as np
import pytest

from lifrecon import EventSequence, generate_random_bandlimited

THETA = 0.01


def random_events(rng, n, theta=THETA, alpha=0.1, span=10.0, times=None):
    """Random event sequence with ``n`` events on ``[0, span]``."""
    if times is None:
        times = np.sort(rng.uniform(0.0, span, n))
        times = np.unique(times)
    values = rng.choice([-theta, theta], size=len(times))
    return EventSequence(times, values, theta, alpha, 0.0, span)


def corpus_signal(seed, n_atoms=8, window=(0.0, 20.0), omega=1.0):
    return generate_random_bandlimited(omega, n_atoms, (-1.0, 1.0), window, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def corpus():
    return [corpus_signal(seed) for seed in range(6)]
