import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from energygames import ChannelState, GameConfig
from energygames.equilibria import regime_check

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

M_CHOICES = (2, 5, 10, 20, 50, 100)
N_CHOICES = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def random_instance(rng, K_max=5, need=("stackelberg",), K_min=1, max_load=None):
    """Draw a random game whose listed receivers admit a non-saturated equilibrium.

    ``max_load`` bounds ``(K-1) beta*/N``, which is also the contraction
    factor of SUD best-response dynamics.
    """
    while True:
        K = int(rng.integers(K_min, K_max + 1))
        config = GameConfig(
            K=K, N=float(rng.choice(N_CHOICES)), M=int(rng.choice(M_CHOICES)),
            sigma2=float(10.0 ** rng.uniform(-1.5, 1.0)),
            rates=rng.uniform(0.5, 2.0, size=K) * 1e5)
        regimes = regime_check(config)
        if not all(regimes[r] for r in need):
            continue
        if max_load is not None and 1.0 - regimes["sud_denominator"] > max_load:
            continue
        return config, ChannelState(rng.exponential(size=K) + 1e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_user():
    """K=2, N=1, M=2, unit noise and channels."""
    return GameConfig(K=2, N=1.0, M=2, sigma2=1.0), ChannelState([1.0, 1.0])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
