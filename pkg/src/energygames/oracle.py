"""Independent checks of the closed-form equilibria.

Best-response dynamics, the monotone/scalable properties that make the
best-response map a standard interference function, and brute-force scans
for profitable unilateral deviations. None of this calls the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .efficiency import beta_star
from .equilibria import follower_response, leader_utility
from .model import ChannelState, DecodingOrder, GameConfig, sinr_sic, sinr_sud, utility

Receiver = Union[str, DecodingOrder]

__all__ = [
    "Receiver",
    "IterationTrace",
    "best_response",
    "br_iterate",
    "StandardFunctionReport",
    "standard_function_checks",
    "DeviationReport",
    "verify_no_deviation",
    "verify_leader_optimality",
]


def _interference(config: GameConfig, channel: ChannelState, receiver: Receiver,
                  p: np.ndarray) -> np.ndarray:
    """Per-user interference (already divided by ``N``) seen by the receiver."""
    rx = p * channel.h2
    if isinstance(receiver, DecodingOrder):
        idx = list(receiver.order)
        by_pos = rx[idx]
        later = np.cumsum(by_pos[::-1])[::-1] - by_pos
        out = np.empty(config.K)
        out[idx] = later
    elif receiver == "sud":
        out = rx.sum() - rx
    else:
        raise ValueError(f"receiver must be 'sud' or a DecodingOrder, got {receiver!r}")
    return out / config.N


def _best_responses(config, channel, receiver, p):
    b = beta_star(config.model)
    br = b * (config.sigma2 + _interference(config, channel, receiver, p)) / channel.h2
    return np.minimum(br, config.pmax)


def best_response(config: GameConfig, channel: ChannelState, receiver: Receiver,
                  i: int, p) -> float:
    """Power that brings user ``i`` to SINR ``beta*`` against ``p``, capped at ``pmax``."""
    p = np.asarray(p, dtype=float)
    return float(_best_responses(config, channel, receiver, p)[i])


@dataclass
class IterationTrace:
    profiles: list[np.ndarray]
    converged: bool
    iterations: int
    diverged: bool = False

    @property
    def final(self) -> np.ndarray:
        return self.profiles[-1]

    def to_dict(self) -> dict:
        return {"converged": self.converged, "diverged": self.diverged,
                "iterations": self.iterations, "final": self.final.tolist()}


def br_iterate(config: GameConfig, channel: ChannelState, receiver: Receiver,
               start=None, tol: float = 1e-9, max_iter: int = 10_000,
               keep: int | None = None) -> IterationTrace:
    """Synchronous best-response dynamics from ``start`` (zeros by default).

    Stops when the largest relative change drops below ``tol``. Aborts as
    diverged once a power exceeds ``1e12 * sigma2 / min h``. Only the last
    ``keep`` profiles are stored when ``keep`` is given.
    """
    p = np.zeros(config.K) if start is None else np.asarray(start, dtype=float).copy()
    ceiling = 1e12 * config.sigma2 / channel.h2.min()
    profiles = [p]
    for it in range(1, max_iter + 1):
        nxt = _best_responses(config, channel, receiver, p)
        change = np.max(np.abs(nxt - p) / np.maximum(np.abs(nxt), np.finfo(float).tiny))
        profiles.append(nxt)
        if keep is not None and len(profiles) > keep:
            del profiles[0]
        p = nxt
        if np.any(p > ceiling):
            return IterationTrace(profiles, False, it, diverged=True)
        if change < tol:
            return IterationTrace(profiles, True, it)
    return IterationTrace(profiles, False, max_iter)


@dataclass
class StandardFunctionReport:
    samples: int
    monotonicity_violations: int
    scalability_violations: int
    worst: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.monotonicity_violations == 0 and self.scalability_violations == 0

    def to_dict(self) -> dict:
        return {"samples": self.samples, "passed": self.passed,
                "monotonicity_violations": self.monotonicity_violations,
                "scalability_violations": self.scalability_violations,
                "worst": self.worst}


def standard_function_checks(config: GameConfig, channel: ChannelState, receiver: Receiver,
                             samples: int, seed: int = 0,
                             alpha_range: tuple[float, float] = (1.0, 10.0)) -> StandardFunctionReport:
    """Randomized test of monotonicity and scalability of the best-response map.

    Monotone: ``p >= p'`` implies ``BR(p) >= BR(p')``. Scalable: for
    ``alpha > 1``, ``alpha BR(p) > BR(alpha p)``. Caps are ignored here, as
    they are in the uniqueness argument.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    uncapped = config.with_(pmax=None)
    rng = np.random.default_rng(seed)
    scale = config.sigma2 / channel.h2
    mono = scal = 0
    worst_mono = worst_scal = 0.0
    for _ in range(samples):
        low = rng.exponential(size=config.K) * scale * rng.uniform(0.01, 100.0)
        high = low + rng.exponential(size=config.K) * scale * rng.uniform(0.0, 10.0)
        gap = _best_responses(uncapped, channel, receiver, high) - _best_responses(uncapped, channel, receiver, low)
        if np.any(gap < 0):
            mono += 1
            worst_mono = min(worst_mono, float(gap.min()))
        alpha = rng.uniform(*alpha_range)
        while alpha <= 1.0:
            alpha = rng.uniform(*alpha_range)
        margin = alpha * _best_responses(uncapped, channel, receiver, low) \
            - _best_responses(uncapped, channel, receiver, alpha * low)
        if np.any(margin <= 0):
            scal += 1
            worst_scal = min(worst_scal, float(margin.min()))
    return StandardFunctionReport(samples, mono, scal,
                                  {"monotonicity": worst_mono, "scalability": worst_scal})


@dataclass
class DeviationReport:
    passed: bool
    worst_gain: float
    worst_user: int | None
    worst_power: float | None
    users_checked: list[int]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "worst_gain": self.worst_gain,
                "worst_user": self.worst_user, "worst_power": self.worst_power,
                "users_checked": self.users_checked}


def _sinr_all(config, channel, receiver, profiles):
    if isinstance(receiver, DecodingOrder):
        return sinr_sic(config, channel, profiles, receiver)
    return sinr_sud(config, channel, profiles)


def verify_no_deviation(config: GameConfig, channel: ChannelState, receiver: Receiver, p,
                        grid: int = 2001, users=None, rtol: float = 1e-6,
                        span: float = 1e4) -> DeviationReport:
    """Scan unilateral deviations on a log grid ``[p_i / span, p_i * span]``.

    Passes when no deviation raises a user's utility by more than ``rtol``
    (relative). ``worst_gain`` is the largest relative improvement found.
    """
    if grid < 100:
        raise ValueError("grid must have at least 100 points")
    p = np.asarray(p, dtype=float)
    users = range(config.K) if users is None else users
    f = config.model
    base = utility(config.rates, f, _sinr_all(config, channel, receiver, p), p)
    factors = np.logspace(-np.log10(span), np.log10(span), grid)
    worst_gain, worst_user, worst_power = -np.inf, None, None
    for i in users:
        trial = np.tile(p, (grid, 1))
        trial[:, i] = np.minimum(p[i] * factors, config.pmax[i])
        u = utility(config.rates[i], f, _sinr_all(config, channel, receiver, trial)[:, i], trial[:, i])
        k = int(np.argmax(u))
        gain = (u[k] - base[i]) / base[i]
        if gain > worst_gain:
            worst_gain, worst_user, worst_power = float(gain), int(i), float(trial[k, i])
    return DeviationReport(bool(worst_gain <= rtol), worst_gain, worst_user, worst_power, list(users))


def verify_leader_optimality(config: GameConfig, channel: ChannelState, leader: int,
                             p_leader: float, grid: int = 2001, rtol: float = 1e-6,
                             span: float = 1e4) -> DeviationReport:
    """Leader's power against a scan where the followers re-respond at every point."""
    if grid < 100:
        raise ValueError("grid must have at least 100 points")
    u = leader_utility(config, channel, leader)
    base = u(p_leader)
    powers = p_leader * np.logspace(-np.log10(span), np.log10(span), grid)
    values = np.array([u(q) for q in powers])
    k = int(np.argmax(values))
    gain = float((values[k] - base) / base)
    return DeviationReport(gain <= rtol, gain, leader, float(powers[k]), [leader])
