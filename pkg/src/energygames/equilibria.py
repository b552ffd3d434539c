"""Closed-form equilibria of the three games and their regime classification.

* ``sud_nash``: non-cooperative game, single-user decoding.
* ``stackelberg``: one leader, the others follow; single-user decoding.
* ``sic_nash``: non-cooperative game behind a successive interference canceller.

Every solver returns an :class:`EquilibriumOutcome`. When no non-saturated
equilibrium exists the outcome carries the regime and a reason, and its
power fields are ``None``: saturated equilibria are not fabricated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .efficiency import beta_star, find_root, gamma_star, interference_coefficient
from .errors import IllPosedError
from .model import ChannelState, DecodingOrder, GameConfig, sinr_sic, sinr_sud, utility

__all__ = [
    "NON_SATURATED",
    "SATURATED",
    "NONEXISTENT",
    "EquilibriumOutcome",
    "sud_nash",
    "sud_saturated_2user",
    "follower_response",
    "stackelberg",
    "stackelberg_denominator",
    "leader_utility",
    "leader_power_numeric",
    "golden_section_max",
    "sic_nash",
    "regime_check",
]

NON_SATURATED = "non-saturated"
SATURATED = "saturated"
NONEXISTENT = "nonexistent"


@dataclass
class EquilibriumOutcome:
    receiver: str
    regime: str
    powers: np.ndarray | None = None
    sinrs: np.ndarray | None = None
    utilities: np.ndarray | None = None
    throughputs: np.ndarray | None = None
    penalty: np.ndarray | None = None
    leader: int | None = None
    order: DecodingOrder | None = None
    reason: str = ""

    @property
    def exists(self) -> bool:
        return self.regime == NON_SATURATED

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else [float(v) for v in a]

        doc = {
            "receiver": self.receiver,
            "regime": self.regime,
            "powers": arr(self.powers),
            "sinrs": arr(self.sinrs),
            "utilities": arr(self.utilities),
            "throughputs": arr(self.throughputs),
            "penalty": arr(self.penalty),
        }
        if self.leader is not None:
            doc["leader"] = self.leader
        if self.order is not None:
            doc["order"] = list(self.order.order)
        if self.reason:
            doc["reason"] = self.reason
        return doc


def _no_equilibrium(config: GameConfig, receiver: str, reason: str, **extra) -> EquilibriumOutcome:
    # with caps the game still has a (saturated) equilibrium; without caps powers diverge
    regime = SATURATED if config.capped else NONEXISTENT
    return EquilibriumOutcome(receiver, regime, reason=reason, **extra)


def _finish(config: GameConfig, receiver: str, powers: np.ndarray, sinrs: np.ndarray,
            penalty: np.ndarray, **extra) -> EquilibriumOutcome:
    over = np.nonzero(powers > config.pmax)[0]
    if over.size:
        return EquilibriumOutcome(
            receiver, SATURATED,
            reason=f"power cap binds for users {over.tolist()}", **extra)
    f = config.model
    throughputs = config.rates * f(sinrs)
    return EquilibriumOutcome(
        receiver, NON_SATURATED, powers=powers, sinrs=sinrs,
        utilities=utility(config.rates, f, sinrs, powers),
        throughputs=throughputs, penalty=penalty, **extra)


def sud_nash(config: GameConfig, channel: ChannelState) -> EquilibriumOutcome:
    """Non-saturated Nash equilibrium with single-user decoding.

    Every user targets ``beta*``; the powers are
    ``sigma2 / h_i * beta* / (1 - (K-1) beta* / N)``.
    """
    b = beta_star(config.model)
    denom = 1.0 - (config.K - 1) * b / config.N
    if denom <= 0:
        return _no_equilibrium(
            config, "sud", f"1 - (K-1) beta*/N = {denom:.6g} <= 0: interference penalty is unbounded")
    mu = 1.0 / denom
    powers = config.sigma2 / channel.h2 * b * mu
    sinrs = sinr_sud(config, channel, powers)
    return _finish(config, "sud", powers, sinrs, np.full(config.K, mu))


def sud_saturated_2user(config: GameConfig, channel: ChannelState, saturated_user: int) -> np.ndarray:
    """Two-user SUD profile where ``saturated_user`` sits at its power cap.

    The other user best-responds: ``beta* (sigma2 + h_sat P_sat / N) / h``.
    """
    if config.K != 2:
        raise ValueError(f"the saturated closed form is for K = 2, got K = {config.K}")
    if saturated_user not in (0, 1):
        raise ValueError(f"saturated_user must be 0 or 1, got {saturated_user}")
    cap = config.pmax[saturated_user]
    if not math.isfinite(cap):
        raise ValueError("the saturated user needs a finite power cap")
    other = 1 - saturated_user
    b = beta_star(config.model)
    h = channel.h2
    powers = np.empty(2)
    powers[saturated_user] = cap
    powers[other] = b * (config.sigma2 + h[saturated_user] * cap / config.N) / h[other]
    return powers


def follower_response(config: GameConfig, channel: ChannelState, leader: int,
                      p_leader: float) -> np.ndarray:
    """Followers' Nash equilibrium given the leader's power.

    Returns the full profile; the leader's slot holds ``p_leader``. Each
    follower reaches SINR ``beta*``.
    """
    b = beta_star(config.model)
    slack = 1.0 - (config.K - 2) * b / config.N
    if slack <= 0:
        raise IllPosedError(f"followers' subgame is ill-posed: 1 - (K-2) beta*/N = {slack:.6g} <= 0")
    h = channel.h2
    noise = config.sigma2 + p_leader * h[leader] / config.N
    powers = b / slack * noise / h
    powers[leader] = p_leader
    return powers


def stackelberg_denominator(config: GameConfig) -> float:
    """``N - (K-2) b - (K-1) b g / N``; at ``N = 1`` this is ``1 - (K-1) g b - (K-2) b``."""
    b = beta_star(config.model)
    g = gamma_star(config.model, config.K, config.N)
    K, N = config.K, config.N
    return N - (K - 2) * b - (K - 1) * b * g / N


def stackelberg(config: GameConfig, channel: ChannelState, leader: int) -> EquilibriumOutcome:
    """Stackelberg equilibrium with ``leader`` moving first under SUD.

    Leader: ``sigma2 / h_L * g (N + b) / E``; followers:
    ``sigma2 / h_j * b (N + g) / E`` where ``b = beta*``, ``g = gamma*`` and
    ``E = N - (K-2) b - (K-1) b g / N``. The leader ends at SINR ``g`` and
    the followers at ``b``.
    """
    K, N = config.K, config.N
    if not 0 <= leader < K:
        raise ValueError(f"leader must be in 0..{K - 1}, got {leader}")
    model = config.model
    try:
        b = beta_star(model)
        g = gamma_star(model, K, N)
    except IllPosedError as exc:
        return EquilibriumOutcome("stackelberg", NONEXISTENT, leader=leader, reason=str(exc))
    E = N - (K - 2) * b - (K - 1) * b * g / N
    if E <= 0:
        return EquilibriumOutcome(
            "stackelberg", NONEXISTENT, leader=leader,
            reason=f"Stackelberg denominator {E:.6g} <= 0")
    penalty = np.full(K, (N + g) / E)
    penalty[leader] = (N + b) / E
    target = np.full(K, b)
    target[leader] = g
    powers = config.sigma2 / channel.h2 * target * penalty
    sinrs = sinr_sud(config, channel, powers)
    return _finish(config, "stackelberg", powers, sinrs, penalty, leader=leader)


def leader_utility(config: GameConfig, channel: ChannelState, leader: int) -> Callable[[float], float]:
    """Leader's utility as a function of its own power, followers re-responding."""
    f = config.model
    R = config.rates[leader]

    def u(p: float) -> float:
        profile = follower_response(config, channel, leader, p)
        return utility(R, f, sinr_sud(config, channel, profile, leader), p)

    return u


def golden_section_max(func: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-12, maxiter: int = 400) -> float:
    """Maximizer of a unimodal ``func`` on ``[lo, hi]`` by golden-section search."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = func(x1), func(x2)
    for _ in range(maxiter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = func(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = func(x1)
    return x1 if f1 >= f2 else x2


def leader_power_numeric(config: GameConfig, channel: ChannelState, leader: int,
                         span: float = 1e6) -> float:
    """Leader power maximizing its utility, found numerically.

    Golden-section search on ``log p`` over
    ``[sigma2 / h_L / span, sigma2 / h_L * span]``; independent of the
    closed form in :func:`stackelberg`.
    """
    u = leader_utility(config, channel, leader)
    scale = config.sigma2 / channel.h2[leader]
    # maximize log u: the objective is flat near the optimum, logs keep more digits
    obj = lambda t: math.log(max(u(scale * math.exp(t)), 1e-300))
    t = golden_section_max(obj, -math.log(span), math.log(span), tol=1e-15)
    # polish: root of the central-difference slope around the golden-section point
    h = 1e-5
    slope = lambda s: (obj(s + h) - obj(s - h)) / (2.0 * h)
    lo, hi = t - 1e-3, t + 1e-3
    if slope(lo) > 0.0 > slope(hi):
        t = find_root(slope, lo, hi, rtol=1e-14)
    return scale * math.exp(t)


def sic_nash(config: GameConfig, channel: ChannelState, order: DecodingOrder) -> EquilibriumOutcome:
    """Nash equilibrium behind a successive interference canceller.

    A user with ``e`` users decoded after it transmits
    ``sigma2 / h * beta* * (1 + beta*/N)**e``. Without caps it always exists.
    """
    if order.K != config.K:
        raise ValueError("decoding order length does not match K")
    b = beta_star(config.model)
    penalty = (1.0 + b / config.N) ** order.exponents()
    powers = config.sigma2 / channel.h2 * b * penalty
    sinrs = sinr_sic(config, channel, powers, order)
    return _finish(config, "sic", powers, sinrs, penalty, order=order)


def regime_check(config: GameConfig) -> dict:
    """Which receivers admit a non-saturated equilibrium (caps ignored)."""
    K, N = config.K, config.N
    b = beta_star(config.model)
    sud_denom = 1.0 - (K - 1) * b / N
    report = {
        "beta_star": b,
        "sud": sud_denom > 0,
        "sud_denominator": sud_denom,
        "sic": True,
    }
    try:
        interference_coefficient(config.model, K, N)
        E = stackelberg_denominator(config)
        report["stackelberg"] = E > 0
        report["stackelberg_denominator"] = E
    except IllPosedError as exc:
        report["stackelberg"] = False
        report["stackelberg_denominator"] = None
        report["stackelberg_reason"] = str(exc)
    return report
