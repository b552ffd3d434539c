"""Network-level efficiency and the receiver's choice of leader or decoding order.

Two network scores are used throughout:

* social welfare ``w = sum_i u_i``;
* EVMN efficiency ``v = sum_i T_i / sum_i p_i``, the efficiency of an
  equivalent transmitter with all antennas co-located.

User ids are 0-based. Ties are broken towards the lowest user id, then the
lexicographically smallest decoding order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .efficiency import EfficiencyModel, beta_star, gamma_star
from .equilibria import EquilibriumOutcome, sic_nash, stackelberg
from .errors import InfeasibleError
from .model import ChannelState, DecodingOrder, GameConfig

__all__ = [
    "social_welfare",
    "evmn",
    "score",
    "SelectionReport",
    "enumerate_leaders",
    "enumerate_orders",
    "best_leader_welfare",
    "best_order_welfare",
    "best_leader_evmn",
    "best_order_evmn",
    "select",
    "rho_sequence",
    "rho_curve",
    "leader_follower_ratio",
    "se_gain_ratios",
]

SCORE_RTOL = 1e-12


def social_welfare(outcome: EquilibriumOutcome) -> float:
    if not outcome.exists:
        raise InfeasibleError(f"no equilibrium to score ({outcome.regime}): {outcome.reason}")
    return math.fsum(outcome.utilities)


def evmn(outcome: EquilibriumOutcome) -> float:
    if not outcome.exists:
        raise InfeasibleError(f"no equilibrium to score ({outcome.regime}): {outcome.reason}")
    return math.fsum(outcome.throughputs) / math.fsum(outcome.powers)


def score(outcome: EquilibriumOutcome, metric: str) -> float:
    if metric == "welfare":
        return social_welfare(outcome)
    if metric == "evmn":
        return evmn(outcome)
    raise ValueError(f"metric must be 'welfare' or 'evmn', got {metric!r}")


def _first_best(scores) -> int:
    scores = np.asarray(scores, dtype=float)
    top = np.nanmax(scores)
    return int(np.flatnonzero(scores >= top - SCORE_RTOL * abs(top))[0])


def enumerate_leaders(config: GameConfig, channel: ChannelState, metric: str) -> np.ndarray:
    """Score of the Stackelberg outcome for every choice of leader (NaN if infeasible)."""
    out = np.full(config.K, np.nan)
    for i in range(config.K):
        o = stackelberg(config, channel, i)
        if o.exists:
            out[i] = score(o, metric)
    return out


def enumerate_orders(config: GameConfig, channel: ChannelState, metric: str
                     ) -> list[tuple[DecodingOrder, float]]:
    """Score of the SIC equilibrium for every decoding order, in lexicographic order."""
    rows = []
    for perm in itertools.permutations(range(config.K)):
        order = DecodingOrder(perm)
        o = sic_nash(config, channel, order)
        rows.append((order, score(o, metric) if o.exists else math.nan))
    return rows


def best_leader_welfare(config: GameConfig, channel: ChannelState) -> int:
    """Leader maximizing social welfare: the user with the lowest ``R_i |h_i|^2``."""
    return int(np.argmin(config.rates * channel.h2))


def best_order_welfare(config: GameConfig, channel: ChannelState) -> DecodingOrder:
    """Decode in increasing ``R_i |h_i|^2``: the richest user is decoded last."""
    key = config.rates * channel.h2
    return DecodingOrder(tuple(sorted(range(config.K), key=lambda u: key[u])))


def best_order_evmn(config: GameConfig, channel: ChannelState) -> DecodingOrder:
    """Decode in decreasing SNR ``|h_i|^2 / sigma2``; minimizes the total SIC power."""
    h = channel.h2
    return DecodingOrder(tuple(sorted(range(config.K), key=lambda u: -h[u])))


@dataclass
class SelectionReport:
    metric: str
    choice: str
    chosen: object
    scores: dict = field(default_factory=dict)
    oracle_agrees: bool | None = None
    tie: bool = False
    conditions: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        chosen = list(self.chosen.order) if isinstance(self.chosen, DecodingOrder) else self.chosen
        return {"metric": self.metric, "choice": self.choice, "chosen": chosen,
                "scores": self.scores, "oracle_agrees": self.oracle_agrees,
                "tie": self.tie, "conditions": self.conditions}


def _leader_pair_condition(config, channel, v, i, j, b, g, E) -> tuple[float, float]:
    """Both sides of ``v_i >= v_j``, rearranged around the total-power identity.

    lhs = v_j sigma2 N (b - g) (1/h_i - 1/h_j) / E, rhs = (R_i - R_j)(f(b) - f(g)).
    """
    f = config.model
    h, R, N = channel.h2, config.rates, config.N
    lhs = v[j] * config.sigma2 * N * (b - g) * (1.0 / h[i] - 1.0 / h[j]) / E
    rhs = (R[i] - R[j]) * (f(b) - f(g))
    return float(lhs), float(rhs)


def best_leader_evmn(config: GameConfig, channel: ChannelState) -> tuple[int, SelectionReport]:
    """Leader maximizing EVMN efficiency, by direct evaluation of all ``K`` outcomes.

    The report cross-checks the pairwise closed-form condition for every
    candidate and, for two users, the rate threshold ``a``.
    """
    K, N = config.K, config.N
    v = enumerate_leaders(config, channel, "evmn")
    if np.all(np.isnan(v)):
        raise InfeasibleError("no Stackelberg equilibrium exists for any leader")
    leader = _first_best(v)
    top = np.nanmax(v)
    tie = int(np.count_nonzero(v >= top - SCORE_RTOL * abs(top))) > 1
    report = SelectionReport("evmn", "leader", leader,
                             scores={str(i): float(s) for i, s in enumerate(v)}, tie=tie)
    if K < 2:
        report.oracle_agrees = True
        return leader, report

    f = config.model
    b = beta_star(f)
    g = gamma_star(f, K, N)
    E = N - (K - 2) * b - (K - 1) * b * g / N
    satisfied = []
    for i in range(K):
        ok = True
        for j in range(K):
            if j == i:
                continue
            lhs, rhs = _leader_pair_condition(config, channel, v, i, j, b, g, E)
            ok &= lhs >= rhs - 1e-9 * max(abs(lhs), abs(rhs), 1e-300)
        satisfied.append(bool(ok))
    # total-power identity: v_i P_i - v_j P_j = (R_j - R_i)(f(b) - f(g))
    totals = [float(np.sum(stackelberg(config, channel, i).powers)) for i in range(K)]
    identity = max(
        abs(v[i] * totals[i] - v[j] * totals[j] - (config.rates[j] - config.rates[i]) * (f(b) - f(g)))
        / max(abs(v[i] * totals[i]), 1e-300)
        for i in range(K) for j in range(K) if i != j)
    report.conditions = {"pairwise_condition_holds": satisfied, "identity_residual": float(identity)}
    agrees = bool(satisfied[leader])
    if K == 2:
        weak, strong = (0, 1) if channel.h2[0] <= channel.h2[1] else (1, 0)
        h = channel.h2
        alpha_w = h[weak] * g * (N + b) + h[strong] * b * (N + g)
        alpha_s = h[strong] * g * (N + b) + h[weak] * b * (N + g)
        a = (f(b) * alpha_s - f(g) * alpha_w) / (f(b) * alpha_w - f(g) * alpha_s)
        R = config.rates
        predicted = weak if a * R[weak] <= R[strong] else strong
        report.conditions.update({"a": float(a), "weak_user": weak, "threshold_leader": predicted})
        agrees = agrees and (predicted == leader or tie)
    report.oracle_agrees = agrees
    return leader, report


def select(config: GameConfig, channel: ChannelState, metric: str, choice: str,
           brute_force: bool = False) -> SelectionReport:
    """Pick a leader or decoding order for ``metric``; optionally confirm by enumeration."""
    if choice == "leader":
        if metric == "evmn":
            leader, report = best_leader_evmn(config, channel)
        else:
            leader = best_leader_welfare(config, channel)
            w = enumerate_leaders(config, channel, "welfare")
            report = SelectionReport(metric, choice, leader,
                                     scores={str(i): float(s) for i, s in enumerate(w)})
        if brute_force:
            scores = np.array([report.scores[str(i)] for i in range(config.K)])
            top = np.nanmax(scores)
            report.oracle_agrees = bool(scores[report.chosen] >= top - SCORE_RTOL * abs(top)) \
                and report.oracle_agrees is not False
        return report
    if choice == "order":
        pick = best_order_welfare if metric == "welfare" else best_order_evmn
        if metric not in ("welfare", "evmn"):
            raise ValueError(f"metric must be 'welfare' or 'evmn', got {metric!r}")
        order = pick(config, channel)
        chosen_score = score(sic_nash(config, channel, order), metric)
        report = SelectionReport(metric, choice, order,
                                 scores={",".join(map(str, order.order)): chosen_score})
        if brute_force:
            rows = enumerate_orders(config, channel, metric)
            report.scores = {",".join(map(str, o.order)): s for o, s in rows}
            top = max(s for _, s in rows)
            report.oracle_agrees = bool(chosen_score >= top - SCORE_RTOL * abs(top))
        return report
    raise ValueError(f"choice must be 'leader' or 'order', got {choice!r}")


def rho_sequence(K: int, M: int, N: float = 1.0) -> np.ndarray:
    """Per-user utility gain of SIC over SUD, ``u_SIC / u_SUD``, by decoding position.

    Entry ``k`` is for the user decoded at position ``k`` (0 = first); it has
    ``e = K - 1 - k`` users decoded after it and
    ``rho = 1 / ((1 - (K-1) b / N) (1 + b / N)**e)``. Consecutive entries
    grow by exactly ``1 + b/N``; the first-decoded user gains least.
    """
    b = beta_star(EfficiencyModel(M))
    denom = 1.0 - (K - 1) * b / N
    if denom <= 0:
        raise InfeasibleError(f"SUD has no non-saturated equilibrium: 1 - (K-1) beta*/N = {denom:.6g}")
    exponents = K - 1 - np.arange(K)
    return 1.0 / (denom * (1.0 + b / N) ** exponents)


def rho_curve(K: int, x, after: int | None = None):
    """SIC-over-SUD gain as a function of ``x = beta*/N``.

    ``1 / ((1 - (K-1) x) (1 + x)**after)`` for a user with ``after`` users
    decoded after it (default ``K - 1``, the first-decoded user). Defined on
    ``[0, 1/(K-1))``.
    """
    after = K - 1 if after is None else after
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or (K > 1 and np.any(x >= 1.0 / (K - 1))):
        raise ValueError("x must lie in [0, 1/(K-1))")
    return 1.0 / ((1.0 - (K - 1) * x) * (1.0 + x) ** after)


def _g(f, x):
    return f(x) / x


def leader_follower_ratio(K: int, M: int, N: float = 1.0) -> float:
    """Utility of a user as leader over its utility as follower.

    ``g(gamma*) (N + gamma*) / (g(beta*) (N + beta*))`` with ``g(x) = f(x)/x``.
    """
    f = EfficiencyModel(M)
    b, g = beta_star(f), gamma_star(f, K, N)
    return _g(f, g) * (N + g) / (_g(f, b) * (N + b))


def se_gain_ratios(K: int, M: int, N: float = 1.0) -> tuple[float, float]:
    """``(u_SE / u_SUD for the leader, u_SE / u_SUD for a follower)``.

    Follower: ``N E / ((N + g)(N - (K-1) b))``. Leader: ``H(g) / H(b)`` with
    ``H(x) = g(x) (N - (K-2) b - (K-1) b x / N)``, whose slope is proportional
    to ``phi``.
    """
    f = EfficiencyModel(M)
    b = beta_star(f)
    sud = N - (K - 1) * b
    if sud <= 0:
        raise InfeasibleError(f"SUD has no non-saturated equilibrium: N - (K-1) beta* = {sud:.6g}")
    g = gamma_star(f, K, N)
    E = N - (K - 2) * b - (K - 1) * b * g / N
    if E <= 0:
        raise InfeasibleError(f"Stackelberg denominator {E:.6g} <= 0")
    H = lambda x: _g(f, x) * (N - (K - 2) * b - (K - 1) * b * x / N)
    return H(g) / H(b), N * E / ((N + g) * sud)
