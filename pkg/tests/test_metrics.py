import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from energygames import ChannelState, DecodingOrder, GameConfig
from energygames.efficiency import EfficiencyModel, beta_star
from energygames.equilibria import sic_nash, stackelberg, sud_nash
from energygames.errors import InfeasibleError
from energygames.metrics import (
    best_leader_evmn,
    best_leader_welfare,
    best_order_evmn,
    best_order_welfare,
    enumerate_leaders,
    enumerate_orders,
    evmn,
    leader_follower_ratio,
    rho_curve,
    rho_sequence,
    se_gain_ratios,
    select,
    social_welfare,
)

from conftest import random_instance


def test_scores_example():
    c = GameConfig(K=2, N=4.0, M=2, rates=[1.0, 2.0])
    ch = ChannelState([1.0, 2.0])
    o = sud_nash(c, ch)
    assert social_welfare(o) == pytest.approx(o.utilities.sum())
    assert evmn(o) == pytest.approx(o.throughputs.sum() / o.powers.sum())
    with pytest.raises(InfeasibleError):
        social_welfare(sud_nash(c.with_(N=1.0), ch))


def test_order_examples():
    c = GameConfig(K=3, N=1.0, M=10)
    ch = ChannelState([4.0, 1.0, 9.0])
    assert best_order_welfare(c, ch).order == (1, 0, 2)
    assert best_order_evmn(c, ch).order == (2, 0, 1)


def test_best_leader_welfare_example():
    c = GameConfig(K=2, N=4.0, M=2, rates=[1.0, 3.0])
    assert best_leader_welfare(c, ChannelState([2.0, 1.0])) == 0
    assert best_leader_welfare(c, ChannelState([4.0, 1.0])) == 1


def test_enumerate_orders_lexicographic():
    c = GameConfig(K=3, M=2)
    rows = enumerate_orders(c, ChannelState([1.0, 2.0, 3.0]), "welfare")
    assert [o.order for o, _ in rows] == list(itertools.permutations(range(3)))


def test_enumerate_leaders_nan_when_infeasible():
    c = GameConfig(K=3, N=1.0, M=2)
    assert np.all(np.isnan(enumerate_leaders(c, ChannelState([1.0, 2.0, 3.0]), "welfare")))
    with pytest.raises(InfeasibleError):
        best_leader_evmn(c, ChannelState([1.0, 2.0, 3.0]))


def _enumerated_best(rows):
    top = np.nanmax([s for _, s in rows])
    return top


@pytest.mark.parametrize("K", [2, 3, 4])
def test_selection_rules_match_enumeration(K):
    rng = np.random.default_rng(100 + K)
    for _ in range(25):
        config, channel = random_instance(rng, K_min=K, K_max=K)
        for metric, rule in (("welfare", best_order_welfare), ("evmn", best_order_evmn)):
            top = _enumerated_best(enumerate_orders(config, channel, metric))
            got = evmn(sic_nash(config, channel, rule(config, channel))) if metric == "evmn" else \
                social_welfare(sic_nash(config, channel, rule(config, channel)))
            assert got >= top * (1 - 1e-12)
        w = enumerate_leaders(config, channel, "welfare")
        assert w[best_leader_welfare(config, channel)] >= np.nanmax(w) * (1 - 1e-12)
        leader, report = best_leader_evmn(config, channel)
        v = enumerate_leaders(config, channel, "evmn")
        assert v[leader] >= np.nanmax(v) * (1 - 1e-12)
        assert report.oracle_agrees, report.to_dict()
        assert report.conditions["identity_residual"] < 1e-9


def test_best_leader_evmn_two_user_threshold():
    c = GameConfig(K=2, N=8.0, M=10)
    ch = ChannelState([0.5, 2.0])
    a = best_leader_evmn(c, ch)[1].conditions["a"]
    assert a > 0
    # sweep the strong user's rate across the threshold R_strong = a R_weak
    for factor, expected in ((0.5, 1), (2.0, 0)):
        config = c.with_(rates=[1.0, factor * a])
        leader, report = best_leader_evmn(config, ch)
        assert report.conditions["weak_user"] == 0
        assert leader == expected == report.conditions["threshold_leader"]


def test_equal_rates_orders_are_reverses():
    rng = np.random.default_rng(5)
    for _ in range(20):
        config, channel = random_instance(rng, K_min=2, need=())
        config = config.with_(rates=1e5)
        assert best_order_welfare(config, channel).order == best_order_evmn(config, channel).reversed().order


def test_select_reports():
    c = GameConfig(K=3, N=16.0, M=10, rates=[1.0, 2.0, 3.0])
    ch = ChannelState([0.5, 1.0, 2.0])
    for metric in ("welfare", "evmn"):
        for choice in ("leader", "order"):
            rep = select(c, ch, metric, choice, brute_force=True)
            assert rep.oracle_agrees, rep.to_dict()
    assert len(select(c, ch, "welfare", "order", brute_force=True).scores) == 6
    with pytest.raises(ValueError):
        select(c, ch, "power", "order")
    with pytest.raises(ValueError):
        select(c, ch, "welfare", "power")


def test_rho_sequence_example():
    rho = rho_sequence(2, 2, 4.0)
    np.testing.assert_allclose(rho, [1.1094638179121729477, 1.4579550593287719715], rtol=1e-11)


def test_rho_sequence_matches_outcomes():
    c = GameConfig(K=4, N=16.0, M=10, rates=[1.0, 2.0, 3.0, 4.0])
    ch = ChannelState([0.5, 1.0, 2.0, 0.7])
    order = DecodingOrder((2, 0, 3, 1))
    ratio = sic_nash(c, ch, order).utilities / sud_nash(c, ch).utilities
    np.testing.assert_allclose(ratio[list(order.order)], rho_sequence(4, 10, 16.0), rtol=1e-12)


def test_rho_sequence_infeasible():
    with pytest.raises(InfeasibleError):
        rho_sequence(2, 2, 1.0)


@given(st.integers(2, 12), st.floats(0.0, 0.999))
def test_rho_curve_nondecreasing(K, frac):
    x = frac / (K - 1)
    x2 = min(x + 1e-3 / (K - 1), 0.9999 / (K - 1))
    assert rho_curve(K, x2) >= rho_curve(K, x) * (1 - 1e-15)
    assert rho_curve(K, 0.0) == 1.0


def test_rho_curve_domain():
    with pytest.raises(ValueError):
        rho_curve(3, 0.5)


def test_leader_follower_ratio_matches_outcomes():
    c = GameConfig(K=3, N=16.0, M=10, rates=[1.0, 2.0, 3.0])
    ch = ChannelState([0.5, 1.0, 2.0])
    ratio = leader_follower_ratio(3, 10, 16.0)
    assert ratio <= 1.0
    for i in range(3):
        as_leader = stackelberg(c, ch, i).utilities[i]
        as_follower = stackelberg(c, ch, (i + 1) % 3).utilities[i]
        assert as_leader / as_follower == pytest.approx(ratio, rel=1e-12)


def test_se_gain_ratios_match_outcomes():
    c = GameConfig(K=3, N=16.0, M=10)
    ch = ChannelState([0.5, 1.0, 2.0])
    lead, follow = se_gain_ratios(3, 10, 16.0)
    se, sud = stackelberg(c, ch, 1), sud_nash(c, ch)
    ratio = se.utilities / sud.utilities
    assert ratio[1] == pytest.approx(lead, rel=1e-12)
    assert ratio[0] == pytest.approx(follow, rel=1e-12)
    assert lead >= 1 and follow >= 1
    with pytest.raises(InfeasibleError):
        se_gain_ratios(2, 2, 1.0)
