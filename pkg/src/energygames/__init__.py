"""Equilibria of energy-efficient power-control games on a multiple access channel.

Non-cooperative play with single-user decoding, a Stackelberg game with one
leader, and non-cooperative play behind a successive interference canceller,
plus network-level scores and Monte-Carlo fading sweeps.
"""

from .efficiency import (
    EfficiencyModel,
    EquilibriumConstants,
    beta_star,
    check_se_conditions,
    equilibrium_constants,
    gamma_star,
    interference_coefficient,
    phi,
)
from .equilibria import (
    EquilibriumOutcome,
    follower_response,
    leader_power_numeric,
    regime_check,
    sic_nash,
    stackelberg,
    sud_nash,
    sud_saturated_2user,
)
from .errors import IllPosedError, InfeasibleError
from .metrics import (
    best_leader_evmn,
    best_leader_welfare,
    best_order_evmn,
    best_order_welfare,
    evmn,
    rho_curve,
    rho_sequence,
    se_gain_ratios,
    social_welfare,
)
from .model import ChannelState, DecodingOrder, GameConfig, rcdma_map, sinr_sic, sinr_sud, utility

__version__ = "0.1.0"
