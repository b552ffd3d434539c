"""Game data model: configuration, channel state, decoding order, SINR and utility."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .efficiency import EfficiencyModel

__all__ = [
    "GameConfig",
    "ChannelState",
    "DecodingOrder",
    "sinr_sud",
    "sinr_sic",
    "utility",
    "RcdmaMapping",
    "rcdma_map",
    "game_from_dict",
    "load_game",
]


def _as_vector(values, K: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = np.full(K, float(arr))
    if arr.shape != (K,):
        raise ValueError(f"{name} must have length K={K}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class GameConfig:
    """Static parameters of the power-control game.

    Powers are in watts, rates in bit/s, utilities in bit/J. ``N = 1`` is the
    plain multiple access channel; ``N > 1`` divides the interference by the
    spreading factor. ``pmax`` defaults to ``inf`` (non-saturated regime).
    """

    K: int
    N: float = 1.0
    M: int = 100
    sigma2: float = 1.0
    rates: np.ndarray = None
    pmax: np.ndarray = None

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")
        if not self.N > 0:
            raise ValueError(f"spreading factor N must be positive, got {self.N!r}")
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"block length M must be an integer >= 2, got {self.M!r}")
        if not self.sigma2 > 0:
            raise ValueError(f"noise power must be positive, got {self.sigma2!r}")
        rates = _as_vector(1.0 if self.rates is None else self.rates, self.K, "rates")
        pmax = _as_vector(math.inf if self.pmax is None else self.pmax, self.K, "pmax")
        if np.any(rates <= 0) or np.any(pmax <= 0):
            raise ValueError("rates and pmax must be strictly positive")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "N", float(self.N))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "pmax", pmax)

    @property
    def model(self) -> EfficiencyModel:
        return EfficiencyModel(self.M)

    @property
    def capped(self) -> bool:
        return bool(np.any(np.isfinite(self.pmax)))

    def with_(self, **changes) -> "GameConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "K": self.K, "N": self.N, "M": self.M, "sigma2": self.sigma2,
            "rates": self.rates.tolist(),
            "pmax": [None if math.isinf(v) else v for v in self.pmax.tolist()],
        }


@dataclass(frozen=True, eq=False)
class ChannelState:
    """Channel energies ``|h_i|^2`` for one fading block."""

    h2: np.ndarray

    def __post_init__(self):
        h2 = np.asarray(self.h2, dtype=float)
        if h2.ndim != 1 or h2.size == 0:
            raise ValueError("h2 must be a non-empty 1-D sequence")
        if np.any(~(h2 > 0)):
            raise ValueError("channel energies must be strictly positive")
        object.__setattr__(self, "h2", h2)

    @property
    def K(self) -> int:
        return self.h2.size


@dataclass(frozen=True)
class DecodingOrder:
    """Successive decoding order; ``order[0]`` is decoded first.

    User ids are 0-based. The user decoded first sees every other user as
    interference; the last one sees none. In terms of the geometric penalty
    ``(1 + beta*/N)**e`` the user at position ``k`` carries ``e = K - 1 - k``.
    """

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(u) for u in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"decoding order must be a permutation of 0..K-1, got {order}")
        object.__setattr__(self, "order", order)

    @classmethod
    def identity(cls, K: int) -> "DecodingOrder":
        return cls(tuple(range(K)))

    @property
    def K(self) -> int:
        return len(self.order)

    def positions(self) -> np.ndarray:
        """``positions()[u]`` is the 0-based decoding position of user ``u``."""
        pos = np.empty(self.K, dtype=int)
        pos[list(self.order)] = np.arange(self.K)
        return pos

    def exponents(self) -> np.ndarray:
        """Per-user penalty exponent: number of users decoded after it."""
        return self.K - 1 - self.positions()

    def reversed(self) -> "DecodingOrder":
        return DecodingOrder(self.order[::-1])

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return self.K


def _check_sizes(config: GameConfig, channel: ChannelState, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (config.K,) or channel.K != config.K:
        raise ValueError(f"profile/channel sizes do not match K={config.K}")
    if np.any(p < 0):
        raise ValueError("transmit powers must be nonnegative")
    return p


def sinr_sud(config: GameConfig, channel: ChannelState, p, i: int | None = None):
    """SINR with single-user decoding, ``p_i h_i / (sum_{j!=i} p_j h_j / N + sigma2)``.

    Returns all users' SINRs when ``i`` is None. ``p`` may carry leading
    batch dimensions.
    """
    p = _check_sizes(config, channel, p)
    rx = p * channel.h2
    interference = (rx.sum(axis=-1, keepdims=True) - rx) / config.N
    sinrs = rx / (interference + config.sigma2)
    return sinrs if i is None else sinrs[..., i]


def sinr_sic(config: GameConfig, channel: ChannelState, p, order: DecodingOrder,
             u: int | None = None):
    """SINR at the output of a successive interference canceller.

    A user only suffers from the users decoded after it.
    """
    p = _check_sizes(config, channel, p)
    if order.K != config.K:
        raise ValueError("decoding order length does not match K")
    idx = list(order.order)
    rx = (p * channel.h2)[..., idx]
    # interference on position k: sum of received powers at positions > k
    later = np.cumsum(rx[..., ::-1], axis=-1)[..., ::-1] - rx
    by_position = rx / (later / config.N + config.sigma2)
    sinrs = np.empty_like(by_position)
    sinrs[..., idx] = by_position
    return sinrs if u is None else sinrs[..., u]


def utility(R, model: Callable, sinr, p):
    """Energy efficiency ``R f(sinr) / p`` in bit/J, with ``u = 0`` at ``p = 0``."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("transmit power must be nonnegative")
    sinr = np.asarray(sinr, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(p > 0, np.asarray(R, dtype=float) * model(sinr) / np.where(p > 0, p, 1.0), 0.0)
    return u if u.ndim else float(u)


@dataclass(frozen=True, eq=False)
class RcdmaMapping:
    """Image of a plain-MAC game under the spreading change of variables."""

    config: GameConfig
    p: np.ndarray
    efficiency: Callable = field(repr=False)

    def sinrs(self, channel: ChannelState) -> np.ndarray:
        return sinr_sud(self.config, channel, self.p)

    def utilities(self, channel: ChannelState) -> np.ndarray:
        return utility(self.config.rates, self.efficiency, self.sinrs(channel), self.p)


def rcdma_map(config: GameConfig, p) -> RcdmaMapping:
    """Map a plain-MAC profile to the spread system with factor ``config.N``.

    The plain game is ``config`` read with ``N = 1``. Powers and rates are
    multiplied by ``N`` and the efficiency becomes ``y -> f(y / N)``, so the
    despread SINR is ``N`` times the plain SINR and every utility is unchanged.
    """
    N = config.N
    if N < 1:
        raise ValueError(f"spreading factor must be >= 1, got {N}")
    p = np.asarray(p, dtype=float)
    model = config.model
    tilde = replace(config, rates=config.rates * N)
    return RcdmaMapping(tilde, p * N, lambda y: model(np.asarray(y) / N))


def game_from_dict(doc: dict, seed: int | None = None, index: int = 0
                   ) -> tuple[GameConfig, ChannelState]:
    """Build a config and channel from a JSON-style document.

    Keys: ``K, N, M, sigma2, rates, pmax`` and either ``h2`` or
    ``"channel": "rayleigh"`` (sampled with ``seed``/``index``). ``pmax``
    entries may be ``null`` for no cap.
    """
    try:
        K = int(doc["K"])
    except KeyError:
        if "h2" not in doc:
            raise ValueError("config needs K or h2") from None
        K = len(doc["h2"])
    pmax = doc.get("pmax")
    if isinstance(pmax, list):
        pmax = [math.inf if v is None else v for v in pmax]
    elif pmax is None:
        pmax = math.inf
    config = GameConfig(K=K, N=doc.get("N", 1.0), M=doc.get("M", 100),
                        sigma2=doc.get("sigma2", 1.0), rates=doc.get("rates"), pmax=pmax)
    if "h2" in doc:
        channel = ChannelState(doc["h2"])
    elif doc.get("channel") == "rayleigh":
        from .harness import sample_channels

        channel = sample_channels(K, doc.get("seed", 0) if seed is None else seed, index)
    else:
        raise ValueError('config needs "h2" or "channel": "rayleigh"')
    if channel.K != K:
        raise ValueError(f"h2 has {channel.K} entries but K={K}")
    return config, channel


def load_game(path: str | Path, seed: int | None = None) -> tuple[GameConfig, ChannelState]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read game config {path}: {exc}") from exc
    return game_from_dict(doc, seed=seed)
