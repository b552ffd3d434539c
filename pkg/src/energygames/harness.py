"""Seeded Monte-Carlo sweeps over Rayleigh block fading.

Each realization ``n`` draws from its own Philox stream keyed by
``(seed, n)``, so results never depend on the evaluation schedule. Means
are accumulated with ``math.fsum``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .efficiency import EfficiencyModel, beta_star
from .equilibria import regime_check, sic_nash, stackelberg, sud_nash
from .errors import InfeasibleError
from .metrics import evmn, social_welfare
from .model import ChannelState, DecodingOrder, GameConfig

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentSpec",
    "SweepRow",
    "SweepResult",
    "CSV_COLUMNS",
    "realization_rng",
    "sample_channels",
    "alpha_max",
    "run_snr_sweep",
    "run_load_sweep",
    "run",
    "emit",
]

CSV_COLUMNS = ("sweep_var", "policy", "mean_welfare", "mean_evmn", "gain_pct", "realizations", "seed")
ORDER_POLICIES = ("increasing", "decreasing", "random")
POLICIES = ("sud", "sic", "stackelberg")
DEFAULT_SNR_GRID = tuple(float(s) for s in range(0, 21, 2))
DEFAULT_ALPHA_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95)


def realization_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def _draw_h2(rng: np.random.Generator, K: int) -> np.ndarray:
    # inverse CDF of the unit-mean exponential; |h| is then Rayleigh
    u = rng.random(K)
    return np.maximum(-np.log1p(-u), np.finfo(float).tiny)


def sample_channels(K: int, seed: int, index: int) -> ChannelState:
    """Channel energies of realization ``index``: i.i.d. unit-mean exponential."""
    return ChannelState(_draw_h2(realization_rng(seed, index), K))


def alpha_max(M: int, N: float) -> float:
    """Load ``K/N`` at which the SUD equilibrium powers diverge: ``1/beta* + 1/N``."""
    return 1.0 / beta_star(EfficiencyModel(M)) + 1.0 / N


def _as_list(x) -> list:
    return list(x) if isinstance(x, (list, tuple)) else [x]


@dataclass
class ExperimentSpec:
    """Description of one sweep.

    ``kind="snr"`` sweeps ``snr_db`` for a fixed ``(K, N, M)``. ``kind="load"``
    sweeps the load ``alpha = K/N``: with a scalar ``N`` the user counts are
    ``floor(fraction * alpha_max * N)`` for each of ``alpha_fractions``; with
    a list of ``N`` values ``K`` is held fixed. ``M`` may be a list for load
    sweeps, each ``M`` getting its own grid. ``rate`` is the common rate in
    bit/s.
    """

    kind: str
    K: int | None = None
    N: float | list = 1.0
    M: int | list = 100
    rate: float = 1e5
    snr_db: list = field(default_factory=lambda: list(DEFAULT_SNR_GRID))
    realizations: int = 2000
    seed: int = 0
    orders: list = field(default_factory=lambda: list(ORDER_POLICIES))
    policies: list = field(default_factory=lambda: ["sic"])
    alpha_fractions: list = field(default_factory=lambda: list(DEFAULT_ALPHA_FRACTIONS))

    def __post_init__(self):
        if self.kind not in ("snr", "load"):
            raise ValueError(f"kind must be 'snr' or 'load', got {self.kind!r}")
        if int(self.realizations) < 1:
            raise ValueError("realizations must be >= 1")
        self.realizations = int(self.realizations)
        self.seed = int(self.seed)
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        bad = set(self.orders) - set(ORDER_POLICIES)
        if bad:
            raise ValueError(f"unknown decoding-order policies {sorted(bad)}")
        bad = set(self.policies) - set(POLICIES)
        if bad:
            raise ValueError(f"unknown policies {sorted(bad)}")
        self.snr_db = [float(s) for s in _as_list(self.snr_db)]
        if self.kind == "snr":
            if self.K is None or isinstance(self.N, list) or isinstance(self.M, list):
                raise ValueError("an SNR sweep needs a scalar K, N and M")
        elif isinstance(self.N, list) and self.K is None:
            raise ValueError("a load sweep over N needs a fixed K")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown spec keys {sorted(extra)}")
        return cls(**doc)


@dataclass
class SweepRow:
    sweep_var: float
    policy: str
    mean_welfare: float
    mean_evmn: float
    gain_pct: float | None
    realizations: int
    seed: int
    # mean of per-realization (w / w_ref - 1) in percent; JSON only
    ratio_gain_pct: float | None = None


@dataclass
class SweepResult:
    kind: str
    seed: int
    realizations: int
    rows: list[SweepRow] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def select(self, policy: str) -> list[SweepRow]:
        return [r for r in self.rows if r.policy == policy]


def _mean(values) -> float:
    return math.fsum(values) / len(values)


def _gains(scores: Sequence[float], reference: Sequence[float]) -> tuple[float, float]:
    of_means = (math.fsum(scores) / math.fsum(reference) - 1.0) * 100.0
    per_draw = _mean([s / r - 1.0 for s, r in zip(scores, reference)]) * 100.0
    return of_means, per_draw


def _skip(result: SweepResult, reason: str) -> None:
    log.info("skipping: %s", reason)
    result.skipped.append(reason)


def _order_for(policy: str, h2: np.ndarray, perm: np.ndarray) -> DecodingOrder:
    if policy == "increasing":
        return DecodingOrder(tuple(np.argsort(h2, kind="stable")))
    if policy == "decreasing":
        return DecodingOrder(tuple(np.argsort(-h2, kind="stable")))
    return DecodingOrder(tuple(perm))


def _draws(spec: ExperimentSpec, K: int):
    """Per realization: channel, random decoding order, random leader."""
    out = []
    for n in range(spec.realizations):
        rng = realization_rng(spec.seed, n)
        h2 = _draw_h2(rng, K)
        out.append((ChannelState(h2), rng.permutation(K), int(rng.integers(K))))
    return out


def run_snr_sweep(spec: ExperimentSpec) -> SweepResult:
    """Mean welfare and EVMN versus SNR for each decoding-order policy.

    Every SNR point reuses the same channel draws. Gains are relative to the
    random decoding order when it is among the policies.
    """
    if spec.kind != "snr":
        raise ValueError("run_snr_sweep needs kind='snr'")
    K, N, M = int(spec.K), float(spec.N), int(spec.M)
    result = SweepResult("snr", spec.seed, spec.realizations)
    base = GameConfig(K=K, N=N, M=M, rates=spec.rate)
    regimes = regime_check(base)
    draws = _draws(spec, K)
    labels: list[tuple[str, object]] = []
    if "sic" in spec.policies:
        labels += [(o, "sic") for o in spec.orders]
    else:
        _skip(result, "policy sic not requested; decoding-order curves omitted")
    for pol in ("sud", "stackelberg"):
        if pol in spec.policies:
            if regimes[pol]:
                labels.append((pol, pol))
            else:
                _skip(result, f"{pol}: no non-saturated equilibrium for K={K}, N={N}, M={M}")
    for snr in spec.snr_db:
        config = base.with_(sigma2=10.0 ** (-snr / 10.0))
        scores = {}
        for label, pol in labels:
            w, v = [], []
            for channel, perm, leader in draws:
                if pol == "sic":
                    o = sic_nash(config, channel, _order_for(label, channel.h2, perm))
                elif pol == "sud":
                    o = sud_nash(config, channel)
                else:
                    o = stackelberg(config, channel, leader)
                w.append(social_welfare(o))
                v.append(evmn(o))
            scores[label] = (w, v)
        ref = scores.get("random")
        for label, _ in labels:
            w, v = scores[label]
            gain = per = None
            if ref is not None:
                gain, per = _gains(w, ref[0])
            result.rows.append(SweepRow(snr, label, _mean(w), _mean(v), gain,
                                        spec.realizations, spec.seed, per))
    return result


def _load_grid(spec: ExperimentSpec, M: int) -> list[tuple[int, float]]:
    if isinstance(spec.N, list):
        grid = []
        for N in spec.N:
            N = float(N)
            a_max = alpha_max(M, N)
            if spec.K / N >= a_max:
                raise InfeasibleError(
                    f"load K/N = {spec.K / N:.6g} is at or beyond the asymptote "
                    f"alpha_max = {a_max:.6g} (M={M}, N={N:g})")
            grid.append((int(spec.K), N))
        return grid
    N = float(spec.N)
    a_max = alpha_max(M, N)
    Ks = []
    for frac in spec.alpha_fractions:
        if not 0 < frac < 1:
            raise InfeasibleError(
                f"alpha fraction {frac} must lie in (0, 1): alpha_max = {a_max:.6g} (M={M}, N={N:g})")
        K = max(2, math.floor(frac * a_max * N))
        if K / N >= a_max:
            raise InfeasibleError(f"load {K}/{N:g} reaches alpha_max = {a_max:.6g} (M={M})")
        if K not in Ks:
            Ks.append(K)
    return [(K, N) for K in sorted(Ks)]


def run_load_sweep(spec: ExperimentSpec) -> SweepResult:
    """Welfare gain of SIC and of Stackelberg over SUD versus the load ``K/N``.

    SIC uses a random decoding order and Stackelberg a random leader, both
    redrawn per realization. Policy labels carry the block length, e.g.
    ``sic@M=2``; ``sweep_var`` is the load.
    """
    if spec.kind != "load":
        raise ValueError("run_load_sweep needs kind='load'")
    result = SweepResult("load", spec.seed, spec.realizations)
    snr = spec.snr_db[0] if spec.snr_db else 6.0
    if len(spec.snr_db) > 1:
        _skip(result, f"load sweep uses a single SNR; using {snr} dB")
    sigma2 = 10.0 ** (-snr / 10.0)
    policies = [p for p in ("sic", "stackelberg") if p in spec.policies]
    for M in _as_list(spec.M):
        M = int(M)
        for K, N in _load_grid(spec, M):
            config = GameConfig(K=K, N=N, M=M, sigma2=sigma2, rates=spec.rate)
            regimes = regime_check(config)
            if not regimes["sud"]:
                raise InfeasibleError(f"SUD baseline infeasible at K={K}, N={N:g}, M={M}")
            draws = _draws(spec, K)
            w_ref, v_ref = [], []
            per_policy = {p: ([], []) for p in policies}
            for channel, perm, leader in draws:
                ref = sud_nash(config, channel)
                w_ref.append(social_welfare(ref))
                v_ref.append(evmn(ref))
                for pol in policies:
                    if pol == "sic":
                        o = sic_nash(config, channel, DecodingOrder(tuple(perm)))
                    else:
                        o = stackelberg(config, channel, leader)
                    per_policy[pol][0].append(social_welfare(o))
                    per_policy[pol][1].append(evmn(o))
            alpha = K / N
            result.rows.append(SweepRow(alpha, f"sud@M={M}", _mean(w_ref), _mean(v_ref), None,
                                        spec.realizations, spec.seed))
            for pol in policies:
                w, v = per_policy[pol]
                gain, per = _gains(w, w_ref)
                result.rows.append(SweepRow(alpha, f"{pol}@M={M}", _mean(w), _mean(v), gain,
                                            spec.realizations, spec.seed, per))
    return result


def run(spec: ExperimentSpec) -> SweepResult:
    return run_snr_sweep(spec) if spec.kind == "snr" else run_load_sweep(spec)


def _csv_value(v):
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


def emit(result: SweepResult, fmt: str, destination: str | Path) -> None:
    """Write ``result`` as CSV (fixed columns) or JSON (same fields plus provenance)."""
    destination = Path(destination)
    try:
        if fmt == "csv":
            with destination.open("w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for row in result.rows:
                    writer.writerow([_csv_value(getattr(row, c)) for c in CSV_COLUMNS])
        elif fmt == "json":
            doc = {
                "kind": result.kind,
                "provenance": {"seed": result.seed, "realizations": result.realizations},
                "columns": list(CSV_COLUMNS),
                "rows": [asdict(r) for r in result.rows],
                "skipped": result.skipped,
            }
            destination.write_text(json.dumps(doc, indent=2) + "\n")
        else:
            raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write sweep result to {destination}: {exc}") from exc
