"""Packet-success efficiency function and the two equilibrium SINR targets.

The efficiency function is ``f(x) = (1 - exp(-x))**M``. Two constants drive
every equilibrium in the package:

* ``beta_star``: unique positive root of ``x f'(x) = f(x)``, the SINR that
  maximizes ``f(x)/x`` and the target of every non-leading user.
* ``gamma_star``: unique root of ``phi(x) = x (1 - c x) f'(x) - f(x)`` on
  ``(0, 1/c)``, the SINR reached by a Stackelberg leader whose followers
  react with interference coefficient ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import IllPosedError

__all__ = [
    "EfficiencyModel",
    "EquilibriumConstants",
    "SEConditionReport",
    "find_root",
    "beta_star",
    "interference_coefficient",
    "phi",
    "gamma_star",
    "equilibrium_constants",
    "check_se_conditions",
]

GAMMA_BRACKET_LO = 1e-9
GAMMA_BRACKET_GAP = 1e-12


@dataclass(frozen=True)
class EfficiencyModel:
    """Sigmoidal packet success rate ``f(x) = (1 - e^{-x})^M``."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"block length M must be a positive integer, got {self.M!r}")

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        x = _check_nonneg(x)
        return (-np.expm1(-x)) ** self.M

    def deriv(self, x, order: int = 1):
        """Analytic first or second derivative of ``f``."""
        x = _check_nonneg(x)
        M = self.M
        e = np.exp(-x)
        one_minus = -np.expm1(-x)
        if order == 1:
            return M * e * one_minus ** (M - 1)
        if order == 2:
            # f'' = M e^{-x} (1-e^{-x})^{M-2} (M e^{-x} - 1); the M = 1 case has no pole
            if M == 1:
                return -e
            return M * e * one_minus ** (M - 2) * (M * e - 1.0)
        raise ValueError(f"derivative order must be 1 or 2, got {order!r}")

    def elasticity_gap(self, x, c: float = 0.0):
        """Return ``x (1 - c x) f'(x) / f(x) - 1`` for ``x > 0``.

        Same sign as ``phi`` (``c > 0``) or as ``x f' - f`` (``c = 0``), but free
        of the underflow of ``f`` near zero, so it is what the root finder sees.
        """
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return self.M * x * (1.0 - c * x) / np.expm1(x) - 1.0


def _check_nonneg(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("efficiency function is defined for x >= 0 only")
    return arr if arr.ndim else float(arr)


def find_root(func: Callable[[float], float], lo: float, hi: float,
              rtol: float = 1e-12, maxiter: int = 500) -> float:
    """Root of ``func`` on a sign-changing bracket ``[lo, hi]``.

    Secant steps are taken while they land inside the bracket and shrink it
    fast enough; otherwise the step falls back to bisection, so convergence
    is never slower than plain bisection.
    """
    flo, fhi = func(lo), func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise IllPosedError(f"no sign change on [{lo!r}, {hi!r}] (f={flo!r}, {fhi!r})")
    for _ in range(maxiter):
        width = hi - lo
        if width <= rtol * max(abs(lo), abs(hi)) or width <= 5e-324:
            break
        x = hi - fhi * (hi - lo) / (fhi - flo)
        # reject secant points that hug an endpoint; bisect instead
        if not (lo + 0.01 * width < x < hi - 0.01 * width):
            x = lo + 0.5 * width
        fx = func(x)
        if fx == 0.0:
            return x
        if math.copysign(1.0, fx) == math.copysign(1.0, flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        # guarantee at least halving every other step
        if hi - lo > 0.5 * width:
            mid = lo + 0.5 * (hi - lo)
            fm = func(mid)
            if fm == 0.0:
                return mid
            if math.copysign(1.0, fm) == math.copysign(1.0, flo):
                lo, flo = mid, fm
            else:
                hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi


@lru_cache(maxsize=None)
def _beta_star(M: int) -> float:
    model = EfficiencyModel(M)
    if M < 2:
        raise IllPosedError(f"x f'(x) = f(x) has no positive root for M = {M} (f is not sigmoidal)")
    gap = lambda x: float(model.elasticity_gap(x))
    lo, hi = GAMMA_BRACKET_LO, 1.0
    while gap(hi) >= 0.0:
        hi *= 2.0
    return find_root(gap, lo, hi)


def beta_star(model: EfficiencyModel) -> float:
    """Positive root of ``x f'(x) = f(x)``, i.e. of ``(1 + M x) e^{-x} = 1``."""
    return _beta_star(int(model.M))


def interference_coefficient(model: EfficiencyModel, K: int, N: float = 1.0) -> float:
    """Coefficient ``c`` with which the followers' reaction dampens the leader's SINR.

    ``c = (K-1) b / (N (N - (K-2) b))`` with ``b = beta_star``; at ``N = 1``
    this is ``(K-1) b / (1 - (K-2) b)``.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    b = beta_star(model)
    slack = N - (K - 2) * b
    if slack <= 0:
        raise IllPosedError(
            f"followers' subgame is ill-posed: N - (K-2) beta* = {slack:.6g} <= 0 "
            f"(K={K}, N={N}, M={model.M})")
    return (K - 1) * b / (N * slack)


def phi(model: EfficiencyModel, c: float, x):
    """``phi(x) = x (1 - c x) f'(x) - f(x)``; its root is the leader's SINR."""
    if c < 0:
        raise ValueError(f"c must be nonnegative, got {c}")
    x = _check_nonneg(x)
    return x * (1.0 - c * x) * model.deriv(x, 1) - model.eval(x)


@lru_cache(maxsize=None)
def _gamma_star(M: int, K: int, N: float) -> float:
    model = EfficiencyModel(M)
    c = interference_coefficient(model, K, N)
    if c == 0.0:
        return _beta_star(M)
    gap = lambda x: float(model.elasticity_gap(x, c))
    hi = 1.0 / c - GAMMA_BRACKET_GAP
    return find_root(gap, GAMMA_BRACKET_LO, hi)


def gamma_star(model: EfficiencyModel, K: int, N: float = 1.0) -> float:
    """Stackelberg leader's SINR target for ``K`` users and spreading factor ``N``.

    ``K = 1`` has no followers, so the target collapses to ``beta_star``.
    """
    return _gamma_star(int(model.M), int(K), float(N))


@dataclass(frozen=True)
class EquilibriumConstants:
    beta_star: float
    gamma_star: float
    c: float


def equilibrium_constants(model: EfficiencyModel, K: int, N: float = 1.0) -> EquilibriumConstants:
    c = interference_coefficient(model, K, N)
    return EquilibriumConstants(beta_star(model), gamma_star(model, K, N), c)


@dataclass
class SEConditionReport:
    """Outcome of the numerical checks standing in for the Stackelberg sufficient conditions."""

    M: int
    K: int
    N: float
    c: float
    gamma_star: float | None
    phi_positive: bool
    max_phi: float
    single_stationary_point: bool
    stationary_points: int
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.phi_positive and self.single_stationary_point

    def to_dict(self) -> dict:
        return {
            "M": self.M, "K": self.K, "N": self.N, "c": self.c,
            "gamma_star": self.gamma_star,
            "phi_positive": self.phi_positive, "max_phi": self.max_phi,
            "single_stationary_point": self.single_stationary_point,
            "stationary_points": self.stationary_points,
            "passed": self.passed, "notes": list(self.notes),
        }


def _count_sign_changes(values: np.ndarray, rel_floor: float) -> int:
    scale = np.max(np.abs(values)) if values.size else 0.0
    if scale == 0.0:
        return 0
    signs = np.sign(values[np.abs(values) > rel_floor * scale])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def check_se_conditions(model: EfficiencyModel, K: int, N: float = 1.0,
                        step: float = 1e-5, fd_step: float = 1e-6,
                        max_points: int = 2_000_000) -> SEConditionReport:
    """Check numerically that a unique Stackelberg equilibrium exists.

    (a) ``phi`` is strictly positive somewhere in ``(0, 1/c)``;
    (b) ``phi'`` (central finite differences) changes sign exactly once on
    ``(0, gamma*)``. Failures are reported, never raised.
    """
    if K < 2:
        raise ValueError("Stackelberg conditions need at least one follower (K >= 2)")
    c = interference_coefficient(model, K, N)  # raises if beta* or c is undefined
    notes: list[str] = []
    try:
        g = gamma_star(model, K, N)
    except IllPosedError as exc:
        g = None
        notes.append(str(exc))
    upper = g if g is not None else 1.0 / c
    n = int(min(max_points, max(1000, math.ceil(upper / step))))
    if n == max_points:
        notes.append(f"grid capped at {max_points} points (step {upper / n:.3g})")
    x = np.linspace(0.0, upper, n + 1)[1:-1]
    vals = phi(model, c, x)
    max_phi = float(np.max(vals)) if vals.size else 0.0
    positive = max_phi > 0.0
    h = min(fd_step, 0.5 * x[0])
    dphi = (phi(model, c, x + h) - phi(model, c, x - h)) / (2.0 * h)
    changes = _count_sign_changes(dphi, 1e-8)
    if g is None:
        notes.append("phi has no sign change on (0, 1/c)")
    return SEConditionReport(int(model.M), int(K), float(N), c, g, positive, max_phi,
                             g is not None and changes == 1, changes, notes)
