"""
Independent checks of the closed-form price moments.

The price is the sum of discounted dividends over a finite horizon T. Its
mean and variance are computed exactly by recursion, and estimated by Monte
Carlo with growth drawn independently every period.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.constants import SimDefaults
from src.errors import DomainError, UnsupportedInputError, ValidationError
from src.sddm_core import CompanyParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimConfig:
    """horizon=None picks the horizon from the tail bound"""
    horizon: Optional[int] = None
    paths: int = SimDefaults.PATHS
    seed: int = SimDefaults.SEED

    def __post_init__(self):
        if self.horizon is not None and (isinstance(self.horizon, bool) or not isinstance(self.horizon, int)
                                         or self.horizon < 1):
            raise ValidationError(f"horizon={self.horizon!r} must be an integer >= 1 or auto", condition="horizon >= 1")
        if isinstance(self.paths, bool) or not isinstance(self.paths, int) or self.paths < 1:
            raise ValidationError(f"paths={self.paths!r} must be an integer >= 1", condition="paths >= 1")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed={self.seed!r} must be a 64-bit unsigned integer", condition="64-bit seed")


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    variance: float
    mean_se: float
    var_se: float
    tail_bound: float
    horizon: int
    paths: int


def _growth_ratio(c: CompanyParams) -> float:
    """x = (1+g)/(1+k)"""
    return (1.0 + c.growth.mean) / (1.0 + c.discount_rate)


def truncated_mean_exact(c: CompanyParams, horizon: int) -> float:
    """d(0) * sum_{t=1..T} x^t"""
    x = _growth_ratio(c)
    if x == 1.0:
        return c.dps0 * horizon
    return c.dps0 * x * (1.0 - x ** horizon) / (1.0 - x)


def truncated_variance_exact(c: CompanyParams, horizon: int) -> float:
    """Exact variance of the horizon-T dividend sum.

    E[a_t a_u] = d^2 y^min(t,u) x^|t-u| with y = E[(1+g)^2]/(1+k)^2, so the
    second moment is d^2 (sum_t y^t + 2 sum_t y^t G(T-t)), G(n) = sum_{j<=n} x^j.
    """
    x = _growth_ratio(c)
    y = c.growth.second_moment / (1.0 + c.discount_rate) ** 2
    t = np.arange(1, horizon + 1, dtype=float)
    y_powers = y ** t
    partial_x = np.concatenate(([0.0], np.cumsum(x ** t)))
    cross = y_powers * partial_x[horizon - t.astype(int)]
    second = c.dps0 ** 2 * (y_powers.sum() + 2.0 * cross.sum())
    mean = truncated_mean_exact(c, horizon)
    return max(0.0, float(second - mean ** 2))


def tail_bound(c: CompanyParams, horizon: int) -> float:
    """Expected value of the dividends omitted beyond T: d(0) x^(T+1)/(1-x)"""
    if c.discount_rate <= c.growth.mean:
        raise DomainError(
            f"{c.label}: tail diverges, discount rate k={c.discount_rate:g} must exceed "
            f"mean growth g={c.growth.mean:g} (k > g_mean)",
            condition="k > g_mean",
        )
    x = _growth_ratio(c)
    return c.dps0 * x ** (horizon + 1) / (1.0 - x)


def auto_horizon(c: CompanyParams, rtol: float = SimDefaults.HORIZON_RTOL) -> int:
    """Smallest T whose tail bound is below rtol times the infinite-horizon mean"""
    full = tail_bound(c, 0)
    x = _growth_ratio(c)
    horizon = max(1, math.ceil(math.log(rtol) / math.log(x)))
    while tail_bound(c, horizon) >= rtol * full:
        horizon += 1
    return horizon


def block_sizes(paths: int, horizon: int) -> List[int]:
    """Paths per block: at most BLOCK_PATHS, and at most BLOCK_ELEMENTS draws each"""
    if horizon > SimDefaults.BLOCK_ELEMENTS:
        raise UnsupportedInputError(
            f"horizon T={horizon} is too long to simulate; one path must fit in "
            f"{SimDefaults.BLOCK_ELEMENTS} draws (lower --horizon or the discount/growth gap)",
            condition=f"horizon <= {SimDefaults.BLOCK_ELEMENTS}",
        )
    block = max(1, min(SimDefaults.BLOCK_PATHS, SimDefaults.BLOCK_ELEMENTS // horizon))
    full, rest = divmod(paths, block)
    return [block] * full + ([rest] if rest else [])


def simulate_price(c: CompanyParams, cfg: SimConfig) -> MomentEstimate:
    """Monte Carlo sample of the horizon-T price.

    Paths are drawn in blocks fixed by (paths, horizon), each with its own
    substream spawned from the seed, so the output depends only on
    (seed, paths, horizon) and memory stays bounded for long horizons.
    """
    growth = c.growth
    if not growth.is_explicit:
        raise UnsupportedInputError(
            f"{c.label}: simulation needs an explicit growth distribution (states and probs), "
            f"got moments only (mean={growth.mean:g}, stddev={growth.stddev:g})",
            condition="explicit growth states",
        )
    horizon = cfg.horizon if cfg.horizon is not None else auto_horizon(c)
    sizes = block_sizes(cfg.paths, horizon)
    factors = (1.0 + np.asarray(growth.states)) / (1.0 + c.discount_rate)
    cdf = np.cumsum(growth.probs)
    last_state = len(factors) - 1

    n_blocks = len(sizes)
    streams = np.random.SeedSequence(cfg.seed).spawn(n_blocks)
    prices = np.empty(cfg.paths)
    start = 0
    for n, stream in zip(sizes, streams):
        rng = np.random.default_rng(stream)
        idx = np.searchsorted(cdf, rng.random((n, horizon)), side="right")
        np.minimum(idx, last_state, out=idx)
        discounted = np.cumprod(factors[idx], axis=1)
        prices[start:start + n] = c.dps0 * discounted.sum(axis=1)
        start += n
    logger.debug("%s: simulated %d paths x %d periods in %d blocks", c.label, cfg.paths, horizon, n_blocks)

    mean = float(prices.mean())
    if cfg.paths < 2:
        variance, mean_se, var_se = 0.0, math.inf, math.inf
    else:
        variance = float(prices.var(ddof=1))
        mean_se = math.sqrt(variance / cfg.paths)
        fourth = float(np.mean((prices - mean) ** 4))
        var_se = math.sqrt(max(fourth - variance ** 2, 0.0) / cfg.paths)

    tail = tail_bound(c, horizon) if c.discount_rate > growth.mean else math.inf
    return MomentEstimate(mean, variance, mean_se, var_se, tail, horizon, cfg.paths)
