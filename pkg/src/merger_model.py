"""
Stock-for-stock merger of an acquirer A and a target B into M.

Shareholders of both companies accept an exchange ratio r when their expected
wealth does not fall and their wealth variance does not rise. This module
turns those conditions into intervals of r.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Tuple

from src.errors import DomainError, ValidationError
from src.interval import EMPTY, ExtendedInterval
from src.sddm_core import (CompanyParams, GrowthModel, Valuation, coefficient_of_variation,
                           gordon_mean, relative_weights, value_company)

logger = logging.getLogger(__name__)

MERGED_LABEL = "merged company"


@dataclass(frozen=True)
class MergerInputs:
    """Acquirer, target and the merged company's growth distribution.

    The merged company's own domain conditions (k_M > g_M, delta_M > 0) are
    checked when it is valued, so a sweep can visit points where they fail.
    """
    acquirer: CompanyParams
    target: CompanyParams
    merged_growth: GrowthModel
    discount_override: Optional[float] = None

    def __post_init__(self):
        if self.discount_override is not None and (
                not math.isfinite(self.discount_override) or self.discount_override <= -1.0):
            raise ValidationError(
                f"discount override {self.discount_override!r} must be finite and > -1",
                condition="k_M > -1",
            )

    def with_merged_growth(self, growth: GrowthModel) -> 'MergerInputs':
        return replace(self, merged_growth=growth)

    @property
    def total_dividends(self) -> float:
        """D_A(0) + D_B(0)"""
        return self.acquirer.total_dividends + self.target.total_dividends

    @property
    def shares_ratio(self) -> float:
        """N_A / N_B"""
        return self.acquirer.shares / self.target.shares


@dataclass(frozen=True)
class MergerValuation:
    acquirer: Valuation
    target: Valuation
    k_m: float
    g_mean: float
    total_dividends: float
    equity_mean: float
    delta: float
    h_factor: float
    cv: float
    weights: Tuple[float, float]

    @property
    def shares_ratio(self) -> float:
        return self.acquirer.params.shares / self.target.params.shares

    @property
    def expected_synergy(self) -> float:
        return self.equity_mean - self.acquirer.equity_mean - self.target.equity_mean

    def price_at(self, r: float) -> float:
        """Expected per-share price of M when B holders get r shares each"""
        return self.equity_mean / (self.acquirer.params.shares + r * self.target.params.shares)

    def stddev_at(self, r: float) -> float:
        return self.cv * self.price_at(r)


class RawBounds(NamedTuple):
    """Interval endpoint formulas before clamping at 0 and emptiness checks"""
    mean_lo: float
    mean_hi: float
    var_lo: float
    var_hi: float


class PointEvaluation(NamedTuple):
    merged: MergerValuation
    raw: RawBounds
    mean: ExtendedInterval
    variance: ExtendedInterval
    combined: ExtendedInterval


class Acceptance(NamedTuple):
    acquirer_mean: bool
    target_mean: bool
    acquirer_variance: bool
    target_variance: bool

    @property
    def mean(self) -> bool:
        return self.acquirer_mean and self.target_mean

    @property
    def variance(self) -> bool:
        return self.acquirer_variance and self.target_variance

    @property
    def all(self) -> bool:
        return self.mean and self.variance


def blended_discount_rate(a: Valuation, b: Valuation) -> float:
    """k_M weighted by the pre-merger expected equity values"""
    w_a, w_b = relative_weights(a, b)
    return w_a * a.discount_rate + w_b * b.discount_rate


def pre_merger_valuations(m: MergerInputs) -> Tuple[Valuation, Valuation]:
    return value_company(m.acquirer), value_company(m.target)


def merger_discount_rate(m: MergerInputs, a: Optional[Valuation] = None,
                         b: Optional[Valuation] = None) -> float:
    if m.discount_override is not None:
        return m.discount_override
    if a is None or b is None:
        a, b = pre_merger_valuations(m)
    return blended_discount_rate(a, b)


def merged_valuation(m: MergerInputs) -> MergerValuation:
    a, b = pre_merger_valuations(m)
    k_m = merger_discount_rate(m, a, b)
    growth = m.merged_growth
    total = m.total_dividends
    equity = gordon_mean(total, k_m, growth.mean, MERGED_LABEL)
    delta, h_factor, cv = coefficient_of_variation(k_m, growth.mean, growth.stddev, MERGED_LABEL)
    return MergerValuation(
        acquirer=a,
        target=b,
        k_m=k_m,
        g_mean=growth.mean,
        total_dividends=total,
        equity_mean=equity,
        delta=delta,
        h_factor=h_factor,
        cv=cv,
        weights=relative_weights(a, b),
    )


def merged_dps(m: MergerInputs, r: float) -> float:
    """d_M(0) = (D_A(0) + D_B(0)) / (N_A + r N_B)"""
    if r < 0.0:
        raise ValidationError(f"exchange ratio r={r!r} must be >= 0", condition="r >= 0")
    return m.total_dividends / (m.acquirer.shares + r * m.target.shares)


def merged_price(m: MergerInputs, r: float) -> float:
    if r < 0.0:
        raise ValidationError(f"exchange ratio r={r!r} must be >= 0", condition="r >= 0")
    return merged_valuation(m).price_at(r)


def merged_price_stddev(m: MergerInputs, r: float) -> float:
    if r < 0.0:
        raise ValidationError(f"exchange ratio r={r!r} must be >= 0", condition="r >= 0")
    return merged_valuation(m).stddev_at(r)


def expected_wealth_bounds(mv: MergerValuation) -> Tuple[float, float]:
    """Endpoints of the expected-wealth interval.

    The lower end is +inf when W_M <= W_B: B cannot gain for any finite r.
    """
    ratio = mv.shares_ratio
    w_m, w_a, w_b = mv.equity_mean, mv.acquirer.equity_mean, mv.target.equity_mean
    lower = ratio * w_b / (w_m - w_b) if w_m > w_b else math.inf
    upper = ratio * (w_m - w_a) / w_a
    return lower, upper


def variance_bounds(mv: MergerValuation) -> Tuple[float, float]:
    """Endpoints of the variance-reduction interval.

    The upper end is +inf when W_M f_M <= W_B f_B: B's condition holds for every r.
    """
    ratio = mv.shares_ratio
    spread_m = mv.equity_mean * mv.cv
    spread_a = mv.acquirer.equity_mean * mv.acquirer.cv
    spread_b = mv.target.equity_mean * mv.target.cv
    if spread_a > 0.0:
        lower = ratio * (spread_m - spread_a) / spread_a
    else:
        # A has no variance to give up
        lower = math.inf if spread_m > 0.0 else -ratio
    upper = ratio * spread_b / (spread_m - spread_b) if spread_m > spread_b else math.inf
    return lower, upper


def raw_bounds(mv: MergerValuation) -> RawBounds:
    return RawBounds(*expected_wealth_bounds(mv), *variance_bounds(mv))


def evaluate_point(m: MergerInputs) -> PointEvaluation:
    """Value M once and derive all three intervals from it"""
    mv = merged_valuation(m)
    raw = raw_bounds(mv)
    mean = ExtendedInterval.make(raw.mean_lo, raw.mean_hi)
    variance = ExtendedInterval.make(raw.var_lo, raw.var_hi)
    return PointEvaluation(mv, raw, mean, variance, mean.intersect(variance))


def mean_interval(m: MergerInputs) -> ExtendedInterval:
    return evaluate_point(m).mean


def variance_interval(m: MergerInputs) -> ExtendedInterval:
    return evaluate_point(m).variance


def combined_interval(m: MergerInputs) -> ExtendedInterval:
    return evaluate_point(m).combined


def acceptance_at(m: MergerInputs, r: float) -> Acceptance:
    """Check both shareholder groups' conditions directly at one r"""
    mv = merged_valuation(m)
    price = mv.price_at(r)
    stddev = mv.stddev_at(r)
    return Acceptance(
        acquirer_mean=price >= mv.acquirer.mean_price,
        target_mean=r * price >= mv.target.mean_price,
        acquirer_variance=stddev <= mv.acquirer.stddev_price,
        target_variance=r * stddev <= mv.target.stddev_price,
    )


def no_synergy_growth(m: MergerInputs) -> float:
    """Merged mean growth at which W_M equals W_A + W_B.

    Only the discount rate and dividends of m matter; its merged growth is ignored.
    """
    a, b = pre_merger_valuations(m)
    k_m = merger_discount_rate(m, a, b)
    equity_sum = a.equity_mean + b.equity_mean
    dividends = m.total_dividends
    if equity_sum <= 0.0:
        raise DomainError(
            f"pre-merger equity sum {equity_sum:g} must be > 0",
            condition="W_A + W_B > 0",
        )
    return (equity_sum * k_m - dividends) / (equity_sum + dividends)


def r_star(a: Valuation, b: Valuation) -> float:
    return b.mean_price / a.mean_price


def no_synergy_interval(m: MergerInputs) -> ExtendedInterval:
    """Variance interval with W_M = W_A + W_B substituted.

    The merged stddev is taken from m.merged_growth; its mean is replaced by
    the no-synergy growth.
    """
    a, b = pre_merger_valuations(m)
    k_m = merger_discount_rate(m, a, b)
    g_star = no_synergy_growth(m)
    _, _, f_m = coefficient_of_variation(
        k_m, g_star, m.merged_growth.stddev, f"{MERGED_LABEL} at no-synergy growth")

    ratio = m.shares_ratio
    if a.cv == 0.0:
        if f_m > 0.0:
            return EMPTY
        lower = 0.0
    else:
        lower = ratio * (f_m / a.cv - 1.0) + r_star(a, b) * f_m / a.cv

    if b.cv == 0.0:
        upper = 0.0 if f_m > 0.0 else math.inf
    else:
        bracket = (f_m / b.cv - 1.0) / ratio + (a.mean_price / b.mean_price) * f_m / b.cv
        upper = math.inf if bracket <= 0.0 else 1.0 / bracket
    return ExtendedInterval.make(lower, upper)


def cv_mixture_check(a: Valuation, b: Valuation, merged_cv: float) -> bool:
    """f_M <= w_A f_A + w_B f_B: M is no riskier than the equity-weighted pair"""
    w_a, w_b = relative_weights(a, b)
    return merged_cv <= w_a * a.cv + w_b * b.cv


def diversification_check(m: MergerInputs) -> bool:
    """f_M <= min(f_A, f_B).

    Together with synergy this makes the combined interval nonempty only when
    f_M W_M <= f_A W_A + f_B W_B also holds; the two coincide at no synergy.
    """
    mv = merged_valuation(m)
    return mv.cv <= min(mv.acquirer.cv, mv.target.cv)
