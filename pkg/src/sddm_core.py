"""
Single-company stochastic dividend discount model.

Dividends grow each period by an independent draw of a finite-state growth
rate. The expected price is the Gordon formula evaluated at the mean growth;
the price variance exists while delta = (1+k)^2 - (1+g)^2 - sigma^2 > 0.
"""
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

from src.constants import Tolerances
from src.errors import DomainError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GrowthModel:
    """Distribution of the per-period dividend growth rate.

    Either explicit (states + probs, with the moments derived from them) or
    moments-only (mean + stddev). The closed forms only use the moments.
    """
    mean: float
    stddev: float
    states: Optional[Tuple[float, ...]] = None
    probs: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not math.isfinite(self.mean) or self.mean <= -1.0:
            raise ValidationError(
                f"mean growth {self.mean!r} must be finite and > -1",
                condition="g_mean > -1",
            )
        if not math.isfinite(self.stddev) or self.stddev < 0.0:
            raise ValidationError(
                f"growth stddev {self.stddev!r} must be finite and >= 0",
                condition="growth stddev >= 0",
            )

    @classmethod
    def from_states(cls, states: Sequence[float], probs: Sequence[float]) -> 'GrowthModel':
        """Build an explicit distribution, checking ordering and probabilities"""
        states = tuple(float(s) for s in states)
        probs = tuple(float(p) for p in probs)
        if not states:
            raise ValidationError("growth distribution has no states", condition="at least one state")
        if len(states) != len(probs):
            raise ValidationError(
                f"{len(states)} growth states but {len(probs)} probabilities",
                condition="one probability per state",
            )
        if any(not math.isfinite(s) or s <= -1.0 for s in states):
            raise ValidationError(
                f"growth states {states} must all be finite and > -1",
                condition="every state > -1",
            )
        if any(b <= a for a, b in zip(states, states[1:])):
            raise ValidationError(
                f"growth states {states} must be strictly increasing",
                condition="states strictly increasing",
            )
        if any(not math.isfinite(p) or p <= 0.0 for p in probs):
            raise ValidationError(
                f"probabilities {probs} must all be > 0",
                condition="every probability > 0",
            )
        total = math.fsum(probs)
        if abs(total - 1.0) > Tolerances.PROB_SUM:
            raise ValidationError(
                f"probabilities sum to {total!r}, expected 1 within {Tolerances.PROB_SUM:g}",
                condition="probability sum",
            )
        if total != 1.0:
            probs = tuple(p / total for p in probs)

        mean = math.fsum(p * s for p, s in zip(probs, states))
        variance = math.fsum(p * (s - mean) ** 2 for p, s in zip(probs, states))
        return cls(mean=mean, stddev=math.sqrt(variance), states=states, probs=probs)

    @classmethod
    def from_moments(cls, mean: float, stddev: float) -> 'GrowthModel':
        return cls(mean=float(mean), stddev=float(stddev))

    @property
    def is_explicit(self) -> bool:
        return self.states is not None

    @property
    def second_moment(self) -> float:
        """E[(1+g)^2]"""
        return (1.0 + self.mean) ** 2 + self.stddev ** 2


@dataclass(frozen=True)
class CompanyParams:
    """Pre-merger inputs of one company.

    Structural invariants are checked here; k > g_mean and delta > 0 are
    owned by expected_price and price_dispersion.
    """
    dps0: float
    discount_rate: float
    shares: float
    growth: GrowthModel
    name: str = ""

    def __post_init__(self):
        label = self.label
        if not math.isfinite(self.dps0) or self.dps0 <= 0.0:
            raise ValidationError(f"{label}: dps0={self.dps0!r} must be > 0", condition="dps0 > 0")
        if not math.isfinite(self.shares) or self.shares <= 0.0:
            raise ValidationError(f"{label}: shares={self.shares!r} must be > 0", condition="shares > 0")
        if not math.isfinite(self.discount_rate) or self.discount_rate <= -1.0:
            raise ValidationError(
                f"{label}: discount rate k={self.discount_rate!r} must be > -1",
                condition="k > -1",
            )

    @property
    def label(self) -> str:
        return f"company '{self.name}'" if self.name else "company"

    @property
    def total_dividends(self) -> float:
        """D(0) = N * d(0)"""
        return self.dps0 * self.shares


class Dispersion(NamedTuple):
    delta: float
    h_factor: float
    stddev_price: float
    cv: float


@dataclass(frozen=True)
class Valuation:
    params: CompanyParams
    mean_price: float
    stddev_price: float
    delta: float
    h_factor: float
    cv: float
    equity_mean: float

    @property
    def discount_rate(self) -> float:
        return self.params.discount_rate

    @property
    def risk_compensation(self) -> float:
        """1/f, the Sharpe-type reading of the coefficient of variation"""
        return math.inf if self.cv == 0.0 else 1.0 / self.cv


def gordon_mean(dps0: float, discount_rate: float, g_mean: float, label: str = "company") -> float:
    """d(0)(1+g)/(k-g); also used for the merged company's total dividends"""
    if discount_rate <= g_mean:
        raise DomainError(
            f"{label}: discount rate k={discount_rate:g} must exceed mean growth g={g_mean:g} (k > g_mean)",
            condition="k > g_mean",
        )
    return dps0 * (1.0 + g_mean) / (discount_rate - g_mean)


def coefficient_of_variation(discount_rate: float, g_mean: float, g_stddev: float,
                             label: str = "company") -> Tuple[float, float, float]:
    """Return (delta, h, f) for the given rate and growth moments"""
    delta = (1.0 + discount_rate) ** 2 - (1.0 + g_mean) ** 2 - g_stddev ** 2
    if delta <= 0.0:
        raise DomainError(
            f"{label}: delta=(1+k)^2-(1+g)^2-sigma^2={delta:.6g} must be > 0 (delta > 0)",
            condition="delta > 0",
        )
    if g_stddev == 0.0:
        return delta, 0.0, 0.0
    h_factor = g_stddev / math.sqrt(delta)
    return delta, h_factor, h_factor * (1.0 + discount_rate) / (1.0 + g_mean)


def growth_moments(g: GrowthModel) -> Tuple[float, float]:
    return g.mean, g.stddev


def expected_price(c: CompanyParams) -> float:
    return gordon_mean(c.dps0, c.discount_rate, c.growth.mean, c.label)


def price_dispersion(c: CompanyParams) -> Dispersion:
    """Delta, h, price standard deviation and coefficient of variation"""
    delta, h_factor, cv = coefficient_of_variation(
        c.discount_rate, c.growth.mean, c.growth.stddev, c.label)
    return Dispersion(delta, h_factor, expected_price(c) * cv, cv)


def value_company(c: CompanyParams) -> Valuation:
    mean_price = expected_price(c)
    dispersion = price_dispersion(c)
    valuation = Valuation(
        params=c,
        mean_price=mean_price,
        stddev_price=dispersion.stddev_price,
        delta=dispersion.delta,
        h_factor=dispersion.h_factor,
        cv=dispersion.cv,
        equity_mean=c.shares * mean_price,
    )
    logger.debug("%s: P=%.6g sigma=%.6g f=%.6g", c.label, mean_price, valuation.stddev_price, valuation.cv)
    return valuation


def relative_weights(*valuations: Valuation) -> Tuple[float, ...]:
    """Relative expected equity values W_i / sum(W)"""
    total = math.fsum(v.equity_mean for v in valuations)
    return tuple(v.equity_mean / total for v in valuations)
