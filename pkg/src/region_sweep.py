"""
Bargaining region over the (merged mean growth, exchange ratio) plane.

For each merged growth stddev the merged mean growth is swept over a grid;
every grid point yields the expected-wealth interval, the variance interval
and their intersection. Edges and curve crossings are refined by bisection.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from src.constants import SweepDefaults, Tolerances
from src.errors import BracketError, DomainError, ValidationError
from src.interval import EMPTY, ExtendedInterval
from src.merger_model import (MergerInputs, MergerValuation, RawBounds, evaluate_point,
                              merged_valuation, merger_discount_rate, raw_bounds)
from src.sddm_core import GrowthModel

logger = logging.getLogger(__name__)

Curve = Callable[[float], float]

CURVE_NAMES = RawBounds._fields
CROSSING_PAIRS = (
    ("mean_lo", "mean_hi"),
    ("var_lo", "var_hi"),
    ("var_lo", "mean_hi"),
    ("mean_lo", "var_hi"),
)


@dataclass(frozen=True)
class SweepConfig:
    g_min: float = SweepDefaults.G_MIN
    g_max: float = SweepDefaults.G_MAX
    g_steps: int = SweepDefaults.G_STEPS
    sigmas: Tuple[float, ...] = SweepDefaults.SIGMAS
    clamp_r_max: float = SweepDefaults.CLAMP_R_MAX

    def __post_init__(self):
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))
        if not (math.isfinite(self.g_min) and math.isfinite(self.g_max)) or self.g_min <= -1.0:
            raise ValidationError(
                f"sweep range [{self.g_min!r}, {self.g_max!r}] must be finite with g_min > -1",
                condition="g_min > -1",
            )
        if self.g_min >= self.g_max:
            raise ValidationError(
                f"sweep range needs g_min < g_max, got [{self.g_min:g}, {self.g_max:g}]",
                condition="g_min < g_max",
            )
        if isinstance(self.g_steps, bool) or not isinstance(self.g_steps, int) or self.g_steps < 2:
            raise ValidationError(f"g_steps={self.g_steps!r} must be an integer >= 2", condition="g_steps >= 2")
        if not self.sigmas:
            raise ValidationError("sweep has no sigma values", condition="at least one sigma")
        if any(not math.isfinite(s) or s < 0.0 for s in self.sigmas):
            raise ValidationError(f"sigmas {self.sigmas} must all be >= 0", condition="sigma >= 0")
        if not self.clamp_r_max > 0.0:
            raise ValidationError(f"clamp_r_max={self.clamp_r_max!r} must be > 0", condition="clamp_r_max > 0")

    def grid(self) -> np.ndarray:
        return np.linspace(self.g_min, self.g_max, self.g_steps)


@dataclass(frozen=True)
class RegionSlice:
    """Intervals at one merged mean growth; invalid slices carry empty intervals"""
    g: float
    mean_bounds: ExtendedInterval = EMPTY
    var_bounds: ExtendedInterval = EMPTY
    combined: ExtendedInterval = EMPTY
    valid: bool = False
    raw: Optional[RawBounds] = None


class Crossing(NamedTuple):
    curves: str
    g: float
    r: float


@dataclass
class RegionReport:
    sigma: float
    slices: List[RegionSlice]
    clamp_r_max: float = SweepDefaults.CLAMP_R_MAX
    feasible: bool = False
    g_feasible_min: Optional[float] = None
    g_feasible_max: Optional[float] = None
    crossings: List[Crossing] = field(default_factory=list)
    area: float = 0.0
    min_accepted_r: Optional[float] = None
    max_offered_r: Optional[float] = None
    widest_g: Optional[float] = None
    widest_width: float = 0.0

    @property
    def invalid_count(self) -> int:
        return sum(1 for s in self.slices if not s.valid)


def _point(template: MergerInputs, g: float, sigma: float) -> MergerInputs:
    return template.with_merged_growth(GrowthModel.from_moments(g, sigma))


def evaluate_slice(template: MergerInputs, g: float, sigma: float) -> RegionSlice:
    try:
        point = evaluate_point(_point(template, g, sigma))
    except DomainError:
        return RegionSlice(g=float(g))
    return RegionSlice(float(g), point.mean, point.variance, point.combined, True, point.raw)


def boundary_curve(template: MergerInputs, sigma: float, name: str) -> Curve:
    """One raw interval endpoint as a function of the merged mean growth (nan where invalid)"""
    if name not in CURVE_NAMES:
        raise ValueError(f"unknown curve {name!r}, expected one of {CURVE_NAMES}")

    def curve(g: float) -> float:
        try:
            mv = merged_valuation(_point(template, g, sigma))
        except (DomainError, ValidationError):
            return math.nan
        return getattr(raw_bounds(mv), name)

    return curve


def _common_ordinate(r_lo: float, r_hi: float) -> float:
    if math.isfinite(r_lo) and math.isfinite(r_hi):
        return 0.5 * (r_lo + r_hi)
    return r_lo if math.isfinite(r_lo) else r_hi


def find_crossing(f_lo: Curve, f_hi: Curve, bracket: Tuple[float, float]) -> Tuple[float, float]:
    """Bisect f_lo - f_hi on the bracket down to the abscissa tolerance.

    Returns the crossing abscissa and the curves' common ordinate there.
    """
    g1, g2 = bracket

    def gap(g: float) -> float:
        d = f_lo(g) - f_hi(g)
        if math.isnan(d):
            raise BracketError(f"curves undefined or both infinite at g={g:.6g}", condition="curves defined on bracket")
        return d

    d1, d2 = gap(g1), gap(g2)
    if d1 == 0.0 and d2 == 0.0:
        raise BracketError(f"curves coincide at both ends of [{g1:.6g}, {g2:.6g}]", condition="sign change")
    if d1 == 0.0:
        g = g1
    elif d2 == 0.0:
        g = g2
    elif (d1 > 0.0) == (d2 > 0.0):
        raise BracketError(
            f"curve difference does not change sign on [{g1:.6g}, {g2:.6g}] ({d1:.3g}, {d2:.3g})",
            condition="sign change",
        )
    else:
        g = optimize.bisect(gap, g1, g2, xtol=Tolerances.BISECT_XTOL)
    return g, _common_ordinate(f_lo(g), f_hi(g))


def find_crossings(template: MergerInputs, report: RegionReport) -> List[Crossing]:
    """Scan the grid for sign changes of each curve pair and refine them"""
    crossings = []
    for lo_name, hi_name in CROSSING_PAIRS:
        f_lo = boundary_curve(template, report.sigma, lo_name)
        f_hi = boundary_curve(template, report.sigma, hi_name)
        previous = None
        for s in report.slices:
            if not s.valid:
                previous = None
                continue
            d = getattr(s.raw, lo_name) - getattr(s.raw, hi_name)
            if math.isnan(d):
                previous = None
                continue
            if previous is not None:
                g_prev, d_prev = previous
                if d_prev * d < 0.0 or (d == 0.0 and d_prev != 0.0):
                    try:
                        g, r = find_crossing(f_lo, f_hi, (g_prev, s.g))
                    except BracketError as e:
                        logger.debug("skipping %s/%s crossing near g=%.6g: %s", lo_name, hi_name, s.g, e)
                    else:
                        crossings.append(Crossing(f"{lo_name}/{hi_name}", g, r))
            previous = (s.g, d)
    return crossings


def _refine_edge(template: MergerInputs, sigma: float, g_out: float, g_in: float) -> float:
    """Locate the feasibility edge between an infeasible and a feasible abscissa"""
    def side(g: float) -> float:
        return -1.0 if evaluate_slice(template, g, sigma).combined.empty else 1.0

    return optimize.bisect(side, g_out, g_in, xtol=Tolerances.BISECT_XTOL)


def region_area(report: RegionReport) -> float:
    """Trapezoidal area of the combined region, upper edge truncated at clamp_r_max"""
    if len(report.slices) < 2:
        return 0.0
    g = [s.g for s in report.slices]
    widths = [s.combined.width(report.clamp_r_max) if s.valid else 0.0 for s in report.slices]
    return float(integrate.trapezoid(widths, g))


def summarize(template: MergerInputs, report: RegionReport) -> RegionReport:
    """Fill in the feasibility diagnostics of a report from its slices"""
    slices = report.slices
    feasible_idx = [i for i, s in enumerate(slices) if s.valid and not s.combined.empty]
    report.feasible = bool(feasible_idx)
    report.area = region_area(report)
    report.crossings = find_crossings(template, report)
    if not report.feasible:
        return report

    first, last = feasible_idx[0], feasible_idx[-1]
    report.g_feasible_min = (
        _refine_edge(template, report.sigma, slices[first - 1].g, slices[first].g)
        if first > 0 else slices[first].g
    )
    report.g_feasible_max = (
        _refine_edge(template, report.sigma, slices[last + 1].g, slices[last].g)
        if last < len(slices) - 1 else slices[last].g
    )
    report.min_accepted_r = min(slices[i].combined.lower for i in feasible_idx)
    report.max_offered_r = max(slices[i].combined.upper for i in feasible_idx)
    widest = max(feasible_idx, key=lambda i: slices[i].combined.width(report.clamp_r_max))
    report.widest_g = slices[widest].g
    report.widest_width = slices[widest].combined.width(report.clamp_r_max)
    return report


def sweep_sigma(template: MergerInputs, cfg: SweepConfig, sigma: float) -> RegionReport:
    logger.debug("sweeping sigma=%g over %d points in [%g, %g]", sigma, cfg.g_steps, cfg.g_min, cfg.g_max)
    slices = [evaluate_slice(template, g, sigma) for g in cfg.grid()]
    report = summarize(template, RegionReport(sigma=sigma, slices=slices, clamp_r_max=cfg.clamp_r_max))
    if report.invalid_count:
        logger.warning("sigma=%g: %d of %d grid points break the model (kept as invalid)",
                       sigma, report.invalid_count, len(slices))
    logger.info("sigma=%g: region %s, area=%.6g", sigma, "nonempty" if report.feasible else "EMPTY", report.area)
    return report


def sweep(template: MergerInputs, cfg: SweepConfig) -> List[RegionReport]:
    """One report per sigma; the template's merged growth is replaced point by point"""
    k_m = merger_discount_rate(template)
    if cfg.g_max >= k_m:
        raise ValidationError(
            f"sweep g_max={cfg.g_max:g} must be below the merged discount rate k_M={k_m:.6g}",
            condition="g_max < k_M",
        )
    return [sweep_sigma(template, cfg, sigma) for sigma in cfg.sigmas]


def rewritten_bounds(mv: MergerValuation) -> RawBounds:
    """The same endpoints through H_i = D/W_i and J_i = (1+k_M) H_i / f_i.

    Requires f_A > 0 and f_B > 0.
    """
    ratio = mv.shares_ratio
    k_m, g = mv.k_m, mv.g_mean
    h_a = mv.total_dividends / mv.acquirer.equity_mean
    h_b = mv.total_dividends / mv.target.equity_mean
    growth_factor = (1.0 + g) / (k_m - g)

    mean_lo = ratio / (growth_factor * h_b - 1.0) if growth_factor * h_b > 1.0 else math.inf
    mean_hi = ratio * (growth_factor * h_a - 1.0)

    j_a = (1.0 + k_m) * h_a / mv.acquirer.cv
    j_b = (1.0 + k_m) * h_b / mv.target.cv
    risk_factor = mv.h_factor / (k_m - g)
    var_lo = ratio * (risk_factor * j_a - 1.0)
    var_hi = ratio / (risk_factor * j_b - 1.0) if risk_factor * j_b > 1.0 else math.inf
    return RawBounds(mean_lo, mean_hi, var_lo, var_hi)


def _agree(x: float, y: float, scale: float) -> bool:
    if math.isinf(x) or math.isinf(y):
        return x == y
    return abs(x - y) <= Tolerances.REWRITE_RTOL * max(abs(x), abs(y), scale)


def rewritten_bounds_check(m: MergerInputs, g: float, sigma: float) -> Optional[bool]:
    """Compare both parameterisations of the bounds at (g, sigma).

    None when the point is invalid or a pre-merger f is zero.
    """
    try:
        mv = merged_valuation(_point(m, g, sigma))
    except DomainError:
        return None
    if mv.acquirer.cv == 0.0 or mv.target.cv == 0.0:
        return None
    direct = raw_bounds(mv)
    rewritten = rewritten_bounds(mv)
    return all(_agree(x, y, mv.shares_ratio) for x, y in zip(direct, rewritten))


def check_rewritten_forms(template: MergerInputs, cfg: SweepConfig) -> Tuple[int, int, int]:
    """(passed, failed, not applicable) over every grid point of every sigma"""
    counts = [0, 0, 0]
    for sigma in cfg.sigmas:
        for g in cfg.grid():
            result = rewritten_bounds_check(template, float(g), sigma)
            counts[2 if result is None else (0 if result else 1)] += 1
    return counts[0], counts[1], counts[2]


def feasibility_pattern(reports: Sequence[RegionReport]) -> List[str]:
    return ["nonempty" if r.feasible else "empty" for r in reports]
