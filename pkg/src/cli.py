#!/usr/bin/env python3
"""
Command-line front end.

    python -m src.cli value --config scenarios/two-company.json
    python -m src.cli region --config scenarios/two-company.json --out out/
    python -m src.cli mc-check --config scenarios/two-company.json --paths 50000
    python -m src.cli reproduce-paper --out out/example

Exit status: 0 success, 2 invalid input, 3 the model breaks down for the inputs.
"""
import argparse
import logging
import sys
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.constants import SimDefaults
from src.errors import ModelError, UnsupportedInputError, ValidationError
from src.mc_oracle import SimConfig, simulate_price, truncated_mean_exact, truncated_variance_exact
from src.merger_model import (MergerInputs, blended_discount_rate, evaluate_point, merger_discount_rate,
                              no_synergy_growth, pre_merger_valuations, r_star)
from src.output import FORMATS, OutputBundle, cell, flag, interval_cells, write_bundle
from src.region_sweep import RegionReport, check_rewritten_forms, feasibility_pattern, sweep
from src.scenario import (TWO_COMPANY_EXAMPLE, EmbeddedSource, JsonFileSource, ScenarioFile, load_scenario,
                          reference_matches, reference_notes)
from src.sddm_core import GrowthModel, relative_weights, value_company
from src.svgplot import render_region

logger = logging.getLogger(__name__)

VALUE_COLUMNS = ["company", "mean_price", "stddev_price", "cv", "equity_mean", "weight",
                 "delta", "h_factor", "risk_compensation"]
REGION_COLUMNS = ["g", "mean_lo", "mean_hi", "var_lo", "var_hi", "combined_lo", "combined_hi", "valid"]
REGION_SUMMARY_COLUMNS = ["sigma", "feasible", "g_feasible_min", "g_feasible_max", "area", "min_accepted_r",
                          "max_offered_r", "widest_g", "widest_width", "invalid_points"]
CROSSING_COLUMNS = ["sigma", "curves", "g", "r"]
MC_COLUMNS = ["company", "horizon", "paths", "closed_mean", "exact_mean", "mc_mean", "mean_se", "mean_pass",
              "closed_var", "exact_var", "mc_var", "var_se", "var_pass", "tail_bound"]
CONSTANT_COLUMNS = ["quantity", "computed", "reference", "status"]

# rendered on the console when present
CONSOLE_TABLES = ("value", "example_values", "reference_constants", "region_summary", "mc_check")


def sigma_tag(sigma: float) -> str:
    return f"{sigma:g}"


def cmd_value(scenario: ScenarioFile, company: Optional[str] = None) -> OutputBundle:
    """Expected price, price stddev, f, expected equity and relative weight per company"""
    names = list(scenario.companies)
    valuations = {name: value_company(scenario.company(name)) for name in names}
    # weights are relative to the merging pair only
    pair = (scenario.acquirer, scenario.target)
    weights = dict(zip(pair, relative_weights(*(valuations[name] for name in pair))))
    if company is not None:
        scenario.company(company)
    selected = names if company is None else [company]

    bundle = OutputBundle()
    rows = []
    ref_companies = scenario.reference.get('companies', {})
    for name in selected:
        v = valuations[name]
        computed = {
            'mean_price': v.mean_price,
            'stddev_price': v.stddev_price,
            'cv': v.cv,
            'equity_mean': v.equity_mean,
            'weight': weights.get(name),
        }
        rows.append({
            'company': name,
            **{key: cell(value) for key, value in computed.items()},
            'delta': cell(v.delta),
            'h_factor': cell(v.h_factor),
            'risk_compensation': cell(v.risk_compensation),
        })
        bundle.summary.append(
            f"{name}: P={cell(v.mean_price)} sigma={cell(v.stddev_price)} f={cell(v.cv)} "
            f"W={cell(v.equity_mean)} weight={cell(weights.get(name))}")
        bundle.summary.extend(reference_notes(ref_companies.get(name, {}), computed, name))
    bundle.add_table("value", rows, VALUE_COLUMNS)
    return bundle


def region_table(report: RegionReport) -> List[Dict[str, str]]:
    rows = []
    for s in report.slices:
        mean_lo, mean_hi = interval_cells(s.mean_bounds)
        var_lo, var_hi = interval_cells(s.var_bounds)
        comb_lo, comb_hi = interval_cells(s.combined)
        rows.append({
            'g': cell(s.g), 'mean_lo': mean_lo, 'mean_hi': mean_hi, 'var_lo': var_lo, 'var_hi': var_hi,
            'combined_lo': comb_lo, 'combined_hi': comb_hi, 'valid': flag(s.valid),
        })
    return rows


def region_line(report: RegionReport) -> str:
    prefix = f"sigma={report.sigma * 100:g}%: bargaining region: "
    if not report.feasible:
        return prefix + "EMPTY"
    return (prefix + f"nonempty, min feasible g={cell(report.g_feasible_min)}, "
            f"max feasible g={cell(report.g_feasible_max)}, area={cell(report.area)}, "
            f"min accepted r={cell(report.min_accepted_r)}, max offered r={cell(report.max_offered_r)}")


def cmd_region(scenario: ScenarioFile) -> OutputBundle:
    """Per-sigma region tables and plots, plus the region diagnostics"""
    template = scenario.merger_inputs()
    return region_outputs(template, sweep(template, scenario.sweep))


def region_outputs(template: MergerInputs, reports: List[RegionReport]) -> OutputBundle:
    a, b = pre_merger_valuations(template)
    k_m = merger_discount_rate(template, a, b)

    bundle = OutputBundle()
    bundle.summary.append(f"k_M={cell(k_m)}  no-synergy growth={cell(no_synergy_growth(template))}  "
                          f"r*={cell(r_star(a, b))}")
    summary_rows, crossing_rows = [], []
    for report in reports:
        tag = sigma_tag(report.sigma)
        bundle.add_table(f"region_sigma_{tag}", region_table(report), REGION_COLUMNS)
        bundle.plots[f"region_sigma_{tag}"] = render_region(report)
        summary_rows.append({
            'sigma': cell(report.sigma),
            'feasible': flag(report.feasible),
            'g_feasible_min': cell(report.g_feasible_min),
            'g_feasible_max': cell(report.g_feasible_max),
            'area': cell(report.area),
            'min_accepted_r': cell(report.min_accepted_r),
            'max_offered_r': cell(report.max_offered_r),
            'widest_g': cell(report.widest_g),
            'widest_width': cell(report.widest_width),
            'invalid_points': str(report.invalid_count),
        })
        for crossing in report.crossings:
            crossing_rows.append({'sigma': cell(report.sigma), 'curves': crossing.curves,
                                  'g': cell(crossing.g), 'r': cell(crossing.r)})
        bundle.summary.append(region_line(report))
    bundle.add_table("region_summary", summary_rows, REGION_SUMMARY_COLUMNS)
    bundle.add_table("crossings", crossing_rows, CROSSING_COLUMNS)
    return bundle


def cmd_mc_check(scenario: ScenarioFile) -> OutputBundle:
    """Closed form vs exact truncated vs Monte Carlo price moments"""
    bundle = OutputBundle()
    rows = []
    for name, company in scenario.companies.items():
        if not company.growth.is_explicit:
            raise UnsupportedInputError(
                f"mc-check: company '{name}' gives growth as mean/stddev only; the simulation draws "
                f"growth states, so give 'states' and 'probs' for every company",
                condition="explicit growth states",
            )
        v = value_company(company)
        est = simulate_price(company, scenario.sim)
        closed_var = v.stddev_price ** 2
        mean_pass = abs(est.mean - v.mean_price) <= SimDefaults.PASS_SE * est.mean_se
        var_pass = abs(est.variance - closed_var) <= SimDefaults.PASS_SE * est.var_se
        rows.append({
            'company': name,
            'horizon': str(est.horizon),
            'paths': str(est.paths),
            'closed_mean': cell(v.mean_price),
            'exact_mean': cell(truncated_mean_exact(company, est.horizon)),
            'mc_mean': cell(est.mean),
            'mean_se': cell(est.mean_se),
            'mean_pass': flag(mean_pass),
            'closed_var': cell(closed_var),
            'exact_var': cell(truncated_variance_exact(company, est.horizon)),
            'mc_var': cell(est.variance),
            'var_se': cell(est.var_se),
            'var_pass': flag(var_pass),
            'tail_bound': cell(est.tail_bound),
        })
        verdict = "pass" if mean_pass and var_pass else "FAIL"
        bundle.summary.append(
            f"{name}: Monte Carlo {verdict} at {SimDefaults.PASS_SE:g} SE "
            f"(mean {cell(est.mean)} vs {cell(v.mean_price)}, variance {cell(est.variance)} vs {cell(closed_var)})")
    bundle.add_table("mc_check", rows, MC_COLUMNS)
    return bundle


def reference_constants(scenario: ScenarioFile) -> OutputBundle:
    """Merger-level constants of the numerical example against the printed values"""
    template = scenario.merger_inputs()
    a, b = pre_merger_valuations(template)
    k_m = blended_discount_rate(a, b)
    g_star = no_synergy_growth(template)
    ratio = r_star(a, b)
    collapse = evaluate_point(template.with_merged_growth(
        GrowthModel.from_moments(g_star, template.merged_growth.stddev))).raw
    ref = scenario.reference.get('merger', {})

    quantities = [
        ('k_m_text', k_m),
        ('k_m_rounded', k_m),
        ('no_synergy_growth', g_star),
        ('r_star', ratio),
    ]
    bundle = OutputBundle()
    rows = []
    for key, value in quantities:
        if key in ref:
            status = "match" if reference_matches(value, ref[key]) else "rounding inconsistency"
            reference = cell(ref[key])
        else:
            status, reference = "", "empty"
        rows.append({'quantity': key, 'computed': cell(value), 'reference': reference, 'status': status})
    rows.append({'quantity': 'mean_interval_width_at_no_synergy',
                 'computed': cell(abs(collapse.mean_hi - collapse.mean_lo)), 'reference': "empty", 'status': ""})
    bundle.add_table("reference_constants", rows, CONSTANT_COLUMNS)

    bundle.summary.append(f"k_M computed {k_m:.6f}; text prints {ref.get('k_m_text')!r}, "
                          f"the rounded rate is {ref.get('k_m_rounded')!r}")
    if 'k_m_text' in ref and not reference_matches(k_m, ref['k_m_text']):
        bundle.summary.append(f"note: text value {ref['k_m_text']!r} is a rounding inconsistency "
                              f"(computed rounds to {k_m:.4f})")
    bundle.summary.append(f"no-synergy growth {g_star:.6f}; r* = {ratio:.4f}; "
                          f"mean interval at that growth [{collapse.mean_lo:.6f}, {collapse.mean_hi:.6f}]")
    return bundle


def cmd_reproduce_paper(sim: Optional[SimConfig] = None) -> OutputBundle:
    """Regenerate the two-company numerical example from the embedded inputs"""
    scenario = load_scenario(EmbeddedSource(TWO_COMPANY_EXAMPLE))
    if sim is not None:
        scenario.sim = sim

    bundle = OutputBundle()
    values = cmd_value(scenario)
    values.tables["example_values"] = values.tables.pop("value")
    bundle.extend(values)
    bundle.extend(reference_constants(scenario))
    template = scenario.merger_inputs()
    reports = sweep(template, scenario.sweep)
    bundle.extend(region_outputs(template, reports))

    stochastic = [r for r in reports if r.sigma > 0.0]
    sigmas = ", ".join(f"{r.sigma * 100:g}%" for r in stochastic)
    bundle.summary.append(f"feasibility verdict ({sigmas}): {', '.join(feasibility_pattern(stochastic))}")
    for report in stochastic:
        if report.feasible:
            relation = "<" if report.min_accepted_r < 0.5 else ">="
            bundle.summary.append(f"sigma={report.sigma * 100:g}%: min accepted r "
                                  f"{cell(report.min_accepted_r)} {relation} 0.5")
    passed, failed, skipped = check_rewritten_forms(template, scenario.sweep)
    bundle.summary.append(f"rewritten bound forms: {passed} agree, {failed} disagree, {skipped} not applicable")
    bundle.extend(cmd_mc_check(scenario))
    return bundle


def parse_horizon(text: str) -> Optional[int]:
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"horizon must be an integer or 'auto', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='Path to the JSON scenario file')
    common.add_argument('--out', default='out', help='Output directory (default: out)')
    common.add_argument('--format', choices=FORMATS, default='csv', help='Table format (default: csv)')
    common.add_argument('--seed', type=int, help='Override sim.seed')
    common.add_argument('--paths', type=int, help='Override sim.paths')
    common.add_argument('--horizon', type=parse_horizon, default=argparse.SUPPRESS,
                        help="Override sim.horizon: an integer or 'auto'")
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v info, -vv debug')

    parser = argparse.ArgumentParser(
        prog='sddm-merger',
        description='Exchange-ratio bargaining regions under the stochastic dividend discount model',
    )
    sub = parser.add_subparsers(dest='command', required=True)
    value = sub.add_parser('value', parents=[common], help='Value each company (price mean, stddev, f, W, weight)')
    value.add_argument('--company', help='Only report this company')
    sub.add_parser('region', parents=[common], help='Sweep the bargaining region and plot it')
    sub.add_parser('mc-check', parents=[common], help='Check the closed forms against simulation')
    sub.add_parser('reproduce-paper', parents=[common], help='Regenerate the two-company numerical example')
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_time=False, show_path=False)],
        force=True,
    )


def sim_overrides(args: argparse.Namespace, base: SimConfig) -> SimConfig:
    changes = {}
    if args.seed is not None:
        changes['seed'] = args.seed
    if args.paths is not None:
        changes['paths'] = args.paths
    if hasattr(args, 'horizon'):
        changes['horizon'] = args.horizon
    return replace(base, **changes) if changes else base


def run(args: argparse.Namespace) -> OutputBundle:
    logger.info("running %s", args.command)
    if args.command == 'reproduce-paper':
        return cmd_reproduce_paper(sim_overrides(args, load_scenario(EmbeddedSource(TWO_COMPANY_EXAMPLE)).sim))
    if not args.config:
        raise ValidationError(f"{args.command}: --config PATH is required", condition="--config given")
    scenario = load_scenario(JsonFileSource(args.config))
    scenario.sim = sim_overrides(args, scenario.sim)
    if args.command == 'value':
        return cmd_value(scenario, args.company)
    if args.command == 'region':
        return cmd_region(scenario)
    return cmd_mc_check(scenario)


def render(bundle: OutputBundle, console: Console) -> None:
    for name in CONSOLE_TABLES:
        frame = bundle.tables.get(name)
        if frame is None or frame.empty:
            continue
        table = Table(title=name)
        for column in frame.columns:
            table.add_column(str(column))
        for row in frame.itertuples(index=False):
            table.add_row(*(str(v) for v in row))
        console.print(table)
    for line in bundle.summary:
        console.print(line, markup=False, highlight=False)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    console = Console()
    try:
        bundle = run(args)
        write_bundle(bundle, args.out, args.format)
    except ModelError as e:
        condition = f" [{e.condition}]" if e.condition else ""
        logger.error("%s%s", e, condition)
        return e.exit_code
    render(bundle, console)
    return 0


if __name__ == "__main__":
    sys.exit(main())
