"""
Scenario documents: companies, merger, sweep and simulation settings.

A scenario is a single JSON document. Rates may be decimals (0.04) or
percent strings ("4%"); they are normalised to decimals when parsed.
"""
import copy
import json
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.constants import SimDefaults, SweepDefaults
from src.errors import UnknownCompanyError, ValidationError
from src.mc_oracle import SimConfig
from src.merger_model import MergerInputs
from src.region_sweep import SweepConfig
from src.sddm_core import CompanyParams, GrowthModel, value_company

logger = logging.getLogger(__name__)


class ScenarioSource(ABC):
    @abstractmethod
    def load_document(self) -> Dict[str, Any]:
        """Return the raw scenario document"""
        pass


class JsonFileSource(ScenarioSource):
    def __init__(self, file_path: str):
        self.file_path = file_path

    def load_document(self) -> Dict[str, Any]:
        try:
            with open(self.file_path, 'r') as f:
                return json.load(f)
        except OSError as e:
            raise ValidationError(f"cannot read scenario {self.file_path}: {e}", condition="readable config") from e
        except json.JSONDecodeError as e:
            raise ValidationError(f"scenario {self.file_path} is not valid JSON: {e}", condition="valid JSON") from e


class EmbeddedSource(ScenarioSource):
    def __init__(self, document: Dict[str, Any]):
        self.document = document

    def load_document(self) -> Dict[str, Any]:
        return copy.deepcopy(self.document)


def parse_rate(value: Any, where: str) -> float:
    """0.04, 4e-2 and "4%" all give 0.04"""
    if isinstance(value, bool):
        raise ValidationError(f"{where}: expected a rate, got {value!r}", condition="numeric rate")
    if isinstance(value, (int, float)):
        rate = float(value)
    elif isinstance(value, str):
        text = value.strip()
        try:
            rate = float(text[:-1]) / 100.0 if text.endswith('%') else float(text)
        except ValueError:
            raise ValidationError(f"{where}: cannot read {value!r} as a rate", condition="numeric rate") from None
    else:
        raise ValidationError(f"{where}: expected a rate, got {value!r}", condition="numeric rate")
    if not math.isfinite(rate):
        raise ValidationError(f"{where}: rate {value!r} is not finite", condition="finite rate")
    return rate


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}", condition="numeric value")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}", condition="integer value")
    return value


def _section(doc: Dict[str, Any], key: str, where: str, required: bool = True) -> Dict[str, Any]:
    value = doc.get(key)
    if value is None:
        if required:
            raise ValidationError(f"{where}: missing '{key}' section", condition=f"'{key}' present")
        return {}
    if not isinstance(value, dict):
        raise ValidationError(f"{where}: '{key}' must be an object", condition=f"'{key}' is an object")
    return value


def parse_growth(doc: Any, where: str) -> GrowthModel:
    if not isinstance(doc, dict):
        raise ValidationError(f"{where}: growth must be an object", condition="growth is an object")
    if 'states' in doc or 'probs' in doc:
        states = doc.get('states')
        probs = doc.get('probs')
        if not isinstance(states, list) or not isinstance(probs, list):
            raise ValidationError(f"{where}: 'states' and 'probs' must both be lists", condition="states and probs")
        return GrowthModel.from_states(
            [parse_rate(s, f"{where}.states") for s in states],
            [_number(p, f"{where}.probs") for p in probs],
        )
    if 'mean' not in doc:
        raise ValidationError(f"{where}: growth needs 'states'/'probs' or 'mean'/'stddev'", condition="growth form")
    return GrowthModel.from_moments(
        parse_rate(doc['mean'], f"{where}.mean"),
        parse_rate(doc.get('stddev', 0.0), f"{where}.stddev"),
    )


def growth_document(g: GrowthModel) -> Dict[str, Any]:
    if g.is_explicit:
        return {'states': list(g.states), 'probs': list(g.probs)}
    return {'mean': g.mean, 'stddev': g.stddev}


def parse_company(name: str, doc: Any) -> CompanyParams:
    where = f"companies.{name}"
    if not isinstance(doc, dict):
        raise ValidationError(f"{where}: must be an object", condition="company is an object")
    for key in ('dps0', 'discount_rate', 'shares', 'growth'):
        if key not in doc:
            raise ValidationError(f"{where}: missing '{key}'", condition=f"'{key}' present")
    return CompanyParams(
        dps0=_number(doc['dps0'], f"{where}.dps0"),
        discount_rate=parse_rate(doc['discount_rate'], f"{where}.discount_rate"),
        shares=_number(doc['shares'], f"{where}.shares"),
        growth=parse_growth(doc['growth'], f"{where}.growth"),
        name=name,
    )


def parse_sweep(doc: Dict[str, Any]) -> SweepConfig:
    return SweepConfig(
        g_min=parse_rate(doc.get('g_min', SweepDefaults.G_MIN), "sweep.g_min"),
        g_max=parse_rate(doc.get('g_max', SweepDefaults.G_MAX), "sweep.g_max"),
        g_steps=_integer(doc.get('g_steps', SweepDefaults.G_STEPS), "sweep.g_steps"),
        sigmas=tuple(parse_rate(s, "sweep.sigmas") for s in doc.get('sigmas', SweepDefaults.SIGMAS)),
        clamp_r_max=_number(doc.get('clamp_r_max', SweepDefaults.CLAMP_R_MAX), "sweep.clamp_r_max"),
    )


def parse_sim(doc: Dict[str, Any]) -> SimConfig:
    horizon = doc.get('horizon', 'auto')
    return SimConfig(
        horizon=None if horizon == 'auto' else _integer(horizon, "sim.horizon"),
        paths=_integer(doc.get('paths', SimDefaults.PATHS), "sim.paths"),
        seed=_integer(doc.get('seed', SimDefaults.SEED), "sim.seed"),
    )


@dataclass
class ScenarioFile:
    companies: Dict[str, CompanyParams]
    acquirer: str
    target: str
    merged_growth: GrowthModel
    discount_override: Optional[float] = None
    sweep: SweepConfig = field(default_factory=SweepConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    reference: Dict[str, Any] = field(default_factory=dict)

    def company(self, name: str) -> CompanyParams:
        if name not in self.companies:
            raise UnknownCompanyError(name, list(self.companies))
        return self.companies[name]

    def merger_inputs(self) -> MergerInputs:
        return MergerInputs(
            acquirer=self.company(self.acquirer),
            target=self.company(self.target),
            merged_growth=self.merged_growth,
            discount_override=self.discount_override,
        )

    def to_document(self) -> Dict[str, Any]:
        """Inverse of parse_scenario, with every rate written as a decimal"""
        return {
            'companies': {
                name: {
                    'dps0': c.dps0,
                    'discount_rate': c.discount_rate,
                    'shares': c.shares,
                    'growth': growth_document(c.growth),
                }
                for name, c in self.companies.items()
            },
            'merger': {
                'acquirer': self.acquirer,
                'target': self.target,
                'growth': growth_document(self.merged_growth),
                'discount_override': self.discount_override,
            },
            'sweep': {
                'g_min': self.sweep.g_min,
                'g_max': self.sweep.g_max,
                'g_steps': self.sweep.g_steps,
                'sigmas': list(self.sweep.sigmas),
                'clamp_r_max': self.sweep.clamp_r_max,
            },
            'sim': {
                'horizon': 'auto' if self.sim.horizon is None else self.sim.horizon,
                'paths': self.sim.paths,
                'seed': self.sim.seed,
            },
            'reference': copy.deepcopy(self.reference),
        }


def parse_scenario(doc: Any) -> ScenarioFile:
    """Parse and validate a scenario document.

    Every company is valued once here, so domain violations (k <= g_mean,
    delta <= 0) surface at load time.
    """
    if not isinstance(doc, dict):
        raise ValidationError("scenario must be a JSON object", condition="scenario is an object")
    companies_doc = _section(doc, 'companies', "scenario")
    if not companies_doc:
        raise ValidationError("scenario defines no companies", condition="at least one company")
    companies = {name: parse_company(name, c) for name, c in companies_doc.items()}

    merger_doc = _section(doc, 'merger', "scenario")
    acquirer = merger_doc.get('acquirer')
    target = merger_doc.get('target')
    for role, name in (('acquirer', acquirer), ('target', target)):
        if not isinstance(name, str):
            raise ValidationError(f"merger.{role} must name a company", condition=f"merger.{role} present")
        if name not in companies:
            raise UnknownCompanyError(name, list(companies))
    if acquirer == target:
        raise ValidationError(
            f"merger.acquirer and merger.target are both '{acquirer}'",
            condition="distinct acquirer and target",
        )
    if 'growth' not in merger_doc:
        raise ValidationError("merger: missing 'growth'", condition="'growth' present")
    override = merger_doc.get('discount_override')

    scenario = ScenarioFile(
        companies=companies,
        acquirer=acquirer,
        target=target,
        merged_growth=parse_growth(merger_doc['growth'], "merger.growth"),
        discount_override=None if override is None else parse_rate(override, "merger.discount_override"),
        sweep=parse_sweep(_section(doc, 'sweep', "scenario", required=False)),
        sim=parse_sim(_section(doc, 'sim', "scenario", required=False)),
        reference=_section(doc, 'reference', "scenario", required=False),
    )
    for c in companies.values():
        value_company(c)
    scenario.merger_inputs()
    logger.debug("loaded scenario with companies %s (%s acquires %s)", list(companies), acquirer, target)
    return scenario


def load_scenario(source: ScenarioSource) -> ScenarioFile:
    return parse_scenario(source.load_document())


def reference_matches(computed: float, reference: Any) -> bool:
    """True when computed rounds to reference at the reference's printed precision"""
    text = repr(reference)
    decimals = len(text.split('.', 1)[1]) if '.' in text and 'e' not in text.lower() else 0
    return f"{computed:.{decimals}f}" == f"{float(reference):.{decimals}f}"


def reference_notes(section: Dict[str, Any], computed: Dict[str, Optional[float]], label: str) -> List[str]:
    """One line per reference value that the computed value does not reproduce"""
    notes = []
    for key, ref in sorted(section.items()):
        if computed.get(key) is None or isinstance(ref, bool) or not isinstance(ref, (int, float)):
            continue
        if not reference_matches(computed[key], ref):
            logger.warning("%s %s: computed %.6g does not round to the reference %r", label, key, computed[key], ref)
            notes.append(f"note: {label} {key} computed {computed[key]:.6g}, reference prints {ref!r}")
    return notes


# Two-company example. The two-point growth distributions reproduce the printed
# means and standard deviations (A: 1% +- 2%, B: 3% +- 9%).
TWO_COMPANY_EXAMPLE = {
    'companies': {
        'A': {
            'dps0': 0.6,
            'discount_rate': '4%',
            'shares': 1000,
            'growth': {'states': ['-1%', '3%'], 'probs': [0.5, 0.5]},
        },
        'B': {
            'dps0': 0.3,
            'discount_rate': '8%',
            'shares': 2500,
            'growth': {'states': ['-6%', '12%'], 'probs': [0.5, 0.5]},
        },
    },
    'merger': {
        'acquirer': 'A',
        'target': 'B',
        'growth': {'mean': '3%', 'stddev': '1%'},
        'discount_override': None,
    },
    'sweep': {
        'g_min': 0.0,
        'g_max': 0.054,
        'g_steps': 500,
        'sigmas': ['0%', '1%', '1.5%', '2%', '2.5%'],
        'clamp_r_max': 2.2,
    },
    'sim': {'horizon': 'auto', 'paths': 200000, 'seed': SimDefaults.SEED},
    'reference': {
        'companies': {
            'A': {'mean_price': 20.2, 'stddev_price': 1.68, 'cv': 0.0832, 'equity_mean': 20200, 'weight': 0.57},
            'B': {'mean_price': 6.18, 'stddev_price': 1.87, 'cv': 0.3026, 'equity_mean': 15450, 'weight': 0.43},
        },
        'merger': {
            'k_m_text': 0.0572,
            'k_m_rounded': 0.0573,
            'no_synergy_growth': 0.0188,
            'r_star': 0.3059,
        },
    },
}
