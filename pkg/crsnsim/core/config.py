#!/usr/bin/env python3
"""
Configuration management for crsnsim
Handles TOML loading, defaults, unit conversion and overrides
"""

import copy
import hashlib
import json
import math
from dataclasses import MISSING, asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .errors import ConfigError
from .types import (AccountingMode, CadExponent, CognitiveParams, PhaseMode, SensingMode)

try:
    # Python 3.11+ ships tomllib
    import tomllib

    TOMLDecodeError = tomllib.TOMLDecodeError

    def load_toml(file_path):
        with open(file_path, 'rb') as f:
            return tomllib.load(f)
except ImportError:
    import toml

    TOMLDecodeError = toml.TomlDecodeError

    def load_toml(file_path):
        return toml.load(file_path)


STRATEGY_NAMES = ('proposed', 'c0_only', 'asa', 'average')

# Column name used in summary tables for each sweep variable
SWEEP_VARIABLES = {
    'intra_loss': 'loss_rate',
    'inter_loss': 'loss_rate',
    'loss': 'loss_rate',
    'cad_ms': 'cad_ms',
    'data_kb': 'data_kb',
    'channel_count': 'channel_count',
    'max_power_mw': 'max_power_mw',
}

SWEEP_METRICS = ('total', 'intra', 'inter')


@dataclass(frozen=True)
class TopologyConfig:
    node_count: int
    radius_m: float
    cluster_count: int
    path_loss_exponent: float
    data_mean_bits: float
    data_var_bits2: float
    aggregation_rate: float
    member_power_w: float
    head_power_w: float
    circuit_power_w: float


@dataclass(frozen=True)
class ChannelConfig:
    count: int
    c0_bandwidth_hz: float
    bandwidth_mean_hz: float
    bandwidth_var_hz2: float
    noise_density_w_per_hz: float
    p_on: float
    mean_idle_s: float
    false_alarm_prob: float
    false_alarm_fused: bool
    cad_mode: str
    cad_mean_s: float
    cad_var_s2: float
    cad_exponent: str

    @property
    def mean_busy_s(self) -> float:
        return self.mean_idle_s * self.p_on / (1.0 - self.p_on)


@dataclass(frozen=True)
class SensingConfig:
    model: str
    detection_prob: float
    coop_set_size: int
    sense_energy_j: float
    switch_energy_j: float
    pu_protection: float
    interference_threshold: float
    threshold_ratio: float
    sense_duration_s: float
    sample_rate_hz: float
    pu_snr_db: float
    snr_spread_db: float


@dataclass(frozen=True)
class RadioConfig:
    amplifier_efficiency: float
    rx_energy_j_per_bit: float
    max_power_w: float


@dataclass(frozen=True)
class LossConfig:
    intra: float
    inter: float
    distribution: str
    spread: float


@dataclass(frozen=True)
class RunConfig:
    periods: int
    seeds: int
    seed: int
    strategies: Tuple[str, ...]
    accounting: str
    sensing: str
    max_access_rounds: int


@dataclass(frozen=True)
class SolverConfig:
    acs_tolerance_j: float
    acs_max_iterations: int


@dataclass(frozen=True)
class SweepConfig:
    variable: str
    start: float
    stop: float
    step: float
    metric: str = 'total'
    series_variable: Optional[str] = None
    series_values: Tuple[float, ...] = ()

    def points(self) -> List[float]:
        """start + k * step for k = 0 .. round((stop - start) / step)"""
        if self.step <= 0 or self.stop < self.start:
            return [self.start]
        count = int(round((self.stop - self.start) / self.step))
        return [round(self.start + k * self.step, 12) for k in range(count + 1)]

    def series(self) -> List[Optional[float]]:
        return list(self.series_values) if self.series_variable else [None]

    @property
    def column(self) -> str:
        return SWEEP_VARIABLES.get(self.variable, self.variable)


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete experiment description in SI units"""
    topology: TopologyConfig
    channels: ChannelConfig
    sensing: SensingConfig
    radio: RadioConfig
    loss: LossConfig
    run: RunConfig
    solver: SolverConfig
    sweep: Optional[SweepConfig] = None

    def cognitive_params(self) -> CognitiveParams:
        return CognitiveParams(
            sense_energy_j=self.sensing.sense_energy_j,
            switch_energy_j=self.sensing.switch_energy_j,
            rx_energy_j_per_bit=self.radio.rx_energy_j_per_bit,
            amplifier_efficiency=self.radio.amplifier_efficiency,
            pu_protection=self.sensing.pu_protection,
            interference_threshold=self.sensing.interference_threshold,
            coop_set_size=self.sensing.coop_set_size,
            max_power_w=self.radio.max_power_w,
            cad_exponent=CadExponent(self.channels.cad_exponent),
        )

    def phase_mode(self) -> PhaseMode:
        return PhaseMode(sensing=SensingMode(self.run.sensing),
                         accounting=AccountingMode(self.run.accounting),
                         max_access_rounds=self.run.max_access_rounds)

    def seed_list(self) -> List[int]:
        return [self.run.seed + k for k in range(self.run.seeds)]

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of this config"""
        canonical = json.dumps(asdict(self), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    def with_run(self, **changes) -> "ScenarioConfig":
        return replace(self, run=replace(self.run, **changes))

    def at_point(self, variable: str, value: float) -> "ScenarioConfig":
        """Config with one sweep variable set, ``value`` in its user-facing unit"""
        if variable == 'intra_loss':
            return replace(self, loss=replace(self.loss, intra=value))
        if variable == 'inter_loss':
            return replace(self, loss=replace(self.loss, inter=value))
        if variable == 'loss':
            return replace(self, loss=replace(self.loss, intra=value, inter=value))
        if variable == 'cad_ms':
            return replace(self, channels=replace(self.channels, cad_mean_s=value * 1e-3))
        if variable == 'data_kb':
            return replace(self, topology=replace(self.topology, data_mean_bits=value * 1e3))
        if variable == 'channel_count':
            return replace(self, channels=replace(self.channels, count=int(round(value))))
        if variable == 'max_power_mw':
            return replace(self, radio=replace(self.radio, max_power_w=value * 1e-3))
        raise ConfigError(f"unknown sweep variable '{variable}'")


# (section, key in file) -> (field name, scale to SI)
_UNITS = {
    'topology': {
        'node_count': ('node_count', None),
        'radius_m': ('radius_m', 1.0),
        'cluster_count': ('cluster_count', None),
        'path_loss_exponent': ('path_loss_exponent', 1.0),
        'data_mean_kb': ('data_mean_bits', 1e3),
        'data_var_kb2': ('data_var_bits2', 1e6),
        'aggregation_rate': ('aggregation_rate', 1.0),
        'member_power_mw': ('member_power_w', 1e-3),
        'head_power_mw': ('head_power_w', 1e-3),
        'circuit_power_mw': ('circuit_power_w', 1e-3),
    },
    'channels': {
        'count': ('count', None),
        'c0_bandwidth_mhz': ('c0_bandwidth_hz', 1e6),
        'bandwidth_mean_mhz': ('bandwidth_mean_hz', 1e6),
        'bandwidth_var_mhz2': ('bandwidth_var_hz2', 1e12),
        'noise_density_w_per_hz': ('noise_density_w_per_hz', 1.0),
        'p_on': ('p_on', 1.0),
        'mean_idle_ms': ('mean_idle_s', 1e-3),
        'false_alarm_prob': ('false_alarm_prob', 1.0),
        'false_alarm_fused': ('false_alarm_fused', None),
        'cad_mode': ('cad_mode', None),
        'cad_mean_ms': ('cad_mean_s', 1e-3),
        'cad_var_ms2': ('cad_var_s2', 1e-6),
        'cad_exponent': ('cad_exponent', None),
    },
    'sensing': {
        'model': ('model', None),
        'detection_prob': ('detection_prob', 1.0),
        'coop_set_size': ('coop_set_size', None),
        'sense_energy_j': ('sense_energy_j', 1.0),
        'switch_energy_j': ('switch_energy_j', 1.0),
        'pu_protection': ('pu_protection', 1.0),
        'interference_threshold': ('interference_threshold', 1.0),
        'threshold_ratio': ('threshold_ratio', 1.0),
        'sense_duration_ms': ('sense_duration_s', 1e-3),
        'sample_rate_hz': ('sample_rate_hz', 1.0),
        'pu_snr_db': ('pu_snr_db', 1.0),
        'snr_spread_db': ('snr_spread_db', 1.0),
    },
    'radio': {
        'amplifier_efficiency': ('amplifier_efficiency', 1.0),
        'rx_energy_nj_per_bit': ('rx_energy_j_per_bit', 1e-9),
        'max_power_mw': ('max_power_w', 1e-3),
    },
    'loss': {
        'intra': ('intra', 1.0),
        'inter': ('inter', 1.0),
        'distribution': ('distribution', None),
        'spread': ('spread', 1.0),
    },
    'run': {
        'periods': ('periods', None),
        'seeds': ('seeds', None),
        'seed': ('seed', None),
        'strategies': ('strategies', None),
        'accounting': ('accounting', None),
        'sensing': ('sensing', None),
        'max_access_rounds': ('max_access_rounds', None),
    },
    'solver': {
        'acs_tolerance_j': ('acs_tolerance_j', 1.0),
        'acs_max_iterations': ('acs_max_iterations', None),
    },
    'sweep': {
        'variable': ('variable', None),
        'start': ('start', 1.0),
        'stop': ('stop', 1.0),
        'step': ('step', 1.0),
        'metric': ('metric', None),
        'series_variable': ('series_variable', None),
        'series_values': ('series_values', None),
    },
}

_SECTION_TYPES = {
    'topology': TopologyConfig,
    'channels': ChannelConfig,
    'sensing': SensingConfig,
    'radio': RadioConfig,
    'loss': LossConfig,
    'run': RunConfig,
    'solver': SolverConfig,
    'sweep': SweepConfig,
}

_OPTIONAL_SWEEP_KEYS = ('metric', 'series_variable', 'series_values')

_INT_FIELDS = {'node_count', 'cluster_count', 'count', 'coop_set_size', 'periods', 'seeds', 'seed',
               'max_access_rounds', 'acs_max_iterations'}
_STR_FIELDS = {'cad_mode', 'cad_exponent', 'model', 'distribution', 'accounting', 'sensing',
               'variable', 'metric', 'series_variable'}


class ConfigManager:
    """Manages scenario loading, defaults and unit conversion"""

    @staticmethod
    def get_default_config() -> Dict:
        """Default scenario in file units

        p_r, F_I, per-node p_d, the mean idle time and the loss rate are
        moderate choices; see DESIGN.md.
        """
        return {
            'topology': {
                'node_count': 200,
                'radius_m': 250.0,
                'cluster_count': 10,
                'path_loss_exponent': 3.0,
                'data_mean_kb': 5.0,
                'data_var_kb2': 0.5,
                'aggregation_rate': 0.7,
                'member_power_mw': 20.0,
                'head_power_mw': 40.0,
                'circuit_power_mw': 5.0,
            },
            'channels': {
                'count': 15,
                'c0_bandwidth_mhz': 1.0,
                'bandwidth_mean_mhz': 2.0,
                'bandwidth_var_mhz2': 0.5,
                'noise_density_w_per_hz': 1e-14,
                'p_on': 0.6,
                'mean_idle_ms': 700.0,
                'false_alarm_prob': 0.05,
                'false_alarm_fused': True,
                'cad_mode': 'fixed',
                'cad_mean_ms': 25.0,
                'cad_var_ms2': 4.0,
                'cad_exponent': 'mean_inverse',
            },
            'sensing': {
                'model': 'fixed',
                'detection_prob': 0.9,
                'coop_set_size': 3,
                'sense_energy_j': 1.31e-4,
                'switch_energy_j': 1e-5,
                'pu_protection': 0.05,
                'interference_threshold': 0.05,
                'threshold_ratio': 1.05,
                'sense_duration_ms': 1.0,
                'sample_rate_hz': 1e6,
                'pu_snr_db': -10.0,
                'snr_spread_db': 1.0,
            },
            'radio': {
                'amplifier_efficiency': 0.9,
                'rx_energy_nj_per_bit': 5.0,
                'max_power_mw': 200.0,
            },
            'loss': {
                'intra': 0.2,
                'inter': 0.2,
                'distribution': 'fixed',
                'spread': 0.0,
            },
            'run': {
                'periods': 100,
                'seeds': 50,
                'seed': 1,
                'strategies': list(STRATEGY_NAMES),
                'accounting': 'expected',
                'sensing': 'paper',
                'max_access_rounds': 100,
            },
            'solver': {
                'acs_tolerance_j': 1e-6,
                'acs_max_iterations': 50,
            },
        }

    @staticmethod
    def merge(user_config: Dict, use_defaults: bool = True) -> Dict:
        """Merge a parsed document section by section over the defaults"""
        merged = ConfigManager.get_default_config() if use_defaults else {}
        for section, values in user_config.items():
            if isinstance(values, dict) and section in merged:
                merged[section].update(values)
            else:
                merged[section] = copy.deepcopy(values)
        return merged

    @staticmethod
    def from_dict(document: Dict) -> ScenarioConfig:
        """Convert a file-unit document to a ScenarioConfig, collecting every problem"""
        document = dict(document)
        use_defaults = document.pop('defaults', True)
        if not isinstance(use_defaults, bool):
            raise ConfigError("invalid configuration", ["defaults: expected true or false"])
        merged = ConfigManager.merge(document, use_defaults)
        diagnostics: List[str] = []
        sections: Dict[str, Any] = {}

        for section in merged:
            if section not in _SECTION_TYPES:
                diagnostics.append(f"{section}: unknown section")
            elif not isinstance(merged[section], dict):
                diagnostics.append(f"{section}: expected a table")

        for section, units in _UNITS.items():
            values = merged.get(section)
            if not isinstance(values, dict):
                if section == 'sweep' and values is None:
                    continue
                if values is None:
                    diagnostics.append(f"{section}: missing section")
                continue
            for key in values:
                if key not in units:
                    diagnostics.append(f"{section}.{key}: unknown key")
            converted = {}
            for key, (name, scale) in units.items():
                if key not in values:
                    if not (section == 'sweep' and key in _OPTIONAL_SWEEP_KEYS):
                        diagnostics.append(f"{section}.{key}: missing required field")
                    continue
                value, problem = _coerce(section, key, name, values[key], scale)
                if problem:
                    diagnostics.append(problem)
                else:
                    converted[name] = value
            required = {f.name for f in fields(_SECTION_TYPES[section])
                        if f.default is MISSING and f.default_factory is MISSING}
            if required.issubset(converted):
                sections[section] = _SECTION_TYPES[section](**converted)

        if diagnostics:
            raise ConfigError("invalid configuration", diagnostics)
        return ScenarioConfig(**sections)

    @staticmethod
    def parse_file(path: Union[str, Path]) -> ScenarioConfig:
        """Parse and convert a TOML scenario without validating its values"""
        config_file = Path(path)
        if not config_file.exists():
            raise ConfigError(f"configuration file not found: {config_file}")
        try:
            document = load_toml(config_file)
        except TOMLDecodeError as e:
            raise ConfigError(f"{config_file}: TOML parse error", [str(e)]) from e
        try:
            return ConfigManager.from_dict(document)
        except ConfigError as e:
            raise ConfigError(f"{config_file}: invalid configuration", e.diagnostics) from e

    @staticmethod
    def load_config(path: Union[str, Path]) -> ScenarioConfig:
        """Load, convert and validate a scenario; all violations are reported at once"""
        from .validation import validate_scenario

        config = ConfigManager.parse_file(path)
        report = validate_scenario(config)
        if not report.ok:
            raise ConfigError(f"{path}: scenario violates its invariants", list(report.violations))
        return config

    @staticmethod
    def default_scenario() -> ScenarioConfig:
        return ConfigManager.from_dict({})


def _coerce(section: str, key: str, name: str, value: Any, scale: Optional[float]):
    """(converted value, None) or (None, diagnostic)"""
    where = f"{section}.{key}"
    if name == 'false_alarm_fused':
        if isinstance(value, bool):
            return value, None
        return None, f"{where}: expected true or false"
    if name in ('strategies', 'series_values'):
        if not isinstance(value, list):
            return None, f"{where}: expected a list"
        if name == 'strategies':
            unknown = [v for v in value if v not in STRATEGY_NAMES]
            if unknown or not value:
                return None, f"{where}: expected a non-empty subset of {', '.join(STRATEGY_NAMES)}"
            return tuple(value), None
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return None, f"{where}: expected a list of numbers"
        return tuple(float(v) for v in value), None
    if name in _STR_FIELDS:
        if not isinstance(value, str):
            return None, f"{where}: expected a string"
        return value, None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None, f"{where}: expected a number"
    if name in _INT_FIELDS:
        if isinstance(value, float) and not value.is_integer():
            return None, f"{where}: expected an integer"
        return int(value), None
    if not math.isfinite(value):
        return None, f"{where}: expected a finite number"
    return float(value) * scale, None
