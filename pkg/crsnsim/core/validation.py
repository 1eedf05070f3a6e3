#!/usr/bin/env python3
"""
Scenario validation

validate_scenario never raises for bad values; it lists every violated
invariant so the CLI can print them all in one go.
"""

import math
from typing import List

from .config import SWEEP_METRICS, SWEEP_VARIABLES, ScenarioConfig
from .types import AccountingMode, CadExponent, CadMode, SensingMode, ValidationReport

SENSING_MODELS = ('fixed', 'energy_detector')
LOSS_DISTRIBUTIONS = ('fixed', 'uniform')


def _enum_values(enum_type) -> List[str]:
    return [member.value for member in enum_type]


class _Checker:
    def __init__(self):
        self.violations: List[str] = []

    def require(self, condition: bool, message: str):
        if not condition:
            self.violations.append(message)

    def positive(self, where: str, value: float):
        self.require(math.isfinite(value) and value > 0, f"{where}: must be finite and > 0 (got {value})")

    def non_negative(self, where: str, value: float):
        self.require(math.isfinite(value) and value >= 0, f"{where}: must be finite and >= 0 (got {value})")

    def open_probability(self, where: str, value: float):
        self.require(0.0 < value < 1.0, f"{where}: must lie in (0, 1) (got {value})")

    def loss_rate(self, where: str, value: float):
        if value >= 1.0:
            self.violations.append(f"{where}: loss rate {value} >= 1 makes the expected number "
                                   "of retransmissions 1 / (1 - loss) diverge")
        else:
            self.require(value >= 0.0, f"{where}: loss rate must be >= 0 (got {value})")

    def choice(self, where: str, value: str, allowed):
        self.require(value in allowed, f"{where}: '{value}' is not one of {', '.join(allowed)}")


def validate_scenario(config: ScenarioConfig) -> ValidationReport:
    """Violated invariants of ``config``; an empty report means it is runnable"""
    check = _Checker()
    topology, channels, sensing = config.topology, config.channels, config.sensing

    check.require(topology.node_count >= 1, "topology.node_count: at least one node is required")
    check.require(topology.cluster_count >= 1, "topology.cluster_count: at least one cluster is required")
    check.positive("topology.radius_m", topology.radius_m)
    check.positive("topology.path_loss_exponent", topology.path_loss_exponent)
    check.non_negative("topology.data_mean_kb", topology.data_mean_bits)
    check.non_negative("topology.data_var_kb2", topology.data_var_bits2)
    check.require(0.0 < topology.aggregation_rate <= 1.0, "topology.aggregation_rate: must lie in (0, 1]")
    check.positive("topology.member_power_mw", topology.member_power_w)
    check.positive("topology.head_power_mw", topology.head_power_w)
    check.non_negative("topology.circuit_power_mw", topology.circuit_power_w)

    check.require(channels.count >= 1, "channels.count: at least one licensed channel is required")
    check.positive("channels.c0_bandwidth_mhz", channels.c0_bandwidth_hz)
    check.positive("channels.bandwidth_mean_mhz", channels.bandwidth_mean_hz)
    check.non_negative("channels.bandwidth_var_mhz2", channels.bandwidth_var_hz2)
    check.positive("channels.noise_density_w_per_hz", channels.noise_density_w_per_hz)
    check.open_probability("channels.p_on", channels.p_on)
    check.positive("channels.mean_idle_ms", channels.mean_idle_s)
    check.require(0.0 <= channels.false_alarm_prob < 1.0, "channels.false_alarm_prob: must lie in [0, 1)")
    check.choice("channels.cad_mode", channels.cad_mode, _enum_values(CadMode))
    check.choice("channels.cad_exponent", channels.cad_exponent, _enum_values(CadExponent))
    if channels.cad_mode == CadMode.FIXED.value:
        check.positive("channels.cad_mean_ms", channels.cad_mean_s)
        check.non_negative("channels.cad_var_ms2", channels.cad_var_s2)

    check.choice("sensing.model", sensing.model, SENSING_MODELS)
    check.require(0.0 < sensing.detection_prob <= 1.0, "sensing.detection_prob: must lie in (0, 1]")
    check.require(sensing.coop_set_size >= 1, "sensing.coop_set_size: at least one sensing node is required")
    check.non_negative("sensing.sense_energy_j", sensing.sense_energy_j)
    check.non_negative("sensing.switch_energy_j", sensing.switch_energy_j)
    check.open_probability("sensing.pu_protection", sensing.pu_protection)
    check.open_probability("sensing.interference_threshold", sensing.interference_threshold)
    if sensing.model == 'energy_detector':
        check.positive("sensing.threshold_ratio", sensing.threshold_ratio)
        check.require(sensing.sense_duration_s * sensing.sample_rate_hz >= 1,
                      "sensing.sense_duration_ms: sensing window must hold at least one sample")
        check.non_negative("sensing.snr_spread_db", sensing.snr_spread_db)
    elif 0.0 < channels.p_on < 1.0 and 0.0 < sensing.detection_prob <= 1.0 and sensing.coop_set_size >= 1:
        residual = channels.p_on * (1.0 - sensing.detection_prob) ** sensing.coop_set_size
        check.require(residual <= sensing.interference_threshold,
                      f"sensing.detection_prob: p_on * F_m = {residual:.4g} exceeds the interference "
                      f"threshold {sensing.interference_threshold}")

    if topology.cluster_count >= 1 and sensing.coop_set_size >= 1:
        members = topology.node_count - topology.cluster_count
        check.require(members >= topology.cluster_count * sensing.coop_set_size,
                      f"sensing.coop_set_size: {members} members cannot give each of "
                      f"{topology.cluster_count} clusters {sensing.coop_set_size} sensing nodes")
        check.require(topology.cluster_count >= sensing.coop_set_size,
                      "sensing.coop_set_size: inter-cluster sensing needs at least that many cluster heads")

    radio = config.radio
    check.require(0.0 < radio.amplifier_efficiency <= 1.0, "radio.amplifier_efficiency: must lie in (0, 1]")
    check.non_negative("radio.rx_energy_nj_per_bit", radio.rx_energy_j_per_bit)
    check.positive("radio.max_power_mw", radio.max_power_w)

    loss = config.loss
    check.loss_rate("loss.intra", loss.intra)
    check.loss_rate("loss.inter", loss.inter)
    check.choice("loss.distribution", loss.distribution, LOSS_DISTRIBUTIONS)
    check.non_negative("loss.spread", loss.spread)

    run = config.run
    check.require(run.periods >= 0, "run.periods: must be >= 0")
    check.require(run.seeds >= 1, "run.seeds: at least one seed is required")
    check.require(run.seed >= 0, "run.seed: must be >= 0")
    check.choice("run.accounting", run.accounting, _enum_values(AccountingMode))
    check.choice("run.sensing", run.sensing, _enum_values(SensingMode))
    check.require(run.max_access_rounds >= 1, "run.max_access_rounds: must be >= 1")

    check.positive("solver.acs_tolerance_j", config.solver.acs_tolerance_j)
    check.require(config.solver.acs_max_iterations >= 1, "solver.acs_max_iterations: must be >= 1")

    if config.sweep is not None:
        _check_sweep(check, config)

    return ValidationReport(tuple(check.violations))


def _check_sweep(check: _Checker, config: ScenarioConfig):
    sweep = config.sweep
    check.choice("sweep.variable", sweep.variable, tuple(SWEEP_VARIABLES))
    check.choice("sweep.metric", sweep.metric, SWEEP_METRICS)
    check.require(sweep.step > 0, "sweep.step: must be > 0")
    check.require(sweep.stop >= sweep.start, "sweep.stop: must be >= sweep.start")
    if sweep.series_variable is not None:
        check.choice("sweep.series_variable", sweep.series_variable, tuple(SWEEP_VARIABLES))
        check.require(len(sweep.series_values) > 0, "sweep.series_values: required with series_variable")
    if sweep.variable in SWEEP_VARIABLES and sweep.step > 0 and sweep.stop >= sweep.start:
        for value in sweep.points():
            _check_point(check, f"sweep.{sweep.variable}", sweep.variable, value, config)
    if sweep.series_variable in SWEEP_VARIABLES:
        for value in sweep.series_values:
            _check_point(check, "sweep.series_values", sweep.series_variable, value, config)


def _check_point(check: _Checker, where: str, variable: str, value: float, config: ScenarioConfig):
    if variable in ('intra_loss', 'inter_loss', 'loss'):
        check.loss_rate(f"{where}={value:g}", value)
    elif variable == 'cad_ms':
        check.require(config.channels.cad_mode == CadMode.FIXED.value,
                      f"{where}: sweeping the CAD requires channels.cad_mode = \"fixed\"")
        check.require(value > 0, f"{where}={value:g}: CAD must be > 0")
    elif variable == 'channel_count':
        check.require(value >= 1, f"{where}={value:g}: at least one licensed channel is required")
    else:
        check.require(value > 0, f"{where}={value:g}: must be > 0")
