#!/usr/bin/env python3
"""
Domain value types shared by every crsnsim module

Units are SI throughout: bits, joules, watts, seconds, hertz. Scenario file
units (Kb, mW, nJ, MHz, ms) are converted once, in core.config.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Mapping, Tuple

from .errors import DomainError

# Residual bookkeeping slack for floating-point transmission arithmetic
BITS_TOLERANCE = 1e-9


class CadMode(Enum):
    """How a licensed channel's available duration is obtained"""
    DERIVED = "derived"
    FIXED = "fixed"


class CadExponent(Enum):
    """Reading of the exponential parameter in the CAD formula"""
    MEAN_INVERSE = "mean_inverse"
    RAW_VX = "raw_vx"


class SensingMode(Enum):
    PAPER = "paper"
    STRICT = "strict"


class AccountingMode(Enum):
    EXPECTED = "expected"
    SAMPLED = "sampled"


def _require(condition: bool, message: str):
    if not condition:
        raise DomainError(message)


@dataclass(frozen=True)
class Channel:
    """A licensed channel C_x (id >= 1) or the license-free channel C0 (id 0)"""
    id: int
    bandwidth_hz: float
    noise_power_w: float
    mean_idle_s: float = 0.0
    mean_busy_s: float = 0.0
    false_alarm_prob: float = 0.0
    # True when false_alarm_prob is already the OR-fused F_f rather than a per-node p_f
    false_alarm_fused: bool = True
    cad_mode: CadMode = CadMode.DERIVED
    cad_mean_s: float = 0.0
    cad_var_s2: float = 0.0

    def __post_init__(self):
        _require(self.id >= 0, f"channel id must be >= 0, got {self.id}")
        _require(self.bandwidth_hz > 0, f"channel {self.id}: bandwidth must be > 0")
        _require(self.noise_power_w > 0, f"channel {self.id}: noise power must be > 0")
        _require(0.0 <= self.false_alarm_prob < 1.0,
                 f"channel {self.id}: false alarm probability must lie in [0, 1)")
        if self.is_licensed:
            _require(self.mean_idle_s > 0 and self.mean_busy_s > 0,
                     f"channel {self.id}: licensed channels need positive mean idle and busy times")
        else:
            _require(self.mean_idle_s == 0 and self.mean_busy_s == 0,
                     "channel 0 is license-free and carries no PU statistics")
        if self.cad_mode is CadMode.FIXED:
            _require(self.cad_mean_s > 0 and self.cad_var_s2 >= 0,
                     f"channel {self.id}: fixed CAD needs a positive mean and non-negative variance")

    @property
    def is_licensed(self) -> bool:
        return self.id != 0


@dataclass(frozen=True)
class SensorNode:
    """A cognitive sensor node; heads use link_gain toward the sink, members toward their head"""
    id: int
    cluster_id: int
    tx_power_w: float
    circuit_power_w: float
    data_bits: float
    detection_prob: Dict[int, float] = field(default_factory=dict)
    link_gain: Dict[int, float] = field(default_factory=dict)
    # Per-node p_f per channel (energy-detector model); empty means the channel's value applies
    false_alarm_prob: Dict[int, float] = field(default_factory=dict)
    position: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        _require(self.tx_power_w > 0, f"node {self.id}: transmit power must be > 0")
        _require(self.circuit_power_w >= 0, f"node {self.id}: circuit power must be >= 0")
        _require(self.data_bits >= 0, f"node {self.id}: data amount must be >= 0")
        for channel_id, p_d in self.detection_prob.items():
            _require(0.0 < p_d <= 1.0,
                     f"node {self.id}: detection probability on channel {channel_id} must lie in (0, 1]")
        for channel_id, p_f in self.false_alarm_prob.items():
            _require(0.0 <= p_f < 1.0,
                     f"node {self.id}: false alarm probability on channel {channel_id} must lie in [0, 1)")
        for channel_id, gain in self.link_gain.items():
            _require(gain >= 0 and math.isfinite(gain),
                     f"node {self.id}: channel gain on channel {channel_id} must be finite and >= 0")
        # private copies so callers cannot mutate a constructed node through their dicts
        object.__setattr__(self, "detection_prob", dict(self.detection_prob))
        object.__setattr__(self, "link_gain", dict(self.link_gain))
        object.__setattr__(self, "false_alarm_prob", dict(self.false_alarm_prob))

    def gain(self, channel_id: int) -> float:
        return self.link_gain.get(channel_id, 0.0)

    def p_d(self, channel_id: int) -> float:
        return self.detection_prob.get(channel_id, 1e-12)


@dataclass(frozen=True)
class ClusterState:
    """A cluster head H_i, its members N_i, per-link C0 loss and remaining data"""
    cluster_id: int
    head: SensorNode
    members: Tuple[SensorNode, ...]
    packet_loss_c0: Dict[int, float]
    head_loss_c0: float
    aggregation_rate: float
    residual_bits: Dict[int, float] = field(default_factory=dict)
    head_backlog_bits: float = 0.0

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        ids = [m.id for m in members]
        _require(len(set(ids)) == len(ids), f"cluster {self.cluster_id}: duplicate member ids")
        _require(self.head.id not in ids, f"cluster {self.cluster_id}: head is listed as a member")
        losses = dict(self.packet_loss_c0)
        for member_id in ids:
            _require(member_id in losses, f"cluster {self.cluster_id}: no C0 loss rate for member {member_id}")
            _require(0.0 <= losses[member_id] < 1.0,
                     f"cluster {self.cluster_id}: loss rate of member {member_id} must lie in [0, 1) "
                     "(rate 1 makes expected retransmissions diverge)")
        _require(0.0 <= self.head_loss_c0 < 1.0,
                 f"cluster {self.cluster_id}: head loss rate must lie in [0, 1)")
        _require(0.0 < self.aggregation_rate <= 1.0,
                 f"cluster {self.cluster_id}: aggregation rate must lie in (0, 1]")
        _require(self.head_backlog_bits >= 0, f"cluster {self.cluster_id}: head backlog must be >= 0")
        residual = {m.id: float(self.residual_bits.get(m.id, m.data_bits)) for m in members}
        for member in members:
            bits = residual[member.id]
            _require(-BITS_TOLERANCE <= bits <= member.data_bits + BITS_TOLERANCE,
                     f"cluster {self.cluster_id}: residual of member {member.id} outside [0, A_j]")
            residual[member.id] = min(max(bits, 0.0), member.data_bits)
        object.__setattr__(self, "packet_loss_c0", losses)
        object.__setattr__(self, "residual_bits", residual)

    @property
    def head_id(self) -> int:
        return self.head.id

    @property
    def member_ids(self) -> Tuple[int, ...]:
        return tuple(m.id for m in self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def total_residual_bits(self) -> float:
        return sum(self.residual_bits.values())

    @property
    def aggregated_bits(self) -> float:
        """A_i = psi_i * sum of member data"""
        return self.aggregation_rate * sum(m.data_bits for m in self.members)

    def with_residual(self, residual_bits: Mapping[int, float]) -> "ClusterState":
        return replace(self, residual_bits=dict(residual_bits))

    def with_head_backlog(self, bits: float) -> "ClusterState":
        return replace(self, head_backlog_bits=max(bits, 0.0))


@dataclass(frozen=True)
class EnergyLedger:
    """Per-phase energy accounting; total() is the sum of the four energy sinks"""
    sensing_j: float = 0.0
    switching_j: float = 0.0
    tx_j: float = 0.0
    rx_j: float = 0.0
    bits_delivered: float = 0.0
    interference_events: int = 0
    channels_sensed: int = 0
    accesses: int = 0

    def __post_init__(self):
        for name in ("sensing_j", "switching_j", "tx_j", "rx_j", "bits_delivered",
                     "interference_events", "channels_sensed", "accesses"):
            _require(getattr(self, name) >= 0, f"ledger field {name} must be >= 0")

    def total(self) -> float:
        return self.sensing_j + self.switching_j + self.tx_j + self.rx_j

    def charge(self, **amounts) -> "EnergyLedger":
        """Return a new ledger with the given amounts added field-wise"""
        return replace(self, **{name: getattr(self, name) + value for name, value in amounts.items()})

    def __add__(self, other: "EnergyLedger") -> "EnergyLedger":
        return EnergyLedger(
            sensing_j=self.sensing_j + other.sensing_j,
            switching_j=self.switching_j + other.switching_j,
            tx_j=self.tx_j + other.tx_j,
            rx_j=self.rx_j + other.rx_j,
            bits_delivered=self.bits_delivered + other.bits_delivered,
            interference_events=self.interference_events + other.interference_events,
            channels_sensed=self.channels_sensed + other.channels_sensed,
            accesses=self.accesses + other.accesses,
        )

    def as_dict(self) -> Dict[str, float]:
        return {
            'sensing_j': self.sensing_j,
            'switching_j': self.switching_j,
            'tx_j': self.tx_j,
            'rx_j': self.rx_j,
            'bits_delivered': self.bits_delivered,
            'interference_events': self.interference_events,
        }


@dataclass(frozen=True)
class TranscriptRecord:
    """One sensing/access event of a phase; channel_id -1 marks the license-free channel"""
    phase: str
    cluster_id: int
    channel_id: int
    ledger: EnergyLedger

    def as_row(self) -> Dict[str, float]:
        row = {'phase': self.phase, 'cluster_id': self.cluster_id, 'channel_id': self.channel_id}
        row.update(self.ledger.as_dict())
        return row


@dataclass(frozen=True)
class CognitiveParams:
    """Sensing, switching, reception and protection parameters of the CRSN"""
    sense_energy_j: float
    switch_energy_j: float
    rx_energy_j_per_bit: float
    amplifier_efficiency: float
    pu_protection: float
    interference_threshold: float
    coop_set_size: int
    max_power_w: float
    cad_exponent: CadExponent = CadExponent.MEAN_INVERSE

    def __post_init__(self):
        _require(self.sense_energy_j >= 0, "sensing energy must be >= 0")
        _require(self.switch_energy_j >= 0, "switching energy must be >= 0")
        _require(self.rx_energy_j_per_bit >= 0, "reception energy must be >= 0")
        _require(0.0 < self.amplifier_efficiency <= 1.0, "amplifier efficiency must lie in (0, 1]")
        _require(0.0 < self.pu_protection < 1.0, "PU protection p_r must lie in (0, 1)")
        _require(0.0 < self.interference_threshold < 1.0, "interference threshold F_I must lie in (0, 1)")
        _require(self.coop_set_size >= 1, "at least one cooperative sensing node is required")
        _require(self.max_power_w > 0, "maximum power must be > 0")


@dataclass(frozen=True)
class PhaseMode:
    """Run-time switches shared by the intra and inter phase controllers"""
    sensing: SensingMode = SensingMode.PAPER
    accounting: AccountingMode = AccountingMode.EXPECTED
    max_access_rounds: int = 100

    def __post_init__(self):
        _require(self.max_access_rounds >= 1, "max_access_rounds must be >= 1")


@dataclass(frozen=True)
class ValidationReport:
    """Violated scenario invariants; empty iff the scenario is runnable"""
    violations: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations
