#!/usr/bin/env python3
"""
Primary-user activity, spectrum sensing and channel availability

Covers the ON/OFF occupancy statistics of licensed channels, energy-detector
probabilities, OR-rule cooperative fusion, the PU protection check, sensing
set selection and the channel available duration (CAD). The samplers only
call ``rng.random()`` and ``rng.exponential()`` so any numpy Generator works.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import erfc

from ..core.errors import DomainError, InfeasibleProtection, UnboundedCad
from ..core.types import (CadExponent, Channel, ClusterState, CognitiveParams,
                          SensingMode, SensorNode)

logger = logging.getLogger(__name__)


class ChannelState(Enum):
    IDLE = "idle"
    BUSY = "busy"


@dataclass(frozen=True)
class ChannelObservation:
    """True PU state of a licensed channel at sensing time"""
    state: ChannelState
    remaining_idle_s: float = 0.0

    @property
    def idle(self) -> bool:
        return self.state is ChannelState.IDLE


@dataclass(frozen=True)
class SensingOutcome:
    """Result of one cooperative sensing round on a licensed channel"""
    true_state: ChannelState
    declared_state: ChannelState
    fused_detection: float
    fused_false_alarm: float

    def __post_init__(self):
        for name in ("fused_detection", "fused_false_alarm"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")

    @property
    def declared_idle(self) -> bool:
        return self.declared_state is ChannelState.IDLE

    @property
    def misdetection(self) -> bool:
        """PU present but the channel was declared idle"""
        return self.true_state is ChannelState.BUSY and self.declared_idle


def q_function(x):
    """Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2))"""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def idle_probability(mean_idle_s: float, mean_busy_s: float) -> float:
    """p_off = v / (v + l); the busy probability p_on is its complement"""
    if mean_idle_s <= 0 or mean_busy_s <= 0:
        raise DomainError("mean idle and busy durations must both be > 0")
    return mean_idle_s / (mean_idle_s + mean_busy_s)


def channel_idle_probability(channel: Channel) -> float:
    if not channel.is_licensed:
        raise DomainError("channel 0 has no primary user")
    return idle_probability(channel.mean_idle_s, channel.mean_busy_s)


def false_alarm_probability(threshold: float, noise_power: float,
                            sense_duration: float, sample_rate: float) -> float:
    """Energy-detector false alarm Q((delta/sigma^2 - 1) * sqrt(phi * f_s))"""
    if noise_power <= 0:
        raise DomainError("noise power must be > 0")
    samples = sense_duration * sample_rate
    if samples < 1:
        raise DomainError(f"sensing window holds {samples:.3g} samples, at least 1 is required")
    return float(q_function((threshold / noise_power - 1.0) * math.sqrt(samples)))


def detection_probability(threshold: float, noise_power: float, mean_snr: float,
                          sense_duration: float, sample_rate: float) -> float:
    """Energy-detector detection probability at average PU SNR ``mean_snr`` (linear)"""
    if noise_power <= 0:
        raise DomainError("noise power must be > 0")
    if mean_snr < 0:
        raise DomainError("mean SNR must be >= 0")
    samples = sense_duration * sample_rate
    if samples < 1:
        raise DomainError(f"sensing window holds {samples:.3g} samples, at least 1 is required")
    scale = math.sqrt(samples / (2.0 * mean_snr + 1.0))
    return float(q_function((threshold / noise_power - mean_snr - 1.0) * scale))


def cooperative_fusion(per_node_pd: Sequence[float],
                       per_node_pf: Sequence[float]) -> Tuple[float, float]:
    """OR-rule fusion: the channel is declared busy if any node reports a PU"""
    pd = np.asarray(per_node_pd, dtype=float)
    pf = np.asarray(per_node_pf, dtype=float)
    if pd.size == 0 or pf.size == 0:
        raise DomainError("cooperative fusion needs at least one sensing node")
    if pd.shape != pf.shape:
        raise DomainError("detection and false alarm lists must have equal length")
    if np.any((pd < 0) | (pd > 1)) or np.any((pf < 0) | (pf > 1)):
        raise DomainError("per-node probabilities must lie in [0, 1]")
    fused_d = 1.0 - float(np.prod(1.0 - pd))
    fused_f = 1.0 - float(np.prod(1.0 - pf))
    return fused_d, fused_f


def interference_residual(p_on: float, per_node_pd: Iterable[float]) -> float:
    """p_on * F_m: probability a PU is present and every sensing node misses it"""
    return p_on * float(np.prod(1.0 - np.asarray(list(per_node_pd), dtype=float)))


def pu_protection_satisfied(p_on: float, per_node_pd: Sequence[float],
                            interference_threshold: float) -> bool:
    return interference_residual(p_on, per_node_pd) <= interference_threshold


def select_sensing_nodes(nodes: Sequence[SensorNode], channel: Channel,
                         params: CognitiveParams) -> Tuple[int, ...]:
    """Pick |y| nodes by descending p_d on ``channel``, ties by ascending id

    Raises InfeasibleProtection when even the best |y| nodes cannot keep the
    interference probability at or below F_I.
    """
    size = params.coop_set_size
    if len(nodes) < size:
        raise DomainError(f"{len(nodes)} candidate nodes cannot form a sensing set of {size}")
    ranked = sorted(nodes, key=lambda node: (-node.p_d(channel.id), node.id))
    chosen = ranked[:size]
    p_on = 1.0 - channel_idle_probability(channel)
    pds = [node.p_d(channel.id) for node in chosen]
    if not pu_protection_satisfied(p_on, pds, params.interference_threshold):
        raise InfeasibleProtection(channel.id, len(nodes), size, interference_residual(p_on, pds))
    return tuple(node.id for node in chosen)


def select_sensing_set(cluster: ClusterState, channel: Channel,
                       params: CognitiveParams) -> Tuple[int, ...]:
    """Sensing set for intra-cluster access, drawn from the cluster members"""
    return select_sensing_nodes(cluster.members, channel, params)


def fused_probabilities(channel: Channel, nodes: Sequence[SensorNode]) -> Tuple[float, float]:
    """(F_d, F_f) of a sensing set on ``channel``

    With a channel-level fused F_f the configured value is used as is; otherwise
    per-node false alarms (falling back to the channel's p_f) are OR-fused.
    """
    pds = [node.p_d(channel.id) for node in nodes]
    pfs = [node.false_alarm_prob.get(channel.id, channel.false_alarm_prob) for node in nodes]
    fused_d, fused_f = cooperative_fusion(pds, pfs)
    if channel.false_alarm_fused:
        fused_f = channel.false_alarm_prob
    return fused_d, fused_f


def success_probability(channel: Channel, fused_false_alarm: float) -> float:
    """F_s = p_off * (1 - F_f): the channel is idle and declared idle"""
    return channel_idle_probability(channel) * (1.0 - fused_false_alarm)


def channel_available_duration(p_r: float, p_off: float, false_alarm: float, mean_idle_s: float,
                               exponent: CadExponent = CadExponent.MEAN_INVERSE) -> float:
    """Maximum CAD keeping the PU interference probability at p_r

    MEAN_INVERSE reads the exponential parameter as 1/v (T = -v ln(1 - ratio));
    RAW_VX uses v itself as the rate (T = -ln(1 - ratio) / v).
    """
    if p_r <= 0:
        raise DomainError("PU protection p_r must be > 0")
    if mean_idle_s <= 0:
        raise DomainError("mean idle time must be > 0")
    available = p_off * (1.0 - false_alarm)
    if available <= 0:
        raise DomainError("channel is never declared idle, CAD is undefined")
    ratio = p_r / available
    if ratio >= 1.0:
        raise UnboundedCad(ratio)
    log_term = -math.log1p(-ratio)
    if exponent is CadExponent.RAW_VX:
        return log_term / mean_idle_s
    return mean_idle_s * log_term


def sample_channel_state(channel: Channel, rng) -> ChannelObservation:
    """Draw the PU state; an idle channel stays idle for an Exp(v) residual"""
    if not channel.is_licensed:
        raise DomainError("channel 0 has no PU activity to sample")
    if rng.random() < channel_idle_probability(channel):
        return ChannelObservation(ChannelState.IDLE, float(rng.exponential(channel.mean_idle_s)))
    return ChannelObservation(ChannelState.BUSY)


def sample_sensing_outcome(true_state: ChannelState, fused_detection: float, fused_false_alarm: float,
                           mode: SensingMode, rng) -> SensingOutcome:
    """Declare a channel state from the fused sensing probabilities

    In PAPER mode a busy channel is always declared busy; STRICT mode lets it
    slip through as idle with probability 1 - F_d.
    """
    if true_state is ChannelState.IDLE:
        declared = ChannelState.IDLE if rng.random() < 1.0 - fused_false_alarm else ChannelState.BUSY
    elif mode is SensingMode.STRICT:
        declared = ChannelState.IDLE if rng.random() < 1.0 - fused_detection else ChannelState.BUSY
    else:
        declared = ChannelState.BUSY
    return SensingOutcome(true_state, declared, fused_detection, fused_false_alarm)


def licensed_channels(channels: Sequence[Channel]) -> List[Channel]:
    return [channel for channel in channels if channel.is_licensed]


def license_free_channel(channels: Sequence[Channel]) -> Optional[Channel]:
    return next((channel for channel in channels if not channel.is_licensed), None)
