#!/usr/bin/env python3
"""
Intra-cluster dynamic channel access

Cluster members normally report to their head over the lossy license-free
channel C0. A licensed channel that is sensed idle may carry part of that
traffic error-free for its channel available duration (CAD). This module
solves the transmission-time allocation (TAP) for one licensed channel,
prices the sensing/switching gamble in expectation, ranks the channels worth
trying and runs the sense-access-fallback controller for one cluster.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.errors import DomainError, UnboundedCad
from ..core.types import (BITS_TOLERANCE, AccountingMode, CadMode, Channel, ClusterState,
                          CognitiveParams, EnergyLedger, PhaseMode, SensingMode, TranscriptRecord)
from ..radio.energy import (baseline_intra_energy, c0_transfer_energy, intra_energy_rate,
                            link_rate, transmission_energy)
from ..radio.spectrum import (ChannelState, channel_available_duration, channel_idle_probability,
                              fused_probabilities, license_free_channel, licensed_channels,
                              sample_channel_state, sample_sensing_outcome, select_sensing_set,
                              success_probability)
from .lp import solve_box_budget, solve_box_budget_simplex

if TYPE_CHECKING:
    from .inter import PowerTimeAllocation

logger = logging.getLogger(__name__)

C0_TRANSCRIPT_ID = -1


@dataclass(frozen=True)
class TimeAllocation:
    """Licensed-channel airtime per member and the resulting phase energy"""
    member_ids: Tuple[int, ...]
    per_member_time_s: Tuple[float, ...]
    objective_j: float
    baseline_j: float

    @property
    def total_time_s(self) -> float:
        return float(sum(self.per_member_time_s))

    def time_of(self, member_id: int) -> float:
        return self.per_member_time_s[self.member_ids.index(member_id)]


@dataclass(frozen=True)
class ChannelProspect:
    """Expected value of sensing one licensed channel for a cluster"""
    channel_id: int
    expected_energy_j: float
    allocation: Union[TimeAllocation, "PowerTimeAllocation"]
    accessible: bool
    cad_s: float = 0.0
    bandwidth_hz: float = 0.0
    fused_detection: float = 0.0
    fused_false_alarm: float = 0.0
    sensing_set: Tuple[int, ...] = ()


@dataclass
class PhaseResult:
    """Outcome of one phase controller run"""
    ledger: EnergyLedger
    records: List[TranscriptRecord] = field(default_factory=list)
    clusters: List[ClusterState] = field(default_factory=list)


Allocator = Callable[[ClusterState, Channel, float, Channel, CognitiveParams], TimeAllocation]
ProspectOrder = Callable[[List[ChannelProspect]], List[ChannelProspect]]


def licensed_rates(cluster: ClusterState, channel: Channel) -> np.ndarray:
    """R_{j,i,x} for every member at its fixed power"""
    return np.array([link_rate(member, channel) for member in cluster.members], dtype=float)


def tap_coefficients(cluster: ClusterState, channel: Channel, channel_c0: Channel,
                     params: CognitiveParams) -> np.ndarray:
    """Marginal energy per second of licensed airtime, one entry per member

    c_j = (P_j + alpha_j) / eta - R_jx * ER1_j / (1 - lambda_j): the licensed
    transmit cost minus the C0 energy the same bits would have cost.
    """
    eta = params.amplifier_efficiency
    coefficients = []
    for member, rate in zip(cluster.members, licensed_rates(cluster, channel)):
        cost = (member.tx_power_w + member.circuit_power_w) / eta
        if rate > 0:
            er1 = intra_energy_rate(member, channel_c0, params).value
            cost -= rate * er1 / (1.0 - cluster.packet_loss_c0[member.id])
        coefficients.append(cost)
    return np.array(coefficients, dtype=float)


def tap_caps(cluster: ClusterState, channel: Channel) -> np.ndarray:
    """Airtime needed to drain each member's residual, A'_j / R_jx (0 on dead links)"""
    rates = licensed_rates(cluster, channel)
    residual = np.array([cluster.residual_bits[m.id] for m in cluster.members], dtype=float)
    caps = np.zeros_like(rates)
    usable = rates > 0
    caps[usable] = residual[usable] / rates[usable]
    return caps


def _allocation(cluster: ClusterState, times: np.ndarray, coefficients: np.ndarray,
                baseline: float) -> TimeAllocation:
    return TimeAllocation(
        member_ids=cluster.member_ids,
        per_member_time_s=tuple(float(t) for t in times),
        objective_j=baseline + float(coefficients @ times),
        baseline_j=baseline,
    )


def tap_solve_greedy(cluster: ClusterState, channel: Channel, cad_s: float,
                     channel_c0: Channel, params: CognitiveParams) -> TimeAllocation:
    if cad_s < 0:
        raise DomainError("CAD must be >= 0")
    coefficients = tap_coefficients(cluster, channel, channel_c0, params)
    solution = solve_box_budget(coefficients, tap_caps(cluster, channel), cad_s)
    return _allocation(cluster, solution.x, coefficients, baseline_intra_energy(cluster, channel_c0, params))


def tap_solve_lp(cluster: ClusterState, channel: Channel, cad_s: float,
                 channel_c0: Channel, params: CognitiveParams) -> TimeAllocation:
    """Same optimum as tap_solve_greedy, through the dense simplex"""
    if cad_s < 0:
        raise DomainError("CAD must be >= 0")
    coefficients = tap_coefficients(cluster, channel, channel_c0, params)
    solution = solve_box_budget_simplex(coefficients, tap_caps(cluster, channel), cad_s)
    return _allocation(cluster, solution.x, coefficients, baseline_intra_energy(cluster, channel_c0, params))


def average_allocation(cluster: ClusterState, channel: Channel, cad_s: float,
                       channel_c0: Channel, params: CognitiveParams) -> TimeAllocation:
    """CAD split equally over members with residual data, each capped at the airtime it needs"""
    if cad_s < 0:
        raise DomainError("CAD must be >= 0")
    caps = tap_caps(cluster, channel)
    waiting = [i for i, member in enumerate(cluster.members) if cluster.residual_bits[member.id] > 0]
    times = np.zeros(len(cluster.members))
    if waiting:
        share = cad_s / len(waiting)
        for index in waiting:
            times[index] = min(share, caps[index])
    coefficients = tap_coefficients(cluster, channel, channel_c0, params)
    return _allocation(cluster, times, coefficients, baseline_intra_energy(cluster, channel_c0, params))


def direct_intra_energy(cluster: ClusterState, channel: Channel, times: Sequence[float],
                        channel_c0: Channel, params: CognitiveParams) -> float:
    """Licensed transmit energy plus C0 energy of whatever is left, member by member"""
    total = 0.0
    for member, rate, t in zip(cluster.members, licensed_rates(cluster, channel), times):
        total += transmission_energy(member.tx_power_w, member.circuit_power_w, params.amplifier_efficiency, t)
        leftover = max(cluster.residual_bits[member.id] - rate * t, 0.0)
        if leftover > 0:
            er1 = intra_energy_rate(member, channel_c0, params).value
            total += leftover * er1 / (1.0 - cluster.packet_loss_c0[member.id])
    return total


def expected_intra_energy(cluster: ClusterState, channel: Channel, allocation: TimeAllocation,
                          params: CognitiveParams, fused: Tuple[float, float]) -> float:
    """Two-branch expectation of sensing ``channel`` and acting on the result

    With F_s = p_off (1 - F_f) the channel is found idle and E* plus switching is
    paid; otherwise the cluster stays on C0. Sensing is paid either way.
    """
    f_s = success_probability(channel, fused[1])
    sensing = params.coop_set_size * params.sense_energy_j
    switching = 2 * cluster.size * params.switch_energy_j
    return (f_s * (allocation.objective_j + sensing + switching)
            + (1.0 - f_s) * (allocation.baseline_j + sensing))


def resolve_cad(channel: Channel, fused_false_alarm: float, params: CognitiveParams,
                cads: Optional[Mapping[int, float]] = None) -> float:
    """CAD of ``channel``: a drawn value, the fixed mean, or the protection-derived cap

    An unbounded derived CAD is returned as ``math.inf``.
    """
    if cads is not None and channel.id in cads:
        return cads[channel.id]
    if channel.cad_mode is CadMode.FIXED:
        return channel.cad_mean_s
    try:
        return channel_available_duration(params.pu_protection, channel_idle_probability(channel),
                                          fused_false_alarm, channel.mean_idle_s, params.cad_exponent)
    except UnboundedCad:
        logger.debug("channel %d: CAD unbounded, using an uncapped budget", channel.id)
        return math.inf


def channel_prospects(cluster: ClusterState, channels: Sequence[Channel], params: CognitiveParams,
                      cads: Optional[Mapping[int, float]] = None,
                      allocator: Optional[Allocator] = None) -> List[ChannelProspect]:
    """Prospect of every licensed channel in ``channels``, in input order"""
    channel_c0 = _require_c0(channels)
    allocator = allocator or tap_solve_greedy
    members = {m.id: m for m in cluster.members}
    prospects = []
    for channel in licensed_channels(channels):
        sensing_set = select_sensing_set(cluster, channel, params)
        fused = fused_probabilities(channel, [members[i] for i in sensing_set])
        cad_s = resolve_cad(channel, fused[1], params, cads)
        allocation = allocator(cluster, channel, cad_s, channel_c0, params)
        expected = expected_intra_energy(cluster, channel, allocation, params, fused)
        prospects.append(ChannelProspect(
            channel_id=channel.id,
            expected_energy_j=expected,
            allocation=allocation,
            accessible=expected < allocation.baseline_j,
            cad_s=cad_s,
            bandwidth_hz=channel.bandwidth_hz,
            fused_detection=fused[0],
            fused_false_alarm=fused[1],
            sensing_set=sensing_set,
        ))
    return prospects


def order_by_expected_energy(prospects: List[ChannelProspect]) -> List[ChannelProspect]:
    """Accessible prospects, cheapest expected energy first, ties by channel id"""
    accessible = [p for p in prospects if p.accessible]
    return sorted(accessible, key=lambda p: (p.expected_energy_j, p.channel_id))


def accessible_channels(cluster: ClusterState, channels: Sequence[Channel], params: CognitiveParams,
                        cads: Optional[Mapping[int, float]] = None) -> List[ChannelProspect]:
    return order_by_expected_energy(channel_prospects(cluster, channels, params, cads))


def _require_c0(channels: Sequence[Channel]) -> Channel:
    channel_c0 = license_free_channel(channels)
    if channel_c0 is None:
        raise DomainError("channel list has no license-free channel 0")
    return channel_c0


def _c0_attempts(loss: float, mode: PhaseMode, rng) -> Optional[float]:
    """Transmissions of a backlog over C0: expected multiplier or a geometric draw"""
    if mode.accounting is AccountingMode.SAMPLED:
        return float(rng.geometric(1.0 - loss))
    return None


def sense_channel(channel: Channel, prospect: ChannelProspect, mode: PhaseMode, rng):
    """Sample the PU state of ``channel`` and the cooperative sensing verdict"""
    observation = sample_channel_state(channel, rng)
    outcome = sample_sensing_outcome(observation.state, prospect.fused_detection,
                                     prospect.fused_false_alarm, mode.sensing, rng)
    return observation, outcome


def interferes(observation, outcome, airtime_s: float, mode: PhaseMode) -> bool:
    """An access disturbs a PU if it was present, or returns before the airtime ends"""
    if mode.sensing is not SensingMode.STRICT:
        return False
    if outcome.misdetection:
        return True
    return observation.state is ChannelState.IDLE and observation.remaining_idle_s < airtime_s


def run_intra_phase(cluster: ClusterState, channels: Sequence[Channel], params: CognitiveParams,
                    mode: PhaseMode, rng, cads: Optional[Mapping[int, float]] = None,
                    allocator: Optional[Allocator] = None,
                    order: Optional[ProspectOrder] = None) -> PhaseResult:
    """Sense-access-fallback loop for one cluster

    Channels are sensed in prospect order. The first one declared idle is
    switched to and used for its CAD with the allocator's airtimes. With data
    left, prospects are recomputed and the loop repeats; when nothing is
    worth sensing or every sensed channel is busy, the remainder goes over C0.
    """
    channel_c0 = _require_c0(channels)
    by_id = {channel.id: channel for channel in channels}
    allocator = allocator or tap_solve_greedy
    order = order or order_by_expected_energy
    members = {m.id: m for m in cluster.members}
    sensing_cost = params.coop_set_size * params.sense_energy_j
    switching_cost = 2 * cluster.size * params.switch_energy_j

    ledger = EnergyLedger()
    records: List[TranscriptRecord] = []
    state = cluster
    for _ in range(mode.max_access_rounds):
        if state.total_residual_bits <= BITS_TOLERANCE:
            break
        prospects = order(channel_prospects(state, channels, params, cads, allocator))
        access = None
        for prospect in prospects:
            channel = by_id[prospect.channel_id]
            observation, outcome = sense_channel(channel, prospect, mode, rng)
            event = EnergyLedger(sensing_j=sensing_cost, channels_sensed=1)
            if outcome.declared_idle:
                access = (channel, prospect, observation, outcome, event)
                break
            logger.debug("cluster %d: channel %d sensed busy", state.cluster_id, channel.id)
            records.append(TranscriptRecord("intra", state.cluster_id, channel.id, event))
            ledger = ledger + event
        if access is None:
            break

        channel, prospect, observation, outcome, event = access
        allocation = prospect.allocation
        rates = dict(zip(state.member_ids, licensed_rates(state, channel)))
        residual = dict(state.residual_bits)
        tx = delivered = 0.0
        for member_id, t in zip(allocation.member_ids, allocation.per_member_time_s):
            if t <= 0:
                continue
            member = members[member_id]
            bits = min(rates[member_id] * t, residual[member_id])
            residual[member_id] -= bits
            delivered += bits
            tx += transmission_energy(member.tx_power_w, member.circuit_power_w, params.amplifier_efficiency, t)
        event = event.charge(switching_j=switching_cost, tx_j=tx, bits_delivered=delivered, accesses=1,
                             interference_events=int(interferes(observation, outcome,
                                                                allocation.total_time_s, mode)))
        logger.debug("cluster %d: accessed channel %d for %.4g s, %.0f bits",
                     state.cluster_id, channel.id, allocation.total_time_s, delivered)
        records.append(TranscriptRecord("intra", state.cluster_id, channel.id, event))
        ledger = ledger + event
        state = state.with_residual(residual)
        if delivered <= BITS_TOLERANCE:
            break

    leftover = EnergyLedger()
    residual = dict(state.residual_bits)
    for member in state.members:
        bits = residual[member.id]
        if bits <= 0:
            continue
        loss = state.packet_loss_c0[member.id]
        tx, rx = c0_transfer_energy(member, bits, loss, channel_c0, params, _c0_attempts(loss, mode, rng))
        leftover = leftover.charge(tx_j=tx, rx_j=rx, bits_delivered=bits)
        residual[member.id] = 0.0
    if leftover.bits_delivered > 0:
        records.append(TranscriptRecord("intra", state.cluster_id, C0_TRANSCRIPT_ID, leftover))
        ledger = ledger + leftover
    state = state.with_residual(residual)
    return PhaseResult(ledger=ledger, records=records, clusters=[state])
