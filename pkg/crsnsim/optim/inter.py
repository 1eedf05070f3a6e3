#!/usr/bin/env python3
"""
Inter-cluster dynamic channel access

Cluster heads forward aggregated data to the sink. On an idle licensed
channel they may choose both transmit power and airtime; the joint problem
is biconvex and is solved by alternating convex search (ACS) between a
closed-form power step and the box-and-budget LP time step.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import DomainError
from ..core.types import (BITS_TOLERANCE, Channel, ClusterState, CognitiveParams, EnergyLedger,
                          PhaseMode, TranscriptRecord)
from ..radio.energy import (MIN_RATE_BPS, baseline_inter_energy, c0_transfer_energy,
                            head_energy_rate, transmission_energy, transmission_rate)
from ..radio.spectrum import fused_probabilities, licensed_channels, select_sensing_nodes, success_probability
from .intra import (C0_TRANSCRIPT_ID, ChannelProspect, PhaseResult, _c0_attempts, _require_c0,
                    interferes, order_by_expected_energy, resolve_cad, sense_channel)
from .lp import solve_box_budget

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

# Sensing and switching are network-wide costs in the inter phase
NETWORK_TRANSCRIPT_ID = -1


@dataclass(frozen=True)
class PowerTimeAllocation:
    """Per-head licensed power and airtime with the ACS trace that produced them"""
    head_ids: Tuple[int, ...]
    per_head_power_w: Tuple[float, ...]
    per_head_time_s: Tuple[float, ...]
    objective_j: float
    baseline_j: float
    iterations: int = 0
    converged: bool = True
    history: Tuple[float, ...] = ()

    @property
    def total_time_s(self) -> float:
        return float(sum(self.per_head_time_s))


@dataclass(frozen=True)
class HeadLink:
    """Per-head constants of one licensed channel"""
    gain: float
    noise: float
    bandwidth: float
    backlog: float
    circuit: float
    weight: float


InterAllocator = Callable[[Sequence[ClusterState], Channel, float, Channel, CognitiveParams], PowerTimeAllocation]


def head_weight(cluster: ClusterState, channel: Channel, channel_c0: Channel, params: CognitiveParams) -> float:
    """W_i = B_x * ER2_i / (1 - lambda_i): C0 energy avoided per unit of licensed spectral efficiency"""
    er2 = head_energy_rate(cluster.head, channel_c0, params).value
    return channel.bandwidth_hz * er2 / (1.0 - cluster.head_loss_c0)


def head_links(clusters: Sequence[ClusterState], channel: Channel, channel_c0: Channel,
               params: CognitiveParams) -> List[HeadLink]:
    return [HeadLink(gain=cluster.head.gain(channel.id), noise=channel.noise_power_w,
                     bandwidth=channel.bandwidth_hz, backlog=cluster.head_backlog_bits,
                     circuit=cluster.head.circuit_power_w,
                     weight=head_weight(cluster, channel, channel_c0, params))
            for cluster in clusters]


def _rate(link: HeadLink, power: float) -> float:
    rate = transmission_rate(link.bandwidth, link.gain, power, link.noise)
    return rate if rate >= MIN_RATE_BPS else 0.0


def power_cost(link: HeadLink, power: float, time_s: float, efficiency: float) -> float:
    """Per-head equivalent objective f(P) at airtime ``time_s``"""
    spectral = np.log2(1.0 + link.gain * power / link.noise)
    return time_s * ((power + link.circuit) / efficiency - link.weight * spectral)


def power_cost_derivative(link: HeadLink, power: float, time_s: float, efficiency: float) -> float:
    snr_slope = link.gain / link.noise
    return time_s * (1.0 / efficiency - link.weight * snr_slope / (LN2 * (1.0 + snr_slope * power)))


def power_cap(link: HeadLink, time_s: float, max_power: float) -> float:
    """P_B: the lesser of P_max and the power that drains the backlog in exactly ``time_s``"""
    if link.gain <= 0:
        return 0.0
    exponent = link.backlog / (link.bandwidth * time_s)
    if exponent > 1000.0:
        return max_power
    return min(math.expm1(exponent * LN2) * link.noise / link.gain, max_power)


def stationary_power(link: HeadLink, efficiency: float) -> float:
    """Zero of f'(P): W eta / ln 2 - sigma^2 / h^2"""
    if link.gain <= 0:
        return 0.0
    return link.weight * efficiency / LN2 - link.noise / link.gain


def equivalent_objective(clusters: Sequence[ClusterState], channel: Channel, powers: Sequence[float],
                         times: Sequence[float], channel_c0: Channel, params: CognitiveParams) -> float:
    """E2x' = sum (P + alpha) t / eta - W log2(1 + h^2 P / sigma^2) t; E2x = E2x' + E2,0"""
    links = head_links(clusters, channel, channel_c0, params)
    return float(sum(power_cost(link, p, t, params.amplifier_efficiency)
                     for link, p, t in zip(links, powers, times)))


def direct_inter_energy(clusters: Sequence[ClusterState], channel: Channel, powers: Sequence[float],
                        times: Sequence[float], channel_c0: Channel, params: CognitiveParams) -> float:
    """Licensed transmit energy plus C0 energy of each head's leftover backlog"""
    total = 0.0
    for cluster, power, t in zip(clusters, powers, times):
        head = cluster.head
        total += transmission_energy(power, head.circuit_power_w, params.amplifier_efficiency, t)
        sent = transmission_rate(channel.bandwidth_hz, head.gain(channel.id), power, channel.noise_power_w) * t
        leftover = max(cluster.head_backlog_bits - sent, 0.0)
        if leftover > 0:
            er2 = head_energy_rate(head, channel_c0, params).value
            total += leftover * er2 / (1.0 - cluster.head_loss_c0)
    return total


def optimal_power_given_time(clusters: Sequence[ClusterState], channel: Channel, times: Sequence[float],
                             channel_c0: Channel, params: CognitiveParams) -> np.ndarray:
    """Clamped stationary point of each head's convex f(P)

    A head without airtime has f = 0 at any power; it gets the stationary
    point clamped to [0, P_max] so the next time step can bring it back in.
    """
    powers = []
    for link, t in zip(head_links(clusters, channel, channel_c0, params), times):
        if link.backlog <= 0:
            powers.append(0.0)
            continue
        candidate = stationary_power(link, params.amplifier_efficiency)
        upper = power_cap(link, t, params.max_power_w) if t > 0 else params.max_power_w
        powers.append(min(max(candidate, 0.0), upper))
    return np.array(powers, dtype=float)


def time_coefficients(clusters: Sequence[ClusterState], channel: Channel, powers: Sequence[float],
                      channel_c0: Channel, params: CognitiveParams) -> Tuple[np.ndarray, np.ndarray]:
    """(c_i, cap_i) of the time step at fixed powers"""
    coefficients, caps = [], []
    for link, power in zip(head_links(clusters, channel, channel_c0, params), powers):
        rate = _rate(link, power)
        coefficients.append((power + link.circuit) / params.amplifier_efficiency
                            - link.weight * rate / link.bandwidth)
        caps.append(link.backlog / rate if rate > 0 else 0.0)
    return np.array(coefficients, dtype=float), np.array(caps, dtype=float)


def optimal_time_given_power(clusters: Sequence[ClusterState], channel: Channel, powers: Sequence[float],
                             cad_s: float, channel_c0: Channel, params: CognitiveParams) -> np.ndarray:
    if cad_s < 0:
        raise DomainError("CAD must be >= 0")
    coefficients, caps = time_coefficients(clusters, channel, powers, channel_c0, params)
    return solve_box_budget(coefficients, caps, cad_s).x


def _start_times(clusters: Sequence[ClusterState], channel: Channel, cad_s: float,
                 channel_c0: Channel, params: CognitiveParams) -> np.ndarray:
    links = head_links(clusters, channel, channel_c0, params)
    waiting = [i for i, link in enumerate(links) if link.backlog > 0]
    times = np.zeros(len(links))
    if not waiting:
        return times
    if math.isfinite(cad_s):
        times[waiting] = cad_s / len(waiting)
        return times
    for index in waiting:
        rate = _rate(links[index], params.max_power_w)
        times[index] = links[index].backlog / rate if rate > 0 else 0.0
    return times


def _pack(clusters, powers, times, objective, baseline, iterations=0, converged=True, history=()):
    return PowerTimeAllocation(
        head_ids=tuple(cluster.head_id for cluster in clusters),
        per_head_power_w=tuple(float(p) for p in powers),
        per_head_time_s=tuple(float(t) for t in times),
        objective_j=objective,
        baseline_j=baseline,
        iterations=iterations,
        converged=converged,
        history=tuple(history),
    )


def acs_solve(clusters: Sequence[ClusterState], channel: Channel, cad_s: float, channel_c0: Channel,
              params: CognitiveParams, tolerance: float = 1e-6, max_iterations: int = 50) -> PowerTimeAllocation:
    """Alternate the power and time steps until the objective moves by at most ``tolerance`` J

    Starts from an equal split of the CAD over heads with backlog at zero
    power. Each iteration is one power step followed by one time step, and
    the reported objective includes the C0 baseline. Heads left without
    airtime report zero power but are offered again on the next iteration.
    """
    if tolerance <= 0 or max_iterations < 1:
        raise DomainError("ACS needs tolerance > 0 and at least one iteration")
    if cad_s < 0:
        raise DomainError("CAD must be >= 0")
    baseline = baseline_inter_energy(clusters, channel_c0, params)
    times = _start_times(clusters, channel, cad_s, channel_c0, params)
    powers = np.zeros(len(clusters))
    previous = baseline + equivalent_objective(clusters, channel, powers, times, channel_c0, params)
    history = []
    converged = False
    for iteration in range(1, max_iterations + 1):
        powers = optimal_power_given_time(clusters, channel, times, channel_c0, params)
        times = optimal_time_given_power(clusters, channel, powers, cad_s, channel_c0, params)
        # a head with no airtime transmits nothing
        powers = np.where(times > 0, powers, 0.0)
        current = baseline + equivalent_objective(clusters, channel, powers, times, channel_c0, params)
        history.append(current)
        logger.debug("ACS channel %d iteration %d: objective %.9g J", channel.id, iteration, current)
        if abs(current - previous) <= tolerance:
            converged = True
            break
        previous = current
    return _pack(clusters, powers, times, history[-1], baseline, iteration, converged, history)


def average_power_time(clusters: Sequence[ClusterState], channel: Channel, cad_s: float,
                       channel_c0: Channel, params: CognitiveParams) -> PowerTimeAllocation:
    """Every head at P_max, CAD split equally over heads with backlog"""
    if cad_s < 0:
        raise DomainError("CAD must be >= 0")
    links = head_links(clusters, channel, channel_c0, params)
    waiting = [i for i, link in enumerate(links) if link.backlog > 0]
    powers = np.zeros(len(links))
    times = np.zeros(len(links))
    for index in waiting:
        rate = _rate(links[index], params.max_power_w)
        if rate <= 0:
            continue
        powers[index] = params.max_power_w
        times[index] = min(cad_s / len(waiting), links[index].backlog / rate)
    baseline = baseline_inter_energy(clusters, channel_c0, params)
    objective = baseline + equivalent_objective(clusters, channel, powers, times, channel_c0, params)
    return _pack(clusters, powers, times, objective, baseline)


def acs_allocator(tolerance: float = 1e-6, max_iterations: int = 50) -> InterAllocator:
    def allocate(clusters, channel, cad_s, channel_c0, params):
        return acs_solve(clusters, channel, cad_s, channel_c0, params, tolerance, max_iterations)
    return allocate


def expected_inter_energy(clusters: Sequence[ClusterState], channel: Channel, allocation: PowerTimeAllocation,
                          params: CognitiveParams, fused: Tuple[float, float]) -> float:
    """Two-branch expectation for the heads; m = len(clusters) radios switch out and back"""
    f_s = success_probability(channel, fused[1])
    sensing = params.coop_set_size * params.sense_energy_j
    switching = 2 * len(clusters) * params.switch_energy_j
    return (f_s * (allocation.objective_j + sensing + switching)
            + (1.0 - f_s) * (allocation.baseline_j + sensing))


def inter_channel_prospects(clusters: Sequence[ClusterState], channels: Sequence[Channel],
                            params: CognitiveParams, cads: Optional[Mapping[int, float]] = None,
                            allocator: Optional[InterAllocator] = None) -> List[ChannelProspect]:
    channel_c0 = _require_c0(channels)
    allocator = allocator or acs_allocator()
    heads = {cluster.head_id: cluster.head for cluster in clusters}
    prospects = []
    for channel in licensed_channels(channels):
        sensing_set = select_sensing_nodes(list(heads.values()), channel, params)
        fused = fused_probabilities(channel, [heads[i] for i in sensing_set])
        cad_s = resolve_cad(channel, fused[1], params, cads)
        allocation = allocator(clusters, channel, cad_s, channel_c0, params)
        expected = expected_inter_energy(clusters, channel, allocation, params, fused)
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


def inter_accessible_channels(clusters: Sequence[ClusterState], channels: Sequence[Channel],
                              params: CognitiveParams,
                              cads: Optional[Mapping[int, float]] = None) -> List[ChannelProspect]:
    return order_by_expected_energy(inter_channel_prospects(clusters, channels, params, cads))


def run_inter_phase(clusters: Sequence[ClusterState], channels: Sequence[Channel], params: CognitiveParams,
                    mode: PhaseMode, rng, cads: Optional[Mapping[int, float]] = None,
                    allocator: Optional[InterAllocator] = None, order=None) -> PhaseResult:
    """Joint power/time access loop for all heads, then C0 for what is left"""
    channel_c0 = _require_c0(channels)
    by_id = {channel.id: channel for channel in channels}
    allocator = allocator or acs_allocator()
    order = order or order_by_expected_energy
    sensing_cost = params.coop_set_size * params.sense_energy_j
    switching_cost = 2 * len(clusters) * params.switch_energy_j

    ledger = EnergyLedger()
    records: List[TranscriptRecord] = []
    state = list(clusters)
    for _ in range(mode.max_access_rounds):
        if sum(cluster.head_backlog_bits for cluster in state) <= BITS_TOLERANCE:
            break
        prospects = order(inter_channel_prospects(state, channels, params, cads, allocator))
        access = None
        for prospect in prospects:
            channel = by_id[prospect.channel_id]
            observation, outcome = sense_channel(channel, prospect, mode, rng)
            event = EnergyLedger(sensing_j=sensing_cost, channels_sensed=1)
            if outcome.declared_idle:
                access = (channel, prospect, observation, outcome, event)
                break
            records.append(TranscriptRecord("inter", NETWORK_TRANSCRIPT_ID, channel.id, event))
            ledger = ledger + event
        if access is None:
            break

        channel, prospect, observation, outcome, event = access
        allocation = prospect.allocation
        event = event.charge(switching_j=switching_cost, accesses=1,
                             interference_events=int(interferes(observation, outcome,
                                                                allocation.total_time_s, mode)))
        records.append(TranscriptRecord("inter", NETWORK_TRANSCRIPT_ID, channel.id, event))
        ledger = ledger + event
        delivered_total = 0.0
        updated = []
        for cluster, power, t in zip(state, allocation.per_head_power_w, allocation.per_head_time_s):
            if t <= 0 or power <= 0:
                updated.append(cluster)
                continue
            head = cluster.head
            rate = transmission_rate(channel.bandwidth_hz, head.gain(channel.id), power, channel.noise_power_w)
            bits = min(rate * t, cluster.head_backlog_bits)
            tx = transmission_energy(power, head.circuit_power_w, params.amplifier_efficiency, t)
            head_event = EnergyLedger(tx_j=tx, bits_delivered=bits)
            records.append(TranscriptRecord("inter", cluster.cluster_id, channel.id, head_event))
            ledger = ledger + head_event
            delivered_total += bits
            updated.append(cluster.with_head_backlog(cluster.head_backlog_bits - bits))
        logger.debug("heads accessed channel %d for %.4g s, %.0f bits",
                     channel.id, allocation.total_time_s, delivered_total)
        state = updated
        if delivered_total <= BITS_TOLERANCE:
            break

    final = []
    for cluster in state:
        bits = cluster.head_backlog_bits
        if bits > 0:
            attempts = _c0_attempts(cluster.head_loss_c0, mode, rng)
            tx, rx = c0_transfer_energy(cluster.head, bits, cluster.head_loss_c0, channel_c0, params, attempts)
            event = EnergyLedger(tx_j=tx, rx_j=rx, bits_delivered=bits)
            records.append(TranscriptRecord("inter", cluster.cluster_id, C0_TRANSCRIPT_ID, event))
            ledger = ledger + event
        final.append(cluster.with_head_backlog(0.0))
    return PhaseResult(ledger=ledger, records=records, clusters=final)
