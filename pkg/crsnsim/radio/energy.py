#!/usr/bin/env python3
"""
Rate and energy formulas

Shannon rate, transmit and receive energy, per-bit energy consumption
rates on the license-free channel and the C0-only baseline energies.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.errors import DomainError
from ..core.types import Channel, ClusterState, CognitiveParams, EnergyLedger, SensorNode

# Links slower than this carry nothing; allocation coefficients divide by the rate
MIN_RATE_BPS = 1.0


@dataclass(frozen=True)
class EnergyRate:
    """Joules spent per bit successfully delivered over C0"""
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError(f"energy rate must be > 0, got {self.value}")


def transmission_rate(bandwidth: float, gain: float, power: float, noise: float) -> float:
    """B * log2(1 + h^2 P / sigma^2) in bits/s"""
    if bandwidth <= 0 or noise <= 0:
        raise DomainError("bandwidth and noise power must be > 0")
    if power < 0 or gain < 0:
        raise DomainError("power and channel gain must be >= 0")
    return float(bandwidth * np.log2(1.0 + gain * power / noise))


def link_rate(node: SensorNode, channel: Channel, power: Optional[float] = None) -> float:
    """Rate of ``node`` on ``channel``; sub-1 bit/s links count as zero"""
    rate = transmission_rate(channel.bandwidth_hz, node.gain(channel.id),
                             node.tx_power_w if power is None else power, channel.noise_power_w)
    return rate if rate >= MIN_RATE_BPS else 0.0


def transmission_energy(power: float, circuit_power: float, efficiency: float, duration: float) -> float:
    """(P + alpha_c) * t / eta"""
    if duration < 0:
        raise DomainError("duration must be >= 0")
    if not 0.0 < efficiency <= 1.0:
        raise DomainError("amplifier efficiency must lie in (0, 1]")
    return (power + circuit_power) * duration / efficiency


def reception_energy(e_c: float, bits: float) -> float:
    return e_c * bits


def _c0_energy_rate(node: SensorNode, channel_c0: Channel, params: CognitiveParams) -> EnergyRate:
    rate = link_rate(node, channel_c0)
    if rate <= 0:
        raise DomainError(f"node {node.id} has no usable rate on the license-free channel")
    eta = params.amplifier_efficiency
    return EnergyRate(params.rx_energy_j_per_bit + (node.tx_power_w + node.circuit_power_w) / (eta * rate))


def intra_energy_rate(node: SensorNode, channel_c0: Channel, params: CognitiveParams) -> EnergyRate:
    """ER1 of a cluster member sending to its head over C0"""
    return _c0_energy_rate(node, channel_c0, params)


def head_energy_rate(head: SensorNode, channel_c0: Channel, params: CognitiveParams) -> EnergyRate:
    """ER2 of a cluster head sending to the sink over C0 at its fixed power P_i0"""
    return _c0_energy_rate(head, channel_c0, params)


def _retransmission_factor(loss: float) -> float:
    if not 0.0 <= loss < 1.0:
        raise DomainError(f"packet loss {loss} outside [0, 1): expected retransmissions diverge")
    return 1.0 / (1.0 - loss)


def c0_transfer_energy(node: SensorNode, bits: float, loss: float, channel_c0: Channel,
                       params: CognitiveParams, attempts: Optional[float] = None) -> Tuple[float, float]:
    """(transmit, receive) energy to deliver ``bits`` over C0

    ``attempts`` is the number of times the backlog is sent; it defaults to the
    expected 1 / (1 - loss).
    """
    if bits <= 0:
        return 0.0, 0.0
    multiplier = _retransmission_factor(loss) if attempts is None else attempts
    rate = link_rate(node, channel_c0)
    if rate <= 0:
        raise DomainError(f"node {node.id} has no usable rate on the license-free channel")
    sent_bits = bits * multiplier
    tx = transmission_energy(node.tx_power_w, node.circuit_power_w, params.amplifier_efficiency,
                             sent_bits / rate)
    rx = reception_energy(params.rx_energy_j_per_bit, sent_bits)
    return tx, rx


def baseline_intra_ledger(cluster: ClusterState, channel_c0: Channel, params: CognitiveParams) -> EnergyLedger:
    """C0-only intra-cluster energy of the remaining data, split into tx and rx"""
    ledger = EnergyLedger()
    for member in cluster.members:
        bits = cluster.residual_bits[member.id]
        tx, rx = c0_transfer_energy(member, bits, cluster.packet_loss_c0[member.id], channel_c0, params)
        ledger = ledger.charge(tx_j=tx, rx_j=rx, bits_delivered=bits)
    return ledger


def baseline_intra_energy(cluster: ClusterState, channel_c0: Channel, params: CognitiveParams) -> float:
    """E_{1,0}: sum of A'_j * ER1_j / (1 - lambda_j) over the members"""
    total = 0.0
    for member in cluster.members:
        factor = _retransmission_factor(cluster.packet_loss_c0[member.id])
        bits = cluster.residual_bits[member.id]
        if bits > 0:
            total += bits * intra_energy_rate(member, channel_c0, params).value * factor
    return total


def baseline_inter_ledger(clusters: Sequence[ClusterState], channel_c0: Channel,
                          params: CognitiveParams) -> EnergyLedger:
    ledger = EnergyLedger()
    for cluster in clusters:
        bits = cluster.head_backlog_bits
        tx, rx = c0_transfer_energy(cluster.head, bits, cluster.head_loss_c0, channel_c0, params)
        ledger = ledger.charge(tx_j=tx, rx_j=rx, bits_delivered=bits)
    return ledger


def baseline_inter_energy(clusters: Sequence[ClusterState], channel_c0: Channel,
                          params: CognitiveParams) -> float:
    """E_{2,0}: sum of A_i * ER2_i / (1 - lambda_i) over the heads

    A_i is each head's backlog; ``aggregate_backlog`` sets it to psi_i * sum A_j.
    """
    total = 0.0
    for cluster in clusters:
        factor = _retransmission_factor(cluster.head_loss_c0)
        if cluster.head_backlog_bits > 0:
            total += cluster.head_backlog_bits * head_energy_rate(cluster.head, channel_c0, params).value * factor
    return total


def aggregate_backlog(cluster: ClusterState) -> ClusterState:
    """Load the head with psi_i times the data its members generated"""
    return cluster.with_head_backlog(cluster.aggregated_bits)
