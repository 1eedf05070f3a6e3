#!/usr/bin/env python3
"""
Network deployment

Nodes are dropped uniformly in a disc around the sink. Cluster heads are
the nodes closest to the centroids of equal angular sectors, members join
the nearest head and clusters are topped up to the cooperative sensing size.
Channel gains follow h^2 = gamma * d^-mu with gamma ~ Exp(1), one gamma per
link shared by every channel.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..core.config import ScenarioConfig
from ..core.errors import DomainError
from ..core.types import CadMode, Channel, SensorNode
from ..radio.spectrum import detection_probability, false_alarm_probability
from .streams import Purpose, channel_slot, stream

logger = logging.getLogger(__name__)

MIN_BANDWIDTH_HZ = 1e5
MIN_DISTANCE_M = 1.0


@dataclass(frozen=True)
class Network:
    """Static deployment of one seed: nodes, cluster membership and channels"""
    nodes: Dict[int, SensorNode]
    clusters: Tuple[Tuple[int, Tuple[int, ...]], ...]
    channels: Tuple[Channel, ...]

    @property
    def head_ids(self) -> Tuple[int, ...]:
        return tuple(head for head, _ in self.clusters)


def draw_gains(distances: np.ndarray, rng, exponent: float) -> np.ndarray:
    """h^2 for a vector of link distances with fresh Exp(1) fading"""
    gamma = rng.exponential(1.0, size=len(distances))
    return gamma * np.maximum(distances, MIN_DISTANCE_M) ** -exponent


def place_nodes(count: int, radius: float, rng) -> np.ndarray:
    """Uniform positions in a disc of ``radius`` centred on the sink"""
    if radius <= 0:
        raise DomainError("deployment radius must be > 0")
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * math.pi * rng.random(count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sector_centroids(cluster_count: int, radius: float) -> np.ndarray:
    """Centroids of ``cluster_count`` equal circular sectors"""
    alpha = 2.0 * math.pi / cluster_count
    if cluster_count == 1:
        return np.zeros((1, 2))
    distance = 4.0 * radius * math.sin(alpha / 2.0) / (3.0 * alpha)
    angles = (np.arange(cluster_count) + 0.5) * alpha
    return np.column_stack((distance * np.cos(angles), distance * np.sin(angles)))


def select_heads(positions: np.ndarray, cluster_count: int, radius: float) -> List[int]:
    heads: List[int] = []
    for centroid in sector_centroids(cluster_count, radius):
        order = np.argsort(np.linalg.norm(positions - centroid, axis=1), kind="stable")
        heads.append(int(next(i for i in order if i not in heads)))
    return heads


def assign_members(positions: np.ndarray, heads: Sequence[int], min_members: int) -> List[List[int]]:
    """Nearest-head membership, rebalanced so every cluster has ``min_members``"""
    head_positions = positions[list(heads)]
    members: List[List[int]] = [[] for _ in heads]
    head_set = set(heads)
    for node in range(len(positions)):
        if node in head_set:
            continue
        distances = np.linalg.norm(head_positions - positions[node], axis=1)
        members[int(np.argmin(distances))].append(node)
    if len(positions) - len(heads) < min_members * len(heads):
        raise DomainError("too few nodes to give every cluster its sensing set")
    while True:
        deficient = [k for k, group in enumerate(members) if len(group) < min_members]
        if not deficient:
            break
        target = deficient[0]
        donors = [(node, k) for k, group in enumerate(members) if len(group) > min_members for node in group]
        node, source = min(donors, key=lambda pair: (np.linalg.norm(positions[pair[0]] - head_positions[target]),
                                                     pair[0]))
        members[source].remove(node)
        members[target].append(node)
        logger.debug("moved node %d from cluster %d to cluster %d", node, source, target)
    return [sorted(group) for group in members]


def build_channels(config: ScenarioConfig, seed: int) -> Tuple[Channel, ...]:
    """C0 plus ``channels.count`` licensed channels; each bandwidth has its own stream"""
    cfg = config.channels
    cad_mode = CadMode(cfg.cad_mode)
    channels = [Channel(0, cfg.c0_bandwidth_hz, cfg.noise_density_w_per_hz * cfg.c0_bandwidth_hz)]
    false_alarm, fused = cfg.false_alarm_prob, cfg.false_alarm_fused
    sensing = config.sensing
    if sensing.model == 'energy_detector':
        false_alarm = false_alarm_probability(sensing.threshold_ratio, 1.0, sensing.sense_duration_s,
                                              sensing.sample_rate_hz)
        fused = False
    for channel_id in range(1, cfg.count + 1):
        rng = stream(seed, Purpose.BANDWIDTH, slot=channel_slot(channel_id))
        bandwidth = max(float(rng.normal(cfg.bandwidth_mean_hz, math.sqrt(cfg.bandwidth_var_hz2))),
                        MIN_BANDWIDTH_HZ)
        channels.append(Channel(
            id=channel_id,
            bandwidth_hz=bandwidth,
            noise_power_w=cfg.noise_density_w_per_hz * bandwidth,
            mean_idle_s=cfg.mean_idle_s,
            mean_busy_s=cfg.mean_busy_s,
            false_alarm_prob=false_alarm,
            false_alarm_fused=fused,
            cad_mode=cad_mode,
            cad_mean_s=cfg.cad_mean_s,
            cad_var_s2=cfg.cad_var_s2,
        ))
    return tuple(channels)


def _detection(config: ScenarioConfig, seed: int, channels: Sequence[Channel],
               count: int) -> Tuple[List[Dict[int, float]], List[Dict[int, float]]]:
    """Per-node p_d and p_f maps for every licensed channel"""
    sensing = config.sensing
    p_d: List[Dict[int, float]] = [{} for _ in range(count)]
    p_f: List[Dict[int, float]] = [{} for _ in range(count)]
    for channel in channels:
        if not channel.is_licensed:
            continue
        if sensing.model != 'energy_detector':
            for node in range(count):
                p_d[node][channel.id] = sensing.detection_prob
            continue
        rng = stream(seed, Purpose.DETECTION, slot=channel_slot(channel.id))
        snr_db = sensing.pu_snr_db + rng.normal(0.0, sensing.snr_spread_db, size=count)
        for node in range(count):
            probability = detection_probability(sensing.threshold_ratio, 1.0, 10.0 ** (snr_db[node] / 10.0),
                                                sensing.sense_duration_s, sensing.sample_rate_hz)
            p_d[node][channel.id] = min(max(probability, 1e-12), 1.0)
            p_f[node][channel.id] = channel.false_alarm_prob
    return p_d, p_f


def sample_topology(config: ScenarioConfig, seed: int) -> Network:
    """Deploy the network of ``seed``: positions, clusters, channels, gains and sensing quality"""
    topology = config.topology
    positions = place_nodes(topology.node_count, topology.radius_m, stream(seed, Purpose.POSITIONS))
    heads = select_heads(positions, topology.cluster_count, topology.radius_m)
    groups = assign_members(positions, heads, config.sensing.coop_set_size)
    channels = build_channels(config, seed)

    cluster_of = {}
    destination = np.zeros_like(positions)
    for cluster_id, (head, group) in enumerate(zip(heads, groups)):
        cluster_of[head] = cluster_id
        for node in group:
            cluster_of[node] = cluster_id
            destination[node] = positions[head]
    distances = np.linalg.norm(positions - destination, axis=1)

    link_gains = draw_gains(distances, stream(seed, Purpose.GAINS), topology.path_loss_exponent)
    gains = [{channel.id: float(link_gains[node]) for channel in channels} for node in range(topology.node_count)]
    p_d, p_f = _detection(config, seed, channels, topology.node_count)

    head_set = set(heads)
    nodes = {}
    for node in range(topology.node_count):
        power = topology.head_power_w if node in head_set else topology.member_power_w
        nodes[node] = SensorNode(
            id=node,
            cluster_id=cluster_of[node],
            tx_power_w=power,
            circuit_power_w=topology.circuit_power_w,
            data_bits=0.0,
            detection_prob=p_d[node],
            link_gain=gains[node],
            false_alarm_prob=p_f[node],
            position=(float(positions[node, 0]), float(positions[node, 1])),
        )
    clusters = tuple((head, tuple(group)) for head, group in zip(heads, groups))
    logger.debug("seed %d: %d nodes in %d clusters, %d licensed channels",
                 seed, topology.node_count, len(clusters), len(channels) - 1)
    return Network(nodes=nodes, clusters=clusters, channels=channels)


def with_data(node: SensorNode, bits: float) -> SensorNode:
    return replace(node, data_bits=bits)
