#!/usr/bin/env python3
"""
Solver cross-checks

Random default-scale instances are solved twice, once by the production
solver and once by an independent method (dense simplex, scipy HiGHS, 1-D
bounded minimisation, finite differences). Each suite returns an
``OracleCheck`` summarising agreement.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import linprog, minimize_scalar

from ..core.types import Channel, ClusterState, CognitiveParams, SensorNode
from ..radio.energy import aggregate_backlog
from .inter import (acs_solve, head_links, optimal_power_given_time, optimal_time_given_power,
                    power_cap, power_cost, power_cost_derivative, time_coefficients)
from .intra import tap_caps, tap_coefficients, tap_solve_greedy, tap_solve_lp
from .lp import box_budget_matrices, solve_box_budget, solve_box_budget_simplex

logger = logging.getLogger(__name__)

NOISE_DENSITY_W_PER_HZ = 1e-14


@dataclass
class OracleCheck:
    """Agreement statistics of one cross-check suite"""
    name: str
    instances: int = 0
    failures: int = 0
    max_error: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, error: float, limit: float, label: str):
        self.instances += 1
        self.max_error = max(self.max_error, error)
        if not error <= limit:
            self.failures += 1
            if len(self.notes) < 5:
                self.notes.append(f"{label}: error {error:.3g} exceeds {limit:.1g}")


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def random_channels(rng, licensed: int = 1) -> List[Channel]:
    """C0 at 1 MHz plus ``licensed`` channels with N(2, 0.5) MHz bandwidth"""
    channels = [Channel(0, 1e6, NOISE_DENSITY_W_PER_HZ * 1e6)]
    for channel_id in range(1, licensed + 1):
        bandwidth = max(rng.normal(2e6, math.sqrt(0.5) * 1e6), 1e5)
        channels.append(Channel(channel_id, bandwidth, NOISE_DENSITY_W_PER_HZ * bandwidth,
                                mean_idle_s=0.7, mean_busy_s=1.05, false_alarm_prob=0.05))
    return channels


def _random_node(rng, node_id: int, cluster_id: int, power: float, channels: Sequence[Channel],
                 data_bits: float) -> SensorNode:
    distance = rng.uniform(10.0, 250.0)
    gains = {c.id: float(rng.exponential(1.0) * distance ** -3.0) for c in channels}
    return SensorNode(node_id, cluster_id, tx_power_w=power, circuit_power_w=0.005, data_bits=data_bits,
                      detection_prob={c.id: 0.9 for c in channels if c.is_licensed}, link_gain=gains)


def random_cluster(rng, channels: Sequence[Channel], members: int, cluster_id: int = 0,
                   first_node_id: int = 0, max_loss: float = 0.9) -> ClusterState:
    """A cluster with ``members`` random members at 20 mW and a 40 mW head"""
    head = _random_node(rng, first_node_id, cluster_id, 0.04, channels, 0.0)
    nodes = tuple(
        _random_node(rng, first_node_id + 1 + k, cluster_id, 0.02, channels,
                     max(rng.normal(5000.0, math.sqrt(0.5) * 1000.0), 0.0))
        for k in range(members))
    return ClusterState(
        cluster_id=cluster_id,
        head=head,
        members=nodes,
        packet_loss_c0={node.id: float(rng.uniform(0.0, max_loss)) for node in nodes},
        head_loss_c0=float(rng.uniform(0.0, max_loss)),
        aggregation_rate=0.7,
    )


def random_heads(rng, channels: Sequence[Channel], heads: int, members: int = 5) -> List[ClusterState]:
    """``heads`` clusters with aggregated backlogs loaded onto their heads"""
    return [aggregate_backlog(random_cluster(rng, channels, members, cluster_id=i,
                                             first_node_id=i * (members + 1)))
            for i in range(heads)]


def _highs_objective(coefficients, caps, budget) -> float:
    a_ub, b_ub = box_budget_matrices(caps, budget)
    result = linprog(coefficients, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * len(caps), method="highs")
    return float(result.fun)


def tap_oracle(instances: int, rng, params: CognitiveParams) -> List[OracleCheck]:
    """Greedy TAP against the dense simplex and against HiGHS"""
    simplex = OracleCheck("tap greedy vs simplex")
    highs = OracleCheck("tap greedy vs highs")
    for k in range(instances):
        channels = random_channels(rng)
        cluster = random_cluster(rng, channels, int(rng.integers(1, 11)))
        cad = float(rng.uniform(0.0, 0.2))
        greedy = tap_solve_greedy(cluster, channels[1], cad, channels[0], params)
        lp = tap_solve_lp(cluster, channels[1], cad, channels[0], params)
        simplex.record(_relative(greedy.objective_j, lp.objective_j), 1e-9, f"instance {k}")
        coefficients = tap_coefficients(cluster, channels[1], channels[0], params)
        reference = greedy.baseline_j + _highs_objective(coefficients, tap_caps(cluster, channels[1]), cad)
        highs.record(_relative(greedy.objective_j, reference), 1e-7, f"instance {k}")
    return [simplex, highs]


def time_step_oracle(instances: int, rng, params: CognitiveParams) -> List[OracleCheck]:
    """Inter-cluster time step at random powers against the dense simplex"""
    check = OracleCheck("time step greedy vs simplex")
    for k in range(instances):
        channels = random_channels(rng)
        clusters = random_heads(rng, channels, int(rng.integers(1, 11)), members=3)
        powers = rng.uniform(0.0, params.max_power_w, size=len(clusters))
        cad = float(rng.uniform(0.0, 0.2))
        coefficients, caps = time_coefficients(clusters, channels[1], powers, channels[0], params)
        greedy = solve_box_budget(coefficients, caps, cad)
        lp = solve_box_budget_simplex(coefficients, caps, cad)
        scale = max(abs(greedy.objective), abs(lp.objective), 1e-12)
        check.record(abs(greedy.objective - lp.objective) / scale, 1e-9, f"instance {k}")
        times = optimal_time_given_power(clusters, channels[1], powers, cad, channels[0], params)
        if not np.allclose(times, greedy.x):
            check.failures += 1
    return [check]


def power_step_oracle(instances: int, rng, params: CognitiveParams) -> List[OracleCheck]:
    """Closed-form power step against bounded 1-D minimisation, and f' against central differences"""
    minimiser = OracleCheck("power step vs bounded minimisation")
    derivative = OracleCheck("power derivative vs central differences")
    eta = params.amplifier_efficiency
    for k in range(instances):
        channels = random_channels(rng)
        clusters = random_heads(rng, channels, 1, members=3)
        link = head_links(clusters, channels[1], channels[0], params)[0]
        t = float(rng.uniform(1e-3, 0.1))
        closed = float(optimal_power_given_time(clusters, channels[1], [t], channels[0], params)[0])
        cap = power_cap(link, t, params.max_power_w)
        if cap > 0:
            numeric = minimize_scalar(lambda p: power_cost(link, p, 1.0, eta), bounds=(0.0, cap),
                                      method="bounded", options={"xatol": 1e-10}).x
            minimiser.record(abs(closed - float(numeric)), 1e-6, f"instance {k}")
        for power in np.logspace(-4, math.log10(params.max_power_w), 5):
            step = power * 1e-5
            numeric = (power_cost(link, power + step, t, eta) - power_cost(link, power - step, t, eta)) / (2 * step)
            analytic = power_cost_derivative(link, power, t, eta)
            derivative.record(abs(numeric - analytic) / max(abs(analytic), 1e-3 * t / eta), 1e-6,
                              f"instance {k} at {power:.3g} W")
    return [minimiser, derivative]


def acs_oracle(instances: int, rng, params: CognitiveParams, heads: int = 10,
               tolerance: float = 1e-6, max_iterations: int = 50) -> List[OracleCheck]:
    """ACS objective must never increase and must converge on default-scale instances"""
    monotone = OracleCheck("acs objective non-increasing")
    convergence = OracleCheck("acs convergence")
    iterations = []
    for k in range(instances):
        channels = random_channels(rng)
        clusters = random_heads(rng, channels, heads)
        cad = float(max(rng.normal(0.1, math.sqrt(20e-6)), 1e-3))
        result = acs_solve(clusters, channels[1], cad, channels[0], params, tolerance, max_iterations)
        rises = np.diff(np.asarray(result.history))
        monotone.record(float(max(rises.max(initial=0.0), 0.0)), 1e-12, f"instance {k}")
        convergence.record(0.0 if result.converged else 1.0, 0.0, f"instance {k}")
        iterations.append(result.iterations)
    if iterations:
        convergence.notes.append(f"median iterations {float(np.median(iterations)):g}, "
                                 f"max {max(iterations)}")
    return [monotone, convergence]


SUITES = {
    'tap': tap_oracle,
    'time': time_step_oracle,
    'power': power_step_oracle,
    'acs': acs_oracle,
}


def run_oracles(instances: int, rng, params: CognitiveParams,
                on_suite: Optional[Callable[[str], None]] = None) -> List[OracleCheck]:
    """Run every suite; ACS uses a tenth of the instances since each solve is a full alternation"""
    checks: List[OracleCheck] = []
    for name, suite in SUITES.items():
        if on_suite:
            on_suite(name)
        count = max(instances // 10, 1) if name == 'acs' else instances
        checks.extend(suite(count, rng, params))
        logger.debug("oracle suite %s finished", name)
    return checks
