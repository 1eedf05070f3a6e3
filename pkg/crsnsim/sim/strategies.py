#!/usr/bin/env python3
"""
Channel access strategies compared by the simulator

PROPOSED  senses expected-accessible channels cheapest first and allocates optimally
C0_ONLY   never leaves the license-free channel
ASA       always senses and accesses, widest bandwidth first
AVERAGE   proposed decision rule, but CAD split equally (heads at P_max)
"""

from dataclasses import dataclass
from enum import Enum
from typing import List

from ..core.config import SolverConfig
from ..optim.inter import acs_allocator, average_power_time
from ..optim.intra import ChannelProspect, average_allocation, order_by_expected_energy, tap_solve_greedy


class StrategyKind(Enum):
    PROPOSED = "proposed"
    C0_ONLY = "c0_only"
    ASA = "asa"
    AVERAGE = "average"


def order_by_bandwidth(prospects: List[ChannelProspect]) -> List[ChannelProspect]:
    """Every licensed channel, widest first, ties by channel id"""
    return sorted(prospects, key=lambda p: (-p.bandwidth_hz, p.channel_id))


def never_sense(prospects: List[ChannelProspect]) -> List[ChannelProspect]:
    return []


@dataclass(frozen=True)
class Strategy:
    kind: StrategyKind
    solver: SolverConfig

    @classmethod
    def named(cls, name: str, solver: SolverConfig) -> "Strategy":
        return cls(StrategyKind(name), solver)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def senses(self) -> bool:
        return self.kind is not StrategyKind.C0_ONLY

    def order(self):
        if self.kind is StrategyKind.C0_ONLY:
            return never_sense
        if self.kind is StrategyKind.ASA:
            return order_by_bandwidth
        return order_by_expected_energy

    def intra_allocator(self):
        if self.kind is StrategyKind.AVERAGE:
            return average_allocation
        return tap_solve_greedy

    def inter_allocator(self):
        if self.kind is StrategyKind.AVERAGE:
            return average_power_time
        return acs_allocator(self.solver.acs_tolerance_j, self.solver.acs_max_iterations)
