#!/usr/bin/env python3
"""
Counter-based random streams

Every draw comes from a generator keyed by (root seed, purpose, period,
slot). Strategies are not part of the key, so all strategies of a run see
the same channel states, losses and backlogs, and adding one never shifts
another's draws.
"""

from enum import IntEnum

import numpy as np

# slot 0 is network-wide; cluster i and channel x use i + 1 and x + 1
NETWORK_SLOT = 0


class Purpose(IntEnum):
    POSITIONS = 1
    BANDWIDTH = 2
    GAINS = 3
    DETECTION = 4
    CAD = 5
    LOSS = 6
    BACKLOG = 7
    INTRA = 8
    INTER = 9
    INSTANCES = 10


def stream(seed: int, purpose: Purpose, period: int = 0, slot: int = NETWORK_SLOT) -> np.random.Generator:
    """Independent generator for one (purpose, period, slot) of ``seed``"""
    sequence = np.random.SeedSequence(seed, spawn_key=(int(purpose), period, slot))
    return np.random.default_rng(sequence)


def cluster_slot(cluster_id: int) -> int:
    return cluster_id + 1


def channel_slot(channel_id: int) -> int:
    return channel_id + 1
