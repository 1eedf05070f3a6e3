#!/usr/bin/env python3
"""
Shared fixtures for the crsnsim test suite
"""

import pytest

from crsnsim.core.config import ConfigManager
from crsnsim.core.types import Channel, CognitiveParams

from .builders import NOISE_DENSITY, licensed_channel, make_cluster


@pytest.fixture
def params():
    """Cognitive parameters of the default scenario"""
    return CognitiveParams(
        sense_energy_j=1.31e-4,
        switch_energy_j=1e-5,
        rx_energy_j_per_bit=5e-9,
        amplifier_efficiency=0.9,
        pu_protection=0.05,
        interference_threshold=0.05,
        coop_set_size=3,
        max_power_w=0.2,
    )


@pytest.fixture
def channel_c0():
    return Channel(0, 1e6, NOISE_DENSITY * 1e6)


@pytest.fixture
def channel_x():
    return licensed_channel()


@pytest.fixture
def cluster():
    return make_cluster()


@pytest.fixture
def small_scenario():
    """Default scenario shrunk to a few seconds of simulation"""
    return ConfigManager.from_dict({
        'topology': {'node_count': 40, 'cluster_count': 4},
        'channels': {'count': 3},
        'run': {'periods': 2, 'seeds': 2},
    })
