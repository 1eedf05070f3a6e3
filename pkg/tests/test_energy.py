#!/usr/bin/env python3
"""
Rates, transmit/receive energy and the C0-only baselines
"""

from dataclasses import replace

import numpy as np
import pytest

from crsnsim.core.errors import DomainError
from crsnsim.radio.energy import (EnergyRate, aggregate_backlog, baseline_inter_energy, baseline_inter_ledger,
                                  baseline_intra_energy, baseline_intra_ledger, c0_transfer_energy,
                                  head_energy_rate, intra_energy_rate, link_rate, reception_energy,
                                  transmission_energy, transmission_rate)

from .builders import make_cluster, make_node

ER1_DEFAULT = 5e-9 + 0.025 / (0.9 * 1e6)


def test_transmission_rate():
    assert transmission_rate(1e6, 1.0, 0.0, 1.0) == 0.0
    assert transmission_rate(1e6, 3.0, 1.0, 1.0) == pytest.approx(2e6)
    assert transmission_rate(1e6, 1.0, 1.0, 1.0) == pytest.approx(1e6)
    with pytest.raises(DomainError):
        transmission_rate(0.0, 1.0, 1.0, 1.0)


def test_rate_is_concave_and_increasing_in_power():
    powers = np.linspace(0.0, 0.2, 201)
    rates = np.array([transmission_rate(2e6, 1e-6, p, 2e-8) for p in powers])
    assert np.all(np.diff(rates) > 0)
    assert np.all(np.diff(rates, 2) <= 1e-6)


def test_sub_bit_links_count_as_dead(channel_c0):
    node = make_node(1, snr={0: 1e-9})
    assert link_rate(node, channel_c0) == 0.0


def test_transmission_energy():
    assert transmission_energy(0.02, 0.005, 0.9, 0.0) == 0.0
    assert transmission_energy(0.02, 0.005, 0.9, 1.0) == pytest.approx(0.0277777777778)
    assert transmission_energy(0.02, 0.0, 1.0, 3.0) == pytest.approx(0.06, rel=1e-15)
    with pytest.raises(DomainError):
        transmission_energy(0.02, 0.005, 0.9, -1.0)


def test_reception_energy():
    assert reception_energy(5e-9, 0) == 0
    assert reception_energy(5e-9, 5000) == pytest.approx(25e-6)
    assert reception_energy(5e-9, 10000) == pytest.approx(2 * reception_energy(5e-9, 5000))


def test_intra_energy_rate(params, channel_c0):
    node = make_node(1)
    assert intra_energy_rate(node, channel_c0, params).value == pytest.approx(ER1_DEFAULT)
    assert intra_energy_rate(node, channel_c0, params).value == pytest.approx(32.78e-9, rel=1e-3)
    silent = replace(params, rx_energy_j_per_bit=0.0)
    assert intra_energy_rate(node, channel_c0, silent).value == pytest.approx(0.025 / 0.9e6)
    identity = intra_energy_rate(node, channel_c0, params).value - params.rx_energy_j_per_bit
    assert identity == pytest.approx(transmission_energy(0.02, 0.005, 0.9, 1 / 1e6))


def test_energy_rate_requires_usable_link(params, channel_c0):
    with pytest.raises(DomainError):
        intra_energy_rate(make_node(1, snr={0: 0.0}), channel_c0, params)
    with pytest.raises(DomainError):
        EnergyRate(0.0)


def test_baseline_intra_hand_value(params, channel_c0):
    cluster = make_cluster(members=1, loss=0.2)
    assert baseline_intra_energy(cluster, channel_c0, params) == pytest.approx(204.86e-6, rel=1e-4)


def test_baseline_intra_loss_scaling(params, channel_c0):
    lossless = baseline_intra_energy(make_cluster(members=3, loss=0.0), channel_c0, params)
    assert lossless == pytest.approx(3 * 5000 * ER1_DEFAULT)
    halved = baseline_intra_energy(make_cluster(members=3, loss=0.5), channel_c0, params)
    assert halved == pytest.approx(2 * lossless, rel=1e-12)


def test_baseline_intra_uses_residual(params, channel_c0):
    cluster = make_cluster(members=2, loss=0.0)
    drained = cluster.with_residual({1: 2500.0, 2: 0.0})
    assert baseline_intra_energy(drained, channel_c0, params) == pytest.approx(2500 * ER1_DEFAULT)


def test_baseline_intra_decomposes_into_tx_and_rx(params, channel_c0):
    rng = np.random.default_rng(17)
    for _ in range(50):
        cluster = make_cluster(members=4, loss=float(rng.uniform(0, 0.9)), bits=float(rng.uniform(100, 1e4)),
                               snr={0: float(rng.uniform(0.1, 10))})
        ledger = baseline_intra_ledger(cluster, channel_c0, params)
        assert ledger.total() == pytest.approx(baseline_intra_energy(cluster, channel_c0, params), rel=1e-12)
        assert ledger.bits_delivered == pytest.approx(cluster.total_residual_bits)


def test_baselines_are_monotone(params, channel_c0):
    losses = [baseline_intra_energy(make_cluster(loss=loss), channel_c0, params) for loss in (0.0, 0.2, 0.6)]
    assert losses == sorted(losses)
    data = [baseline_intra_energy(make_cluster(bits=bits), channel_c0, params) for bits in (10.0, 1e3, 1e4)]
    assert data == sorted(data)


def test_baseline_inter(params, channel_c0):
    full = aggregate_backlog(make_cluster(members=2, aggregation=1.0, head_loss=0.0))
    head_rate = head_energy_rate(full.head, channel_c0, params).value
    assert baseline_inter_energy([full], channel_c0, params) == pytest.approx(10000 * head_rate)

    reduced = aggregate_backlog(make_cluster(members=2, aggregation=0.7, head_loss=0.0))
    assert baseline_inter_energy([reduced], channel_c0, params) == pytest.approx(
        0.7 * baseline_inter_energy([full], channel_c0, params))

    lossy = aggregate_backlog(make_cluster(members=2, aggregation=0.7, head_loss=0.5))
    assert baseline_inter_energy([lossy], channel_c0, params) == pytest.approx(
        2 * baseline_inter_energy([reduced], channel_c0, params))
    ledger = baseline_inter_ledger([lossy, reduced], channel_c0, params)
    assert ledger.total() == pytest.approx(baseline_inter_energy([lossy, reduced], channel_c0, params))


def test_c0_transfer_energy_attempts(params, channel_c0):
    node = make_node(1)
    expected = c0_transfer_energy(node, 1000.0, 0.5, channel_c0, params)
    twice = c0_transfer_energy(node, 1000.0, 0.5, channel_c0, params, attempts=2.0)
    assert expected == pytest.approx(twice)
    assert c0_transfer_energy(node, 0.0, 0.5, channel_c0, params) == (0.0, 0.0)

