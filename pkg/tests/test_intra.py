#!/usr/bin/env python3
"""
Intra-cluster TAP, expected energy and the sense-access-fallback controller
"""

import math

import numpy as np
import pytest

from crsnsim.core.errors import DomainError
from crsnsim.core.types import AccountingMode, CadMode, ClusterState, PhaseMode, SensingMode
from crsnsim.optim.intra import (C0_TRANSCRIPT_ID, ChannelProspect, average_allocation,
                                 channel_prospects, direct_intra_energy, expected_intra_energy,
                                 accessible_channels, order_by_expected_energy, resolve_cad, run_intra_phase,
                                 tap_caps, tap_coefficients, tap_solve_greedy, tap_solve_lp)
from crsnsim.radio.energy import baseline_intra_energy, baseline_intra_ledger
from crsnsim.radio.spectrum import fused_probabilities, success_probability

from .builders import ScriptedRng, licensed_channel, make_cluster, make_node


def mixed_cluster(snrs, loss=0.2):
    """Cluster whose members see licensed SNRs ``snrs`` (C0 SNR stays 1)"""
    head = make_node(0, power=0.04, bits=0.0)
    members = tuple(make_node(k + 1, snr={0: 1.0, 1: s}) for k, s in enumerate(snrs))
    return ClusterState(0, head, members, {m.id: loss for m in members}, 0.2, 0.7)


def test_tap_coefficient_by_hand(cluster, channel_x, channel_c0, params):
    coefficients = tap_coefficients(cluster, channel_x, channel_c0, params)
    er1 = 5e-9 + 0.025 / 0.9e6
    expected = 0.025 / 0.9 - 4e6 * er1 / 0.8
    assert coefficients == pytest.approx([expected] * 4)
    assert tap_caps(cluster, channel_x) == pytest.approx([5000 / 4e6] * 4)


def test_ample_cad_drains_every_member(cluster, channel_x, channel_c0, params):
    allocation = tap_solve_greedy(cluster, channel_x, 0.1, channel_c0, params)
    assert allocation.per_member_time_s == pytest.approx((1.25e-3,) * 4)
    # everything leaves on the licensed channel: only licensed transmit energy remains
    assert allocation.objective_j == pytest.approx(4 * 0.025 / 0.9 * 1.25e-3)
    assert allocation.baseline_j == pytest.approx(baseline_intra_energy(cluster, channel_c0, params))


def test_zero_cad_is_the_baseline(cluster, channel_x, channel_c0, params):
    allocation = tap_solve_greedy(cluster, channel_x, 0.0, channel_c0, params)
    assert allocation.total_time_s == 0.0
    assert allocation.objective_j == allocation.baseline_j
    with pytest.raises(DomainError):
        tap_solve_greedy(cluster, channel_x, -1.0, channel_c0, params)


def test_allocation_respects_cad_and_caps(channel_x, channel_c0, params):
    cluster = mixed_cluster([0.5, 1.0, 3.0, 7.0, 15.0])
    caps = tap_caps(cluster, channel_x)
    for cad in (0.0, 1e-4, 5e-4, 2e-3, 1.0):
        allocation = tap_solve_greedy(cluster, channel_x, cad, channel_c0, params)
        times = np.array(allocation.per_member_time_s)
        assert times.sum() <= cad + 1e-12
        assert np.all(times >= 0) and np.all(times <= caps + 1e-12)


def test_greedy_and_simplex_agree(channel_x, channel_c0, params):
    rng = np.random.default_rng(3)
    for _ in range(50):
        cluster = mixed_cluster(rng.uniform(0.2, 20.0, int(rng.integers(3, 8))),
                                loss=float(rng.uniform(0.0, 0.6)))
        cad = float(rng.uniform(0.0, 5e-3))
        greedy = tap_solve_greedy(cluster, channel_x, cad, channel_c0, params)
        simplex = tap_solve_lp(cluster, channel_x, cad, channel_c0, params)
        assert greedy.objective_j == pytest.approx(simplex.objective_j, rel=1e-9)


def test_objective_matches_direct_accounting(channel_x, channel_c0, params):
    cluster = mixed_cluster([0.5, 2.0, 9.0])
    for cad in (2e-4, 8e-4, 1e-2):
        allocation = tap_solve_greedy(cluster, channel_x, cad, channel_c0, params)
        direct = direct_intra_energy(cluster, channel_x, allocation.per_member_time_s, channel_c0, params)
        assert allocation.objective_j == pytest.approx(direct, rel=1e-12)


def test_best_links_get_the_airtime_first(channel_x, channel_c0, params):
    cluster = mixed_cluster([0.5, 2.0, 9.0])
    allocation = tap_solve_greedy(cluster, channel_x, 1e-4, channel_c0, params)
    assert allocation.time_of(3) == pytest.approx(1e-4)
    assert allocation.time_of(1) == 0.0


def test_optimal_beats_average_split(channel_x, channel_c0, params):
    cluster = mixed_cluster([0.5, 2.0, 9.0, 20.0])
    for cad in (1e-4, 5e-4, 1e-3):
        optimal = tap_solve_greedy(cluster, channel_x, cad, channel_c0, params)
        average = average_allocation(cluster, channel_x, cad, channel_c0, params)
        assert optimal.objective_j <= average.objective_j + 1e-15


def test_average_split_by_hand(cluster, channel_x, channel_c0, params):
    allocation = average_allocation(cluster, channel_x, 1e-3, channel_c0, params)
    assert allocation.per_member_time_s == pytest.approx((2.5e-4,) * 4)
    drained = cluster.with_residual({member_id: 0.0 for member_id in cluster.member_ids})
    assert average_allocation(drained, channel_x, 1e-3, channel_c0, params).total_time_s == 0.0


def test_expected_energy_two_branches(cluster, channel_c0, params):
    channel = licensed_channel(p_on=0.01)
    allocation = tap_solve_greedy(cluster, channel, 0.1, channel_c0, params)
    fused = fused_probabilities(channel, cluster.members[:3])
    f_s = 0.99 * 0.95
    assert success_probability(channel, fused[1]) == pytest.approx(f_s)
    sensing = 3 * 1.31e-4
    switching = 8 * 1e-5
    expected = f_s * (allocation.objective_j + sensing + switching) + (1 - f_s) * (allocation.baseline_j + sensing)
    assert expected_intra_energy(cluster, channel, allocation, params, fused) == pytest.approx(expected)


def test_busy_channel_only_worth_it_on_a_lossy_c0(channel_c0, params):
    busy = licensed_channel(p_on=0.6)
    clean = make_cluster(loss=0.2)
    lossy = make_cluster(loss=0.6)
    assert not channel_prospects(clean, [channel_c0, busy], params)[0].accessible
    assert channel_prospects(lossy, [channel_c0, busy], params)[0].accessible
    quiet = licensed_channel(p_on=0.01)
    assert channel_prospects(clean, [channel_c0, quiet], params)[0].accessible
    assert accessible_channels(make_cluster(loss=0.0), [channel_c0, busy], params) == []


def test_prospects_need_channel_zero(cluster, channel_x, params):
    with pytest.raises(DomainError):
        channel_prospects(cluster, [channel_x], params)


def test_resolve_cad_sources(params):
    fixed = licensed_channel(cad_s=0.25)
    assert resolve_cad(fixed, 0.05, params) == 0.25
    assert resolve_cad(fixed, 0.05, params, {1: 0.4}) == 0.4
    derived = licensed_channel(p_on=0.6, cad_mode=CadMode.DERIVED)
    assert resolve_cad(derived, 0.05, params) == pytest.approx(-0.7 * math.log(1 - 0.05 / (0.4 * 0.95)))
    crowded = licensed_channel(p_on=0.97, cad_mode=CadMode.DERIVED)
    assert resolve_cad(crowded, 0.05, params) == math.inf


def test_order_keeps_accessible_cheapest_first():
    prospects = [ChannelProspect(3, 2e-4, None, True), ChannelProspect(1, 5e-4, None, False),
                 ChannelProspect(2, 2e-4, None, True), ChannelProspect(4, 1e-4, None, True)]
    assert [p.channel_id for p in order_by_expected_energy(prospects)] == [4, 2, 3]


def test_no_licensed_channel_falls_back_to_c0(cluster, channel_c0, params):
    result = run_intra_phase(cluster, [channel_c0], params, PhaseMode(), np.random.default_rng(0))
    baseline = baseline_intra_ledger(cluster, channel_c0, params)
    assert result.ledger.total() == pytest.approx(baseline.total())
    assert [r.channel_id for r in result.records] == [C0_TRANSCRIPT_ID]
    assert result.clusters[0].total_residual_bits == 0.0


def test_unattractive_channel_is_never_sensed(cluster, channel_c0, params):
    busy = licensed_channel(p_on=0.6)
    result = run_intra_phase(cluster, [channel_c0, busy], params, PhaseMode(), np.random.default_rng(0))
    assert result.ledger.channels_sensed == 0
    assert result.ledger.total() == pytest.approx(baseline_intra_energy(cluster, channel_c0, params))


def test_every_bit_is_delivered_once(channel_c0, params):
    cluster = make_cluster(channels=(0, 1, 2))
    channels = [channel_c0, licensed_channel(1, p_on=0.01), licensed_channel(2, p_on=0.3)]
    for seed in range(30):
        mode = PhaseMode(SensingMode.STRICT, AccountingMode.SAMPLED)
        result = run_intra_phase(cluster, channels, params, mode, np.random.default_rng(seed))
        assert result.ledger.bits_delivered == pytest.approx(20000.0)
        assert result.clusters[0].total_residual_bits == 0.0
        assert sum(r.ledger.total() for r in result.records) == pytest.approx(result.ledger.total())


def test_access_saves_energy_when_the_channel_is_quiet(cluster, channel_c0, params):
    channels = [channel_c0, licensed_channel(1, p_on=0.01)]
    baseline = baseline_intra_energy(cluster, channel_c0, params)
    accessed = 0
    for seed in range(20):
        result = run_intra_phase(cluster, channels, params, PhaseMode(), np.random.default_rng(seed))
        if result.ledger.accesses:
            accessed += 1
            assert result.ledger.total() < baseline
            assert result.ledger.switching_j == pytest.approx(8e-5)
    assert accessed > 10


def test_paper_sensing_never_interferes(channel_c0, params):
    channels = [channel_c0, licensed_channel(1, p_on=0.3, cad_s=5.0)]
    lossy = make_cluster(loss=0.6)
    for seed in range(20):
        result = run_intra_phase(lossy, channels, params, PhaseMode(), np.random.default_rng(seed))
        assert result.ledger.interference_events == 0


def test_derived_cad_keeps_interference_near_the_protection_target(channel_c0, params):
    # members hold far more data than one CAD carries, so every access uses the whole CAD
    cluster = make_cluster(bits=1e6, loss=0.6)
    channels = [channel_c0, licensed_channel(p_on=0.6, cad_mode=CadMode.DERIVED)]
    mode = PhaseMode(SensingMode.STRICT, AccountingMode.SAMPLED, max_access_rounds=1)
    rng = np.random.default_rng(11)
    sensed = events = 0
    for _ in range(10000):
        ledger = run_intra_phase(cluster, channels, params, mode, rng).ledger
        sensed += ledger.channels_sensed
        events += ledger.interference_events
    assert sensed == 10000
    # CAD bounds the idle-then-return case at p_r; misdetection adds p_on * (1 - p_d)^3
    target = params.pu_protection + 0.6 * 0.1 ** 3
    sigma = math.sqrt(target * (1 - target) / sensed)
    assert events / sensed <= target + 3 * sigma


def test_idle_access_costs_the_optimum_plus_overheads(channel_c0, params):
    lossy = make_cluster(loss=0.6)
    channel = licensed_channel(p_on=0.6, cad_s=5.0)
    result = run_intra_phase(lossy, [channel_c0, channel], params, PhaseMode(), ScriptedRng(0.0))
    optimum = tap_solve_greedy(lossy, channel, 5.0, channel_c0, params).objective_j
    assert result.ledger.channels_sensed == 1 and result.ledger.accesses == 1
    assert result.ledger.total() == pytest.approx(optimum + 3 * 1.31e-4 + 2 * 4 * 1e-5, rel=1e-9)


def test_busy_channels_cost_the_baseline_plus_sensing(channel_c0, params):
    lossy = make_cluster(loss=0.6, channels=(0, 1, 2))
    channels = [channel_c0, licensed_channel(1, p_on=0.6), licensed_channel(2, p_on=0.6)]
    result = run_intra_phase(lossy, channels, params, PhaseMode(), ScriptedRng(0.999999))
    assert result.ledger.channels_sensed == 2 and result.ledger.accesses == 0
    expected = baseline_intra_energy(lossy, channel_c0, params) + 2 * 3 * 1.31e-4
    assert result.ledger.total() == pytest.approx(expected, rel=1e-9)


def test_optimal_and_average_meet_once_every_member_drains(channel_x, channel_c0, params):
    cluster = mixed_cluster([1.0, 3.0, 8.0, 20.0], loss=0.4)
    caps = tap_caps(cluster, channel_x)
    knee = len(caps) * caps.max()
    for cad in np.linspace(0.0, 1.5 * knee, 16):
        optimal = tap_solve_greedy(cluster, channel_x, cad, channel_c0, params).objective_j
        average = average_allocation(cluster, channel_x, cad, channel_c0, params).objective_j
        assert optimal <= average + 1e-15
        if cad >= knee:
            assert optimal == pytest.approx(average, rel=1e-3)
    half = caps.sum() / 2
    assert (tap_solve_greedy(cluster, channel_x, half, channel_c0, params).objective_j
            < average_allocation(cluster, channel_x, half, channel_c0, params).objective_j)
