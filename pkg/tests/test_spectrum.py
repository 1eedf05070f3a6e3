#!/usr/bin/env python3
"""
PU activity, energy detection, fusion, protection and CAD
"""

import math

import numpy as np
import pytest

from crsnsim.core.errors import DomainError, InfeasibleProtection, UnboundedCad
from crsnsim.core.types import CadExponent, SensingMode
from crsnsim.radio.spectrum import (ChannelState, channel_available_duration, cooperative_fusion,
                                    detection_probability, false_alarm_probability, fused_probabilities,
                                    idle_probability, pu_protection_satisfied, q_function,
                                    sample_channel_state, sample_sensing_outcome, select_sensing_set)

from .builders import licensed_channel, make_cluster, make_node


def test_idle_probability():
    assert idle_probability(1.0, 1.0) == 0.5
    assert idle_probability(3.0, 1.0) == 0.75
    assert idle_probability(0.7, 1.05) == pytest.approx(0.4)
    with pytest.raises(DomainError):
        idle_probability(0.0, 1.0)


def test_q_function_matches_normal_tail():
    assert float(q_function(0.0)) == pytest.approx(0.5, abs=1e-15)
    assert float(q_function(2.0)) == pytest.approx(0.022750131948179, abs=1e-12)
    assert float(q_function(-1.0)) == pytest.approx(0.841344746068543, abs=1e-12)


def test_false_alarm_probability():
    assert false_alarm_probability(1.0, 1.0, 1e-3, 1e6) == pytest.approx(0.5)
    assert false_alarm_probability(3.0, 1.0, 1.0, 1.0) == pytest.approx(0.022750131948179, abs=1e-12)
    assert false_alarm_probability(1e6, 1.0, 1e-3, 1e6) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        false_alarm_probability(1.0, 0.0, 1e-3, 1e6)
    with pytest.raises(DomainError):
        false_alarm_probability(1.0, 1.0, 1e-7, 1e6)


def test_detection_probability():
    assert detection_probability(1.2, 1.0, 0.0, 1e-3, 1e6) == pytest.approx(
        false_alarm_probability(1.2, 1.0, 1e-3, 1e6))
    assert detection_probability(2.5, 1.0, 1.5, 1e-3, 1e6) == pytest.approx(0.5)
    assert detection_probability(2.0, 1.0, 1.5, 16.0, 1.0) == pytest.approx(0.841344746068543, abs=1e-12)
    with pytest.raises(DomainError):
        detection_probability(2.0, 1.0, -0.1, 1e-3, 1e6)


def test_cooperative_fusion():
    assert cooperative_fusion([0.7], [0.1]) == pytest.approx((0.7, 0.1))
    fused_d, _ = cooperative_fusion([0.9, 0.9, 0.9], [0.0, 0.0, 0.0])
    assert fused_d == pytest.approx(0.999)
    assert cooperative_fusion([0.3, 1.0], [0.1, 0.1])[0] == 1.0
    with pytest.raises(DomainError):
        cooperative_fusion([], [])
    with pytest.raises(DomainError):
        cooperative_fusion([0.5], [0.1, 0.2])


def test_fusion_is_monotone():
    rng = np.random.default_rng(11)
    for _ in range(200):
        pd = rng.random(3)
        pf = rng.random(3) * 0.5
        base = cooperative_fusion(pd, pf)
        appended = cooperative_fusion(np.append(pd, rng.random()), np.append(pf, 0.0))
        assert appended[0] >= base[0] and appended[1] >= base[1]
        raised = pd.copy()
        raised[0] = min(1.0, raised[0] + 0.1)
        assert cooperative_fusion(raised, pf)[0] >= base[0]
        assert base[1] >= pf.max() - 1e-15


def test_pu_protection():
    assert pu_protection_satisfied(0.0, [0.1], 0.05)
    assert not pu_protection_satisfied(0.6, [0.9], 0.05)
    assert pu_protection_satisfied(0.6, [0.9, 0.9], 0.05)
    assert pu_protection_satisfied(0.6, [0.9, 0.9, 0.2], 0.05)


def test_sensing_set_prefers_detection_then_low_ids(params, channel_x):
    cluster = make_cluster(members=5)
    assert select_sensing_set(cluster, channel_x, params) == (1, 2, 3)

    members = list(cluster.members)
    members[4] = make_node(5, p_d=0.99)
    members[3] = make_node(4, p_d=0.95)
    ranked = cluster.__class__(0, cluster.head, tuple(members), cluster.packet_loss_c0, 0.2, 0.7)
    assert select_sensing_set(ranked, channel_x, params) == (5, 4, 1)


def test_sensing_set_is_deterministic(params, channel_x):
    cluster = make_cluster(members=6)
    assert select_sensing_set(cluster, channel_x, params) == select_sensing_set(cluster, channel_x, params)


def test_sensing_set_infeasible(params, channel_x):
    weak = make_cluster(members=4)
    members = tuple(make_node(node.id, p_d=0.5) for node in weak.members)
    cluster = weak.__class__(0, weak.head, members, weak.packet_loss_c0, 0.2, 0.7)
    with pytest.raises(InfeasibleProtection):
        select_sensing_set(cluster, channel_x, params)


def test_sensing_set_needs_enough_members(params, channel_x):
    with pytest.raises(DomainError):
        select_sensing_set(make_cluster(members=2), channel_x, params)


def test_fused_probabilities_use_channel_false_alarm(channel_x):
    nodes = [make_node(k) for k in range(1, 4)]
    fused_d, fused_f = fused_probabilities(channel_x, nodes)
    assert fused_d == pytest.approx(0.999)
    assert fused_f == 0.05


def test_cad_hand_values():
    assert channel_available_duration(0.05, 0.4, 0.05, 0.2) == pytest.approx(0.0282157, rel=1e-5)
    ratio = 1.0 - math.exp(-1.0)
    assert channel_available_duration(ratio * 0.38, 0.4, 0.05, 0.2) == pytest.approx(0.2, rel=1e-12)
    assert channel_available_duration(1e-12, 0.4, 0.05, 0.2) < 1e-11


def test_cad_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(200):
        p_off = rng.uniform(0.2, 0.9)
        f_f = rng.uniform(0.0, 0.2)
        p_r = rng.uniform(1e-4, 0.99) * p_off * (1 - f_f)
        mean_idle = rng.uniform(0.01, 2.0)
        t = channel_available_duration(p_r, p_off, f_f, mean_idle)
        assert -math.expm1(-t / mean_idle) == pytest.approx(p_r / (p_off * (1 - f_f)), abs=1e-12)


def test_cad_monotonicity():
    values = [channel_available_duration(p_r, 0.4, 0.05, 0.7) for p_r in (0.01, 0.05, 0.1, 0.2)]
    assert values == sorted(values) and len(set(values)) == 4
    by_p_off = [channel_available_duration(0.05, p_off, 0.05, 0.7) for p_off in (0.3, 0.4, 0.6, 0.9)]
    assert by_p_off == sorted(by_p_off, reverse=True)


def test_cad_unbounded_and_domain_errors():
    with pytest.raises(UnboundedCad):
        channel_available_duration(0.5, 0.4, 0.05, 0.2)
    with pytest.raises(DomainError):
        channel_available_duration(0.0, 0.4, 0.05, 0.2)


def test_cad_raw_rate_reading():
    mean_inverse = channel_available_duration(0.05, 0.4, 0.05, 0.2)
    raw = channel_available_duration(0.05, 0.4, 0.05, 0.2, CadExponent.RAW_VX)
    assert raw == pytest.approx(mean_inverse / 0.2 ** 2)


def test_sample_channel_state_frequencies():
    rng = np.random.default_rng(2024)
    channel = licensed_channel(p_on=0.6, mean_idle_s=0.7)
    draws = [sample_channel_state(channel, rng) for _ in range(100_000)]
    busy = sum(1 for d in draws if not d.idle) / len(draws)
    assert busy == pytest.approx(0.6, abs=0.01)
    idle_times = [d.remaining_idle_s for d in draws if d.idle]
    assert np.mean(idle_times) == pytest.approx(0.7, rel=0.02)


def test_sample_channel_state_always_idle_and_c0(channel_c0):
    rng = np.random.default_rng(1)
    channel = licensed_channel(p_on=1e-12)
    assert all(sample_channel_state(channel, rng).idle for _ in range(1000))
    with pytest.raises(DomainError):
        sample_channel_state(channel_c0, rng)


def test_sample_sensing_outcome_modes():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        assert sample_sensing_outcome(ChannelState.IDLE, 0.9, 0.0, SensingMode.STRICT, rng).declared_idle
        assert not sample_sensing_outcome(ChannelState.BUSY, 0.0, 0.0, SensingMode.PAPER, rng).declared_idle
    slips = sum(sample_sensing_outcome(ChannelState.BUSY, 0.95, 0.05, SensingMode.STRICT, rng).misdetection
                for _ in range(100_000))
    assert slips / 100_000 == pytest.approx(0.05, abs=0.005)
