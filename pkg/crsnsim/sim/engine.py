#!/usr/bin/env python3
"""
Period-driven simulation engine

A period draws link losses, member backlogs and channel CADs, runs the
intra-cluster phase of every cluster and then the inter-cluster phase of
all heads, once per strategy on identical draws. ``run_scenario`` repeats
this over periods, sweep points and series for one seed.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.config import ScenarioConfig
from ..core.types import (CadMode, Channel, ClusterState, CognitiveParams, EnergyLedger, PhaseMode,
                          TranscriptRecord)
from ..core.validation import validate_scenario
from ..core.errors import ConfigError
from ..optim.inter import run_inter_phase
from ..optim.intra import run_intra_phase
from ..radio.energy import aggregate_backlog
from ..radio.spectrum import license_free_channel
from .streams import NETWORK_SLOT, Purpose, cluster_slot, stream
from .strategies import Strategy
from .topology import Network, sample_topology, with_data

logger = logging.getLogger(__name__)

MIN_CAD_S = 1e-3
MAX_LOSS = 0.99


@dataclass(frozen=True)
class PeriodInputs:
    """Random quantities of one period shared by all strategies"""
    period: int
    clusters: Tuple[ClusterState, ...]
    cads: Dict[int, float]


@dataclass
class PeriodRecord:
    period: int
    strategy: str
    intra: Dict[int, EnergyLedger]
    inter: EnergyLedger
    records: List[TranscriptRecord] = field(default_factory=list)

    @property
    def intra_total(self) -> EnergyLedger:
        total = EnergyLedger()
        for ledger in self.intra.values():
            total = total + ledger
        return total

    @property
    def total(self) -> EnergyLedger:
        return self.intra_total + self.inter


def _loss(mean: float, config: ScenarioConfig, rng, size: int) -> np.ndarray:
    if config.loss.distribution == 'uniform' and config.loss.spread > 0:
        draws = rng.uniform(mean - config.loss.spread, mean + config.loss.spread, size=size)
        return np.clip(draws, 0.0, MAX_LOSS)
    return np.full(size, mean)


def realise_period(network: Network, config: ScenarioConfig, seed: int, period: int) -> PeriodInputs:
    """Draw per-link losses, member backlogs and fixed-mode CADs for ``period``"""
    topology = config.topology
    data_sd = math.sqrt(topology.data_var_bits2)
    clusters = []
    for cluster_id, (head_id, member_ids) in enumerate(network.clusters):
        loss_rng = stream(seed, Purpose.LOSS, period, cluster_slot(cluster_id))
        backlog_rng = stream(seed, Purpose.BACKLOG, period, cluster_slot(cluster_id))
        losses = _loss(config.loss.intra, config, loss_rng, len(member_ids))
        head_loss = float(_loss(config.loss.inter, config, loss_rng, 1)[0])
        backlog = np.maximum(backlog_rng.normal(topology.data_mean_bits, data_sd, size=len(member_ids)), 0.0)
        members = tuple(with_data(network.nodes[node], float(bits)) for node, bits in zip(member_ids, backlog))
        clusters.append(ClusterState(
            cluster_id=cluster_id,
            head=network.nodes[head_id],
            members=members,
            packet_loss_c0={node: float(rate) for node, rate in zip(member_ids, losses)},
            head_loss_c0=head_loss,
            aggregation_rate=topology.aggregation_rate,
        ))
    cads: Dict[int, float] = {}
    cad_rng = stream(seed, Purpose.CAD, period, NETWORK_SLOT)
    for channel in network.channels:
        if channel.is_licensed and channel.cad_mode is CadMode.FIXED:
            draw = cad_rng.normal(channel.cad_mean_s, math.sqrt(channel.cad_var_s2))
            cads[channel.id] = max(float(draw), MIN_CAD_S)
    return PeriodInputs(period=period, clusters=tuple(clusters), cads=cads)


def run_period(network: Network, inputs: PeriodInputs, params: CognitiveParams, strategy: Strategy,
               mode: PhaseMode, seed: int) -> PeriodRecord:
    """Intra phase per cluster, then the inter phase over all heads, under ``strategy``"""
    channels: Sequence[Channel] = network.channels
    if not strategy.senses:
        channels = (license_free_channel(network.channels),)
    intra: Dict[int, EnergyLedger] = {}
    records: List[TranscriptRecord] = []
    delivered = []
    for cluster in inputs.clusters:
        rng = stream(seed, Purpose.INTRA, inputs.period, cluster_slot(cluster.cluster_id))
        result = run_intra_phase(cluster, channels, params, mode, rng, inputs.cads,
                                 strategy.intra_allocator(), strategy.order())
        intra[cluster.cluster_id] = result.ledger
        records.extend(result.records)
        delivered.append(aggregate_backlog(result.clusters[0]))
    rng = stream(seed, Purpose.INTER, inputs.period, NETWORK_SLOT)
    result = run_inter_phase(delivered, channels, params, mode, rng, inputs.cads,
                             strategy.inter_allocator(), strategy.order())
    records.extend(result.records)
    return PeriodRecord(period=inputs.period, strategy=strategy.name, intra=intra,
                        inter=result.ledger, records=records)


TRANSCRIPT_COLUMNS = ['scenario_digest', 'seed', 'period', 'phase', 'cluster_id', 'strategy', 'channel_id',
                      'sensing_j', 'switching_j', 'tx_j', 'rx_j', 'bits_delivered', 'interference_events']

PERIOD_COLUMNS = ['seed', 'point', 'series', 'strategy', 'period', 'intra_j', 'inter_j', 'total_j',
                  'sensing_j', 'switching_j', 'tx_j', 'rx_j', 'bits_delivered', 'interference_events',
                  'channels_sensed', 'accesses']


@dataclass
class SimulationReport:
    """Per-period ledgers of one or more seeds plus the optional event transcript"""
    digest: str
    seeds: List[int]
    periods: pd.DataFrame
    transcript: List[Dict] = field(default_factory=list)

    @classmethod
    def empty(cls, digest: str, seeds: Optional[List[int]] = None) -> "SimulationReport":
        return cls(digest=digest, seeds=list(seeds or []), periods=pd.DataFrame(columns=PERIOD_COLUMNS))

    @classmethod
    def merge(cls, reports: Sequence["SimulationReport"]) -> "SimulationReport":
        """Concatenate per-seed reports in the given order"""
        if not reports:
            raise ValueError("nothing to merge")
        frames = [r.periods for r in reports if not r.periods.empty]
        periods = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=PERIOD_COLUMNS)
        transcript = [row for r in reports for row in r.transcript]
        return cls(digest=reports[0].digest, seeds=[s for r in reports for s in r.seeds],
                   periods=periods, transcript=transcript)

    def totals(self) -> Dict[str, float]:
        """Sum of every ledger category over all periods"""
        keys = ['sensing_j', 'switching_j', 'tx_j', 'rx_j', 'bits_delivered', 'interference_events',
                'channels_sensed', 'accesses']
        totals = {key: float(self.periods[key].sum()) if not self.periods.empty else 0.0 for key in keys}
        totals['total_j'] = totals['sensing_j'] + totals['switching_j'] + totals['tx_j'] + totals['rx_j']
        return totals

    def interference_rate(self, strategy: Optional[str] = None) -> float:
        """Interference events per channel sensed"""
        frame = self.periods if strategy is None else self.periods[self.periods['strategy'] == strategy]
        sensed = float(frame['channels_sensed'].sum()) if not frame.empty else 0.0
        return float(frame['interference_events'].sum()) / sensed if sensed else 0.0

    def aggregate(self, metric: str = 'total') -> pd.DataFrame:
        """Mean per-period energy per (point, series, strategy) across seeds, with a 95% CI"""
        column = {'total': 'total_j', 'intra': 'intra_j', 'inter': 'inter_j'}[metric]
        if self.periods.empty:
            return pd.DataFrame(columns=['point', 'series', 'strategy', 'mean_energy_j', 'ci95_j', 'seeds'])
        keys = ['point', 'series', 'strategy']
        per_seed = self.periods.groupby(keys + ['seed'], sort=False, dropna=False)[column].mean().reset_index()
        grouped = per_seed.groupby(keys, sort=False, dropna=False)[column]
        summary = grouped.agg(mean_energy_j='mean', std='std', seeds='count').reset_index()
        summary['ci95_j'] = (1.96 * summary['std'].fillna(0.0) / np.sqrt(summary['seeds'])).astype(float)
        return summary[['point', 'series', 'strategy', 'mean_energy_j', 'ci95_j', 'seeds']]


def _period_row(seed: int, point: Optional[float], series: Optional[float], record: PeriodRecord) -> Dict:
    total = record.total
    intra = record.intra_total
    return {
        'seed': seed,
        'point': point,
        'series': series,
        'strategy': record.strategy,
        'period': record.period,
        'intra_j': intra.total(),
        'inter_j': record.inter.total(),
        'total_j': total.total(),
        'sensing_j': total.sensing_j,
        'switching_j': total.switching_j,
        'tx_j': total.tx_j,
        'rx_j': total.rx_j,
        'bits_delivered': total.bits_delivered,
        'interference_events': total.interference_events,
        'channels_sensed': total.channels_sensed,
        'accesses': total.accesses,
    }


def _transcript_rows(digest: str, seed: int, record: PeriodRecord) -> List[Dict]:
    rows = []
    for event in record.records:
        row = {'scenario_digest': digest, 'seed': seed, 'period': record.period,
               'strategy': record.strategy}
        row.update(event.as_row())
        rows.append({column: row[column] for column in TRANSCRIPT_COLUMNS})
    return rows


def scenario_points(config: ScenarioConfig) -> List[Tuple[Optional[float], Optional[float], ScenarioConfig]]:
    """(sweep value, series value, config) for every point of the sweep grid"""
    if config.sweep is None:
        return [(None, None, config)]
    sweep = config.sweep
    grid = []
    for series in sweep.series():
        base = config if series is None else config.at_point(sweep.series_variable, series)
        for point in sweep.points():
            grid.append((point, series, base.at_point(sweep.variable, point)))
    return grid


def run_scenario(config: ScenarioConfig, seed: int, keep_transcript: bool = False,
                 on_point: Optional[Callable[[], None]] = None) -> SimulationReport:
    """All periods, sweep points and strategies of one seed; deterministic in (config, seed)"""
    report = validate_scenario(config)
    if not report.ok:
        raise ConfigError("scenario violates its invariants", list(report.violations))
    digest = config.digest()
    if config.run.periods == 0:
        return SimulationReport.empty(digest, [seed])

    rows: List[Dict] = []
    transcript: List[Dict] = []
    for point, series, point_config in scenario_points(config):
        network = sample_topology(point_config, seed)
        params = point_config.cognitive_params()
        mode = point_config.phase_mode()
        strategies = [Strategy.named(name, point_config.solver) for name in point_config.run.strategies]
        for period in range(point_config.run.periods):
            inputs = realise_period(network, point_config, seed, period)
            for strategy in strategies:
                record = run_period(network, inputs, params, strategy, mode, seed)
                rows.append(_period_row(seed, point, series, record))
                if keep_transcript:
                    transcript.extend(_transcript_rows(digest, seed, record))
        logger.debug("seed %d: finished point %s series %s", seed, point, series)
        if on_point:
            on_point()
    return SimulationReport(digest=digest, seeds=[seed], periods=pd.DataFrame(rows, columns=PERIOD_COLUMNS),
                            transcript=transcript)
