#!/usr/bin/env python3
"""
Bundled figure-reproduction scenarios
"""

from pathlib import Path
from typing import Dict, List

import pandas as pd

from ..core.config import ScenarioConfig
from ..core.errors import ConfigError
from ..optim.inter import acs_solve
from ..radio.energy import aggregate_backlog
from ..radio.spectrum import license_free_channel, licensed_channels
from .engine import realise_period
from .topology import sample_topology

SCENARIO_DIR = Path(__file__).resolve().parents[2] / "scenarios"

FIGURES: Dict[str, str] = {
    'fig1': "Intra-cluster energy vs CAD, optimal vs average allocation",
    'fig2': "Intra-cluster energy vs C0 packet loss",
    'fig3': "ACS objective per iteration",
    'fig4': "Inter-cluster energy vs CAD at two power limits",
    'fig5': "Inter-cluster energy vs C0 packet loss",
    'fig6': "Total energy vs mean data per node",
    'fig7': "Total energy vs number of licensed channels",
}

# fig3 traces the solver instead of sweeping the engine
TRACE_FIGURES = ('fig3',)

TRACE_COLUMNS = ['scenario_digest', 'seed', 'channel_id', 'iteration', 'objective_j', 'converged']


def scenario_path(name: str) -> Path:
    if name == 'table2' or name in FIGURES:
        return SCENARIO_DIR / f"{name}.toml"
    raise ConfigError(f"unknown figure '{name}'", [f"known figures: {', '.join(FIGURES)}"])


def acs_trace(config: ScenarioConfig, seed: int) -> pd.DataFrame:
    """ACS objective after every iteration on each licensed channel of period 0"""
    network = sample_topology(config, seed)
    inputs = realise_period(network, config, seed, 0)
    heads = [aggregate_backlog(cluster) for cluster in inputs.clusters]
    params = config.cognitive_params()
    channel_c0 = license_free_channel(network.channels)
    digest = config.digest()
    rows: List[Dict] = []
    for channel in licensed_channels(network.channels):
        cad = inputs.cads.get(channel.id, channel.cad_mean_s)
        result = acs_solve(heads, channel, cad, channel_c0, params,
                           config.solver.acs_tolerance_j, config.solver.acs_max_iterations)
        for iteration, objective in enumerate(result.history, start=1):
            rows.append({'scenario_digest': digest, 'seed': seed, 'channel_id': channel.id,
                         'iteration': iteration, 'objective_j': objective, 'converged': result.converged})
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)
