#!/usr/bin/env python3
"""
Seed-level execution for crsnsim
Runs one scenario over many seeds, sequentially or in a process pool
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional

from ..sim.engine import SimulationReport, run_scenario, scenario_points
from ..ui.progress import SweepProgress
from .config import ScenarioConfig
from .errors import ConfigError

logger = logging.getLogger(__name__)


class RunCore:
    """Core execution: seeds in order, results merged in seed order"""

    def __init__(self, config: ScenarioConfig, jobs: int = 1, show_progress: bool = True):
        self.config = config
        self.jobs = max(int(jobs), 1)
        self.show_progress = show_progress

    def work_units(self, seeds: List[int]) -> int:
        return len(seeds) * len(scenario_points(self.config))

    def run(self, seeds: List[int], keep_transcript: bool = False) -> SimulationReport:
        if not seeds:
            return SimulationReport.empty(self.config.digest())
        points = len(scenario_points(self.config))
        with SweepProgress("Simulating", self.work_units(seeds), self.show_progress) as progress:
            if self.jobs == 1 or len(seeds) == 1:
                reports = []
                for seed in seeds:
                    progress.describe(f"Simulating seed {seed}")
                    reports.append(run_scenario(self.config, seed, keep_transcript, progress.advance))
            else:
                reports = self._run_pool(seeds, keep_transcript, progress, points)
        return SimulationReport.merge(reports)

    def _run_pool(self, seeds: List[int], keep_transcript: bool, progress: SweepProgress,
                  points: int) -> List[SimulationReport]:
        logger.debug("running %d seeds on %d workers", len(seeds), self.jobs)
        with ProcessPoolExecutor(max_workers=self.jobs) as pool:
            futures = [pool.submit(run_scenario, self.config, seed, keep_transcript) for seed in seeds]
            reports = []
            # collected in submission order so the merged report matches a sequential run
            for seed, future in zip(seeds, futures):
                reports.append(future.result())
                progress.advance(points)
                logger.debug("seed %d done", seed)
        return reports


def prepare_output_dir(path: Optional[str]) -> Path:
    """Create the output directory; an existing regular file is a configuration error"""
    target = Path(path) if path else Path.cwd() / "crsnsim_results"
    if target.exists() and not target.is_dir():
        raise ConfigError(f"output path is not a directory: {target}")
    target.mkdir(parents=True, exist_ok=True)
    return target
