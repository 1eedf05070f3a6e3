#!/usr/bin/env python3
"""
Result serialization for crsnsim
Writes the event transcript, the per-point summary, a run manifest and SUMMARY.md
"""

import datetime
import json
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from ..sim.engine import TRANSCRIPT_COLUMNS, SimulationReport
from .config import ScenarioConfig

TRANSCRIPT_FILE = "transcript.csv"
SUMMARY_CSV_FILE = "summary.csv"
TRACE_FILE = "acs_trace.csv"
MANIFEST_FILE = "manifest.json"
SUMMARY_MD_FILE = "SUMMARY.md"

# Fixed float formatting keeps CSV bytes stable across runs
FLOAT_FORMAT = "%.12g"


def summary_frame(report: SimulationReport, config: ScenarioConfig) -> pd.DataFrame:
    """Aggregated means named after the swept variable, each row tagged with the digest"""
    sweep = config.sweep
    metric = sweep.metric if sweep is not None else 'total'
    summary = report.aggregate(metric)
    column = sweep.column if sweep is not None else 'point'
    renames = {'point': column}
    columns = [column]
    if sweep is not None and sweep.series_variable:
        renames['series'] = sweep.series_variable
        columns.append(sweep.series_variable)
    summary = summary.rename(columns=renames)
    summary['scenario_digest'] = report.digest
    return summary[columns + ['strategy', 'mean_energy_j', 'ci95_j', 'seeds', 'scenario_digest']]


class ReportGenerator:
    """Writes every artefact of one command into ``output_dir``"""

    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)
        self.written: List[Path] = []

    def _path(self, name: str) -> Path:
        path = self.output_dir / name
        self.written.append(path)
        return path

    def write_transcript(self, report: SimulationReport) -> Path:
        path = self._path(TRANSCRIPT_FILE)
        frame = pd.DataFrame(report.transcript, columns=TRANSCRIPT_COLUMNS)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_summary_csv(self, summary: pd.DataFrame) -> Path:
        path = self._path(SUMMARY_CSV_FILE)
        summary.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_trace(self, trace: pd.DataFrame) -> Path:
        path = self._path(TRACE_FILE)
        trace.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_manifest(self, config: ScenarioConfig, seeds: List[int], command: List[str],
                       version: str, extra: Optional[Dict] = None) -> Path:
        """Run manifest: digest, seeds and the command line; no timestamps so reruns match"""
        path = self._path(MANIFEST_FILE)
        manifest = {
            'scenario_digest': config.digest(),
            'seeds': seeds,
            'version': version,
            'command': command,
            'periods': config.run.periods,
            'strategies': list(config.run.strategies),
            'accounting': config.run.accounting,
            'sensing': config.run.sensing,
        }
        if config.sweep is not None:
            manifest['sweep'] = {'variable': config.sweep.variable, 'points': config.sweep.points(),
                                 'metric': config.sweep.metric}
        manifest.update(extra or {})
        with open(path, 'w') as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        return path

    def write_summary_md(self, title: str, config: ScenarioConfig, seeds: List[int],
                         summary: Optional[pd.DataFrame] = None,
                         report: Optional[SimulationReport] = None) -> Path:
        """Short human-readable digest of the run"""
        path = self._path(SUMMARY_MD_FILE)
        with open(path, 'w') as f:
            f.write(f"# 📡 {title}\n\n")
            f.write(f"**Generated:** {datetime.datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
            f.write(f"**Scenario digest:** `{config.digest()}`\n")
            f.write(f"**Seeds:** {', '.join(str(s) for s in seeds) if seeds else 'none'}\n")
            f.write(f"**Periods per seed:** {config.run.periods}\n")
            f.write(f"**Strategies:** {', '.join(config.run.strategies)}\n")
            f.write(f"**Mode:** {config.run.accounting} accounting, {config.run.sensing} sensing\n\n")

            if report is not None and not report.periods.empty:
                totals = report.totals()
                f.write("## ⚡ Energy by category (all periods, all strategies)\n\n")
                f.write("| category | joules |\n|---|---|\n")
                for key in ('sensing_j', 'switching_j', 'tx_j', 'rx_j', 'total_j'):
                    f.write(f"| {key} | {totals[key]:.6g} |\n")
                f.write("\n## 🛡️ Interference\n\n")
                for strategy in config.run.strategies:
                    f.write(f"- {strategy}: {report.interference_rate(strategy):.4g} "
                            f"events per sensed channel\n")
                f.write("\n")

            if summary is not None and not summary.empty:
                f.write("## 📊 Mean energy per period\n\n")
                header = [c for c in summary.columns if c != 'scenario_digest']
                f.write("| " + " | ".join(header) + " |\n")
                f.write("|" + "---|" * len(header) + "\n")
                for row in summary[header].itertuples(index=False):
                    f.write("| " + " | ".join(_cell(v) for v in row) + " |\n")
                f.write("\n")

            f.write("## 📁 Files\n\n")
            for written in self.written:
                if written != path:
                    f.write(f"- `{written.name}`\n")
        return path

    def remove_partial(self):
        """Delete every file written so far"""
        for path in self.written:
            if path.exists():
                path.unlink()
        self.written.clear()


def _cell(value) -> str:
    if isinstance(value, float):
        return "-" if pd.isna(value) else f"{value:.6g}"
    return str(value)
