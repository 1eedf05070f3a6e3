#!/usr/bin/env python3
"""
Rich-powered tables for scenario summaries, results and solver checks
"""

from typing import List, Optional

import pandas as pd
from rich.panel import Panel
from rich.table import Table

from ..core.config import ScenarioConfig
from ..core.types import ValidationReport
from ..optim.oracle import OracleCheck
from .colors import console, error_console


class UserInterface:
    """Rich-powered user interface"""

    def __init__(self):
        self.console = console

    def show_scenario_summary(self, config: ScenarioConfig, command: str, output_dir: Optional[str],
                              seeds: List[int]):
        summary_table = Table(title="📋 Scenario", show_header=True, header_style="bold cyan")
        summary_table.add_column("Setting", style="cyan", width=14)
        summary_table.add_column("Value", style="white")

        topology, channels = config.topology, config.channels
        summary_table.add_row("🧭 Command", command)
        summary_table.add_row("🔑 Digest", config.digest()[:16])
        summary_table.add_row("📡 Network", f"{topology.node_count} nodes, {topology.cluster_count} clusters, "
                                           f"{channels.count} licensed channels")
        summary_table.add_row("⏱️  CAD", f"{channels.cad_mode}, mean {channels.cad_mean_s * 1e3:g} ms")
        summary_table.add_row("🎲 Seeds", _seed_span(seeds))
        summary_table.add_row("🔁 Periods", str(config.run.periods))
        summary_table.add_row("🧠 Strategies", ", ".join(config.run.strategies))
        summary_table.add_row("📐 Mode", f"{config.run.accounting} accounting, {config.run.sensing} sensing")
        if config.sweep is not None:
            sweep = config.sweep
            summary_table.add_row("📈 Sweep", f"{sweep.variable} {sweep.start:g} → {sweep.stop:g} "
                                             f"step {sweep.step:g} ({len(sweep.points())} points)")
        if output_dir:
            summary_table.add_row("📁 Output", str(output_dir))
        self.console.print(summary_table)

    def show_results(self, summary: pd.DataFrame, column: str, series_column: Optional[str] = None,
                     interference_rate: Optional[float] = None):
        """Per-point mean energies, one row per (point, series, strategy)"""
        results_table = Table(title="📊 Mean energy per period", show_header=True, header_style="bold magenta")
        has_series = series_column is not None and series_column in summary.columns
        results_table.add_column(column, style="cyan", justify="right")
        if has_series:
            results_table.add_column(series_column, style="cyan", justify="right")
        results_table.add_column("strategy", style="green")
        results_table.add_column("mean [J]", justify="right")
        results_table.add_column("±95% [J]", justify="right", style="dim")
        for row in summary.itertuples(index=False):
            point = getattr(row, column)
            cells = ["-" if pd.isna(point) else f"{point:g}"]
            if has_series:
                cells.append(f"{getattr(row, series_column):g}")
            cells += [row.strategy, f"{row.mean_energy_j:.6g}", f"{row.ci95_j:.3g}"]
            results_table.add_row(*cells)
        self.console.print(results_table)
        if interference_rate is not None:
            self.console.print(f"🛡️  Interference events per sensed channel: {interference_rate:.4g}", style="cyan")

    def show_oracle_checks(self, checks: List[OracleCheck]):
        oracle_table = Table(title="🧪 Solver cross-checks", show_header=True, header_style="bold cyan")
        oracle_table.add_column("Check", style="cyan")
        oracle_table.add_column("Instances", justify="right")
        oracle_table.add_column("Failures", justify="right")
        oracle_table.add_column("Max error", justify="right")
        oracle_table.add_column("Result")
        for check in checks:
            verdict = "[green]pass[/green]" if check.passed else "[red]FAIL[/red]"
            oracle_table.add_row(check.name, str(check.instances), str(check.failures),
                                 f"{check.max_error:.3g}", verdict)
        self.console.print(oracle_table)
        for check in checks:
            for note in check.notes:
                self.console.print(f"  • {check.name}: {note}", style="dim")

    def show_validation(self, path: str, report: ValidationReport):
        if report.ok:
            self.console.print(Panel(f"[green]{path}: scenario is runnable[/green]", border_style="green"))
            return
        body = "\n".join(f"- {violation}" for violation in report.violations)
        error_console.print(Panel(body, title=f"❌ {path}", border_style="red"))


def _seed_span(seeds: List[int]) -> str:
    if not seeds:
        return "none"
    if len(seeds) == 1:
        return str(seeds[0])
    return f"{seeds[0]}..{seeds[-1]} ({len(seeds)})"
