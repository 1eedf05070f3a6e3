#!/usr/bin/env python3
"""
Main crsnsim application class
Loads scenarios, runs commands and maps failures to exit codes
"""

import logging
from dataclasses import replace
from typing import Dict, List, Optional

import pandas as pd
from rich.logging import RichHandler

from . import __version__
from .core.config import ConfigManager, ScenarioConfig
from .core.errors import ConfigError, CrsnError
from .core.report_generator import ReportGenerator, summary_frame
from .core.runner import RunCore, prepare_output_dir
from .core.validation import validate_scenario
from .optim.oracle import SUITES, run_oracles
from .sim.figures import FIGURES, TRACE_FIGURES, acs_trace, scenario_path
from .sim.streams import Purpose, stream
from .ui.colors import console, error_console, print_banner, print_error, print_info, print_success
from .ui.interface import UserInterface
from .ui.progress import SweepProgress
from .ui.validators import Validators

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def setup_logging(verbose: bool = False):
    """Route library logging through rich on standard error"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=error_console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


class CrsnSimApp:
    """Main crsnsim application"""

    def __init__(self, verbose: bool = False, quiet: bool = False, argv: Optional[List[str]] = None):
        self.verbose = verbose
        self.quiet = quiet
        self.argv = list(argv or [])
        self.ui = UserInterface()
        setup_logging(verbose)

    # Scenario handling

    def load_scenario(self, config_path: Optional[str] = None, figure: Optional[str] = None) -> ScenarioConfig:
        if config_path:
            return ConfigManager.parse_file(config_path)
        if figure:
            return ConfigManager.parse_file(scenario_path(figure))
        bundled = scenario_path('table2')
        if bundled.exists():
            return ConfigManager.parse_file(bundled)
        return ConfigManager.default_scenario()

    @staticmethod
    def apply_overrides(config: ScenarioConfig, seed: Optional[int] = None, seeds: Optional[int] = None,
                        periods: Optional[int] = None, strategy: Optional[str] = None,
                        mode: Optional[str] = None, sensing: Optional[str] = None) -> ScenarioConfig:
        """Command-line overrides, applied before the digest is taken"""
        problems = []
        changes: Dict = {}
        if seed is not None:
            if not Validators.validate_non_negative_int(seed):
                problems.append("--seed: expected a non-negative integer")
            changes['seed'] = seed
        if seeds is not None:
            if not Validators.validate_positive_int(seeds):
                problems.append("--seeds: expected a positive integer")
            changes['seeds'] = seeds
        if periods is not None:
            if not Validators.validate_non_negative_int(periods):
                problems.append("--periods: expected a non-negative integer")
            changes['periods'] = periods
        if strategy is not None:
            names = Validators.normalize_strategies(strategy)
            if not Validators.validate_strategies(names):
                problems.append(f"--strategy: unknown strategy in '{strategy}'")
            changes['strategies'] = tuple(names)
        if mode is not None:
            changes['accounting'] = mode
        if sensing is not None:
            changes['sensing'] = sensing
        if problems:
            raise ConfigError("invalid command-line overrides", problems)
        return config.with_run(**changes) if changes else config

    def _checked(self, config: ScenarioConfig) -> ScenarioConfig:
        report = validate_scenario(config)
        if not report.ok:
            raise ConfigError("scenario violates its invariants", list(report.violations))
        return config

    # Commands

    def run_scenario(self, args) -> Dict:
        """Single scenario: every seed, every period, with the full event transcript"""
        config = self.load_scenario(args.config)
        config = replace(self.apply_overrides(config, args.seed, args.seeds, args.periods, args.strategy,
                                              args.mode, args.sensing), sweep=None)
        config = self._checked(config)
        seeds = config.seed_list()
        output_dir = prepare_output_dir(args.out)
        if not self.quiet:
            print_banner()
            self.ui.show_scenario_summary(config, "run", str(output_dir), seeds)

        reports = ReportGenerator(str(output_dir))
        try:
            report = RunCore(config, args.jobs, not self.quiet).run(seeds, keep_transcript=True)
            summary = summary_frame(report, config)
            reports.write_transcript(report)
            reports.write_summary_csv(summary)
            reports.write_manifest(config, seeds, self.argv, __version__)
            reports.write_summary_md("crsnsim run", config, seeds, summary, report)
        except BaseException:
            reports.remove_partial()
            raise

        if not self.quiet:
            self.ui.show_results(summary, 'point', interference_rate=report.interference_rate())
            print_success(f"Results written to {output_dir}")
        return {'status': 'success', 'output_dir': str(output_dir), 'digest': report.digest,
                'rows': len(report.transcript)}

    def run_sweep(self, args) -> Dict:
        """Figure reproduction: a bundled or user sweep, aggregated over seeds"""
        if args.figure and not Validators.validate_figure(args.figure):
            raise ConfigError(f"unknown figure '{args.figure}'", [f"known figures: {', '.join(FIGURES)}"])
        config = self.load_scenario(args.config, args.figure)
        config = self.apply_overrides(config, args.seed, args.seeds, args.periods, args.strategy,
                                      args.mode, args.sensing)
        if args.figure in TRACE_FIGURES:
            return self._run_trace(config, args)
        if config.sweep is None:
            raise ConfigError("sweep needs a [sweep] section", ["sweep: missing section"])
        config = self._checked(config)
        seeds = config.seed_list()
        output_dir = prepare_output_dir(args.out)
        title = FIGURES.get(args.figure, "crsnsim sweep")
        if not self.quiet:
            print_banner()
            print_info(title)
            self.ui.show_scenario_summary(config, "sweep", str(output_dir), seeds)

        reports = ReportGenerator(str(output_dir))
        try:
            report = RunCore(config, args.jobs, not self.quiet).run(seeds)
            summary = summary_frame(report, config)
            reports.write_summary_csv(summary)
            reports.write_manifest(config, seeds, self.argv, __version__,
                                   {'figure': args.figure} if args.figure else None)
            reports.write_summary_md(title, config, seeds, summary, report)
        except BaseException:
            reports.remove_partial()
            raise

        if not self.quiet:
            self.ui.show_results(summary, config.sweep.column, config.sweep.series_variable)
            print_success(f"Results written to {output_dir}")
        return {'status': 'success', 'output_dir': str(output_dir), 'digest': report.digest,
                'points': len(summary)}

    def _run_trace(self, config: ScenarioConfig, args) -> Dict:
        config = self._checked(config)
        seeds = config.seed_list()
        output_dir = prepare_output_dir(args.out)
        reports = ReportGenerator(str(output_dir))
        try:
            frames = []
            with SweepProgress("Tracing ACS", len(seeds), not self.quiet) as progress:
                for seed in seeds:
                    frames.append(acs_trace(config, seed))
                    progress.advance()
            trace = pd.concat(frames, ignore_index=True)
            reports.write_trace(trace)
            reports.write_manifest(config, seeds, self.argv, __version__, {'figure': args.figure})
            reports.write_summary_md(FIGURES[args.figure], config, seeds)
        except BaseException:
            reports.remove_partial()
            raise
        if not self.quiet:
            iterations = trace.groupby(['seed', 'channel_id'])['iteration'].max()
            print_info(f"ACS iterations: median {iterations.median():g}, max {iterations.max()}")
            print_success(f"Trace written to {output_dir}")
        return {'status': 'success', 'output_dir': str(output_dir), 'digest': config.digest()}

    def run_oracle(self, args) -> Dict:
        """Solver cross-checks; success iff every suite passes"""
        if not Validators.validate_positive_int(args.instances):
            raise ConfigError("--instances: expected a positive integer")
        config = self._checked(self.load_scenario(args.config))
        params = config.cognitive_params()
        rng = stream(args.seed, Purpose.INSTANCES)
        with SweepProgress("Cross-checking solvers", len(SUITES), not self.quiet) as progress:
            def on_suite(name: str):
                progress.describe(f"Cross-checking {name}")
                progress.advance()
            checks = run_oracles(args.instances, rng, params, on_suite)
        if not self.quiet:
            self.ui.show_oracle_checks(checks)
        failed = [check.name for check in checks if not check.passed]
        if failed:
            print_error(f"Solver checks failed: {', '.join(failed)}")
            return {'status': 'failed', 'failed': failed}
        if not self.quiet:
            print_success(f"All {len(checks)} solver checks passed")
        return {'status': 'success', 'checks': len(checks)}

    def run_validate(self, args) -> Dict:
        path = args.config or str(scenario_path('table2'))
        config = ConfigManager.parse_file(path)
        report = validate_scenario(config)
        self.ui.show_validation(path, report)
        return {'status': 'success' if report.ok else 'failed', 'violations': list(report.violations)}

    def execute(self, command: str, args) -> int:
        """Run one subcommand and return its exit code"""
        handlers = {
            'run': self.run_scenario,
            'sweep': self.run_sweep,
            'oracle': self.run_oracle,
            'validate': self.run_validate,
        }
        try:
            result = handlers[command](args)
        except ConfigError as e:
            print_error(str(e))
            return EXIT_FAILURE
        except CrsnError as e:
            print_error(f"{type(e).__name__}: {e}")
            return EXIT_FAILURE
        except KeyboardInterrupt:
            console.print("\n👋 Interrupted; partial outputs removed", style="yellow")
            return EXIT_FAILURE
        except Exception as e:
            logger.debug("unexpected failure", exc_info=True)
            print_error(f"Unexpected error: {e}")
            return EXIT_FAILURE
        return EXIT_OK if result.get('status') == 'success' else EXIT_FAILURE
