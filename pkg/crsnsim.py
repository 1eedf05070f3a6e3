#!/usr/bin/env python3
"""
crsnsim - energy-efficient dynamic channel access simulator for clustered
cognitive radio sensor networks

Solves the intra-cluster time allocation and the inter-cluster power/time
allocation, and compares the resulting access strategy against C0-only,
always-sense-and-access and average-allocation baselines.
"""

import argparse
import sys
import textwrap

from crsnsim import __version__
from crsnsim.app import CrsnSimApp
from crsnsim.sim.figures import FIGURES


def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help='Scenario TOML file (default: scenarios/table2.toml)')
    parser.add_argument('--seed', type=int, help='Root seed of the first run')
    parser.add_argument('--seeds', type=int, help='Number of consecutive seeds')
    parser.add_argument('--periods', type=int, help='Transmission periods per seed')
    parser.add_argument('--strategy', help='Comma-separated strategies (proposed,c0_only,asa,average)')
    parser.add_argument('--out', help='Output directory (default: ./crsnsim_results)')
    parser.add_argument('--mode', choices=['expected', 'sampled'], help='Energy accounting mode')
    parser.add_argument('--sensing', choices=['paper', 'strict'], help='Sensing outcome model')
    parser.add_argument('--jobs', type=int, default=1, help='Worker processes across seeds')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='crsnsim - Energy-efficient channel access for clustered CR sensor networks',
        epilog=textwrap.dedent('''
        Examples:
          python3 crsnsim.py run --seeds 2 --periods 10       # Default scenario, full transcript
          python3 crsnsim.py sweep --figure fig2               # C0 loss sweep
          python3 crsnsim.py sweep --figure fig3 --seeds 5     # ACS convergence trace
          python3 crsnsim.py oracle --instances 1000 --seed 7  # Solver cross-checks
          python3 crsnsim.py validate --config my.toml         # Check a scenario
        '''),
        formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='No banner, tables or progress bars')
    parser.add_argument('--version', action='version', version=f'crsnsim {__version__}')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='Run one scenario and write the event transcript')
    _common(run)

    sweep = commands.add_parser('sweep', help='Run a sweep and write per-point means')
    _common(sweep)
    sweep.add_argument('--figure', choices=list(FIGURES), help='Bundled figure scenario')

    oracle = commands.add_parser('oracle', help='Cross-check the solvers on random instances')
    oracle.add_argument('--config', help='Scenario supplying the cognitive parameters')
    oracle.add_argument('--instances', type=int, default=1000, help='Instances per suite')
    oracle.add_argument('--seed', type=int, default=7, help='Seed of the instance generator')

    validate = commands.add_parser('validate', help='Check a scenario file')
    validate.add_argument('--config', help='Scenario TOML file (default: scenarios/table2.toml)')
    return parser


def main(argv=None) -> int:
    """Main entry point"""
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(argv)
    app = CrsnSimApp(verbose=args.verbose, quiet=args.quiet, argv=argv)
    return app.execute(args.command, args)


if __name__ == "__main__":
    sys.exit(main())
