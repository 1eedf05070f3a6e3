#!/usr/bin/env python3
"""
End-to-end command-line runs on a shrunken scenario
"""

import importlib.util
import json
from pathlib import Path

import pandas as pd
import pytest

from crsnsim.app import CrsnSimApp

ROOT = Path(__file__).resolve().parents[1]

SMALL_SCENARIO = """
[topology]
node_count = 40
cluster_count = 4

[channels]
count = 3

[run]
periods = 2
seeds = 1
"""

SMALL_SWEEP = SMALL_SCENARIO + """
[sweep]
variable = "intra_loss"
start = 0.0
stop = 0.1
step = 0.1
metric = "intra"
"""


def _load_cli():
    spec = importlib.util.spec_from_file_location("crsnsim_cli", ROOT / "crsnsim.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture(scope="module")
def cli():
    return _load_cli()


@pytest.fixture
def small_file(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL_SCENARIO)
    return str(path)


def test_usage_errors_exit_with_two(cli):
    with pytest.raises(SystemExit) as info:
        cli.main([])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(['run', '--mode', 'guess'])
    assert info.value.code == 2


def test_validate_default_and_broken(cli, tmp_path, capsys):
    assert cli.main(['-q', 'validate']) == 0
    broken = tmp_path / "broken.toml"
    broken.write_text("[loss]\nintra = 1.0\n")
    assert cli.main(['-q', 'validate', '--config', str(broken)]) == 1
    assert "loss.intra" in capsys.readouterr().err


def test_run_writes_every_artefact(cli, small_file, tmp_path):
    out = tmp_path / "run"
    assert cli.main(['-q', 'run', '--config', small_file, '--out', str(out)]) == 0
    for name in ("transcript.csv", "summary.csv", "manifest.json", "SUMMARY.md"):
        assert (out / name).is_file()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest['seeds'] == [1]
    transcript = pd.read_csv(out / "transcript.csv")
    assert set(transcript['phase']) <= {'intra', 'inter'}
    assert (transcript['scenario_digest'] == manifest['scenario_digest']).all()


def test_reruns_are_byte_identical(cli, small_file, tmp_path):
    for name in ("a", "b"):
        assert cli.main(['-q', 'run', '--config', small_file, '--out', str(tmp_path / name),
                         '--strategy', 'proposed,c0_only']) == 0
    for name in ("transcript.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_overrides_change_the_digest(cli, small_file, tmp_path):
    assert cli.main(['-q', 'run', '--config', small_file, '--out', str(tmp_path / "a")]) == 0
    assert cli.main(['-q', 'run', '--config', small_file, '--out', str(tmp_path / "b"), '--seed', '9']) == 0
    first = json.loads((tmp_path / "a" / "manifest.json").read_text())
    second = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert first['scenario_digest'] != second['scenario_digest']
    assert second['seeds'] == [9]


def test_bad_overrides_are_config_failures(cli, small_file, tmp_path, capsys):
    assert cli.main(['-q', 'run', '--config', small_file, '--out', str(tmp_path), '--strategy', 'greedy']) == 1
    assert "--strategy" in capsys.readouterr().err
    assert not (tmp_path / "transcript.csv").exists()


def test_sweep_summary(cli, tmp_path):
    path = tmp_path / "sweep.toml"
    path.write_text(SMALL_SWEEP)
    out = tmp_path / "sweep"
    assert cli.main(['-q', 'sweep', '--config', str(path), '--out', str(out)]) == 0
    summary = pd.read_csv(out / "summary.csv")
    assert list(summary.columns[:2]) == ['loss_rate', 'strategy']
    assert sorted(set(summary['loss_rate'])) == [0.0, 0.1]
    assert len(summary) == 2 * 4


def test_sweep_needs_a_sweep_section(cli, small_file, tmp_path):
    assert cli.main(['-q', 'sweep', '--config', small_file, '--out', str(tmp_path)]) == 1


def test_acs_trace(cli, small_file, tmp_path):
    out = tmp_path / "trace"
    assert cli.main(['-q', 'sweep', '--figure', 'fig3', '--config', small_file, '--out', str(out)]) == 0
    trace = pd.read_csv(out / "acs_trace.csv")
    assert sorted(set(trace['channel_id'])) == [1, 2, 3]
    for _, group in trace.groupby('channel_id'):
        assert list(group['iteration']) == list(range(1, len(group) + 1))
        assert (group['objective_j'].diff().dropna() <= 1e-12).all()


def test_oracle_passes(cli):
    assert cli.main(['-q', 'oracle', '--instances', '10', '--seed', '7']) == 0


def test_output_path_that_is_a_file(cli, small_file, tmp_path):
    blocker = tmp_path / "occupied"
    blocker.write_text("")
    assert cli.main(['-q', 'run', '--config', small_file, '--out', str(blocker)]) == 1


def test_app_scenario_loading(small_file):
    app = CrsnSimApp(quiet=True)
    config = app.load_scenario(small_file)
    assert config.topology.node_count == 40
    assert app.load_scenario(figure='fig2').sweep.variable == 'intra_loss'
    assert app.apply_overrides(config, periods=0).run.periods == 0
