import json
import math
import os
import numpy as np
import pytest
from click.testing import CliRunner
from dwitness.cli import cli
from dwitness.Physics.chain import ChainParams
from dwitness.Witness.clean import clean_signed_witness
from dwitness.Oracle.free_fermion import Realization
from dwitness.Oracle.exact_diag import build_hamiltonian, thermal_observables

runner = CliRunner()

def test_clean_witness_point():
    result = runner.invoke(cli, ['witness', '--J', '1', '--B', '0', '--T', '0.5', '--delta', '0', '--json'])
    assert result.exit_code == 0, result.output
    record = json.loads(result.output)
    assert record['magnitude'] == abs(clean_signed_witness(ChainParams(J=1.0, B=0.0, T=0.5)))
    assert record['correction_part'] == 0.0
    assert record['entangled'] == (record['magnitude'] > 1.0)

def test_human_readable_output():
    result = runner.invoke(cli, ['witness', '--B', '0.3', '--T', '0.4'])
    assert result.exit_code == 0, result.output
    assert result.output.splitlines()[0].startswith('signed')
    assert 'entangled' in result.output

def test_validity_warning_is_reported():
    result = runner.invoke(cli, ['witness', '--J', '1', '--B', '0', '--T', '0.5', '--delta', '2e-4'])
    assert result.exit_code == 0, result.output
    assert 'delta exceeds perturbative validity 1e-4' in result.output
    assert 'magnitude' in result.output

def test_domain_error_exit_code():
    result = runner.invoke(cli, ['witness', '--T', '0.001'])
    assert result.exit_code == 3
    assert 'TemperatureTooLowError' in result.output
    result = runner.invoke(cli, ['witness', '--channel', 'field', '--delta', '1e-5'])
    assert result.exit_code == 3
    assert 'FieldChannelUnsupportedError' in result.output

@pytest.mark.parametrize('args', [['--average', 'typical'], ['--engine', 'oracle'], ['--T', '-1'], ['--bogus'],
                                  ['--average', 'none', '--delta', '1e-5']])
def test_usage_errors(args):
    assert runner.invoke(cli, ['witness'] + args).exit_code == 2

def test_oracle_matches_dense_diagonalisation():
    result = runner.invoke(cli, ['witness', '--engine', 'oracle', '--sites', '8', '--samples', '1', '--seed', '1', '--delta', '0',
                                 '--B', '0.3', '--T', '0.5', '--json'])
    assert result.exit_code == 0, result.output
    params = ChainParams(J=1.0, B=0.3, T=0.5)
    w_ed = thermal_observables(build_hamiltonian(Realization.clean(8), params), params)[1]
    assert abs(json.loads(result.output)['magnitude'] - abs(w_ed)) < 1e-10

def test_witness_manifest(tmp_path):
    prefix = str(tmp_path / 'point')
    result = runner.invoke(cli, ['witness', '--T', '0.5', '--out', prefix])
    assert result.exit_code == 0, result.output
    with open(prefix + '_manifest.json') as f:
        manifest = json.load(f)
    assert '--out' in manifest['command']
    assert manifest['outputs'][0]['path'] == prefix + '_witness.json'

def test_scan_writes_grid_boundary_and_manifest(tmp_path):
    prefix = str(tmp_path / 'clean')
    result = runner.invoke(cli, ['scan', '--res', '16', '--delta', '0', '--T-min', '0.05', '--out', prefix])
    assert result.exit_code == 0, result.output
    with open(prefix + '_grid.csv') as f:
        lines = f.read().splitlines()
    assert lines[0] == 'B,T,J,delta,average,engine,W_signed,W,entangled'
    assert len(lines) == 257
    for line in lines[1:]:
        cells = line.split(',')
        assert (cells[8] == 'True') == (float(cells[7]) > 1.0)
    with open(prefix + '_boundary.csv') as f:
        assert f.readline() == 'segment_id,B0,T0,B1,T1\n'
    with open(prefix + '_manifest.json') as f:
        manifest = json.load(f)
    assert manifest['parameters']['resolution'] == 16
    assert len(manifest['outputs']) == 2

def test_oracle_scan_is_byte_identical_across_thread_counts(tmp_path):
    args = ['scan', '--res', '16', '--engine', 'oracle', '--sites', '8', '--samples', '4', '--seed', '5', '--delta', '1e-3',
            '--T-min', '0.2']
    one = runner.invoke(cli, args + ['--out', str(tmp_path / 'one')], env={'DW_THREADS': '1'})
    four = runner.invoke(cli, args + ['--out', str(tmp_path / 'four')], env={'DW_THREADS': '4'})
    assert one.exit_code == 0, one.output
    assert four.exit_code == 0, four.output
    for suffix in ['_grid.csv', '_boundary.csv']:
        with open(tmp_path / ('one' + suffix), 'rb') as a, open(tmp_path / ('four' + suffix), 'rb') as b:
            assert a.read() == b.read()

def test_oracle_scan_needs_seed(tmp_path):
    result = runner.invoke(cli, ['scan', '--res', '16', '--engine', 'oracle', '--out', str(tmp_path / 'x')])
    assert result.exit_code == 2

def test_unwritable_output(tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('')
    result = runner.invoke(cli, ['scan', '--res', '16', '--T-min', '0.5', '--out', str(blocker / 'run')])
    assert result.exit_code == 3
    assert not any(map(lambda name: name.endswith('.csv'), os.listdir(tmp_path)))

def test_invalid_thread_setting():
    result = runner.invoke(cli, ['witness'], env={'DW_THREADS': '0'})
    assert result.exit_code == 2

def test_slope_needs_nonzero_delta():
    result = runner.invoke(cli, ['slope', '--deltas', '0', '--seed', '1'])
    assert result.exit_code == 2
    assert 'need at least one nonzero delta' in result.output

def test_slope_rejects_malformed_list():
    assert runner.invoke(cli, ['slope', '--deltas', '1e-4,abc', '--seed', '1']).exit_code == 2

def test_small_slope_run_reports_rows():
    result = runner.invoke(cli, ['slope', '--deltas', '1e-3', '--sites', '16', '--samples', '10', '--seed', '2', '--T', '0.5',
                                 '--average', 'both', '--json'])
    assert result.exit_code in [0, 1], result.output
    report = json.loads(result.output)
    assert len(report['rows']) == 2
    assert report['passed'] == (result.exit_code == 0)

def test_config_command():
    result = runner.invoke(cli, ['config'], input='\n' * 7)
    assert result.exit_code == 0, result.output
    from dwitness.utils import get_config_dir, get_config
    assert os.path.exists(get_config_dir())
    assert get_config()['t_min'] == 5e-3

@pytest.mark.slow
def test_quick_validation_passes_and_is_repeatable():
    first = runner.invoke(cli, ['validate', '--quick'])
    second = runner.invoke(cli, ['validate', '--quick'])
    assert first.exit_code == 0, first.output
    assert first.output == second.output

@pytest.mark.slow
def test_disorder_scan_boundary_stays_at_clean_transition(tmp_path):
    prefix = str(tmp_path / 'boundary')
    result = runner.invoke(cli, ['scan', '--res', '64', '--delta', '1e-4', '--out', prefix])
    assert result.exit_code == 0, result.output
    import pandas as pd
    boundary = pd.read_csv(prefix + '_boundary.csv')
    grid = pd.read_csv(prefix + '_grid.csv')
    assert len(boundary) > 0
    lowest = boundary[boundary[['T0', 'T1']].min(axis=1) <= grid['T'].min() + 1e-12]
    assert len(lowest) > 0
    np.testing.assert_allclose(lowest[['B0', 'B1']].to_numpy(), 0.619, atol=0.01)
    assert boundary[['B0', 'B1']].to_numpy().max() < 0.65
    assert not grid.loc[grid['B'] > 0.9, 'entangled'].astype(bool).any()

@pytest.mark.slow
def test_slope_acceptance():
    result = runner.invoke(cli, ['slope', '--J', '1', '--B', '0.5', '--T', '0.2', '--sites', '512', '--samples', '2000',
                                 '--seed', '0', '--average', 'both'])
    assert result.exit_code == 0, result.output
    assert 'verdict PASS' in result.output
