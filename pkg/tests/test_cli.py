from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from masonryhom.cache import CACHE_ENV_VAR
from masonryhom.cli import build_argparser, main, parse_grid, parse_xi
from masonryhom.exception import InputError
from masonryhom.executor import JOBS_ENV_VAR
from masonryhom.macroeval import MacroField


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    monkeypatch.delenv(CACHE_ENV_VAR, raising=False)
    monkeypatch.delenv(JOBS_ENV_VAR, raising=False)


def read_csv(path: Path) -> list[dict[str, str]]:
    lines = [line for line in path.read_text(encoding='utf-8').splitlines() if not line.startswith('#')]
    return list(csv.DictReader(lines))


def read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding='utf-8'))


def test_parse_grid():
    assert parse_grid('0:0.5:2') == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert len(parse_grid('-3:0.1:3')) == 61
    for bad in ('1:2', '0:-1:2', '2:1:0', 'a:b:c'):
        with pytest.raises(InputError):
            parse_grid(bad)


def test_parse_xi():
    assert parse_xi('2', 1).components == (2.0,)
    assert parse_xi('1,2,3', 2).to_matrix().tolist() == [[1.0, 3.0], [3.0, 2.0]]
    assert parse_xi({'matrix': [[1, 0], [0, 0]]}, 2).components[0] == 1.0
    with pytest.raises(InputError):
        parse_xi('1,2', 2)
    with pytest.raises(InputError):
        parse_xi(2.0, 2)


def test_oned_matches_the_closed_form(tmp_path: Path):
    out = tmp_path / 'oned.csv'
    assert main(['oned', '--xi-grid', '-1:0.5:2', '-o', str(out)]) == 0
    rows = read_csv(out)
    assert [float(r['xi']) for r in rows] == [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
    assert max(float(r['abs_err']) for r in rows) <= 1e-6
    assert out.read_text(encoding='utf-8').startswith('# format_version: 1\n# config: ')


def test_oned_recession_columns(tmp_path: Path):
    out = tmp_path / 'oned.csv'
    assert main(['oned', '--xi-grid', '-1:1:2', '--recession', '-o', str(out)]) == 0
    rows = {float(r['xi']): r for r in read_csv(out)}
    assert float(rows[2.0]['recession_solver']) == pytest.approx(2.0, abs=1e-4)
    assert rows[-1.0]['recession_solver'] == 'inf'
    assert rows[-1.0]['recession_analytic'] == 'inf'


def test_oned_rejects_2d_geometry(tmp_path: Path, capsys):
    assert main(['oned', '--geometry', 'stack:1x1', '-o', str(tmp_path / 'x.csv')]) == 2
    assert 'oned needs a 1D geometry' in capsys.readouterr().err


def test_cell_writes_solution_and_jumps(tmp_path: Path):
    out = tmp_path / 'cell.json'
    jumps = tmp_path / 'jumps.csv'
    assert main(['cell', '--xi', '2', '-o', str(out), '--jumps-csv', str(jumps)]) == 0
    body = read_json(out)
    assert body['solution']['value'] == pytest.approx(1.5, abs=1e-7)
    assert body['solution']['surface_part'] == pytest.approx(1.0, abs=1e-6)
    assert 'elapsed' not in body['solution']
    assert body['format_version'] == 1
    assert body['config']['command'] == 'cell'
    (row,) = read_csv(jumps)
    assert float(row['jx']) == pytest.approx(1.0, abs=1e-6)


def test_cell_output_is_deterministic(tmp_path: Path):
    a, b = tmp_path / 'a.json', tmp_path / 'b.json'
    args = ['cell', '--geometry', 'stack:1x1', '--xi', '2,0,0']
    assert main([*args, '-o', str(a)]) == 0
    assert main([*args, '-o', str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_flags_override_the_config(tmp_path: Path):
    config = tmp_path / 'cell.json'
    config.write_text(json.dumps({'xi': '3', 'dry': True}), encoding='utf-8')
    out = tmp_path / 'out.json'
    assert main(['cell', '--config', str(config), '--xi', '-1', '-o', str(out)]) == 0
    body = read_json(out)
    assert body['config']['options']['xi'] == '-1'
    assert body['solution']['value'] == pytest.approx(0.5, abs=1e-7)
    assert body['solution']['include_surface'] is False


def test_nonconverged_solves_exit_3(tmp_path: Path):
    config = tmp_path / 'cell.json'
    config.write_text(json.dumps({'xi': '2', 'params': {'max_iter': 1}}), encoding='utf-8')
    assert main(['cell', '--config', str(config), '-o', str(tmp_path / 'out.json')]) == 3


@pytest.mark.parametrize(
    'content',
    ['{"xi": "2", "colour": "red"}', '{not json', '[1, 2]', '{"params": {"momentum": 1}}', '{"params": 3}'],
)
def test_bad_configs_exit_2(tmp_path: Path, content):
    config = tmp_path / 'bad.json'
    config.write_text(content, encoding='utf-8')
    assert main(['cell', '--config', str(config)]) == 2


def test_missing_config_file_exits_2(tmp_path: Path):
    assert main(['cell', '--config', str(tmp_path / 'absent.json')]) == 2


def test_usage_errors_exit_2(capsys):
    assert main(['oned', '--bogus']) == 2
    assert main([]) == 2
    assert 'usage' in capsys.readouterr().err


def test_geometry_subcommand(tmp_path: Path):
    out = tmp_path / 'mesh.json'
    assert main(['geometry', '--geometry', 'stack:2x2', '--tile', '2', '-o', str(out)]) == 0
    body = read_json(out)
    assert len(body['mesh']['blocks']) == 16
    assert len(body['fingerprint']) == 64


def test_gamma_subcommand(tmp_path: Path):
    out = tmp_path / 'gamma.csv'
    assert main(['gamma', '--xi', '2', '--n-ladder', '1,2,4', '-o', str(out)]) == 0
    rows = read_csv(out)
    assert [int(r['N']) for r in rows] == [1, 2, 4]
    assert all(float(r['energy']) == pytest.approx(1.5, abs=1e-6) for r in rows)


def test_macro_subcommand(tmp_path: Path):
    field = tmp_path / 'field.json'
    field.write_text(json.dumps(MacroField.piecewise_1d([0.0, 0.5, 1.0], [0.0, 0.2], [0.0, 0.0]).to_dict()), encoding='utf-8')
    out = tmp_path / 'energy.json'
    assert main(['macro', '--field', str(field), '-o', str(out)]) == 0
    assert read_json(out)['total'] == pytest.approx(0.2)
    assert main(['macro', '-o', str(out)]) == 2


def test_density_subcommand_writes_an_audit(tmp_path: Path):
    out = tmp_path / 'density.csv'
    assert main(['density', '--geometry', 'chain', '--samples', '6', '--seed', '4', '--pairs', '20', '-o', str(out), '--strict']) == 0
    assert len(read_csv(out)) == 6
    audit = read_json(tmp_path / 'density.audit.json')
    assert audit['passed'] is True
    assert audit['n_samples'] == 6
    assert audit['shape']['pairs_checked'] == 20
    assert audit['shape']['scale'] == 2.0
    assert audit['shape']['convexity_violations'] == audit['shape']['homogeneity_violations'] == []


def test_cone_subcommand(tmp_path: Path):
    out = tmp_path / 'cones.json'
    assert main(['cone', '--geometry', 'chain', '-o', str(out)]) == 0
    body = read_json(out)
    assert body['symmetric_difference'] == []
    assert body['in_K'] == [True, False]


def test_parser_lists_all_subcommands():
    text = build_argparser().format_help()
    for name in ('oned', 'cell', 'density', 'cone', 'macro', 'gamma', 'geometry'):
        assert name in text


def test_unknown_log_level_exits_2(capsys):
    assert main(['--log-level', 'chatty', 'geometry']) == 2
    assert 'unknown log level' in capsys.readouterr().err
