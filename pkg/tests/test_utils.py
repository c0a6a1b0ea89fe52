from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from masonryhom.exception import InputError, SolverError
from masonryhom.log import logging_wraps, set_log_level
from masonryhom.timer import TimerWrapt, timer_wraps
from masonryhom.utils import FORMAT_VERSION, atomic_write_text, canonical_json, emit, render_csv, render_json, stable_hash, summarize


def test_canonical_json_sorts_keys_and_spells_infinity():
    text = canonical_json({'b': math.inf, 'a': np.array([1.0, -math.inf]), 'c': np.int64(3)})
    assert text == '{"a":[1.0,"-inf"],"b":"inf","c":3}'


def test_stable_hash_is_order_independent():
    assert stable_hash({'x': 1, 'y': [0.5]}) == stable_hash({'y': [0.5], 'x': 1})
    assert len(stable_hash({})) == 64


def test_render_csv_has_comment_header():
    text = render_csv(['xi', 'f'], [(0.1, 0.005), (2.0, math.inf)], {'grid': '0:1:2'})
    lines = text.splitlines()
    assert lines[0] == f'# format_version: {FORMAT_VERSION}'
    assert lines[1] == '# config: {"grid":"0:1:2"}'
    assert lines[2] == 'xi,f'
    assert lines[3] == '0.1,0.005'
    assert lines[4] == '2.0,inf'


def test_render_json_adds_version_and_config():
    body = json.loads(render_json({'value': 1.5}, {'command': 'cell'}))
    assert body == {'value': 1.5, 'format_version': FORMAT_VERSION, 'config': {'command': 'cell'}}


def test_emit_to_file_and_stdout(tmp_path: Path, capsys):
    target = tmp_path / 'nested' / 'out.txt'
    emit('hello\n', target)
    assert target.read_text(encoding='utf-8') == 'hello\n'
    emit('to stdout\n', '-')
    assert capsys.readouterr().out == 'to stdout\n'


def test_atomic_write_leaves_no_temporaries(tmp_path: Path):
    target = atomic_write_text(tmp_path / 'a.json', '{}')
    atomic_write_text(target, '{"v": 2}')
    assert [p.name for p in tmp_path.iterdir()] == ['a.json']
    assert json.loads(target.read_text(encoding='utf-8')) == {'v': 2}


def test_summarize_shortens_arrays_and_long_reprs():
    assert summarize(np.zeros((3, 4))) == 'ndarray(3, 4)'
    assert summarize('x' * 500).endswith('...')


def test_logging_wraps_passes_results_and_reraises():
    @logging_wraps
    def double(x: float) -> float:
        return 2 * x

    @logging_wraps(log_result=False)
    def broken() -> None:
        raise ZeroDivisionError

    assert double(2.0) == 4.0
    with pytest.raises(ZeroDivisionError):
        broken()


def test_logging_wraps_can_return_the_error():
    @logging_wraps(re_raise=False)
    def broken() -> None:
        raise SolverError('NaN detected in ADMM iterates', {'iteration': 3})

    err = broken()
    assert isinstance(err, SolverError)
    assert err.diagnostics == {'iteration': 3}


def test_timers():
    @timer_wraps
    def work() -> int:
        return 7

    assert work() == 7
    with TimerWrapt('block', quiet=True) as clock:
        sum(range(1000))
    assert clock.elapsed >= 0.0


def test_logging_wraps_passes_nan_results_through():
    @logging_wraps
    def broken_density() -> float:
        return math.nan

    assert math.isnan(broken_density())


def test_set_log_level_rejects_unknown_levels():
    set_log_level('warning')
    with pytest.raises(InputError):
        set_log_level('chatty')
