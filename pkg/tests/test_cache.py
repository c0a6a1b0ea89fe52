from __future__ import annotations

import json
from pathlib import Path

import pytest

from masonryhom.cache import CACHE_ENV_VAR, SolveCache, default_cache_dir
from masonryhom.cellsolver import CellSolution, solve_density
from masonryhom.density import ProblemTemplate
from masonryhom.tensors import SymTensor


def test_memory_layer_counts_hits_and_evicts():
    cache = SolveCache(maxsize=2)
    calls = []
    for payload in ({'xi': 1}, {'xi': 2}, {'xi': 1}, {'xi': 3}, {'xi': 2}):
        cache.get_or_compute(payload, lambda p=payload: calls.append(p) or p['xi'])
    assert calls == [{'xi': 1}, {'xi': 2}, {'xi': 3}, {'xi': 2}]
    assert cache.hits == 1
    assert cache.misses == 4
    assert len(cache) == 2


def test_keys_ignore_dict_order():
    assert SolveCache.key_for({'a': 1, 'b': [1.0, 2.0]}) == SolveCache.key_for({'b': [1.0, 2.0], 'a': 1})
    assert SolveCache.key_for({'xi': 1.0}) != SolveCache.key_for({'xi': 1.0000001})


def test_disk_layer_survives_a_new_instance(tmp_path: Path, chain_template: ProblemTemplate):
    problem = chain_template.problem(SymTensor(1, (2.0,)))
    first = SolveCache(cache_dir=tmp_path)
    sol = first.get_or_compute(problem.to_dict(), lambda: solve_density(problem), CellSolution.to_dict, CellSolution.from_dict)
    files = list(tmp_path.rglob('*.json'))
    assert len(files) == 1
    stored = json.loads(files[0].read_text(encoding='utf-8'))
    assert stored['payload']['xi'] == [2.0]

    second = SolveCache(cache_dir=tmp_path)
    again = second.get_or_compute(problem.to_dict(), pytest.fail, CellSolution.to_dict, CellSolution.from_dict)
    assert again.value == sol.value
    assert second.hits == 1


def test_corrupt_cache_file_is_recomputed(tmp_path: Path):
    cache = SolveCache(cache_dir=tmp_path)
    key = cache.key_for({'xi': 5})
    path = tmp_path / key[:2] / f'{key}.json'
    path.parent.mkdir(parents=True)
    path.write_text('{broken', encoding='utf-8')
    assert cache.get_or_compute({'xi': 5}, lambda: 42) == 42


def test_clear_resets_memory_only(tmp_path: Path):
    cache = SolveCache(cache_dir=tmp_path)
    cache.get_or_compute({'xi': 1}, lambda: 1)
    cache.clear()
    assert len(cache) == 0 and cache.hits == 0
    assert cache.key_for({'xi': 1}) in cache


def test_default_cache_dir_reads_the_environment(monkeypatch, tmp_path: Path):
    monkeypatch.setenv(CACHE_ENV_VAR, str(tmp_path))
    assert default_cache_dir() == tmp_path
    monkeypatch.setenv(CACHE_ENV_VAR, '  ')
    assert default_cache_dir() is None
