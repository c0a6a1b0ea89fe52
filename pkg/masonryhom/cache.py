# !/usr/bin/env python3
"""
==============================================================
Description  : 缓存模块 - 单元问题求解结果的内容寻址缓存
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-12 11:30:00

本模块提供以下核心功能：
- SolveCache：两级缓存（内存 + 可选磁盘目录），键为规范化 JSON 的 SHA-256
- default_cache_dir：读取 MASONRYHOM_CACHE_DIR 环境变量

主要特性：
- 内存层保留 maxsize 条，超出时移除最旧条目
- 磁盘层文件 <key[:2]>/<key>.json 只写一次（临时文件 + os.replace）
- 并发写入者写入相同内容，互不干扰
==============================================================
"""

from __future__ import annotations

import json
import os
import threading
from collections import OrderedDict
from collections.abc import Callable
from pathlib import Path
from typing import Any, TypeVar

from xtlog import mylog

from .utils import atomic_write_text, canonical_json, stable_hash

T = TypeVar('T')

CACHE_ENV_VAR = 'MASONRYHOM_CACHE_DIR'


def default_cache_dir() -> Path | None:
    value = os.environ.get(CACHE_ENV_VAR, '').strip()
    return Path(value) if value else None


def _identity(value: Any) -> Any:
    return value


class SolveCache:
    """两级缓存

    Args:
        maxsize: 内存层最大条目数，None 表示不限
        cache_dir: 磁盘层目录，None 时仅使用内存层

    Example:
        >>> cache = SolveCache(maxsize=256, cache_dir='~/.cache/masonryhom')
        >>> sol = cache.get_or_compute(problem.to_dict(), lambda: solve_density(problem), CellSolution.to_dict, CellSolution.from_dict)
    """

    def __init__(self, maxsize: int | None = 1024, cache_dir: str | os.PathLike[str] | None = None) -> None:
        self.maxsize = maxsize
        self.cache_dir = Path(cache_dir).expanduser() if cache_dir is not None else None
        self._memory: OrderedDict[str, Any] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key_for(payload: Any) -> str:
        return stable_hash(payload)

    def _path_for(self, key: str) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / key[:2] / f'{key}.json'

    def __contains__(self, key: str) -> bool:
        with self._lock:
            if key in self._memory:
                return True
        path = self._path_for(key)
        return path is not None and path.exists()

    def __len__(self) -> int:
        return len(self._memory)

    def _remember(self, key: str, value: Any) -> None:
        with self._lock:
            self._memory[key] = value
            self._memory.move_to_end(key)
            while self.maxsize is not None and len(self._memory) > self.maxsize:
                self._memory.popitem(last=False)

    def get(self, key: str, decode: Callable[[Any], T] = _identity) -> T | None:
        with self._lock:
            if key in self._memory:
                self._memory.move_to_end(key)
                self.hits += 1
                return self._memory[key]
        path = self._path_for(key)
        if path is not None and path.exists():
            try:
                stored = json.loads(path.read_text(encoding='utf-8'))
            except (OSError, json.JSONDecodeError) as err:
                mylog.warning(f'SolveCache | 忽略损坏的缓存文件 {path}: {err}')
            else:
                value = decode(stored['value'])
                self._remember(key, value)
                with self._lock:
                    self.hits += 1
                return value
        with self._lock:
            self.misses += 1
        return None

    def put(self, key: str, value: T, encode: Callable[[T], Any] = _identity, payload: Any = None) -> None:
        self._remember(key, value)
        path = self._path_for(key)
        if path is None or path.exists():
            return
        body = {'key': key, 'payload': payload, 'value': encode(value)}
        atomic_write_text(path, canonical_json(body, indent=1) + '\n')
        mylog.debug(f'SolveCache | 写入 {path}')

    def get_or_compute(
        self,
        payload: Any,
        compute: Callable[[], T],
        encode: Callable[[T], Any] = _identity,
        decode: Callable[[Any], T] = _identity,
    ) -> T:
        key = self.key_for(payload)
        cached = self.get(key, decode)
        if cached is not None:
            return cached
        value = compute()
        self.put(key, value, encode, payload)
        return value

    def clear(self) -> None:
        """只清空内存层，磁盘文件保持只写一次"""
        with self._lock:
            self._memory.clear()
            self.hits = 0
            self.misses = 0


__all__ = ['CACHE_ENV_VAR', 'SolveCache', 'default_cache_dir']
