# !/usr/bin/env python3
"""
==============================================================
Description  : 核心工具函数模块
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-12 10:05:00

提供日志定位、规范化 JSON、内容哈希、原子写文件等基础工具。
==============================================================
"""

from __future__ import annotations

import csv
import hashlib
import inspect
import io
import json
import math
import os
import tempfile
from collections.abc import Callable, Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

FORMAT_VERSION = 1


def get_function_location(func: Callable[..., Any] | None) -> str:
    """
    获取函数的位置信息，用于日志前缀

    Returns:
        str: 格式为 "文件路径:行号@函数名 | " 的字符串
    """
    if func is None or not callable(func):
        return 'unknown:0@unknown | '
    try:
        unwrapped = inspect.unwrap(func)
    except ValueError:
        unwrapped = func
    code = getattr(unwrapped, '__code__', None)
    name = getattr(unwrapped, '__qualname__', None) or getattr(unwrapped, '__name__', 'unknown')
    if code is None:
        module = getattr(unwrapped, '__module__', None) or 'builtin'
        return f'{module}:0@{name} | '
    return f'{code.co_filename}:{code.co_firstlineno}@{name} | '


def summarize(value: Any, limit: int = 120) -> str:
    """日志用的简短表示，数组只给出形状"""
    if isinstance(value, np.ndarray):
        return f'ndarray{value.shape}'
    text = repr(value)
    return text if len(text) <= limit else f'{text[: limit - 3]}...'


def _to_jsonable(obj: Any) -> Any:
    if hasattr(obj, 'to_dict'):
        return _to_jsonable(obj.to_dict())
    if isinstance(obj, Mapping):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return _to_jsonable(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        if math.isnan(value):
            return 'nan'
        return value
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json(obj: Any, indent: int | None = None) -> str:
    """规范化 JSON：键排序、浮点数 repr 固定，无穷大写成字符串"""
    return json.dumps(_to_jsonable(obj), sort_keys=True, indent=indent, separators=(',', ':') if indent is None else (',', ': '))


def stable_hash(obj: Any) -> str:
    """内容寻址用的 SHA-256 摘要"""
    return hashlib.sha256(canonical_json(obj).encode('utf-8')).hexdigest()


def parse_float(value: Any) -> float:
    """读取 JSON 中的浮点数，接受 'inf' / '-inf' 字符串"""
    return float(value)


def atomic_write_text(path: str | os.PathLike[str], text: str) -> Path:
    """先写同目录临时文件，再 os.replace 到目标路径"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f'.{target.name}.', suffix='.tmp', dir=target.parent)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return target


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], config: Mapping[str, Any] | None = None) -> str:
    """CSV 文本：先写 format_version 与 config 注释行，再写表头"""
    buffer = io.StringIO()
    buffer.write(f'# format_version: {FORMAT_VERSION}\n')
    if config is not None:
        buffer.write(f'# config: {canonical_json(config)}\n')
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(v) for v in row])
    return buffer.getvalue()


def _format_cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def render_json(payload: Mapping[str, Any], config: Mapping[str, Any] | None = None) -> str:
    body = dict(payload)
    body['format_version'] = FORMAT_VERSION
    if config is not None:
        body['config'] = config
    return canonical_json(body, indent=2) + '\n'


def emit(text: str, path: str | os.PathLike[str] | None) -> None:
    """写到文件（原子）或标准输出"""
    if path is None or str(path) == '-':
        print(text, end='')
        return
    atomic_write_text(path, text)


__all__ = [
    'FORMAT_VERSION',
    'atomic_write_text',
    'canonical_json',
    'emit',
    'get_function_location',
    'parse_float',
    'render_csv',
    'render_json',
    'stable_hash',
    'summarize',
]
