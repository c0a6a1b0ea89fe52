#!/usr/bin/env python3
"""
==============================================================
Description  : 参数验证模块 - 构造函数与求解入口使用的校验工具
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-12 10:30:00

本模块提供以下核心功能：
- ensure_dim / ensure_vector / ensure_unit_vector：维度与向量校验
- ensure_positive / ensure_increasing：标量与序列校验
- ensure_initialized：确保惰性属性已构建的方法装饰器

所有校验失败统一抛出 InputError，消息中给出出错字段名。
==============================================================
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from functools import wraps
from typing import Any

import numpy as np

from .exception import InputError

SUPPORTED_DIMS = (1, 2)
UNIT_TOL = 1e-9


def ensure_dim(dim: Any, name: str = 'dim') -> int:
    if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)) or int(dim) not in SUPPORTED_DIMS:
        raise InputError(f'{name} must be 1 or 2, got {dim!r}')
    return int(dim)


def ensure_vector(values: Any, dim: int, name: str = 'vector') -> np.ndarray:
    """转换为长度为 dim 的浮点数组"""
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.shape != (dim,):
        raise InputError(f'{name} must have length {dim}, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InputError(f'{name} must be finite, got {arr.tolist()}')
    return arr


def ensure_unit_vector(values: Any, dim: int, name: str = 'normal') -> np.ndarray:
    arr = ensure_vector(values, dim, name)
    if abs(float(np.linalg.norm(arr)) - 1.0) > UNIT_TOL:
        raise InputError(f'{name} must have unit length, got |{name}|={np.linalg.norm(arr):.3e}')
    return arr


def ensure_positive(value: Any, name: str, allow_zero: bool = False) -> float:
    val = float(value)
    if not np.isfinite(val) or val < 0 or (val == 0 and not allow_zero):
        bound = '>= 0' if allow_zero else '> 0'
        raise InputError(f'{name} must be {bound}, got {value!r}')
    return val


def ensure_increasing(values: Sequence[float], name: str) -> tuple[float, ...]:
    seq = tuple(float(v) for v in values)
    if not seq:
        raise InputError(f'{name} must not be empty')
    if any(b <= a for a, b in zip(seq, seq[1:], strict=False)):
        raise InputError(f'{name} must be strictly increasing, got {list(seq)}')
    return seq


def ensure_initialized(var_name: str) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
    """确保实例属性已初始化的方法装饰器

    Raises:
        RuntimeError: 属性缺失或为 None 时抛出
    """

    def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
        @wraps(func)
        def wrapper(self: object, *args: Any, **kwargs: Any) -> Any:
            if getattr(self, var_name, None) is None:
                raise RuntimeError(f'{var_name} not initialized') from None
            return func(self, *args, **kwargs)

        return wrapper

    return decorator


__all__ = [
    'SUPPORTED_DIMS',
    'ensure_dim',
    'ensure_increasing',
    'ensure_initialized',
    'ensure_positive',
    'ensure_unit_vector',
    'ensure_vector',
]
