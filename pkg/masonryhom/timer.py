# !/usr/bin/env python3
"""
==============================================================
Description  : 计时工具模块 - 求解与扫描耗时记录
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-12 11:10:00

本模块提供以下核心功能：
- timer_wraps：自动记录函数执行耗时的装饰器
- TimerWrapt：上下文管理器，记录代码块耗时并保留 elapsed 供诊断使用
==============================================================
"""

from __future__ import annotations

from collections.abc import Callable
from functools import wraps
from time import perf_counter
from typing import Any

from xtlog import mylog

from .utils import get_function_location


def timer_wraps(fn: Callable[..., Any] | None = None) -> Callable[..., Any]:
    """记录函数执行耗时（info 级别），失败时以 error 级别记录

    Example:
        >>> @timer_wraps
        ... def run_sweep(experiment): ...
    """

    def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            func_location = get_function_location(func)
            start_time = perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception:
                mylog.error(f'{func_location}失败耗时: {perf_counter() - start_time:.4f}秒')
                raise
            mylog.info(f'{func_location}执行耗时: {perf_counter() - start_time:.4f}秒')
            return result

        return wrapper

    return decorator(fn) if fn else decorator


timer = timer_wraps


class TimerWrapt:
    """
    代码块计时器

    Example:
        >>> with TimerWrapt('admm', quiet=True) as clock:
        ...     run_iterations()
        >>> clock.elapsed
    """

    def __init__(self, description: str = 'TimerWrapt', quiet: bool = False) -> None:
        self.description = description
        self.quiet = quiet
        self.start_time: float = 0.0
        self.elapsed: float = 0.0

    def __enter__(self) -> TimerWrapt:
        self.start_time = perf_counter()
        return self

    def __exit__(self, exc_type: type[BaseException] | None, exc_val: BaseException | None, exc_tb: Any) -> None:
        self.elapsed = perf_counter() - self.start_time
        if exc_type is not None:
            mylog.error(f'{self.description} 失败耗时:{self.elapsed:.4f}秒')
            return
        if self.quiet:
            mylog.debug(f'{self.description} 执行耗时:{self.elapsed:.4f}秒')
        else:
            mylog.info(f'{self.description} 执行耗时:{self.elapsed:.4f}秒')


__all__ = [
    'TimerWrapt',
    'timer',
    'timer_wraps',
]
