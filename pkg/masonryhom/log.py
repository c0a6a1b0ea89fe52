# !/usr/bin/env python3
"""
==============================================================
Description  : 日志装饰器模块 - 记录扫描级操作的调用、耗时与结果
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-18 10:20:00

本模块提供以下核心功能：
- logging_wraps：扫描级操作的日志装饰器
- set_log_level：命令行 --log-level 使用的日志级别设置

主要特性：
- 参数与返回值以摘要形式记录，数组只记录形状
- 返回值中出现 NaN 时记录 warning
- 异常经由 report_error 统一记录，re_raise=False 时返回异常对象
==============================================================
"""

from __future__ import annotations

import math
from collections.abc import Callable
from functools import wraps
from time import perf_counter
from typing import Any

import numpy as np
from xtlog import mylog

from .exception import InputError, report_error
from .utils import get_function_location, summarize

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


def _has_nan(value: Any) -> bool:
    if isinstance(value, float):
        return math.isnan(value)
    if isinstance(value, np.ndarray) and value.dtype.kind == 'f':
        return bool(np.isnan(value).any())
    return False


class _CallLog:
    """一次调用的日志上下文"""

    def __init__(self, func: Callable[..., Any], log_args: bool, log_result: bool, custom_message: str) -> None:
        self.where = get_function_location(func)
        self.log_args = log_args
        self.log_result = log_result
        self.prefix = f'{custom_message} {self.where}'.strip(' |')
        self.start = 0.0

    def enter(self, args: tuple[Any, ...], kwargs: dict[str, Any]) -> None:
        if self.log_args:
            rendered = [summarize(a) for a in args] + [f'{k}={summarize(v)}' for k, v in kwargs.items()]
            mylog.debug(f'{self.where}Args: {", ".join(rendered)}')
        self.start = perf_counter()

    def leave(self, result: Any) -> Any:
        elapsed = perf_counter() - self.start
        if _has_nan(result):
            mylog.warning(f'{self.where}返回值含 NaN ({elapsed:.3f}s)')
        elif self.log_result:
            mylog.success(f'{self.where}Result: {type(result).__name__} = {summarize(result)} ({elapsed:.3f}s)')
        return result


def logging_wraps(
    func: Callable[..., Any] | None = None,
    *,
    re_raise: bool = True,
    log_args: bool = True,
    log_result: bool = True,
    log_traceback: bool = False,
    custom_message: str = '',
) -> Callable[..., Any]:
    """
    日志装饰器

    Args:
        func: 被装饰的函数（直接装饰时传入）
        re_raise: 是否重新抛出异常，默认True，数值结果不允许被静默替换
        log_args: 是否记录参数摘要
        log_result: 是否记录返回值摘要
        log_traceback: 是否记录完整堆栈
        custom_message: 自定义日志前缀

    Example:
        >>> @logging_wraps(log_args=False)
        ... def detect_cones(template, directions): ...
    """

    def decorator(target: Callable[..., Any]) -> Callable[..., Any]:
        @wraps(target)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            call = _CallLog(target, log_args, log_result, custom_message)
            call.enter(args, kwargs)
            try:
                result = target(*args, **kwargs)
            except Exception as err:
                report_error(err, call.prefix, log_traceback)
                if re_raise:
                    raise
                return err
            return call.leave(result)

        return wrapper

    return decorator(func) if func else decorator


def set_log_level(level: str) -> None:
    name = level.upper()
    if name not in LOG_LEVELS:
        raise InputError(f'unknown log level {level!r}, expected one of {", ".join(LOG_LEVELS)}')
    mylog.set_level(name)


__all__ = ['LOG_LEVELS', 'logging_wraps', 'set_log_level']
