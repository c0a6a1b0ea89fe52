# !/usr/bin/env python3
"""
==============================================================
Description  : 并行执行模块 - 独立单元问题的有界并行调度
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-19 09:30:00

本模块提供以下核心功能：
- map_ordered：线程池上的有序映射，jobs<=1 时直接串行执行
- default_jobs：读取 MASONRYHOM_JOBS 环境变量

主要特性：
- 结果顺序与输入顺序一致，保证输出可复现
- 工作线程异常经由 report_error 记录后重新抛出
- 单元求解的重活在 splu / numpy 内部完成，线程池即可并行
==============================================================
"""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import TypeVar

from xtlog import mylog

from .exception import InputError, report_error

T = TypeVar('T')
R = TypeVar('R')

JOBS_ENV_VAR = 'MASONRYHOM_JOBS'


def default_jobs() -> int:
    value = os.environ.get(JOBS_ENV_VAR, '').strip()
    if not value:
        return 1
    try:
        jobs = int(value)
    except ValueError as err:
        raise InputError(f'{JOBS_ENV_VAR} must be an integer, got {value!r}') from err
    return max(jobs, 1)


def _guarded(func: Callable[[T], R], item: T) -> R:
    try:
        return func(item)
    except Exception as err:
        report_error(err, f'map_ordered item={item!r:.80}')
        raise


def map_ordered(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    """
    有序并行映射

    Args:
        func: 作用于单个元素的函数
        items: 输入序列
        jobs: 最大线程数，<=1 时串行

    Returns:
        与输入顺序一致的结果列表
    """
    work = list(items)
    if jobs <= 1 or len(work) <= 1:
        return [_guarded(func, item) for item in work]
    workers = min(jobs, len(work))
    mylog.debug(f'map_ordered | {len(work)} tasks on {workers} threads')
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='MasonryHom') as pool:
        return list(pool.map(partial(_guarded, func), work))


__all__ = ['JOBS_ENV_VAR', 'default_jobs', 'map_ordered']
