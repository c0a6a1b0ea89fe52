# !/usr/bin/env python3
"""
==============================================================
Description  : 异常处理模块 - 均质化工具包的异常体系与统一处理
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-12 10:20:00

本模块提供以下核心功能：
- MasonryHomError 及其子类：输入、配置、几何、求解器、审计异常
- report_error：统一记录异常信息（类型、消息、诊断、违例样本、堆栈）
- exit_code_for：异常到命令行退出码的映射

主要特性：
- 求解器异常携带迭代诊断信息
- 审计异常携带违规样本列表
- 日志统一经由 xtlog.mylog 输出
==============================================================
"""

from __future__ import annotations

import traceback
from typing import Any

from xtlog import mylog

AUDIT_PREVIEW = 3


class MasonryHomError(Exception):
    """工具包内所有异常的基类"""


class InputError(MasonryHomError, ValueError):
    """输入错误：维度不匹配、参数越界、偏移量与周期性不兼容等"""


class ConfigError(InputError):
    """配置文件（JSON）内容无效"""


class GeometryError(MasonryHomError):
    """几何错误：固定平移后系统仍奇异（存在悬浮块）"""


class SolverError(MasonryHomError):
    """求解器错误：出现 NaN，或小型二次规划不收敛"""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        detail = ', '.join(f'{k}={v}' for k, v in sorted(self.diagnostics.items()))
        return f'{base} [{detail}]'


class AuditError(MasonryHomError):
    """审计失败：增长界、K0 正交锥恒等式等性质被违反"""

    def __init__(self, message: str, offending: list[Any] | None = None) -> None:
        super().__init__(message)
        self.offending = list(offending or [])


def report_error(exc: BaseException, context: str = '', log_traceback: bool = False) -> None:
    """
    记录异常：类型与消息，求解器诊断逐项，审计违例给出数量与前几条

    Args:
        exc: 异常对象
        context: 日志前缀，如子命令名或函数位置
        log_traceback: 是否记录完整堆栈
    """
    prefix = f'{context} | ' if context else ''
    mylog.error(f'{prefix}{type(exc).__name__}: {exc}')
    if isinstance(exc, SolverError):
        for key, value in sorted(exc.diagnostics.items()):
            mylog.debug(f'{prefix}diagnostic {key} = {value}')
    elif isinstance(exc, AuditError) and exc.offending:
        shown = exc.offending[:AUDIT_PREVIEW]
        more = len(exc.offending) - len(shown)
        mylog.warning(f'{prefix}{len(exc.offending)} offending sample(s): {shown}' + (f' (+{more} more)' if more else ''))
    if log_traceback:
        mylog.error(f'{prefix}traceback\n{"".join(traceback.format_exception(exc))}')


def exit_code_for(exc: BaseException) -> int:
    """命令行退出码：配置/输入错误 2，求解不收敛 3，其余 1"""
    if isinstance(exc, InputError):
        return 2
    if isinstance(exc, SolverError):
        return 3
    return 1


__all__ = [
    'AuditError',
    'ConfigError',
    'GeometryError',
    'InputError',
    'MasonryHomError',
    'SolverError',
    'exit_code_for',
    'report_error',
]
