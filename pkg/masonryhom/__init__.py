# !/usr/bin/env python3
"""
==============================================================
Description  : masonryhom - 粘结砌体块体组合的均匀化计算工具
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-17 15:00:00

由单元问题计算均匀化能量密度 f_hom 与干砌体密度 g_hom，包括：
- 对称张量、弹性算子与锥（tensors, cones）
- 一维链、顺缝/错缝砌块单元网格、细化与拼装（geometry）
- 单元问题的 ADMM 求解与小规模参考解（cellsolver）
- 密度扫描、回收函数、张拉锥检测与增长审计（density）
- 宏观泛函求值（macroeval）与 ε 序列实验（harness）
- 命令行入口（cli）

主要特性：
- 单元求解按内容寻址缓存（cache），独立求解可并行（executor）
- 统一的异常层次与 xtlog 日志
==============================================================
"""

from __future__ import annotations

from .cache import SolveCache
from .cellsolver import CellProblem, CellSolution, SolverParams, assemble, reference_density, solve_density, solve_dry
from .cones import ConeSpec, JumpCone, JumpConeKind, jump_prox, membership, polar_membership, polar_project, project_cone
from .density import (
    DensitySample,
    DensitySweep,
    DensityTable,
    ProblemTemplate,
    analytic_1d,
    audit_growth,
    audit_shape,
    detect_cones,
    estimate_recession,
    sample_directions,
)
from .exception import AuditError, ConfigError, GeometryError, InputError, MasonryHomError, SolverError, report_error
from .geometry import UnitCellMesh, build_chain_1d, build_running_bond, build_stack_bond, parse_geometry, refine_mesh, tile_mesh
from .harness import EpsilonExperiment, HarnessResult, run_sweep
from .log import logging_wraps
from .macroeval import AnalyticDensity1D, CellDensity, MacroField, admissible, evaluate
from .tensors import ElasticityOperator, SymTensor, energy_norm, sym_dyad
from .timer import TimerWrapt, timer_wraps

__version__ = '0.1.0'
__author__ = 'sandorn'
__email__ = 'sandorn@live.cn'

__all__ = (
    'AnalyticDensity1D',
    'AuditError',
    'CellDensity',
    'CellProblem',
    'CellSolution',
    'ConeSpec',
    'ConfigError',
    'DensitySample',
    'DensitySweep',
    'DensityTable',
    'ElasticityOperator',
    'EpsilonExperiment',
    'GeometryError',
    'HarnessResult',
    'InputError',
    'JumpCone',
    'JumpConeKind',
    'MacroField',
    'MasonryHomError',
    'ProblemTemplate',
    'SolveCache',
    'SolverError',
    'SolverParams',
    'SymTensor',
    'TimerWrapt',
    'UnitCellMesh',
    'admissible',
    'analytic_1d',
    'assemble',
    'audit_growth',
    'audit_shape',
    'build_chain_1d',
    'build_running_bond',
    'build_stack_bond',
    'detect_cones',
    'energy_norm',
    'estimate_recession',
    'evaluate',
    'jump_prox',
    'logging_wraps',
    'membership',
    'parse_geometry',
    'polar_membership',
    'polar_project',
    'project_cone',
    'reference_density',
    'refine_mesh',
    'report_error',
    'run_sweep',
    'sample_directions',
    'solve_density',
    'solve_dry',
    'sym_dyad',
    'tile_mesh',
    'timer_wraps',
)
