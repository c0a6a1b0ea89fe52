# !/usr/bin/env python3
"""
==============================================================
Description  : ε 序列实验模块 - N×N 块拼装上的 F_ε 最小化与 f_hom 对比
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-16 11:30:00

本模块提供以下核心功能：
- EpsilonExperiment：ξ、N 阶梯、边界模式与问题模板
- run_sweep：逐 N 组装 ε = 1/N 的拼装网格并最小化，给出单位体积能量
- HarnessResult：逐 N 行、与单元 f_hom 的差距、末两项差
- check_liminf：每个 N 的能量 ≥ f_hom − tol

边界模式：
- periodic（默认）：u − u_ξ 在 Ω 上周期
- clamp：与环绕面元相邻的块固定为 u_ξ，报告边界层
==============================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Any, Literal

from xtlog import mylog

from .cache import SolveCache
from .cellsolver import CellProblem, CellSolution, solve_density
from .density import DensitySweep, ProblemTemplate
from .exception import InputError
from .executor import map_ordered
from .geometry import tile_mesh
from .log import logging_wraps
from .tensors import SymTensor
from .timer import timer_wraps
from .validate import ensure_increasing

BoundaryMode = Literal['periodic', 'clamp']


@dataclass(frozen=True)
class EpsilonExperiment:
    """
    ε = 1/N 拼装实验

    boundary 默认 periodic：ũ = u − u_ξ 在 Ω 上周期，环绕面元上的跳跃只含 ũ 的部分，
    一维链上每个 N 的能量都等于 f_hom(ξ)，与闭式解直接可比。
    clamp 将所有与 ∂Ω 相邻的块硬性固定为 u_ξ（仿射 Dirichlet 数据），
    能量中会出现边界层，差值由 HarnessResult 报告。
    """

    template: ProblemTemplate
    xi: SymTensor
    n_ladder: tuple[int, ...] = (1, 2, 4, 8)
    boundary: BoundaryMode = 'periodic'

    def __post_init__(self) -> None:
        ladder = ensure_increasing(self.n_ladder, 'n_ladder')
        if any(n < 1 or n != int(n) for n in ladder):
            raise InputError(f'n_ladder entries must be positive integers, got {list(self.n_ladder)}')
        if self.boundary not in ('periodic', 'clamp'):
            raise InputError(f'boundary must be periodic or clamp, got {self.boundary!r}')
        if self.xi.dim != self.template.dim:
            raise InputError(f'xi is {self.xi.dim}D but the geometry is {self.template.dim}D')

    def problem(self, n: int) -> CellProblem:
        mesh = tile_mesh(self.template.mesh, int(n))
        clamped = mesh.boundary_blocks() if self.boundary == 'clamp' else ()
        return CellProblem(mesh, self.template.A, self.template.cone, self.xi, True, self.template.params, clamped)

    def to_dict(self) -> dict[str, Any]:
        return {**self.template.to_dict(), 'xi': list(self.xi.components), 'n_ladder': list(self.n_ladder), 'boundary': self.boundary}


@dataclass(frozen=True)
class HarnessRow:
    n: int
    epsilon: float
    energy: float
    gap_to_fhom: float
    bulk: float
    surface: float
    converged: bool

    def row(self) -> list[Any]:
        return [self.n, self.epsilon, self.energy, self.gap_to_fhom, self.bulk, self.surface, self.converged]


HARNESS_HEADER = ('N', 'epsilon', 'energy', 'gap_to_fhom', 'bulk', 'surface', 'converged')


@dataclass
class HarnessResult:
    experiment: EpsilonExperiment
    f_hom: float
    rows: list[HarnessRow] = field(default_factory=list)

    @property
    def energies(self) -> list[float]:
        return [r.energy for r in self.rows]

    @property
    def last_two_difference(self) -> float:
        if len(self.rows) < 2:
            return 0.0
        return abs(self.rows[-1].energy - self.rows[-2].energy)

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.rows)

    def to_dict(self) -> dict[str, Any]:
        return {
            'f_hom': self.f_hom,
            'last_two_difference': self.last_two_difference,
            'rows': [dict(zip(HARNESS_HEADER, r.row(), strict=True)) for r in self.rows],
        }


def _solve_tiled(experiment: EpsilonExperiment, cache: SolveCache, n: int) -> CellSolution:
    problem = experiment.problem(n)
    payload = {**problem.to_dict(), 'boundary': experiment.boundary}
    return cache.get_or_compute(payload, partial(solve_density, problem), CellSolution.to_dict, CellSolution.from_dict)


@timer_wraps
@logging_wraps(log_args=False, log_result=False)
def run_sweep(experiment: EpsilonExperiment, cache: SolveCache | None = None, jobs: int = 1) -> HarnessResult:
    """
    逐 N 最小化 ε = 1/N 拼装上的离散 F_ε，能量按 |Ω| = 1 归一

    周期模式下由凸性与平移平均，每个 N 的最小值与单元问题一致；
    clamp 模式额外包含边界层能量。
    """
    store = cache if cache is not None else SolveCache(maxsize=256)
    reference = DensitySweep(experiment.template, store).f(experiment.xi)
    solutions = map_ordered(partial(_solve_tiled, experiment, store), list(experiment.n_ladder), jobs=jobs)
    result = HarnessResult(experiment, reference)
    for n, sol in zip(experiment.n_ladder, solutions, strict=True):
        result.rows.append(HarnessRow(int(n), 1.0 / n, sol.value, sol.value - reference, sol.bulk_part, sol.surface_part, sol.converged))
        mylog.info(f'run_sweep | N={n} energy={sol.value:.9g} gap={sol.value - reference:+.3e}')
    return result


def check_liminf(result: HarnessResult, tol: float = 1e-6) -> list[HarnessRow]:
    """返回违反 energy ≥ f_hom − tol 的行"""
    return [r for r in result.rows if r.energy < result.f_hom - tol]


__all__ = [
    'HARNESS_HEADER',
    'EpsilonExperiment',
    'HarnessResult',
    'HarnessRow',
    'check_liminf',
    'run_sweep',
]
