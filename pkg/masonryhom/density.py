# !/usr/bin/env python3
"""
==============================================================
Description  : 均匀化密度模块 - f_hom / g_hom 扫描、回收函数估计、张拉锥检测与增长审计
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-15 09:20:00

本模块提供以下核心功能：
- analytic_1d：一维链的精确 f_hom 与回收函数
- ProblemTemplate / DensitySweep：固定 (网格, A, 锥, 参数) 的 ξ 扫描，带缓存与并行
- estimate_recession / recession_ladder：沿 t 阶梯估计 f_hom^∞(ξ)，比值增长超过阈值判为 +∞
- detect_cones：H_hom（g_hom 核）与 K_hom（回收函数有限）的方向锥及其对称差
- audit_growth：增长夹逼、K₀^⊥ 恒等式、g ≤ f 与次线性常数的审计
- audit_shape：f_hom 中点凸性与 g_hom 二次齐次性的随机抽查
- elastic_limit / projection_structure_gap / DensityTable：补充诊断与制表插值

主要特性：
- 单元求解经 SolveCache 按内容寻址缓存，回收阶梯与审计重复使用
- 审计失败以 AuditError 报告并附带违例样本
==============================================================
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import StrEnum
from functools import partial
from typing import Any, Literal

import numpy as np
from scipy.interpolate import LinearNDInterpolator
from scipy.spatial import cKDTree
from scipy.stats import norm as normal_dist
from scipy.stats import qmc
from xtlog import mylog

from .cache import SolveCache
from .cellsolver import CellProblem, CellSolution, SolverParams, solve_cell
from .cones import ConeSpec, JumpCone, JumpConeKind, cone_hull, has_interior_polar, polar_membership, polar_project
from .exception import AuditError, InputError
from .executor import map_ordered
from .geometry import UnitCellMesh, parse_geometry, refine_mesh
from .log import logging_wraps
from .tensors import ElasticityOperator, SymTensor, parse_elasticity, sym_dyad
from .validate import ensure_increasing, ensure_initialized, ensure_positive

DEFAULT_LADDER = (8.0, 32.0, 128.0, 512.0)
TOL_ZERO = 1e-6
INF_GROWTH = 4.0
K0_TOL = 1e-6
AUDIT_TOL = 1e-7
CONVEXITY_TOL = 1e-6
HOMOGENEITY_TOL = 1e-6
HOMOGENEITY_FLOOR = 1e-4


def tol_zero(xi: SymTensor, base: float = TOL_ZERO) -> float:
    return base * max(1.0, xi.norm() ** 2)


def analytic_1d(xi: float) -> tuple[float, float]:
    """一维链：f = ½ξ²（ξ ≤ 1），ξ − ½（ξ > 1）；f∞ = ξ（ξ ≥ 0），+∞（ξ < 0）"""
    xi = float(xi)
    f = 0.5 * xi * xi if xi <= 1.0 else xi - 0.5
    f_inf = xi if xi >= 0.0 else math.inf
    return f, f_inf


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class ProblemTemplate:
    """除 ξ 外完整的单元问题描述"""

    mesh: UnitCellMesh
    A: ElasticityOperator
    cone: JumpCone
    params: SolverParams = field(default_factory=SolverParams)
    clamped: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.mesh.dim

    @classmethod
    def from_strings(cls, geometry: str, A: str = 'identity', cone: str = 'opening', refine: int = 0, params: SolverParams | None = None) -> ProblemTemplate:  # noqa: N803
        mesh = parse_geometry(geometry)
        if refine:
            mesh = refine_mesh(mesh, refine)
        return cls(mesh, parse_elasticity(A, mesh.dim), JumpCone.parse(cone, mesh.dim), params or SolverParams())

    def problem(self, xi: SymTensor, include_surface: bool = True) -> CellProblem:
        return CellProblem(self.mesh, self.A, self.cone, xi, include_surface, self.params, self.clamped)

    def to_dict(self) -> dict[str, Any]:
        return {
            'geometry': self.mesh.label,
            'refinement': self.mesh.level,
            'A': self.A.matrix.tolist(),
            'cone': self.cone.to_dict(),
            'params': self.params.to_dict(),
        }


class DensitySweep:
    """
    f_hom / g_hom 求值器

    Args:
        template: 问题模板
        cache: 求解缓存（None 时新建内存缓存）
        jobs: solve_many 的并行数
    """

    def __init__(self, template: ProblemTemplate, cache: SolveCache | None = None, jobs: int = 1) -> None:
        self.template = template
        self.cache = cache if cache is not None else SolveCache(maxsize=4096)
        self.jobs = jobs
        self.nonconverged: list[dict[str, Any]] = []
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.template.dim

    def solve(self, xi: SymTensor, include_surface: bool = True) -> CellSolution:
        problem = self.template.problem(xi, include_surface)
        solution = self.cache.get_or_compute(problem.to_dict(), partial(solve_cell, problem), CellSolution.to_dict, CellSolution.from_dict)
        if not solution.converged:
            with self._lock:
                self.nonconverged.append({'xi': list(xi.components), 'include_surface': include_surface, 'residual_primal': solution.residual_primal})
        return solution

    def f(self, xi: SymTensor) -> float:
        return self.solve(xi, True).value

    def g(self, xi: SymTensor) -> float:
        return self.solve(xi, False).value

    def solve_many(self, xis: list[SymTensor], include_surface: bool = True) -> list[CellSolution]:
        return map_ordered(partial(self.solve, include_surface=include_surface), xis, jobs=self.jobs)

    @property
    def all_converged(self) -> bool:
        return not self.nonconverged


def _as_sweep(source: ProblemTemplate | DensitySweep) -> DensitySweep:
    return source if isinstance(source, DensitySweep) else DensitySweep(source)


# ---------------------------------------------------------------- recession


@dataclass(frozen=True)
class RecessionEstimate:
    xi: SymTensor
    ladder: tuple[float, ...]
    values: tuple[float, ...]
    ratios: tuple[float, ...]
    value: float
    growth: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def to_dict(self) -> dict[str, Any]:
        return {
            'xi': self.xi.to_dict(),
            'ladder': list(self.ladder),
            'values': list(self.values),
            'ratios': list(self.ratios),
            'value': self.value,
            'growth': self.growth,
        }


def classify_ladder(ladder: tuple[float, ...], values: tuple[float, ...], growth_threshold: float = INF_GROWTH) -> tuple[float, float, tuple[float, ...]]:
    """
    由 f(t_i ξ) 序列给出 (回收值, 比值增长倍数, 比值)

    比值 f(tξ)/t 在阶梯上增长超过 growth_threshold 倍判为 +∞；
    否则取最后两点的割线斜率（线性增长时与极限一致）。
    """
    ratios = tuple(v / t for t, v in zip(ladder, values, strict=True))
    first, last = ratios[0], ratios[-1]
    if first <= 0.0:
        growth = math.inf if last > 0.0 else 1.0
    else:
        growth = last / first
    if growth > growth_threshold:
        return math.inf, growth, ratios
    if len(ladder) == 1:
        return last, growth, ratios
    slope = (values[-1] - values[-2]) / (ladder[-1] - ladder[-2])
    return max(slope, 0.0), growth, ratios


def recession_ladder(source: ProblemTemplate | DensitySweep, xi: SymTensor, ladder: tuple[float, ...] = DEFAULT_LADDER, growth_threshold: float = INF_GROWTH) -> RecessionEstimate:
    if xi.is_zero():
        raise InputError('recession estimate needs a nonzero strain direction')
    ladder = ensure_increasing(ladder, 'ladder')
    ensure_positive(ladder[0], 'ladder[0]')
    sweep = _as_sweep(source)
    solutions = sweep.solve_many([xi * t for t in ladder], include_surface=True)
    values = tuple(s.value for s in solutions)
    value, growth, ratios = classify_ladder(ladder, values, growth_threshold)
    return RecessionEstimate(xi, ladder, values, ratios, value, growth)


@logging_wraps(log_args=False)
def estimate_recession(source: ProblemTemplate | DensitySweep, xi: SymTensor, ladder: tuple[float, ...] = DEFAULT_LADDER) -> float:
    """f_hom^∞(ξ) 的数值估计，二次增长方向返回 +inf"""
    return recession_ladder(source, xi, ladder).value


# ---------------------------------------------------------------- samples and directions


class SampleClass(StrEnum):
    TENSILE_CONE = 'TensileCone'
    ELSEWHERE = 'Elsewhere'


@dataclass(frozen=True)
class DensitySample:
    xi: SymTensor
    f_value: float
    g_value: float
    recession: float | None = None
    converged: bool = True

    @property
    def classification(self) -> SampleClass:
        return SampleClass.TENSILE_CONE if self.g_value <= tol_zero(self.xi) else SampleClass.ELSEWHERE

    def row(self) -> list[Any]:
        rec = '' if self.recession is None else self.recession
        return [*self.xi.components, self.f_value, self.g_value, rec, str(self.classification), self.converged]


def sample_density(source: ProblemTemplate | DensitySweep, xis: list[SymTensor], recession: bool = False, ladder: tuple[float, ...] = DEFAULT_LADDER) -> list[DensitySample]:
    sweep = _as_sweep(source)
    f_sols = sweep.solve_many(xis, True)
    g_sols = sweep.solve_many(xis, False)
    samples = []
    for xi, fs, gs in zip(xis, f_sols, g_sols, strict=True):
        rec = None
        if recession and not xi.is_zero():
            rec = recession_ladder(sweep, xi.normalized(), ladder).value * xi.norm()
        samples.append(DensitySample(xi, fs.value, gs.value, rec, fs.converged and gs.converged))
    return samples


def _eigenframe(theta: float, phi: float) -> SymTensor:
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return SymTensor.from_matrix(rot @ np.diag([math.cos(phi), math.sin(phi)]) @ rot.T)


def sample_directions(dim: int, count: int = 64, method: Literal['sweep', 'sobol'] = 'sweep', seed: int = 0) -> list[SymTensor]:
    """
    对称矩阵单位球上的确定性方向集

    2D 'sweep'：特征标架 R(θ) diag(cos φ, sin φ) R(θ)ᵀ，θ ∈ [0, π)，φ ∈ [0, 2π)；
    'sobol'：Sobol 点经正态分位数映射后归一化；1D 恒为 ±1。
    """
    if dim == 1:
        return [SymTensor.from_entries(1.0), SymTensor.from_entries(-1.0)]
    if count < 1:
        raise InputError(f'count must be >= 1, got {count}')
    if method == 'sobol':
        points = qmc.Sobol(d=3, scramble=True, seed=seed).random(count)
        gauss = normal_dist.ppf(np.clip(points, 1e-12, 1 - 1e-12))
        return [SymTensor.from_vector(2, v / np.linalg.norm(v)) for v in gauss]
    if method != 'sweep':
        raise InputError(f'unknown direction method {method!r}')
    n_theta = max(1, math.isqrt(count))
    n_phi = math.ceil(count / n_theta)
    out = [_eigenframe(math.pi * i / n_theta, 2.0 * math.pi * j / n_phi) for i in range(n_theta) for j in range(n_phi)]
    return out[:count]


def sample_strains(dim: int, count: int, radius: float = 3.0, seed: int = 0) -> list[SymTensor]:
    """半径 [0, radius] 内的随机应变（固定种子）"""
    rng = np.random.default_rng(seed)
    n = 1 if dim == 1 else 3
    vecs = rng.normal(size=(count, n))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    radii = radius * rng.random(count)
    return [SymTensor.from_vector(dim, r * v) for r, v in zip(radii, vecs, strict=True)]


# ---------------------------------------------------------------- cones


def facet_cone(mesh: UnitCellMesh, cone: JumpCone, samples: int = 16) -> ConeSpec:
    """
    网格上实际出现的界面法向生成的 K₀ = {j⊙ν}

    粘结面元不贡献；CUSTOM 锥直接返回其矩阵生成元。
    """
    if cone.kind is JumpConeKind.CUSTOM:
        assert cone.spec is not None
        return cone.spec
    if cone.kind is JumpConeKind.BONDED:
        return ConeSpec(mesh.dim, (), 'K0')
    normals: list[np.ndarray] = []
    for f in mesh.facets:
        if not f.cohesive:
            continue
        nu = np.asarray(f.normal, dtype=float)
        if not any(np.allclose(nu, other, atol=1e-12) for other in normals):
            normals.append(nu)
    gens: list[SymTensor] = []
    for nu in normals:
        if mesh.dim == 1 or cone.kind is JumpConeKind.OPENING:
            gens.append(sym_dyad(nu, nu))
            continue
        tau = np.array([-nu[1], nu[0]])
        half = max(2, samples // 2)
        for i in range(half + 1):
            phi = math.pi * (i / half - 0.5)
            gens.append(sym_dyad(nu, math.cos(phi) * nu + math.sin(phi) * tau))
    return cone_hull(gens, 'K0', mesh.dim)


@dataclass(frozen=True)
class ConeDetection:
    h_hom: ConeSpec
    k_hom: ConeSpec
    directions: tuple[SymTensor, ...]
    g_values: tuple[float, ...]
    recessions: tuple[float, ...]
    in_h: tuple[bool, ...]
    in_k: tuple[bool, ...]

    @property
    def symmetric_difference(self) -> list[int]:
        return [i for i, (h, k) in enumerate(zip(self.in_h, self.in_k, strict=True)) if h != k]

    @property
    def consistent(self) -> bool:
        return not self.symmetric_difference

    def rows(self) -> list[list[Any]]:
        return [[*d.components, g, r, h, k] for d, g, r, h, k in zip(self.directions, self.g_values, self.recessions, self.in_h, self.in_k, strict=True)]

    def to_dict(self) -> dict[str, Any]:
        return {
            'H_hom': self.h_hom.to_dict(),
            'K_hom': self.k_hom.to_dict(),
            'symmetric_difference': self.symmetric_difference,
            'directions': [list(d.components) for d in self.directions],
            'in_H': list(self.in_h),
            'in_K': list(self.in_k),
        }


@logging_wraps(log_args=False)
def detect_cones(source: ProblemTemplate | DensitySweep, directions: list[SymTensor], ladder: tuple[float, ...] = DEFAULT_LADDER, zero_tol: float = TOL_ZERO) -> ConeDetection:
    """
    H_hom：g_hom ≤ tol_zero 的方向锥包；K_hom：回收函数有限的方向锥包

    两者由不同的单元问题独立得到，对称差为空是 K_hom = H_hom 的数值检验。
    """
    if not directions:
        raise InputError('detect_cones needs at least one direction')
    sweep = _as_sweep(source)
    dirs = [d.normalized() for d in directions]
    g_values = [s.value for s in sweep.solve_many(dirs, include_surface=False)]
    recessions = [recession_ladder(sweep, d, ladder).value for d in dirs]
    in_h = tuple(g <= tol_zero(d, zero_tol) for d, g in zip(dirs, g_values, strict=True))
    in_k = tuple(math.isfinite(r) for r in recessions)
    dim = sweep.dim
    h_hom = cone_hull([d for d, ok in zip(dirs, in_h, strict=True) if ok], 'H_hom', dim)
    k_hom = cone_hull([d for d, ok in zip(dirs, in_k, strict=True) if ok], 'K_hom', dim)
    detection = ConeDetection(h_hom, k_hom, tuple(dirs), tuple(g_values), tuple(recessions), in_h, in_k)
    if not detection.consistent:
        mylog.warning(f'detect_cones | H_hom and K_hom membership differ at directions {detection.symmetric_difference}')
    return detection


# ---------------------------------------------------------------- audits


@dataclass
class GrowthAudit:
    n_samples: int
    worst_lower_margin: float
    worst_upper_margin: float
    lower_violations: list[dict[str, Any]] = field(default_factory=list)
    upper_violations: list[dict[str, Any]] = field(default_factory=list)
    dry_violations: list[dict[str, Any]] = field(default_factory=list)
    k0_checked: int = 0
    k0_violations: list[dict[str, Any]] = field(default_factory=list)
    sublinear_constant: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def offending(self) -> list[dict[str, Any]]:
        return [*self.lower_violations, *self.upper_violations, *self.dry_violations, *self.k0_violations]

    @property
    def passed(self) -> bool:
        return not self.offending

    def raise_for_failures(self) -> GrowthAudit:
        if not self.passed:
            raise AuditError(f'growth audit failed on {len(self.offending)} sample(s)', self.offending)
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            'n_samples': self.n_samples,
            'passed': self.passed,
            'worst_lower_margin': self.worst_lower_margin,
            'worst_upper_margin': self.worst_upper_margin,
            'lower_violations': self.lower_violations,
            'upper_violations': self.upper_violations,
            'dry_violations': self.dry_violations,
            'k0_checked': self.k0_checked,
            'k0_violations': self.k0_violations,
            'sublinear_constant': self.sublinear_constant,
            'notes': self.notes,
        }


@logging_wraps(log_args=False)
def audit_growth(samples: list[DensitySample], A: ElasticityOperator, k0: ConeSpec | None = None, tol: float = AUDIT_TOL, k0_tol: float = K0_TOL) -> GrowthAudit:  # noqa: N803
    """
    逐样本检查 min{√α,1}|ξ| − ½ ≤ f ≤ ½M²|ξ|²、g ≤ f，
    Aξ ∈ K₀^⊥ 的样本上 f = ½⟨Aξ,ξ⟩，并报告 TensileCone 样本的 f/|ξ| 上界
    """
    if not samples:
        raise InputError('audit_growth needs at least one sample')
    c_low = min(math.sqrt(A.alpha), 1.0)
    lower_margins: list[float] = []
    upper_margins: list[float] = []
    audit = GrowthAudit(len(samples), math.inf, math.inf)
    for s in samples:
        size = s.xi.norm()
        lower = c_low * size - 0.5
        upper = 0.5 * A.M**2 * size**2
        slack = tol * max(1.0, abs(s.f_value))
        lower_margins.append(s.f_value - lower)
        upper_margins.append(upper - s.f_value)
        entry = {'xi': list(s.xi.components), 'f': s.f_value, 'g': s.g_value}
        if s.f_value - lower < -slack:
            audit.lower_violations.append({**entry, 'bound': lower})
        if upper - s.f_value < -slack:
            audit.upper_violations.append({**entry, 'bound': upper})
        if s.g_value > s.f_value + slack:
            audit.dry_violations.append(entry)
        if k0 is not None and not s.xi.is_zero() and polar_membership(k0, A.apply(s.xi), 1e-9):
            audit.k0_checked += 1
            elastic = 0.5 * A.inner(s.xi, s.xi)
            if abs(s.f_value - elastic) > k0_tol * max(1.0, elastic):
                audit.k0_violations.append({**entry, 'elastic': elastic})
    audit.worst_lower_margin = float(np.min(lower_margins))
    audit.worst_upper_margin = float(np.min(upper_margins))

    if k0 is not None and not has_interior_polar(k0):
        audit.notes.append('sublinearity check skipped: polar of K0 has empty interior')
    else:
        ratios = [s.f_value / s.xi.norm() for s in samples if s.classification is SampleClass.TENSILE_CONE and not s.xi.is_zero()]
        audit.sublinear_constant = float(np.max(ratios)) if ratios else None
    if not audit.passed:
        mylog.warning(f'audit_growth | {len(audit.offending)} violation(s) in {audit.n_samples} samples')
    return audit


@dataclass
class ShapeAudit:
    """f_hom 中点凸性与 g_hom 二次齐次性的抽查结果"""

    pairs_checked: int = 0
    worst_convexity_excess: float = -math.inf
    convexity_violations: list[dict[str, Any]] = field(default_factory=list)
    scale: float = 2.0
    homogeneity_checked: int = 0
    worst_homogeneity_error: float = 0.0
    homogeneity_violations: list[dict[str, Any]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def offending(self) -> list[dict[str, Any]]:
        return [*self.convexity_violations, *self.homogeneity_violations]

    @property
    def passed(self) -> bool:
        return not self.offending

    def raise_for_failures(self) -> ShapeAudit:
        if not self.passed:
            raise AuditError(f'shape audit failed on {len(self.offending)} check(s)', self.offending)
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            'passed': self.passed,
            'pairs_checked': self.pairs_checked,
            'worst_convexity_excess': self.worst_convexity_excess if self.pairs_checked else None,
            'convexity_violations': self.convexity_violations,
            'scale': self.scale,
            'homogeneity_checked': self.homogeneity_checked,
            'worst_homogeneity_error': self.worst_homogeneity_error,
            'homogeneity_violations': self.homogeneity_violations,
            'notes': self.notes,
        }


@logging_wraps(log_args=False)
def audit_shape(
    source: ProblemTemplate | DensitySweep,
    samples: list[DensitySample],
    pairs: int = 64,
    scale: float = 2.0,
    seed: int = 0,
    convexity_tol: float = CONVEXITY_TOL,
    homogeneity_tol: float = HOMOGENEITY_TOL,
) -> ShapeAudit:
    """
    凸性：随机样本对 (a, b) 上 f((a+b)/2) ≤ ½(f(a)+f(b)) + convexity_tol（绝对误差）；
    齐次性：g > HOMOGENEITY_FLOOR 的样本上 |g(tξ) − t²g(ξ)| ≤ homogeneity_tol·t²g(ξ)
    """
    ensure_positive(scale, 'scale')
    if pairs < 0:
        raise InputError(f'pairs must be >= 0, got {pairs}')
    sweep = _as_sweep(source)
    audit = ShapeAudit(scale=scale)

    if len(samples) < 2:
        if pairs:
            audit.notes.append('convexity check skipped: fewer than two samples')
    elif pairs:
        rng = np.random.default_rng(seed)
        first = rng.integers(len(samples), size=pairs)
        second = (first + rng.integers(1, len(samples), size=pairs)) % len(samples)
        mids = [(samples[i].xi + samples[j].xi) * 0.5 for i, j in zip(first, second, strict=True)]
        for i, j, mid in zip(first, second, sweep.solve_many(mids, True), strict=True):
            a, b = samples[i], samples[j]
            excess = mid.value - 0.5 * (a.f_value + b.f_value)
            audit.worst_convexity_excess = max(audit.worst_convexity_excess, excess)
            if excess > convexity_tol:
                audit.convexity_violations.append({'xi_a': list(a.xi.components), 'xi_b': list(b.xi.components), 'f_mid': mid.value, 'excess': excess})
        audit.pairs_checked = pairs

    rays = [s for s in samples if s.g_value > HOMOGENEITY_FLOOR]
    for s, scaled in zip(rays, sweep.solve_many([s.xi * scale for s in rays], False), strict=True):
        expected = scale**2 * s.g_value
        error = abs(scaled.value - expected) / expected
        audit.worst_homogeneity_error = max(audit.worst_homogeneity_error, error)
        if error > homogeneity_tol:
            audit.homogeneity_violations.append({'xi': list(s.xi.components), 'g': s.g_value, 'g_scaled': scaled.value, 'relative_error': error})
    audit.homogeneity_checked = len(rays)
    if not rays:
        audit.notes.append(f'homogeneity check skipped: no sample with g > {HOMOGENEITY_FLOOR:g}')

    if not audit.passed:
        mylog.warning(f'audit_shape | {len(audit.convexity_violations)} convexity and {len(audit.homogeneity_violations)} homogeneity violation(s)')
    return audit


# ---------------------------------------------------------------- supplementary diagnostics


def elastic_limit(source: ProblemTemplate | DensitySweep, direction: SymTensor, t_max: float = 8.0, tol: float = 1e-7, steps: int = 40) -> float:
    """
    沿射线 tξ 首次出现开裂（surface_part > tol）的 t；t_max 内不开裂时返回 +inf

    一维链 ξ = 1 时为 1：中等拉伸不会引起断裂。
    """
    sweep = _as_sweep(source)
    d = direction.normalized()

    def cracked(t: float) -> bool:
        return sweep.solve(d * t).surface_part > tol * max(1.0, t)

    if not cracked(t_max):
        return math.inf
    lo, hi = 0.0, float(t_max)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if cracked(mid):
            hi = mid
        else:
            lo = mid
    return hi


def projection_structure_gap(source: ProblemTemplate | DensitySweep, xi: SymTensor, k_hom: ConeSpec) -> float:
    """|g_hom(ξ) − g_hom(P_{K_hom^⊥} ξ)|"""
    sweep = _as_sweep(source)
    return abs(sweep.g(xi) - sweep.g(polar_project(k_hom, xi)))


class DensityTable:
    """
    制表的 f_hom：2D 用 Delaunay 重心插值，1D 用分段线性插值；
    查询点距最近节点超过 trust_radius 或落在凸包外时改用精确单元求解
    """

    def __init__(self, sweep: DensitySweep, nodes: list[SymTensor], trust_radius: float = 0.25) -> None:
        if not nodes:
            raise InputError('DensityTable needs at least one node')
        self.sweep = sweep
        self.nodes = list(nodes)
        self.trust_radius = ensure_positive(trust_radius, 'trust_radius')
        self.values: np.ndarray | None = None
        self._points = np.array([n.vector for n in self.nodes])
        self._tree: cKDTree | None = None
        self._interp: LinearNDInterpolator | None = None
        self.fallbacks = 0

    @classmethod
    def from_grid(cls, sweep: DensitySweep, radius: float = 2.0, steps: int = 5, trust_radius: float | None = None) -> DensityTable:
        axis = np.linspace(-radius, radius, steps)
        n = 1 if sweep.dim == 1 else 3
        grids = np.meshgrid(*([axis] * n), indexing='ij')
        pts = np.stack([g.ravel() for g in grids], axis=1)
        spacing = axis[1] - axis[0] if steps > 1 else radius
        table = cls(sweep, [SymTensor.from_vector(sweep.dim, p) for p in pts], trust_radius or spacing * math.sqrt(n))
        return table.build()

    def build(self) -> DensityTable:
        self.values = np.array([s.value for s in self.sweep.solve_many(self.nodes)])
        self._tree = cKDTree(self._points)
        if self.sweep.dim == 2 and len(self.nodes) >= 4:
            self._interp = LinearNDInterpolator(self._points, self.values)
        mylog.info(f'DensityTable | {len(self.nodes)} nodes tabulated')
        return self

    @ensure_initialized('values')
    def value(self, xi: SymTensor) -> float:
        assert self.values is not None and self._tree is not None
        dist, _ = self._tree.query(xi.vector)
        if dist <= self.trust_radius:
            if self.sweep.dim == 1:
                order = np.argsort(self._points[:, 0])
                pts, vals = self._points[order, 0], self.values[order]
                if pts[0] <= xi.vector[0] <= pts[-1]:
                    return float(np.interp(xi.vector[0], pts, vals))
            elif self._interp is not None:
                est = float(self._interp(xi.vector[None, :])[0])
                if math.isfinite(est):
                    return est
        self.fallbacks += 1
        return self.sweep.f(xi)


__all__ = [
    'DEFAULT_LADDER',
    'ConeDetection',
    'DensitySample',
    'DensitySweep',
    'DensityTable',
    'GrowthAudit',
    'ProblemTemplate',
    'RecessionEstimate',
    'SampleClass',
    'ShapeAudit',
    'analytic_1d',
    'audit_growth',
    'audit_shape',
    'classify_ladder',
    'detect_cones',
    'elastic_limit',
    'estimate_recession',
    'facet_cone',
    'projection_structure_gap',
    'recession_ladder',
    'sample_density',
    'sample_directions',
    'sample_strains',
    'tol_zero',
]
