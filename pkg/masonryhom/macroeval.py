# !/usr/bin/env python3
"""
==============================================================
Description  : 宏观泛函求值模块 - 分片仿射位移与显式裂缝上的 F_hom
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-15 16:05:00

本模块提供以下核心功能：
- MacroElement / CrackSegment / MacroField：宏观场描述及 JSON 读写
- admissible：逐裂缝段检查 jump⊙ν ∈ K_hom（U_hom 可容许性）
- AnalyticDensity1D / CellDensity：密度来源（一维解析 / 缓存单元求解 + 可选制表）
- evaluate：Σ|T| f_hom(Eu_T) + Σ ∫ f_hom^∞(jump⊙ν)，dry=True 时为 ∫ g_hom(Eu)

主要特性：
- 不可容许场返回 +inf 并附带逐段报告
- 贡献以 numpy 按固定顺序求和
==============================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Protocol

import numpy as np

from .cones import ConeSpec, polar_project
from .density import DEFAULT_LADDER, DensitySweep, DensityTable, analytic_1d, detect_cones, recession_ladder, sample_directions
from .exception import InputError
from .tensors import SymTensor, sym_dyad, sym_part
from .validate import ensure_dim, ensure_unit_vector, ensure_vector

CONSISTENCY_TOL = 1e-10
SEGMENT_GAUSS_POINTS = 2


@dataclass(frozen=True)
class MacroElement:
    """u(x) = translation + gradient·x 在区间（1D）或三角形（2D）上"""

    dim: int
    vertices: tuple[tuple[float, ...], ...]
    translation: tuple[float, ...]
    gradient: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        ensure_dim(self.dim)
        expected = 2 if self.dim == 1 else 3
        if len(self.vertices) != expected:
            raise InputError(f'{self.dim}D elements need {expected} vertices, got {len(self.vertices)}')
        if self.measure <= 0.0:
            raise InputError(f'element {self.vertices} has non-positive measure')

    @property
    def measure(self) -> float:
        v = np.asarray(self.vertices, dtype=float)
        if self.dim == 1:
            return float(v[1, 0] - v[0, 0])
        e1, e2 = v[1] - v[0], v[2] - v[0]
        return 0.5 * abs(float(e1[0] * e2[1] - e1[1] * e2[0]))

    @property
    def strain(self) -> SymTensor:
        return sym_part(np.asarray(self.gradient, dtype=float).reshape(self.dim, self.dim))

    def displacement(self, x: Any) -> np.ndarray:
        return np.asarray(self.translation, dtype=float) + np.asarray(self.gradient, dtype=float).reshape(self.dim, self.dim) @ np.atleast_1d(np.asarray(x, dtype=float))

    def to_dict(self) -> dict[str, Any]:
        return {'vertices': [list(v) for v in self.vertices], 'translation': list(self.translation), 'gradient': [list(r) for r in self.gradient]}

    @classmethod
    def from_dict(cls, data: dict[str, Any], dim: int) -> MacroElement:
        grad = np.asarray(data.get('gradient', np.zeros((dim, dim))), dtype=float).reshape(dim, dim)
        return cls(
            dim,
            tuple(tuple(float(c) for c in np.atleast_1d(v)) for v in data['vertices']),
            tuple(ensure_vector(data.get('translation', [0.0] * dim), dim, 'translation').tolist()),
            tuple(tuple(r) for r in grad.tolist()),
        )


@dataclass(frozen=True)
class CrackSegment:
    """左右单元之间的裂缝段；normal 由 left 指向 right，跳跃 = u_right − u_left"""

    left: int
    right: int
    endpoints: tuple[tuple[float, ...], ...]
    normal: tuple[float, ...]
    jump: tuple[tuple[float, ...], ...] | None = None

    @property
    def measure(self) -> float:
        if len(self.endpoints) == 1:
            return 1.0
        p = np.asarray(self.endpoints, dtype=float)
        return float(np.linalg.norm(p[1] - p[0]))

    def to_dict(self) -> dict[str, Any]:
        body: dict[str, Any] = {'left': self.left, 'right': self.right, 'endpoints': [list(p) for p in self.endpoints], 'normal': list(self.normal)}
        if self.jump is not None:
            body['jump'] = [list(j) for j in self.jump]
        return body

    @classmethod
    def from_dict(cls, data: dict[str, Any], dim: int) -> CrackSegment:
        endpoints = tuple(tuple(float(c) for c in np.atleast_1d(p)) for p in data['endpoints'])
        jump = data.get('jump')
        if jump is not None:
            arr = np.asarray(jump, dtype=float).reshape(-1, dim)
            if arr.shape[0] == 1 and len(endpoints) > 1:
                arr = np.repeat(arr, len(endpoints), axis=0)
            jump = tuple(tuple(r) for r in arr.tolist())
        return cls(int(data['left']), int(data['right']), endpoints, tuple(ensure_unit_vector(data['normal'], dim).tolist()), jump)


@dataclass(frozen=True)
class MacroField:
    dim: int
    elements: tuple[MacroElement, ...]
    cracks: tuple[CrackSegment, ...] = ()

    def __post_init__(self) -> None:
        ensure_dim(self.dim)
        if not self.elements:
            raise InputError('a macro field needs at least one element')
        expected = 1 if self.dim == 1 else 2
        for k, c in enumerate(self.cracks):
            if not (0 <= c.left < len(self.elements) and 0 <= c.right < len(self.elements)):
                raise InputError(f'crack {k} references a missing element')
            if len(c.endpoints) != expected:
                raise InputError(f'crack {k} needs {expected} endpoint(s)')
            if c.jump is None:
                continue
            for p, declared in zip(c.endpoints, c.jump, strict=True):
                if np.linalg.norm(self.trace_jump(c, p) - np.asarray(declared)) > CONSISTENCY_TOL:
                    raise InputError(f'crack {k}: declared jump {list(declared)} disagrees with the element traces at {list(p)}')

    def trace_jump(self, crack: CrackSegment, point: Any) -> np.ndarray:
        return self.elements[crack.right].displacement(point) - self.elements[crack.left].displacement(point)

    def crack_strain(self, crack: CrackSegment, point: Any) -> SymTensor:
        return sym_dyad(self.trace_jump(crack, point), crack.normal)

    @classmethod
    def piecewise_1d(cls, breaks: list[float], translations: list[float], slopes: list[float]) -> MacroField:
        """区间 [breaks[i], breaks[i+1]] 上 u = translations[i] + slopes[i]·x，内部断点处的非零跳跃自动成为裂缝"""
        if not (len(breaks) == len(translations) + 1 == len(slopes) + 1):
            raise InputError('piecewise_1d needs len(breaks) = len(translations) + 1 = len(slopes) + 1')
        elements = tuple(MacroElement(1, ((a,), (b,)), (float(t),), ((float(s),),)) for a, b, t, s in zip(breaks, breaks[1:], translations, slopes, strict=False))
        cracks = []
        for i in range(len(elements) - 1):
            x = breaks[i + 1]
            jump = float(elements[i + 1].displacement([x])[0] - elements[i].displacement([x])[0])
            if jump != 0.0:
                cracks.append(CrackSegment(i, i + 1, ((x,),), (1.0,)))
        return cls(1, elements, tuple(cracks))

    def scaled(self, t: float) -> MacroField:
        """t·u（裂缝几何不变）"""
        elements = tuple(MacroElement(e.dim, e.vertices, tuple(t * c for c in e.translation), tuple(tuple(t * c for c in r) for r in e.gradient)) for e in self.elements)
        cracks = tuple(CrackSegment(c.left, c.right, c.endpoints, c.normal, None) for c in self.cracks)
        return MacroField(self.dim, elements, cracks)

    def to_dict(self) -> dict[str, Any]:
        return {'dim': self.dim, 'elements': [e.to_dict() for e in self.elements], 'cracks': [c.to_dict() for c in self.cracks]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MacroField:
        try:
            dim = ensure_dim(int(data['dim']))
            elements = tuple(MacroElement.from_dict(e, dim) for e in data['elements'])
            cracks = tuple(CrackSegment.from_dict(c, dim) for c in data.get('cracks', []))
        except (KeyError, TypeError) as err:
            raise InputError(f'malformed macro field description: {err!r}') from err
        return cls(dim, elements, cracks)


# ---------------------------------------------------------------- admissibility


@dataclass(frozen=True)
class SegmentReport:
    index: int
    residual: float
    admissible: bool

    def to_dict(self) -> dict[str, Any]:
        return {'index': self.index, 'residual': self.residual, 'admissible': self.admissible}


@dataclass(frozen=True)
class AdmissibilityReport:
    segments: tuple[SegmentReport, ...] = ()

    @property
    def admissible(self) -> bool:
        return all(s.admissible for s in self.segments)

    def __bool__(self) -> bool:
        return self.admissible

    def to_dict(self) -> dict[str, Any]:
        return {'admissible': self.admissible, 'segments': [s.to_dict() for s in self.segments]}


def admissible(macro: MacroField, k_hom: ConeSpec, tol: float = 1e-8) -> AdmissibilityReport:
    """
    每段的 jump⊙ν 在 K_hom 中（即 P_{K_hom^⊥}(jump⊙ν) ≈ 0）

    jump⊙ν 沿段仿射变化，K_hom 为凸锥，检查端点即可。
    """
    reports = []
    for k, crack in enumerate(macro.cracks):
        worst = 0.0
        for p in crack.endpoints:
            eta = macro.crack_strain(crack, p)
            residual = polar_project(k_hom, eta).norm() / max(1.0, eta.norm())
            worst = max(worst, residual)
        reports.append(SegmentReport(k, worst, worst <= tol))
    return AdmissibilityReport(tuple(reports))


# ---------------------------------------------------------------- density sources


class DensitySource(Protocol):
    dim: int

    def value(self, xi: SymTensor) -> float: ...

    def dry_value(self, xi: SymTensor) -> float: ...

    def recession(self, eta: SymTensor) -> float: ...

    @property
    def k_hom(self) -> ConeSpec: ...


class AnalyticDensity1D:
    """一维链的解析密度：f_hom、g_hom 与 f_hom^∞"""

    dim = 1

    def value(self, xi: SymTensor) -> float:
        return analytic_1d(xi.components[0])[0]

    def dry_value(self, xi: SymTensor) -> float:
        x = xi.components[0]
        return 0.0 if x >= 0.0 else 0.5 * x * x

    def recession(self, eta: SymTensor) -> float:
        return analytic_1d(eta.components[0])[1]

    @property
    def k_hom(self) -> ConeSpec:
        return ConeSpec(1, ((1.0,),), 'K_hom')


class CellDensity:
    """
    由单元求解给出的密度来源

    Args:
        sweep: DensitySweep（带缓存）
        table: 可选 DensityTable，bulk 项优先查表
        k_hom: 已知的 K_hom；缺省时在 64 个方向上检测
    """

    def __init__(self, sweep: DensitySweep, table: DensityTable | None = None, k_hom: ConeSpec | None = None, ladder: tuple[float, ...] = DEFAULT_LADDER) -> None:
        self.sweep = sweep
        self.dim = sweep.dim
        self.table = table
        self.ladder = ladder
        self._k_hom = k_hom
        self._recession: dict[tuple[float, ...], float] = {}

    def value(self, xi: SymTensor) -> float:
        return self.table.value(xi) if self.table is not None else self.sweep.f(xi)

    def dry_value(self, xi: SymTensor) -> float:
        return self.sweep.g(xi)

    def recession(self, eta: SymTensor) -> float:
        size = eta.norm()
        if size == 0.0:
            return 0.0
        direction = eta.normalized()
        key = tuple(round(c, 12) for c in direction.components)
        if key not in self._recession:
            self._recession[key] = recession_ladder(self.sweep, direction, self.ladder).value
        return size * self._recession[key]

    @cached_property
    def k_hom(self) -> ConeSpec:
        if self._k_hom is not None:
            return self._k_hom
        return detect_cones(self.sweep, sample_directions(self.dim), self.ladder).k_hom


# ---------------------------------------------------------------- evaluation


@dataclass
class MacroEnergy:
    total: float
    bulk: float
    singular: float
    elements: list[float] = field(default_factory=list)
    segments: list[float] = field(default_factory=list)
    report: AdmissibilityReport = field(default_factory=AdmissibilityReport)
    dry: bool = False

    @property
    def admissible(self) -> bool:
        return self.report.admissible

    def to_dict(self) -> dict[str, Any]:
        return {
            'total': self.total,
            'bulk': self.bulk,
            'singular': self.singular,
            'elements': self.elements,
            'segments': self.segments,
            'admissible': self.admissible,
            'report': self.report.to_dict(),
            'dry': self.dry,
        }


def _segment_points(crack: CrackSegment, n: int = SEGMENT_GAUSS_POINTS) -> tuple[np.ndarray, np.ndarray]:
    """段上的 Gauss 点与权重（权重和 = 段长度）"""
    if len(crack.endpoints) == 1:
        return np.asarray(crack.endpoints, dtype=float), np.ones(1)
    p0, p1 = (np.asarray(p, dtype=float) for p in crack.endpoints)
    nodes, weights = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (nodes + 1.0)
    return p0[None, :] + s[:, None] * (p1 - p0)[None, :], 0.5 * weights * crack.measure


def evaluate(macro: MacroField, source: DensitySource, dry: bool = False, tol: float = 1e-8) -> MacroEnergy:
    """
    F_hom(u) = Σ|T| f_hom(Eu_T) + Σ ∫_seg |η| f_hom^∞(η/|η|)，η = jump⊙ν

    不可容许场（某段 η ∉ K_hom）返回 total = +inf。dry=True 时为 ∫ g_hom(Eu)，
    可容许场的奇异部分为零（g_hom 在 H_hom = K_hom 上为零且 2 次齐次）。
    """
    if source.dim != macro.dim:
        raise InputError(f'density source is {source.dim}D but the field is {macro.dim}D')
    report = admissible(macro, source.k_hom, tol)
    if not report.admissible:
        return MacroEnergy(math.inf, math.inf, math.inf, report=report, dry=dry)
    density = source.dry_value if dry else source.value
    elements = [e.measure * density(e.strain) for e in macro.elements]
    segments: list[float] = []
    for crack in macro.cracks:
        if dry:
            segments.append(0.0)
            continue
        points, weights = _segment_points(crack)
        contrib = [w * source.recession(macro.crack_strain(crack, p)) for p, w in zip(points, weights, strict=True)]
        segments.append(float(np.sum(contrib)))
    bulk = float(np.sum(elements)) if elements else 0.0
    singular = float(np.sum(segments)) if segments else 0.0
    return MacroEnergy(bulk + singular, bulk, singular, elements, segments, report, dry)


__all__ = [
    'AdmissibilityReport',
    'AnalyticDensity1D',
    'CellDensity',
    'CrackSegment',
    'DensitySource',
    'MacroElement',
    'MacroEnergy',
    'MacroField',
    'SegmentReport',
    'admissible',
    'evaluate',
]
