# !/usr/bin/env python3
"""
==============================================================
Description  : 锥模块 - 跳跃约束锥、多面体矩阵锥、投影与近端算子
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-13 09:30:00

本模块提供以下核心功能：
- JumpConeKind / JumpCone：界面跳跃约束（张开、无侵入、粘结、自定义）
- ConeSpec：有限生成的对称矩阵锥（K0 离散化、凸包 K、估计的 K_hom / H_hom）
- project_cone / polar_project / membership / polar_membership：基于 NNLS 的投影与隶属判断
- jump_prox / jump_prox_batch：½|j − z|² + w|j| 在可容许跳跃集上的近端算子
- cone_generators / has_interior_polar / cone_hull：K0 离散生成元、尖锥判定、方向集的锥包

主要特性：
- 投影为小型非负最小二乘问题（scipy.optimize.nnls）
- 范数加锥指示函数的近端算子 = 收缩(锥投影)，逐点精确
- 自定义锥在固定法向下的可容许扇区由角度二分确定
==============================================================
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
from scipy.optimize import linprog, nnls

from .exception import InputError, SolverError
from .tensors import SymTensor, matrix_to_voigt, n_components, sym_dyad
from .validate import ensure_dim, ensure_positive, ensure_unit_vector

DEFAULT_TOL = 1e-8
SECTOR_SAMPLES = 720
BISECTION_STEPS = 60


class JumpConeKind(StrEnum):
    OPENING = 'opening'
    NONINTERPENETRATION = 'noninterpenetration'
    BONDED = 'bonded'
    CUSTOM = 'custom'

    @classmethod
    def parse(cls, text: str) -> JumpConeKind:
        key = text.strip().lower().replace('-', '').replace('_', '')
        aliases = {'opening': cls.OPENING, 'noninterpenetration': cls.NONINTERPENETRATION, 'detachment': cls.NONINTERPENETRATION, 'bonded': cls.BONDED, 'custom': cls.CUSTOM}
        if key not in aliases:
            raise InputError(f'unknown cone kind {text!r} (expected opening or noninterpenetration)')
        return aliases[key]


@dataclass(frozen=True)
class ConeSpec:
    """
    有限生成锥 cone(C) = {Σ λᵢ gᵢ : λᵢ ≥ 0}

    生成元按正交 Voigt 分量存储并单位化；零个生成元表示 {0}。
    """

    dim: int
    generators: tuple[tuple[float, ...], ...] = ()
    label: str = ''

    def __post_init__(self) -> None:
        ensure_dim(self.dim)
        n = n_components(self.dim)
        gens: list[tuple[float, ...]] = []
        for raw in self.generators:
            vec = np.asarray(raw, dtype=float).ravel()
            if vec.shape != (n,):
                raise InputError(f'cone generator must have {n} components, got {vec.shape}')
            norm = float(np.linalg.norm(vec))
            if norm <= 1e-14:
                continue
            gens.append(tuple((vec / norm).tolist()))
        object.__setattr__(self, 'generators', tuple(gens))

    @classmethod
    def from_tensors(cls, tensors: Iterable[SymTensor], label: str = '', dim: int | None = None) -> ConeSpec:
        items = list(tensors)
        if dim is None:
            if not items:
                raise InputError('dim is required for an empty generator list')
            dim = items[0].dim
        return cls(dim, tuple(t.components for t in items), label)

    @property
    def matrix(self) -> np.ndarray:
        """生成元按列排列的 (分量数 × 生成元数) 矩阵"""
        n = n_components(self.dim)
        if not self.generators:
            return np.zeros((n, 0))
        return np.array(self.generators, dtype=float).T

    def __len__(self) -> int:
        return len(self.generators)

    def tensors(self) -> list[SymTensor]:
        return [SymTensor(self.dim, g) for g in self.generators]

    def project(self, eta: SymTensor, tol: float = DEFAULT_TOL) -> SymTensor:
        return project_cone(self, eta, tol)

    def contains(self, eta: SymTensor, tol: float = DEFAULT_TOL) -> bool:
        return membership(self, eta, tol)

    def to_dict(self) -> dict[str, Any]:
        return {'label': self.label, 'dim': self.dim, 'generators': [SymTensor(self.dim, g).entries() for g in self.generators]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ConeSpec:
        gens = data.get('generators', [])
        tensors = [SymTensor.from_dict(g) for g in gens]
        dim = int(data['dim']) if 'dim' in data else (tensors[0].dim if tensors else None)
        if dim is None:
            raise InputError('ConeSpec JSON needs "dim" when generators are empty')
        return cls.from_tensors(tensors, str(data.get('label', '')), dim)


@dataclass(frozen=True)
class JumpCone:
    """界面跳跃约束；CUSTOM 需要 spec，可容许条件为 j⊙ν ∈ cone(spec)"""

    kind: JumpConeKind
    dim: int
    spec: ConeSpec | None = field(default=None, compare=True)

    def __post_init__(self) -> None:
        ensure_dim(self.dim)
        object.__setattr__(self, 'kind', JumpConeKind(self.kind))
        if self.kind is JumpConeKind.CUSTOM:
            if self.spec is None:
                raise InputError('custom jump cone needs a ConeSpec')
            if self.spec.dim != self.dim:
                raise InputError(f'ConeSpec dim {self.spec.dim} does not match jump cone dim {self.dim}')

    @classmethod
    def parse(cls, text: str, dim: int) -> JumpCone:
        return cls(JumpConeKind.parse(text), dim)

    def to_dict(self) -> dict[str, Any]:
        body: dict[str, Any] = {'kind': self.kind.value, 'dim': self.dim}
        if self.spec is not None:
            body['spec'] = self.spec.to_dict()
        return body

    @classmethod
    def from_dict(cls, data: dict[str, Any] | str, dim: int | None = None) -> JumpCone:
        if isinstance(data, str):
            if dim is None:
                raise InputError('dim is required to parse a cone string')
            return cls.parse(data, dim)
        spec = ConeSpec.from_dict(data['spec']) if data.get('spec') else None
        return cls(JumpConeKind.parse(str(data['kind'])), int(data.get('dim', dim or 0)), spec)


# ---------------------------------------------------------------- projection


def _project_vector(C: ConeSpec, vec: np.ndarray) -> np.ndarray:  # noqa: N803
    G = C.matrix  # noqa: N806
    if G.shape[1] == 0:
        return np.zeros_like(vec)
    try:
        coef, _ = nnls(G, vec, maxiter=max(50 * G.shape[1], 200))
    except RuntimeError as err:
        raise SolverError('cone projection did not converge', {'generators': G.shape[1], 'norm': float(np.linalg.norm(vec)), 'reason': str(err)}) from err
    return G @ coef


def project_cone(C: ConeSpec, eta: SymTensor, tol: float = DEFAULT_TOL) -> SymTensor:  # noqa: N803
    """
    最近点投影 P_C(η) = argmin_{ζ∈C} |η − ζ|

    Raises:
        InputError: 维度不一致
        SolverError: NNLS 迭代不收敛，或 Moreau 正交性超出容差
    """
    if eta.dim != C.dim:
        raise InputError(f'dimension mismatch: cone dim {C.dim}, tensor dim {eta.dim}')
    vec = eta.vector
    proj = _project_vector(C, vec)
    residual = vec - proj
    scale = max(1.0, float(np.linalg.norm(vec)) ** 2)
    if abs(float(proj @ residual)) > max(tol, 1e-10) * scale * 10.0:
        raise SolverError('cone projection violates orthogonality', {'inner': float(proj @ residual), 'tol': tol})
    return SymTensor.from_vector(C.dim, proj)


def polar_project(C: ConeSpec, eta: SymTensor, tol: float = DEFAULT_TOL) -> SymTensor:  # noqa: N803
    """Moreau 分解：P_{C^⊥}(η) = η − P_C(η)"""
    return eta - project_cone(C, eta, tol)


def membership(C: ConeSpec, eta: SymTensor, tol: float = DEFAULT_TOL) -> bool:  # noqa: N803
    residual = (eta - project_cone(C, eta, tol)).norm()
    return residual <= tol * max(1.0, eta.norm())


def polar_membership(C: ConeSpec, eta: SymTensor, tol: float = DEFAULT_TOL) -> bool:  # noqa: N803
    """η ∈ C^⊥ 当且仅当 P_C(η) = 0"""
    return project_cone(C, eta, tol).norm() <= tol * max(1.0, eta.norm())


def has_interior_polar(C: ConeSpec, tol: float = 1e-9) -> bool:  # noqa: N803
    """C^⊥ 内部非空当且仅当存在 η 使 ⟨η, g⟩ < 0 对全部生成元成立（C 为尖锥）"""
    G = C.matrix  # noqa: N806
    n, k = G.shape
    if k == 0:
        return True
    # variables (η, s): maximize s subject to ⟨η, g⟩ + s ≤ 0, |η|∞ ≤ 1, s ≤ 1
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([G.T, np.ones((k, 1))])
    b_ub = np.zeros(k)
    bounds = [(-1.0, 1.0)] * n + [(None, 1.0)]
    result = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method='highs')
    if not result.success:
        raise SolverError('pointedness LP failed', {'status': int(result.status), 'message': str(result.message)})
    return float(-result.fun) > tol


def cone_hull(directions: Sequence[SymTensor], label: str = '', dim: int | None = None, prune: bool = True, tol: float = 1e-9) -> ConeSpec:
    """方向集的锥包；prune=True 时去掉可由其余生成元表示的冗余生成元"""
    spec = ConeSpec.from_tensors(directions, label, dim)
    if not prune or len(spec) <= 1:
        return spec
    kept = list(spec.generators)
    i = 0
    while i < len(kept):
        others = ConeSpec(spec.dim, tuple(kept[:i] + kept[i + 1 :]))
        vec = np.asarray(kept[i])
        if len(others) and np.linalg.norm(vec - _project_vector(others, vec)) <= tol:
            kept.pop(i)
            continue
        i += 1
    return ConeSpec(spec.dim, tuple(kept), label)


# ---------------------------------------------------------------- K0 generators


def _unit(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def cone_generators(kind: JumpConeKind | str, dim: int, samples: int = 16) -> ConeSpec:
    """
    跳跃锥诱导的矩阵锥 K0 的离散生成元（其锥包即 K 的多面体近似）

    OPENING: n⊙n；NONINTERPENETRATION: a⊙b 且 ⟨a,b⟩ ≥ 0；BONDED: {0}
    """
    kind = JumpConeKind(kind) if not isinstance(kind, JumpConeKind) else kind
    dim = ensure_dim(dim)
    if kind is JumpConeKind.BONDED:
        return ConeSpec(dim, (), 'bonded')
    if kind is JumpConeKind.CUSTOM:
        raise InputError('custom cones carry their own ConeSpec')
    if dim == 1:
        return ConeSpec(1, ((1.0,),), kind.value)
    angles = [math.pi * i / samples for i in range(samples)]
    gens: list[SymTensor] = []
    if kind is JumpConeKind.OPENING:
        gens = [sym_dyad(_unit(t), _unit(t)) for t in angles]
    else:
        half = max(samples // 2, 1)
        spreads = [math.pi * (i / half - 0.5) for i in range(half + 1)]
        for t in angles:
            for phi in spreads:
                gens.append(sym_dyad(_unit(t), _unit(t + phi)))
    return ConeSpec.from_tensors(gens, kind.value)


def matrix_cone(cone: JumpCone, samples: int = 16) -> ConeSpec:
    if cone.kind is JumpConeKind.CUSTOM:
        assert cone.spec is not None
        return cone.spec
    return cone_generators(cone.kind, cone.dim, samples)


# ---------------------------------------------------------------- jump prox


def _shrink(vec: np.ndarray, weight: float) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm <= weight or norm == 0.0:
        return np.zeros_like(vec)
    return (1.0 - weight / norm) * vec


def _custom_admissible(spec: ConeSpec, normal: np.ndarray, j: np.ndarray, tol: float) -> bool:
    eta = SymTensor.from_vector(spec.dim, matrix_to_voigt(0.5 * (np.outer(j, normal) + np.outer(normal, j)), spec.dim))
    return membership(spec, eta, tol)


@dataclass(frozen=True)
class _Sector:
    """固定法向下自定义锥的可容许集：全平面、扇区边界射线或孤立射线"""

    full: bool
    rays: tuple[tuple[float, ...], ...]


_SECTOR_CACHE: dict[tuple[Any, ...], _Sector] = {}


def _custom_sector(spec: ConeSpec, normal: np.ndarray, tol: float) -> _Sector:
    key = (spec, tuple(np.round(normal, 14)), tol)
    if key in _SECTOR_CACHE:
        return _SECTOR_CACHE[key]
    if spec.dim == 1:
        rays = tuple((s,) for s in (1.0, -1.0) if _custom_admissible(spec, normal, np.array([s]), tol))
        sector = _Sector(full=len(rays) == 2, rays=rays)
        _SECTOR_CACHE[key] = sector
        return sector

    base = math.atan2(normal[1], normal[0])
    grid = [base + 2.0 * math.pi * i / SECTOR_SAMPLES for i in range(SECTOR_SAMPLES)]
    flags = [_custom_admissible(spec, normal, _unit(t), tol) for t in grid]
    if all(flags):
        sector = _Sector(full=True, rays=())
        _SECTOR_CACHE[key] = sector
        return sector

    def refine(inside: float, outside: float) -> float:
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (inside + outside)
            if _custom_admissible(spec, normal, _unit(mid), tol):
                inside = mid
            else:
                outside = mid
        return inside

    rays: list[tuple[float, ...]] = []
    step = 2.0 * math.pi / SECTOR_SAMPLES
    for i, ok in enumerate(flags):
        if not ok:
            continue
        if not flags[i - 1]:
            rays.append(tuple(_unit(refine(grid[i], grid[i] - step)).tolist()))
        if not flags[(i + 1) % SECTOR_SAMPLES]:
            rays.append(tuple(_unit(refine(grid[i], grid[i] + step)).tolist()))
    tangent = np.array([-normal[1], normal[0]])
    for cand in (normal, -normal, tangent, -tangent):
        if _custom_admissible(spec, normal, cand, tol):
            rays.append(tuple(cand.tolist()))
    sector = _Sector(full=False, rays=tuple(rays))
    _SECTOR_CACHE[key] = sector
    return sector


def _custom_project(spec: ConeSpec, normal: np.ndarray, z: np.ndarray, tol: float) -> np.ndarray:
    """自定义锥在固定法向下的投影：候选枚举（z 自身、各边界射线上的投影、原点）"""
    sector = _custom_sector(spec, normal, tol)
    if sector.full:
        return z.copy()
    candidates = [np.zeros_like(z)]
    if np.linalg.norm(z) > 0 and _custom_admissible(spec, normal, z / np.linalg.norm(z), tol):
        candidates.append(z.copy())
    for ray in sector.rays:
        d = np.asarray(ray)
        candidates.append(max(float(z @ d), 0.0) * d)
    dists = [float(np.linalg.norm(z - c)) for c in candidates]
    return candidates[int(np.argmin(dists))]


def project_jump(cone: JumpCone, normal: np.ndarray, z: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """固定法向 ν 下可容许跳跃集（凸锥）上的投影"""
    kind = cone.kind
    if kind is JumpConeKind.BONDED:
        return np.zeros_like(z)
    zn = float(z @ normal)
    if kind is JumpConeKind.OPENING:
        return max(zn, 0.0) * normal
    if kind is JumpConeKind.NONINTERPENETRATION:
        return z.copy() if zn >= 0.0 else z - zn * normal
    assert cone.spec is not None
    return _custom_project(cone.spec, normal, z, tol)


def jump_prox(cone: JumpCone, normal: Any, z: Any, weight: float) -> np.ndarray:
    """
    argmin_j ½|j − z|² + w|j|，j 在法向 ν 下可容许

    可容许集为凸锥 K_ν 时，最优 j 的方向为 P_{K_ν}(z) 的方向，
    因此解为 P_{K_ν}(z) 的向量收缩：max(|P z| − w, 0)·P z/|P z|。
    OPENING 退化为 max(z·ν − w, 0)ν；NONINTERPENETRATION 在无约束收缩可行时
    直接返回，否则在边界 ⟨j,ν⟩ = 0 上做切向收缩。
    """
    nu = ensure_unit_vector(normal, cone.dim, 'normal')
    vec = np.atleast_1d(np.asarray(z, dtype=float))
    if vec.shape != (cone.dim,):
        raise InputError(f'jump must have length {cone.dim}, got shape {vec.shape}')
    w = ensure_positive(weight, 'weight', allow_zero=True)
    return _shrink(project_jump(cone, nu, vec), w)


def jump_prox_batch(cone: JumpCone, normals: np.ndarray, z: np.ndarray, weights: np.ndarray, bonded: np.ndarray | None = None) -> np.ndarray:
    """
    逐求积点的近端算子（向量化）

    Args:
        normals: (m, dim) 单位法向
        z: (m, dim) 输入跳跃
        weights: (m,) 非负权重，0 对应纯投影
        bonded: (m,) 布尔掩码，True 的点跳跃强制为 0
    """
    z = np.asarray(z, dtype=float)
    normals = np.asarray(normals, dtype=float)
    weights = np.asarray(weights, dtype=float)
    zn = np.einsum('ij,ij->i', z, normals)
    if cone.kind is JumpConeKind.OPENING:
        lam = np.maximum(zn - weights, 0.0)
        out = lam[:, None] * normals
    elif cone.kind is JumpConeKind.NONINTERPENETRATION:
        proj = np.where((zn < 0.0)[:, None], z - zn[:, None] * normals, z)
        norms = np.linalg.norm(proj, axis=1)
        with np.errstate(divide='ignore', invalid='ignore'):
            factor = np.where(norms > weights, 1.0 - weights / np.where(norms > 0, norms, 1.0), 0.0)
        out = factor[:, None] * proj
    elif cone.kind is JumpConeKind.BONDED:
        out = np.zeros_like(z)
    else:
        out = np.array([_shrink(project_jump(cone, normals[i], z[i]), float(weights[i])) for i in range(z.shape[0])]).reshape(z.shape)
    if bonded is not None and np.any(bonded):
        out[np.asarray(bonded, dtype=bool)] = 0.0
    return out


def jump_admissible(cone: JumpCone, normal: Any, j: Any, tol: float = DEFAULT_TOL) -> bool:
    nu = np.atleast_1d(np.asarray(normal, dtype=float))
    vec = np.atleast_1d(np.asarray(j, dtype=float))
    scale = tol * max(1.0, float(np.linalg.norm(vec)))
    return float(np.linalg.norm(vec - project_jump(cone, nu, vec, tol))) <= scale


__all__ = [
    'ConeSpec',
    'JumpCone',
    'JumpConeKind',
    'cone_generators',
    'cone_hull',
    'has_interior_polar',
    'jump_admissible',
    'jump_prox',
    'jump_prox_batch',
    'matrix_cone',
    'membership',
    'polar_membership',
    'polar_project',
    'project_cone',
    'project_jump',
]
