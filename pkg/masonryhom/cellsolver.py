# !/usr/bin/env python3
"""
==============================================================
Description  : 单元问题求解模块 - f_hom / g_hom 离散单元问题的组装与 ADMM 求解
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-14 10:40:00

本模块提供以下核心功能：
- SolverParams / CellProblem / CellSolution：求解参数、问题与结果
- CellSystem / assemble：块仿射自由度上的体积二次型、跳跃算子与分解缓存
- solve_density / solve_dry / solve_cell：ADMM 求解（x 步为预分解的 SPD 求解，z 步为逐点近端）
- reference_density：小规模问题的 SLSQP 参考解（光滑化范数 + 线性锥约束）

离散化：
- 每块 ũ_b(y) = c_b + G_b(y − x_b)，块内应变 ξ + sym G_b
- 跳跃 j = ũ_R(x − k) − ũ_L(x)，u_ξ 连续，不进入跳跃
- 固定块 0 的平移（或 clamp 模式下固定所列块的全部自由度）

主要特性：
- 分解按 (网格, A, 固定自由度) 缓存，按 ρ 缓存 LU，跨 ξ 与迭代复用
- 残差平衡每 check_every 步调整 ρ（因子 2）
- 记录最优迭代；出现 NaN 抛出 SolverError；未收敛时返回最优迭代并标记
==============================================================
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from collections.abc import Callable
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu
from xtlog import mylog

from .cones import JumpCone, JumpConeKind, jump_admissible, jump_prox_batch
from .exception import ConfigError, GeometryError, InputError, SolverError
from .geometry import Facet, UnitCellMesh, exact_facet_l1
from .tensors import ElasticityOperator, SymTensor, matrix_to_voigt
from .timer import TimerWrapt
from .validate import ensure_initialized

SYSTEM_CACHE_SIZE = 16
DENSE_NULLSPACE_LIMIT = 3000
ORACLE_MAX_DOFS = 64
SMOOTHING = 1e-9


@dataclass(frozen=True)
class SolverParams:
    """ADMM 参数；rho=None 时取体积二次型与跳跃算子对角均值之比"""

    rho: float | None = None
    tol_primal: float = 1e-9
    tol_dual: float = 1e-9
    max_iter: int = 50_000
    check_every: int = 50
    balance_ratio: float = 10.0
    rho_factor: float = 2.0
    admissible_tol: float = 1e-7

    def __post_init__(self) -> None:
        if self.rho is not None and not self.rho > 0:
            raise InputError(f'rho must be > 0, got {self.rho}')
        if not (self.tol_primal > 0 and self.tol_dual > 0):
            raise InputError('tolerances must be > 0')
        if self.max_iter < 1 or self.check_every < 1:
            raise InputError('max_iter and check_every must be >= 1')
        if self.balance_ratio <= 1 or self.rho_factor <= 1:
            raise InputError('balance_ratio and rho_factor must be > 1')

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any] | None) -> SolverParams:
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f'unknown solver parameters: {unknown}')
        return cls(**data)


@dataclass(frozen=True)
class CellProblem:
    mesh: UnitCellMesh
    A: ElasticityOperator
    cone: JumpCone
    xi: SymTensor
    include_surface: bool = True
    params: SolverParams = field(default_factory=SolverParams)
    clamped: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        dims = {'mesh': self.mesh.dim, 'A': self.A.dim, 'cone': self.cone.dim, 'xi': self.xi.dim}
        if len(set(dims.values())) != 1:
            raise InputError(f'dimension mismatch: {dims}')
        for b in self.clamped:
            if not 0 <= b < self.mesh.n_blocks:
                raise InputError(f'clamped block {b} does not exist')

    def with_xi(self, xi: SymTensor) -> CellProblem:
        return replace(self, xi=xi)

    def dry(self) -> CellProblem:
        return replace(self, include_surface=False)

    def to_dict(self) -> dict[str, Any]:
        """缓存键使用的规范描述（网格以指纹代替）"""
        return {
            'mesh': self.mesh.fingerprint,
            'geometry': self.mesh.label,
            'refinement': self.mesh.level,
            'A': self.A.matrix.tolist(),
            'cone': self.cone.to_dict(),
            'xi': list(self.xi.components),
            'include_surface': self.include_surface,
            'params': self.params.to_dict(),
            'clamped': list(self.clamped),
        }


@dataclass
class CellSolution:
    """
    单元问题的解

    lower_bound_estimate 取末次迭代的拉格朗日值减去对偶残差项，截断到 [0, value]。
    它是收敛诊断，不是严格的对偶证书：块平移方向上的平衡只近似成立。
    """

    value: float
    bulk_part: float
    surface_part: float
    block_dofs: np.ndarray
    jumps: np.ndarray
    residual_primal: float
    residual_dual: float
    iterations: int
    converged: bool
    lower_bound_estimate: float
    xi: SymTensor
    include_surface: bool = True
    rho: float = 1.0
    elapsed: float = 0.0
    surface_exact: float | None = None

    @property
    def gap(self) -> float:
        return self.value - self.lower_bound_estimate

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        """timing=False 时省略墙钟时间，保证相同输入输出逐字节一致"""
        body = {
            'value': self.value,
            'bulk_part': self.bulk_part,
            'surface_part': self.surface_part,
            'block_dofs': self.block_dofs.tolist(),
            'jumps': self.jumps.tolist(),
            'residual_primal': self.residual_primal,
            'residual_dual': self.residual_dual,
            'iterations': self.iterations,
            'converged': self.converged,
            'lower_bound_estimate': self.lower_bound_estimate,
            'xi': self.xi.to_dict(),
            'include_surface': self.include_surface,
            'rho': self.rho,
            'surface_exact': self.surface_exact,
        }
        if timing:
            body['elapsed'] = self.elapsed
        return body

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CellSolution:
        xi = SymTensor.from_dict(data['xi'])
        return cls(
            value=float(data['value']),
            bulk_part=float(data['bulk_part']),
            surface_part=float(data['surface_part']),
            block_dofs=np.asarray(data['block_dofs'], dtype=float),
            jumps=np.asarray(data['jumps'], dtype=float).reshape(-1, xi.dim),
            residual_primal=float(data['residual_primal']),
            residual_dual=float(data['residual_dual']),
            iterations=int(data['iterations']),
            converged=bool(data['converged']),
            lower_bound_estimate=float(data['lower_bound_estimate']),
            xi=xi,
            include_surface=bool(data.get('include_surface', True)),
            rho=float(data.get('rho', 1.0)),
            elapsed=float(data.get('elapsed', 0.0)),
            surface_exact=None if data.get('surface_exact') is None else float(data['surface_exact']),
        )

    def jump_rows(self, mesh: UnitCellMesh) -> list[list[Any]]:
        """逐求积点跳跃表：facet, x..., weight, normal..., jump..."""
        qd = mesh.quadrature
        return [[int(qd.facet[i]), *qd.points[i].tolist(), float(qd.weights[i]), *qd.normals[i].tolist(), *self.jumps[i].tolist()] for i in range(qd.size)]


# ---------------------------------------------------------------- assembly


def strain_selector(dim: int) -> np.ndarray:
    """块自由度 → sym G_b 的正交 Voigt 分量"""
    if dim == 1:
        return np.array([[0.0, 1.0]])
    s = 1.0 / np.sqrt(2.0)
    return np.array(
        [
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0, s, s, 0.0],
        ]
    )


def _jump_coefficients(dim: int, offset: np.ndarray, sign: float) -> list[tuple[int, int, float]]:
    """(分量, 块内自由度, 系数)：sign·(c + G·offset)"""
    entries = [(a, a, sign) for a in range(dim)]
    entries.extend((a, dim + a * dim + b, sign * float(offset[b])) for a in range(dim) for b in range(dim))
    return entries


class CellSystem:
    """
    离散单元问题的线性代数部分

    Q: 自由自由度上的体积二次型 Σ|b| SᵀÂS
    B: 线性项算子，q(ξ) = B ξ̂
    J: 自由自由度 → 逐求积点跳跃向量
    """

    def __init__(self, mesh: UnitCellMesh, A: ElasticityOperator, clamped: tuple[int, ...] = ()) -> None:  # noqa: N803
        self.mesh = mesh
        self.A = A
        self.clamped = tuple(sorted(set(clamped)))
        self.dim = dim = mesh.dim
        self.nd = nd = mesh.ndof_per_block
        self.volume = mesh.total_measure
        S = strain_selector(dim)  # noqa: N806
        Ahat = A.matrix  # noqa: N806

        local_q = S.T @ Ahat @ S
        local_b = S.T @ Ahat
        self.Q_full = sp.block_diag([b.measure * local_q for b in mesh.blocks], format='csc')
        self.B_full = np.vstack([b.measure * local_b for b in mesh.blocks])

        qd = mesh.quadrature
        rows: list[int] = []
        cols: list[int] = []
        vals: list[float] = []
        centroids = np.array([b.centroid for b in mesh.blocks], dtype=float).reshape(-1, dim)
        for i in range(qd.size):
            x = qd.points[i]
            left, right = int(qd.left[i]), int(qd.right[i])
            for blk, offset, sign in ((right, x - qd.shifts[i] - centroids[right], 1.0), (left, x - centroids[left], -1.0)):
                for a, local, coef in _jump_coefficients(dim, offset, sign):
                    rows.append(i * dim + a)
                    cols.append(blk * nd + local)
                    vals.append(coef)
        self.J_full = sp.csr_matrix((vals, (rows, cols)), shape=(qd.size * dim, mesh.ndof))
        self.J_full.sum_duplicates()

        if self.clamped:
            fixed = {b * nd + k for b in self.clamped for k in range(nd)}
        else:
            fixed = set(range(dim))
        self.free = np.array([k for k in range(mesh.ndof) if k not in fixed], dtype=int)
        self.Q = self.Q_full[self.free][:, self.free].tocsc()
        self.B = self.B_full[self.free]
        self.J = self.J_full[:, self.free].tocsr()
        self.JtJ = (self.J.T @ self.J).tocsc()

        self._check_connectivity()
        self.null_dim = self._null_dimension()
        diag_q = float(np.mean(self.Q.diagonal())) if self.Q.shape[0] else 1.0
        diag_j = float(np.mean(self.JtJ.diagonal())) if self.JtJ.shape[0] else 1.0
        self.default_rho = diag_q / diag_j if diag_j > 0 else 1.0
        # 求积机构（如中点求积下的棋盘转动）不影响目标函数，用近端项消除
        self.prox_delta = 1e-8 * max(diag_q, 1e-12) if self.null_dim else 0.0
        self._factors: dict[float, Any] = {}
        self._lock = threading.Lock()

    @property
    def n_free(self) -> int:
        return int(self.free.shape[0])

    def _check_connectivity(self) -> None:
        qd = self.mesh.quadrature
        nb = self.mesh.n_blocks
        touched = np.zeros(nb, dtype=bool)
        touched[qd.left] = True
        touched[qd.right] = True
        if nb > 1 and not touched.all():
            raise GeometryError(f'floating block detected: blocks {np.flatnonzero(~touched).tolist()} have no facets')
        graph = sp.coo_matrix((np.ones(qd.size), (qd.left, qd.right)), shape=(nb, nb))
        count, labels = connected_components(graph, directed=False)
        anchors = set(self.clamped) or {0}
        anchored = {int(labels[b]) for b in anchors}
        if len(anchored) != count:
            floating = [b for b in range(nb) if int(labels[b]) not in anchored]
            raise GeometryError(f'floating block detected: blocks {floating} are not connected to a fixed block')

    def _null_dimension(self) -> int:
        n = self.n_free
        if n == 0:
            return 0
        M = (self.Q + self.JtJ).tocsc()  # noqa: N806
        if n <= DENSE_NULLSPACE_LIMIT:
            eig = np.linalg.eigvalsh(M.toarray())
            null = int(np.sum(eig <= 1e-10 * max(1.0, float(eig[-1]))))
        else:
            try:
                lu = splu(M)
            except RuntimeError:
                return 1
            pivots = np.abs(lu.U.diagonal())
            null = int(np.sum(pivots <= 1e-12 * max(1.0, float(pivots.max()))))
        if null:
            mylog.debug(f'CellSystem | {self.mesh.label}: {null} zero-energy quadrature mode(s), proximal regularization enabled')
        return null

    def factor(self, rho: float) -> Callable[[np.ndarray], np.ndarray]:
        if self.n_free == 0:
            return np.asarray
        with self._lock:
            lu = self._factors.get(rho)
            if lu is None:
                mat = (self.Q + rho * self.JtJ + self.prox_delta * sp.identity(self.n_free, format='csc')).tocsc()
                try:
                    lu = splu(mat)
                except RuntimeError as err:
                    raise GeometryError(f'singular cell system for {self.mesh.label}: {err}') from err
                self._factors[rho] = lu
            return lu.solve

    # -------------------------------------------------------- evaluation on full DOFs

    def expand(self, x_free: np.ndarray) -> np.ndarray:
        full = np.zeros(self.mesh.ndof)
        full[self.free] = x_free
        return full.reshape(self.mesh.n_blocks, self.nd)

    def block_strains(self, dofs: np.ndarray, xi: SymTensor) -> np.ndarray:
        S = strain_selector(self.dim)  # noqa: N806
        return xi.vector[None, :] + np.asarray(dofs).reshape(self.mesh.n_blocks, self.nd) @ S.T

    def jumps(self, dofs: np.ndarray) -> np.ndarray:
        return (self.J_full @ np.asarray(dofs).ravel()).reshape(-1, self.dim)

    def bulk_energy(self, dofs: np.ndarray, xi: SymTensor) -> float:
        strains = self.block_strains(dofs, xi)
        measures = np.array([b.measure for b in self.mesh.blocks])
        dens = 0.5 * np.einsum('bi,ij,bj->b', strains, self.A.matrix, strains)
        return float(np.sum(measures * dens))

    def energy(self, dofs: np.ndarray, xi: SymTensor, cone: JumpCone, include_surface: bool = True, tol: float = 1e-7) -> float:
        """离散泛函的直接求值；跳跃不可容许时返回 +inf"""
        qd = self.mesh.quadrature
        jumps = self.jumps(dofs)
        for i in range(qd.size):
            kind = JumpCone(JumpConeKind.BONDED, self.dim) if qd.bonded[i] else cone
            if not jump_admissible(kind, qd.normals[i], jumps[i], tol):
                return float('inf')
        surface = float(np.sum(qd.cohesive_weights * np.linalg.norm(jumps, axis=1))) if include_surface else 0.0
        return self.bulk_energy(dofs, xi) + surface

    def average_strain(self, dofs: np.ndarray, xi: SymTensor) -> SymTensor:
        """Σ|b|(ξ + sym G_b) + Σ w (j ⊙ ν)；任意周期块仿射场均等于 |Y|·ξ"""
        measures = np.array([b.measure for b in self.mesh.blocks])
        total = measures @ self.block_strains(dofs, xi)
        qd = self.mesh.quadrature
        jumps = self.jumps(dofs)
        for i in range(qd.size):
            outer = np.outer(jumps[i], qd.normals[i])
            total = total + qd.weights[i] * matrix_to_voigt(0.5 * (outer + outer.T), self.dim)
        return SymTensor.from_vector(self.dim, total)

    def jump_at(self, dofs: np.ndarray, facet: Facet, point: Any) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        blocks = np.asarray(dofs).reshape(self.mesh.n_blocks, self.nd)
        d = self.dim

        def trace(b: int, y: np.ndarray) -> np.ndarray:
            c = blocks[b, :d]
            G = blocks[b, d:].reshape(d, d)  # noqa: N806
            return c + G @ (y - np.asarray(self.mesh.blocks[b].centroid))

        return trace(facet.right, x - np.asarray(facet.shift)) - trace(facet.left, x)

    def surface_exact(self, dofs: np.ndarray) -> float:
        """按面元端点精确积分 |跳跃|（后处理诊断）"""
        parts = []
        for f in self.mesh.facets:
            if not f.cohesive:
                continue
            if self.dim == 1:
                parts.append(float(np.linalg.norm(self.jump_at(dofs, f, f.points[0]))) * f.measure)
            else:
                parts.append(exact_facet_l1(self.jump_at(dofs, f, f.endpoints[0]), self.jump_at(dofs, f, f.endpoints[1]), f.measure))
        return float(np.sum(parts)) if parts else 0.0


_SYSTEM_CACHE: OrderedDict[tuple[Any, ...], CellSystem] = OrderedDict()
_SYSTEM_LOCK = threading.Lock()


def assemble(problem: CellProblem) -> CellSystem:
    """
    组装（并缓存）问题的线性代数部分

    Raises:
        GeometryError: 存在未与固定块相连的悬浮块
    """
    key = (problem.mesh.fingerprint, problem.A.matrix.tobytes(), tuple(sorted(set(problem.clamped))))
    with _SYSTEM_LOCK:
        system = _SYSTEM_CACHE.get(key)
        if system is not None:
            _SYSTEM_CACHE.move_to_end(key)
            return system
    system = CellSystem(problem.mesh, problem.A, problem.clamped)
    with _SYSTEM_LOCK:
        _SYSTEM_CACHE[key] = system
        while len(_SYSTEM_CACHE) > SYSTEM_CACHE_SIZE:
            _SYSTEM_CACHE.popitem(last=False)
    return system


def clear_system_cache() -> None:
    with _SYSTEM_LOCK:
        _SYSTEM_CACHE.clear()


# ---------------------------------------------------------------- ADMM


class _AdmmState:
    """单次求解的迭代状态（x, z, u 与 ρ）"""

    def __init__(self, system: CellSystem, problem: CellProblem) -> None:
        self.system = system
        self.problem = problem
        qd = system.mesh.quadrature
        self.m = qd.size
        self.x: np.ndarray | None = None
        self.z = np.zeros((self.m, system.dim))
        self.u = np.zeros((self.m, system.dim))
        self.rho = float(problem.params.rho or system.default_rho)

    @ensure_initialized('x')
    def jx(self) -> np.ndarray:
        assert self.x is not None
        return (self.system.J @ self.x).reshape(self.m, self.system.dim)


def _objective_parts(system: CellSystem, problem: CellProblem, x: np.ndarray, z: np.ndarray, weights: np.ndarray) -> tuple[float, float]:
    xi = problem.xi.vector
    const = 0.5 * system.volume * float(xi @ problem.A.matrix @ xi)
    bulk = 0.5 * float(x @ (system.Q @ x)) + float((system.B @ xi) @ x) + const
    surface = float(np.sum(weights * np.linalg.norm(z, axis=1)))
    return max(bulk, 0.0), surface


def _run_admm(system: CellSystem, problem: CellProblem) -> CellSolution:
    params = problem.params
    qd = system.mesh.quadrature
    weights = qd.cohesive_weights if problem.include_surface else np.zeros(qd.size)
    q = system.B @ problem.xi.vector
    scale = max(1.0, problem.xi.norm())
    eps_p, eps_d = params.tol_primal * scale, params.tol_dual * scale
    delta = system.prox_delta
    J = system.J  # noqa: N806

    state = _AdmmState(system, problem)
    x = np.zeros(system.n_free)
    state.x = x
    best: dict[str, Any] | None = None
    r = s = float('inf')
    converged = False
    iteration = 0
    dz_norm = 0.0

    with TimerWrapt(f'ADMM {system.mesh.label}', quiet=True) as clock:
        for iteration in range(1, params.max_iter + 1):
            solve = system.factor(state.rho)
            x_prev = x
            rhs = -q + state.rho * (J.T @ (state.z - state.u).ravel()) + delta * x_prev
            x = solve(rhs)
            state.x = x
            jx = state.jx()
            z_old = state.z
            state.z = jump_prox_batch(problem.cone, qd.normals, jx + state.u, weights / state.rho, qd.bonded)
            state.u = state.u + jx - state.z
            r = float(np.linalg.norm(jx - state.z))
            dz_norm = state.rho * float(np.linalg.norm(J.T @ (state.z - z_old).ravel())) + delta * float(np.linalg.norm(x - x_prev))
            s = dz_norm
            if not (np.all(np.isfinite(x)) and np.isfinite(r) and np.isfinite(s)):
                raise SolverError('NaN detected in ADMM iterates', {'iteration': iteration, 'rho': state.rho, 'geometry': system.mesh.label})
            merit = max(r / eps_p, s / eps_d)
            if best is None or merit <= best['merit']:
                best = {'merit': merit, 'x': x.copy(), 'z': state.z.copy(), 'u': state.u.copy(), 'rho': state.rho, 'r': r, 's': s, 'dz': dz_norm, 'iteration': iteration}
            if r <= eps_p and s <= eps_d:
                converged = True
                break
            if iteration % params.check_every == 0:
                if r > params.balance_ratio * s:
                    state.rho *= params.rho_factor
                    state.u /= params.rho_factor
                elif s > params.balance_ratio * r:
                    state.rho /= params.rho_factor
                    state.u *= params.rho_factor

    assert best is not None
    if not converged:
        x, z, u, rho = best['x'], best['z'], best['u'], best['rho']
        r, s, dz_norm = best['r'], best['s'], best['dz']
        mylog.warning(f'ADMM | {system.mesh.label} ξ={list(problem.xi.components)} not converged after {iteration} iterations (r={r:.2e}, s={s:.2e})')
    else:
        z, u, rho = state.z, state.u, state.rho

    bulk, surface = _objective_parts(system, problem, x, z, weights)
    value = bulk + surface
    y = rho * u
    jx = (J @ x).reshape(-1, system.dim)
    # Lagrangian at the final iterate minus the dual-residual term
    lagrangian = value + float(np.sum(y * (jx - z)))
    radius = max(1.0, 2.0 * float(np.linalg.norm(x)))
    lower = min(max(lagrangian - dz_norm * radius, 0.0), value)

    dofs = system.expand(x)
    solution = CellSolution(
        value=value,
        bulk_part=bulk,
        surface_part=surface,
        block_dofs=dofs,
        jumps=np.asarray(z),
        residual_primal=r,
        residual_dual=s,
        iterations=iteration if converged else int(best['iteration']),
        converged=converged,
        lower_bound_estimate=lower,
        xi=problem.xi,
        include_surface=problem.include_surface,
        rho=rho,
        elapsed=clock.elapsed,
        surface_exact=system.surface_exact(dofs) if problem.include_surface else 0.0,
    )
    mylog.debug(f'ADMM | {system.mesh.label} value={value:.12g} bulk={bulk:.6g} surface={surface:.6g} it={solution.iterations} gap={solution.gap:.2e}')
    return solution


def solve_density(problem: CellProblem) -> CellSolution:
    """
    求解离散单元问题，返回 f_hom(ξ)（include_surface=False 时为 g_hom(ξ)）

    Raises:
        GeometryError: 悬浮块
        SolverError: 迭代中出现 NaN
    """
    return _run_admm(assemble(problem), problem)


def solve_dry(problem: CellProblem) -> CellSolution:
    """去掉界面项的单元问题：g_hom(ξ)"""
    return solve_density(problem.dry())


def solve_cell(problem: CellProblem) -> CellSolution:
    return solve_density(problem) if problem.include_surface else solve_dry(problem)


# ---------------------------------------------------------------- oracle


def reference_density(problem: CellProblem, smoothing: float = SMOOTHING) -> float:
    """
    小规模参考解：SLSQP 求解光滑化问题，而非对原非光滑问题做投影次梯度迭代

    |j| 以 sqrt(|j|² + s²) − s 代替，锥约束写成逐点线性约束
    （张开锥：j·ν ≥ 0 且 j·τ = 0；无侵入：j·ν ≥ 0；粘结：j = 0）。
    光滑化项满足 |j| − s ≤ sqrt(|j|² + s²) − s ≤ |j|，故返回值位于
    [f − s·Σw, f]，默认 s = SMOOTHING 时偏差可忽略。

    Raises:
        InputError: 自由度超过 ORACLE_MAX_DOFS，或为自定义锥
        SolverError: SLSQP 未成功
    """
    if problem.cone.kind is JumpConeKind.CUSTOM:
        raise InputError('reference_density supports opening, noninterpenetration and bonded cones only')
    system = assemble(problem)
    n = system.n_free
    if n > ORACLE_MAX_DOFS:
        raise InputError(f'reference_density is meant for small problems ({n} free DOFs > {ORACLE_MAX_DOFS})')
    dim = system.dim
    qd = system.mesh.quadrature
    Q = system.Q.toarray()  # noqa: N806
    J = system.J.toarray().reshape(qd.size, dim, n)  # noqa: N806
    q = system.B @ problem.xi.vector
    xi = problem.xi.vector
    const = 0.5 * system.volume * float(xi @ problem.A.matrix @ xi)
    weights = qd.cohesive_weights if problem.include_surface else np.zeros(qd.size)

    def objective(x: np.ndarray) -> float:
        j = np.einsum('mdn,n->md', J, x)
        smooth = np.sqrt(np.sum(j * j, axis=1) + smoothing**2) - smoothing
        return 0.5 * float(x @ Q @ x) + float(q @ x) + const + float(weights @ smooth)

    def gradient(x: np.ndarray) -> np.ndarray:
        j = np.einsum('mdn,n->md', J, x)
        coef = weights / np.sqrt(np.sum(j * j, axis=1) + smoothing**2)
        return Q @ x + q + np.einsum('m,md,mdn->n', coef, j, J)

    ineq_rows: list[np.ndarray] = []
    eq_rows: list[np.ndarray] = []
    for i in range(qd.size):
        nu = qd.normals[i]
        if qd.bonded[i] or problem.cone.kind is JumpConeKind.BONDED:
            eq_rows.extend(J[i])
            continue
        ineq_rows.append(nu @ J[i])
        if problem.cone.kind is JumpConeKind.OPENING and dim == 2:
            eq_rows.append(np.array([-nu[1], nu[0]]) @ J[i])
    constraints = []
    if ineq_rows:
        g = np.array(ineq_rows)
        constraints.append({'type': 'ineq', 'fun': lambda x, g=g: g @ x, 'jac': lambda x, g=g: g})
    if eq_rows:
        h = np.array(eq_rows)
        constraints.append({'type': 'eq', 'fun': lambda x, h=h: h @ x, 'jac': lambda x, h=h: h})
    result = minimize(objective, np.zeros(n), jac=gradient, method='SLSQP', constraints=constraints, options={'ftol': 1e-14, 'maxiter': 2000})
    if not result.success:
        raise SolverError('reference SLSQP solve failed', {'status': int(result.status), 'message': str(result.message)})
    return float(result.fun)


__all__ = [
    'CellProblem',
    'CellSolution',
    'CellSystem',
    'SolverParams',
    'assemble',
    'clear_system_cache',
    'reference_density',
    'solve_cell',
    'solve_density',
    'solve_dry',
    'strain_selector',
]
