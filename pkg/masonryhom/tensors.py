# !/usr/bin/env python3
"""
==============================================================
Description  : 对称张量模块 - 一维/二维对称矩阵代数与能量范数
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-12 14:00:00

本模块提供以下核心功能：
- SymTensor：对称矩阵，以正交 Voigt 分量存储（二维为 ξ11, ξ22, √2·ξ12）
- ElasticityOperator：分量空间上的对称正定算子 A 及其能量范数
- sym_dyad / sym_part / energy_norm / parse_elasticity

主要特性：
- 分量内积等于完整矩阵的 Frobenius 内积，⟨Aξ,η⟩ 即普通点积
- 所有对象构造后不可变，可在线程间共享
==============================================================
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from .exception import InputError
from .validate import ensure_dim, ensure_vector

SQRT2 = math.sqrt(2.0)


def n_components(dim: int) -> int:
    return ensure_dim(dim) * (dim + 1) // 2


def matrix_to_voigt(matrix: Any, dim: int) -> np.ndarray:
    m = np.asarray(matrix, dtype=float).reshape(dim, dim)
    if dim == 1:
        return np.array([m[0, 0]])
    return np.array([m[0, 0], m[1, 1], SQRT2 * 0.5 * (m[0, 1] + m[1, 0])])


def voigt_to_matrix(vector: Any, dim: int) -> np.ndarray:
    v = np.asarray(vector, dtype=float)
    if dim == 1:
        return np.array([[v[0]]])
    off = v[2] / SQRT2
    return np.array([[v[0], off], [off, v[1]]])


@dataclass(frozen=True, slots=True)
class SymTensor:
    """对称矩阵，components 为正交 Voigt 分量"""

    dim: int
    components: tuple[float, ...]

    def __post_init__(self) -> None:
        ensure_dim(self.dim)
        comps = tuple(float(c) for c in self.components)
        if len(comps) != n_components(self.dim):
            raise InputError(f'SymTensor of dim {self.dim} needs {n_components(self.dim)} components, got {len(comps)}')
        if not all(math.isfinite(c) for c in comps):
            raise InputError(f'SymTensor components must be finite, got {comps}')
        object.__setattr__(self, 'components', comps)

    @classmethod
    def from_vector(cls, dim: int, vector: Any) -> SymTensor:
        return cls(dim, tuple(np.asarray(vector, dtype=float).ravel().tolist()))

    @classmethod
    def from_matrix(cls, matrix: Any) -> SymTensor:
        """从完整矩阵构造，要求矩阵对称（非对称输入请用 sym_part）"""
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        if m.shape[0] != m.shape[1]:
            raise InputError(f'matrix must be square, got shape {m.shape}')
        if not np.allclose(m, m.T, atol=1e-12):
            raise InputError('matrix must be symmetric')
        dim = ensure_dim(m.shape[0])
        return cls.from_vector(dim, matrix_to_voigt(m, dim))

    @classmethod
    def from_entries(cls, xi11: float, xi22: float | None = None, xi12: float = 0.0) -> SymTensor:
        if xi22 is None:
            return cls(1, (xi11,))
        return cls(2, (xi11, xi22, SQRT2 * xi12))

    @classmethod
    def zeros(cls, dim: int) -> SymTensor:
        return cls(dim, (0.0,) * n_components(dim))

    @classmethod
    def identity(cls, dim: int) -> SymTensor:
        return cls.from_matrix(np.eye(ensure_dim(dim)))

    @classmethod
    def basis(cls, dim: int) -> list[SymTensor]:
        """分量空间的正交规范基"""
        n = n_components(dim)
        return [cls.from_vector(dim, np.eye(n)[i]) for i in range(n)]

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.components)

    def to_matrix(self) -> np.ndarray:
        return voigt_to_matrix(self.components, self.dim)

    def entries(self) -> list[list[float]]:
        return self.to_matrix().tolist()

    def trace(self) -> float:
        return float(np.trace(self.to_matrix()))

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.to_matrix())

    def inner(self, other: SymTensor) -> float:
        self._check(other)
        return float(np.dot(self.components, other.components))

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def normalized(self) -> SymTensor:
        n = self.norm()
        if n == 0.0:
            raise InputError('cannot normalize the zero tensor')
        return self * (1.0 / n)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.norm() <= tol

    def _check(self, other: SymTensor) -> None:
        if not isinstance(other, SymTensor):
            raise InputError(f'expected SymTensor, got {type(other).__name__}')
        if other.dim != self.dim:
            raise InputError(f'dimension mismatch: {self.dim} vs {other.dim}')

    def __add__(self, other: SymTensor) -> SymTensor:
        self._check(other)
        return SymTensor(self.dim, tuple(a + b for a, b in zip(self.components, other.components, strict=True)))

    def __sub__(self, other: SymTensor) -> SymTensor:
        self._check(other)
        return SymTensor(self.dim, tuple(a - b for a, b in zip(self.components, other.components, strict=True)))

    def __neg__(self) -> SymTensor:
        return SymTensor(self.dim, tuple(-a for a in self.components))

    def __mul__(self, scalar: float) -> SymTensor:
        return SymTensor(self.dim, tuple(float(scalar) * a for a in self.components))

    __rmul__ = __mul__

    def __iter__(self) -> Iterator[float]:
        return iter(self.components)

    def to_dict(self) -> dict[str, Any]:
        return {'dim': self.dim, 'matrix': self.entries()}

    @classmethod
    def from_dict(cls, data: dict[str, Any] | Sequence[Any] | float) -> SymTensor:
        """接受 {'matrix': [[..]]}、完整矩阵、或一维标量"""
        if isinstance(data, dict):
            if 'matrix' in data:
                return cls.from_matrix(data['matrix'])
            if 'components' in data:
                return cls.from_vector(int(data['dim']), data['components'])
            raise InputError(f'cannot read SymTensor from keys {sorted(data)}')
        if isinstance(data, (int, float)):
            return cls(1, (float(data),))
        return cls.from_matrix(data)


def sym_dyad(a: Any, b: Any) -> SymTensor:
    """a ⊙ b = (a⊗b + b⊗a)/2"""
    va = np.atleast_1d(np.asarray(a, dtype=float))
    dim = ensure_dim(va.shape[0], 'len(a)')
    vb = ensure_vector(b, dim, 'b')
    va = ensure_vector(va, dim, 'a')
    outer = np.outer(va, vb)
    return SymTensor.from_vector(dim, matrix_to_voigt(0.5 * (outer + outer.T), dim))


def sym_part(matrix: Any) -> SymTensor:
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    return SymTensor.from_matrix(0.5 * (m + m.T))


class ElasticityOperator:
    """
    弹性算子 A（分量空间上的对称正定矩阵）

    α 与 M 为范数等价常数：√α|ξ| ≤ ‖ξ‖ ≤ M|ξ|，
    即 α 为最小特征值，M 为最大特征值的平方根。
    """

    def __init__(self, dim: int, matrix: Any, label: str = 'custom') -> None:
        self.dim = ensure_dim(dim)
        n = n_components(self.dim)
        arr = np.array(matrix, dtype=float).reshape(n, n) if np.size(matrix) == n * n else None
        if arr is None:
            raise InputError(f'elasticity matrix for dim {dim} must be {n}x{n}, got size {np.size(matrix)}')
        if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(arr).max()))):
            raise InputError('elasticity matrix must be symmetric')
        arr = 0.5 * (arr + arr.T)
        if float(np.linalg.eigvalsh(arr).min()) <= 0.0:
            raise InputError('elasticity matrix must be positive definite')
        arr.flags.writeable = False
        self._matrix = arr
        self.label = label

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self._matrix)

    @property
    def alpha(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def M(self) -> float:  # noqa: N802
        return math.sqrt(float(self.eigenvalues[-1]))

    @classmethod
    def identity(cls, dim: int) -> ElasticityOperator:
        return cls(dim, np.eye(n_components(dim)), label='identity')

    @classmethod
    def scaled(cls, dim: int, factor: float) -> ElasticityOperator:
        return cls(dim, float(factor) * np.eye(n_components(dim)), label=f'scaled:{factor:g}')

    @classmethod
    def isotropic(cls, dim: int, lam: float, mu: float) -> ElasticityOperator:
        """σ = λ tr(ξ) I + 2μ ξ；一维退化为 λ + 2μ"""
        if ensure_dim(dim) == 1:
            return cls(1, [[lam + 2.0 * mu]], label=f'iso:{lam:g},{mu:g}')
        mat = [[lam + 2.0 * mu, lam, 0.0], [lam, lam + 2.0 * mu, 0.0], [0.0, 0.0, 2.0 * mu]]
        return cls(2, mat, label=f'iso:{lam:g},{mu:g}')

    @classmethod
    def from_matrix(cls, matrix: Any) -> ElasticityOperator:
        arr = np.atleast_2d(np.asarray(matrix, dtype=float))
        dims = {1: 1, 3: 2}
        if arr.shape[0] not in dims:
            raise InputError(f'elasticity matrix must be 1x1 or 3x3, got {arr.shape}')
        return cls(dims[arr.shape[0]], arr)

    def _check(self, xi: SymTensor) -> None:
        if xi.dim != self.dim:
            raise InputError(f'dimension mismatch: operator dim {self.dim}, tensor dim {xi.dim}')

    def apply(self, xi: SymTensor) -> SymTensor:
        self._check(xi)
        return SymTensor.from_vector(self.dim, self._matrix @ xi.vector)

    def inner(self, xi: SymTensor, eta: SymTensor) -> float:
        self._check(xi)
        self._check(eta)
        return float(xi.vector @ self._matrix @ eta.vector)

    def norm(self, xi: SymTensor) -> float:
        return math.sqrt(max(self.inner(xi, xi), 0.0))

    def to_dict(self) -> dict[str, Any]:
        return {'dim': self.dim, 'label': self.label, 'matrix': self._matrix.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ElasticityOperator:
        return cls(int(data['dim']), data['matrix'], label=str(data.get('label', 'custom')))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ElasticityOperator):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._matrix, other._matrix))

    def __hash__(self) -> int:
        return hash((self.dim, self._matrix.tobytes()))

    def __repr__(self) -> str:
        return f'ElasticityOperator(dim={self.dim}, label={self.label!r}, alpha={self.alpha:.4g}, M={self.M:.4g})'


def energy_norm(A: ElasticityOperator, xi: SymTensor) -> float:  # noqa: N803
    """‖ξ‖ = ⟨Aξ, ξ⟩^{1/2}"""
    return A.norm(xi)


def parse_elasticity(text: str, dim: int) -> ElasticityOperator:
    """
    解析命令行弹性算子描述

    支持 'identity'、'scaled:<s>'、'iso:<lambda>,<mu>'
    """
    spec = text.strip().lower()
    try:
        if spec == 'identity':
            return ElasticityOperator.identity(dim)
        if spec.startswith('scaled:'):
            return ElasticityOperator.scaled(dim, float(spec.split(':', 1)[1]))
        if spec.startswith('iso:'):
            lam, mu = (float(v) for v in spec.split(':', 1)[1].split(','))
            return ElasticityOperator.isotropic(dim, lam, mu)
    except ValueError as err:
        raise InputError(f'cannot parse elasticity operator {text!r}: {err}') from err
    raise InputError(f'unknown elasticity operator {text!r} (expected identity, scaled:<s> or iso:<lambda>,<mu>)')


__all__ = [
    'ElasticityOperator',
    'SymTensor',
    'energy_norm',
    'matrix_to_voigt',
    'n_components',
    'parse_elasticity',
    'sym_dyad',
    'sym_part',
    'voigt_to_matrix',
]
