# !/usr/bin/env python3
"""
==============================================================
Description  : 微观几何模块 - 周期单元网格、界面面元与周期配对
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-13 15:20:00

本模块提供以下核心功能：
- Block / Facet / BoundaryFace / UnitCellMesh：块、界面面元、边界面与周期网格
- build_chain_1d / build_stack_bond / build_running_bond：基本单元构造
- refine_mesh：块内三角剖分加密（内部边为粘结面元）
- tile_mesh：ε = 1/N 的 Ω 拼装（边界处为环绕面元）
- exact_facet_l1：仿射跳跃沿面元的 |跳跃| 精确积分
- parse_geometry：命令行几何描述解析

约定：
- 面元点坐标位于左块坐标系，右块在该面元处的位置为其参考位置平移 shift
- 法向由左块指向右块；shift ≠ 0 的面元为周期面元
- 求积：加密层级 0 用中点，层级 ≥ 1 及粘结边用两点 Gauss
==============================================================
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np
from scipy import integrate

from .exception import GeometryError, InputError
from .utils import stable_hash
from .validate import ensure_dim

Point = tuple[float, ...]
GAUSS_OFFSET = 0.5 / math.sqrt(3.0)
MEASURE_TOL = 1e-12
LOCATE_NUDGE = 1e-9


@dataclass(frozen=True)
class Block:
    index: int
    vertices: tuple[Point, ...]
    centroid: Point
    measure: float
    parent: int = -1

    def to_dict(self) -> dict[str, Any]:
        return {'index': self.index, 'vertices': [list(v) for v in self.vertices], 'centroid': list(self.centroid), 'measure': self.measure, 'parent': self.parent}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Block:
        return cls(
            int(data['index']),
            tuple(tuple(float(c) for c in v) for v in data['vertices']),
            tuple(float(c) for c in data['centroid']),
            float(data['measure']),
            int(data.get('parent', -1)),
        )


@dataclass(frozen=True)
class Facet:
    """界面面元：左右块、单位法向（左→右）、周期平移、端点、测度与求积点"""

    index: int
    left: int
    right: int
    normal: Point
    shift: Point
    endpoints: tuple[Point, ...]
    measure: float
    points: tuple[Point, ...]
    weights: tuple[float, ...]
    cohesive: bool = True

    @property
    def midpoint(self) -> Point:
        return tuple(np.mean(np.asarray(self.endpoints), axis=0).tolist())

    @property
    def periodic(self) -> bool:
        return any(abs(k) > 0.0 for k in self.shift)

    def flipped(self) -> Facet:
        """交换左右块：shift → −shift，ν → −ν，点坐标移到右块坐标系"""
        k = np.asarray(self.shift)
        return replace(
            self,
            left=self.right,
            right=self.left,
            normal=tuple((-np.asarray(self.normal)).tolist()),
            shift=tuple((-k).tolist()),
            endpoints=tuple(tuple((np.asarray(p) - k).tolist()) for p in self.endpoints),
            points=tuple(tuple((np.asarray(p) - k).tolist()) for p in self.points),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            'index': self.index,
            'left': self.left,
            'right': self.right,
            'normal': list(self.normal),
            'shift': list(self.shift),
            'endpoints': [list(p) for p in self.endpoints],
            'measure': self.measure,
            'points': [list(p) for p in self.points],
            'weights': list(self.weights),
            'cohesive': self.cohesive,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Facet:
        def pts(key: str) -> tuple[Point, ...]:
            return tuple(tuple(float(c) for c in p) for p in data[key])

        return cls(
            int(data['index']),
            int(data['left']),
            int(data['right']),
            tuple(float(c) for c in data['normal']),
            tuple(float(c) for c in data['shift']),
            pts('endpoints'),
            float(data['measure']),
            pts('points'),
            tuple(float(w) for w in data['weights']),
            bool(data.get('cohesive', True)),
        )


@dataclass(frozen=True)
class BoundaryFace:
    """块在 ∂Y 上的面，外法向"""

    block: int
    normal: Point
    midpoint: Point
    measure: float

    def to_dict(self) -> dict[str, Any]:
        return {'block': self.block, 'normal': list(self.normal), 'midpoint': list(self.midpoint), 'measure': self.measure}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BoundaryFace:
        return cls(int(data['block']), tuple(data['normal']), tuple(data['midpoint']), float(data['measure']))


@dataclass(frozen=True)
class QuadratureData:
    """逐求积点的数组视图，供组装与近端步使用"""

    points: np.ndarray
    weights: np.ndarray
    cohesive_weights: np.ndarray
    normals: np.ndarray
    shifts: np.ndarray
    left: np.ndarray
    right: np.ndarray
    facet: np.ndarray
    bonded: np.ndarray

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class UnitCellMesh:
    dim: int
    blocks: tuple[Block, ...]
    facets: tuple[Facet, ...]
    boundary_faces: tuple[BoundaryFace, ...] = ()
    periodic_pairs: tuple[tuple[int, int], ...] = ()
    level: int = 0
    label: str = ''
    meta: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        ensure_dim(self.dim)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def n_facets(self) -> int:
        return len(self.facets)

    @property
    def ndof_per_block(self) -> int:
        """块仿射自由度：平移 c (dim) + 梯度 G (dim²)"""
        return self.dim + self.dim * self.dim

    @property
    def ndof(self) -> int:
        return self.n_blocks * self.ndof_per_block

    @property
    def total_measure(self) -> float:
        return float(np.sum([b.measure for b in self.blocks]))

    def facet_measure(self, cohesive_only: bool = False) -> float:
        return float(np.sum([f.measure for f in self.facets if f.cohesive or not cohesive_only]))

    def partner(self, face: int) -> int:
        for a, b in self.periodic_pairs:
            if face == a:
                return b
            if face == b:
                return a
        raise InputError(f'boundary face {face} has no periodic partner')

    def boundary_blocks(self) -> tuple[int, ...]:
        """与周期（环绕）面元相邻的块"""
        touched = {f.left for f in self.facets if f.periodic} | {f.right for f in self.facets if f.periodic}
        return tuple(sorted(touched))

    @cached_property
    def quadrature(self) -> QuadratureData:
        rows = [(f, p, w) for f in self.facets for p, w in zip(f.points, f.weights, strict=True)]
        if not rows:
            empty = np.zeros((0, self.dim))
            idx = np.zeros(0, dtype=int)
            return QuadratureData(empty, np.zeros(0), np.zeros(0), empty, empty, idx, idx, idx, np.zeros(0, dtype=bool))
        return QuadratureData(
            points=np.array([p for _, p, _ in rows], dtype=float).reshape(-1, self.dim),
            weights=np.array([w for _, _, w in rows], dtype=float),
            cohesive_weights=np.array([w if f.cohesive else 0.0 for f, _, w in rows], dtype=float),
            normals=np.array([f.normal for f, _, _ in rows], dtype=float).reshape(-1, self.dim),
            shifts=np.array([f.shift for f, _, _ in rows], dtype=float).reshape(-1, self.dim),
            left=np.array([f.left for f, _, _ in rows], dtype=int),
            right=np.array([f.right for f, _, _ in rows], dtype=int),
            facet=np.array([f.index for f, _, _ in rows], dtype=int),
            bonded=np.array([not f.cohesive for f, _, _ in rows], dtype=bool),
        )

    @cached_property
    def fingerprint(self) -> str:
        return stable_hash(self.to_dict())

    def validate(self, tol: float = MEASURE_TOL) -> UnitCellMesh:
        """
        检查测度闭合、单位法向与周期配对对合性

        Raises:
            GeometryError: 任一检查失败
        """
        if abs(self.total_measure - 1.0) > max(tol, 1e-12) * max(1, self.n_blocks):
            raise GeometryError(f'block measures sum to {self.total_measure!r}, expected 1')
        for f in self.facets:
            if abs(float(np.linalg.norm(f.normal)) - 1.0) > 1e-12:
                raise GeometryError(f'facet {f.index} normal is not unit length')
            if not (0 <= f.left < self.n_blocks and 0 <= f.right < self.n_blocks):
                raise GeometryError(f'facet {f.index} references a missing block')
            if abs(float(np.sum(f.weights)) - f.measure) > 1e-12 * max(1.0, f.measure):
                raise GeometryError(f'facet {f.index} quadrature weights do not sum to its measure')
        seen: set[int] = set()
        for a, b in self.periodic_pairs:
            fa, fb = self.boundary_faces[a], self.boundary_faces[b]
            if a in seen or b in seen or a == b:
                raise GeometryError(f'periodic pairing is not an involution at ({a}, {b})')
            seen.update((a, b))
            if abs(fa.measure - fb.measure) > 1e-12 or not np.allclose(fa.normal, -np.asarray(fb.normal), atol=1e-12):
                raise GeometryError(f'periodic pair ({a}, {b}) has mismatched measure or normals')
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            'dim': self.dim,
            'label': self.label,
            'level': self.level,
            'blocks': [b.to_dict() for b in self.blocks],
            'facets': [f.to_dict() for f in self.facets],
            'boundary_faces': [bf.to_dict() for bf in self.boundary_faces],
            'periodic_pairs': [list(p) for p in self.periodic_pairs],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> UnitCellMesh:
        return cls(
            dim=int(data['dim']),
            blocks=tuple(Block.from_dict(b) for b in data['blocks']),
            facets=tuple(Facet.from_dict(f) for f in data['facets']),
            boundary_faces=tuple(BoundaryFace.from_dict(bf) for bf in data.get('boundary_faces', [])),
            periodic_pairs=tuple((int(a), int(b)) for a, b in data.get('periodic_pairs', [])),
            level=int(data.get('level', 0)),
            label=str(data.get('label', '')),
        ).validate()


# ---------------------------------------------------------------- helpers


def _as_point(values: Any) -> Point:
    return tuple(float(v) for v in np.asarray(values, dtype=float).ravel())


def _facet_quadrature(p0: np.ndarray, p1: np.ndarray, gauss: bool) -> tuple[tuple[Point, ...], tuple[float, ...], float]:
    length = float(np.linalg.norm(p1 - p0))
    if not gauss:
        return (_as_point(0.5 * (p0 + p1)),), (length,), length
    a = p0 + (0.5 - GAUSS_OFFSET) * (p1 - p0)
    b = p0 + (0.5 + GAUSS_OFFSET) * (p1 - p0)
    return (_as_point(a), _as_point(b)), (0.5 * length, 0.5 * length), length


def _segment_facet(index: int, left: int, right: int, normal: Sequence[float], shift: Sequence[float], p0: Any, p1: Any, gauss: bool, cohesive: bool = True) -> Facet:
    a = np.asarray(p0, dtype=float)
    b = np.asarray(p1, dtype=float)
    points, weights, length = _facet_quadrature(a, b, gauss)
    return Facet(index, left, right, _as_point(normal), _as_point(shift), (_as_point(a), _as_point(b)), length, points, weights, cohesive)


def _point_facet(index: int, left: int, right: int, normal: float, shift: float, x: float, cohesive: bool = True) -> Facet:
    return Facet(index, left, right, (normal,), (shift,), ((x,),), 1.0, ((x,),), (1.0,), cohesive)


def _boundary_from_facets(facets: Sequence[Facet]) -> tuple[tuple[BoundaryFace, ...], tuple[tuple[int, int], ...]]:
    faces: list[BoundaryFace] = []
    pairs: list[tuple[int, int]] = []
    for f in facets:
        if not f.periodic:
            continue
        mid = np.asarray(f.midpoint)
        nu = np.asarray(f.normal)
        faces.append(BoundaryFace(f.left, _as_point(nu), _as_point(mid), f.measure))
        faces.append(BoundaryFace(f.right, _as_point(-nu), _as_point(mid - np.asarray(f.shift)), f.measure))
        pairs.append((len(faces) - 2, len(faces) - 1))
    return tuple(faces), tuple(pairs)


def _assemble_mesh(dim: int, blocks: Sequence[Block], facets: Sequence[Facet], level: int, label: str) -> UnitCellMesh:
    faces, pairs = _boundary_from_facets(facets)
    return UnitCellMesh(dim, tuple(blocks), tuple(facets), faces, pairs, level, label).validate()


def _rect_block(index: int, x0: float, x1: float, y0: float, y1: float) -> Block:
    verts = ((x0, y0), (x1, y0), (x1, y1), (x0, y1))
    return Block(index, verts, (0.5 * (x0 + x1), 0.5 * (y0 + y1)), (x1 - x0) * (y1 - y0), index)


# ---------------------------------------------------------------- builders


def build_chain_1d(n_blocks: int = 1) -> UnitCellMesh:
    """
    一维链：B = (1/n)Z，每个单元 n 块；n=1 时单块单周期面元

    最后一个面元连接末块与首块，shift = 1。
    """
    if n_blocks < 1:
        raise InputError(f'n_blocks must be >= 1, got {n_blocks}')
    h = 1.0 / n_blocks
    blocks = [Block(i, ((i * h,), ((i + 1) * h,)), ((i + 0.5) * h,), h, i) for i in range(n_blocks)]
    facets = [_point_facet(i, i, (i + 1) % n_blocks, 1.0, 1.0 if i == n_blocks - 1 else 0.0, (i + 1) * h) for i in range(n_blocks)]
    label = 'chain' if n_blocks == 1 else f'chain:{n_blocks}'
    return _assemble_mesh(1, blocks, facets, 0, label)


def build_running_bond(nx: int, ny: int, offset: float) -> UnitCellMesh:
    """
    错缝砌合：第 j 行平移 ((j·offset) mod 1)/nx（offset 以砖长计）

    水平界面在上下两行断点的并集处切分，使每个面元恰好分隔两块。

    Raises:
        InputError: nx、ny < 1，offset 不在 [0,1)，或 nx·offset 非整数（与周期性不相容）
    """
    if nx < 1 or ny < 1:
        raise InputError(f'nx, ny must be >= 1, got ({nx}, {ny})')
    offset = float(offset)
    if not 0.0 <= offset < 1.0:
        raise InputError(f'offset must lie in [0, 1), got {offset}')
    if abs(nx * offset - round(nx * offset)) > 1e-9:
        raise InputError(f'offset {offset} is incompatible with periodicity: nx*offset = {nx * offset:g} is not an integer')
    w, h = 1.0 / nx, 1.0 / ny
    shifts = [((j * offset) % 1.0) * w for j in range(ny)]

    def bid(i: int, j: int) -> int:
        return j * nx + i

    blocks = [_rect_block(bid(i, j), shifts[j] + i * w, shifts[j] + (i + 1) * w, j * h, (j + 1) * h) for j in range(ny) for i in range(nx)]
    facets: list[Facet] = []
    for j in range(ny):
        for i in range(nx):
            x = shifts[j] + (i + 1) * w
            k = (1.0 if i == nx - 1 else 0.0, 0.0)
            facets.append(_segment_facet(len(facets), bid(i, j), bid((i + 1) % nx, j), (1.0, 0.0), k, (x, j * h), (x, (j + 1) * h), gauss=False))
    for j in range(ny):
        up = (j + 1) % ny
        ky = 1.0 if j == ny - 1 else 0.0
        s_lo, s_up = shifts[j], shifts[up]
        breaks = {round(s_lo + i * w, 12) for i in range(nx)}
        breaks |= {round(s_lo + ((s_up + i * w - s_lo) % 1.0), 12) for i in range(nx)}
        ordered = sorted(b for b in breaks if b < s_lo + 1.0 - 1e-12) + [s_lo + 1.0]
        y = (j + 1) * h
        for a, b in itertools.pairwise(ordered):
            xm = 0.5 * (a + b)
            i_lo = min(int(math.floor((xm - s_lo) / w)), nx - 1)
            q = int(math.floor((xm - s_up) / w))
            i_up = q % nx
            m = (q - i_up) // nx
            facets.append(_segment_facet(len(facets), bid(i_lo, j), bid(i_up, up), (0.0, 1.0), (float(m), ky), (a, y), (b, y), gauss=False))
    label = f'stack:{nx}x{ny}' if offset == 0.0 else f'running:{nx}x{ny}:{Fraction(offset).limit_denominator(1000)}'
    mesh = _assemble_mesh(2, blocks, facets, 0, label)
    mesh.meta.update({'nx': nx, 'ny': ny, 'offset': offset})
    return mesh


def build_stack_bond(nx: int, ny: int) -> UnitCellMesh:
    """齐缝砌合：nx·ny 个 (1/nx)×(1/ny) 矩形块，2·nx·ny 个面元"""
    return build_running_bond(nx, ny, 0.0)


# ---------------------------------------------------------------- refinement


def _triangle_contains(tri: np.ndarray, p: np.ndarray, tol: float = 1e-12) -> bool:
    a, b, c = tri
    mat = np.column_stack([b - a, c - a])
    lam = np.linalg.solve(mat, p - a)
    return bool(lam[0] >= -tol and lam[1] >= -tol and lam[0] + lam[1] <= 1.0 + tol)


def _locate(children: Sequence[Block], p: np.ndarray) -> int:
    for child in children:
        if _triangle_contains(np.asarray(child.vertices), p):
            return child.index
    raise GeometryError(f'point {p.tolist()} is not inside any refined sub-block')


def _refine_1d(mesh: UnitCellMesh, level: int) -> UnitCellMesh:
    blocks: list[Block] = []
    facets: list[Facet] = []
    children: dict[int, list[Block]] = {}
    for parent in mesh.blocks:
        a, b = parent.vertices[0][0], parent.vertices[1][0]
        h = (b - a) / level
        kids = []
        for s in range(level):
            lo = a + s * h
            kid = Block(len(blocks), ((lo,), (lo + h,)), (lo + 0.5 * h,), h, parent.index)
            blocks.append(kid)
            kids.append(kid)
        children[parent.index] = kids
        for s in range(level - 1):
            facets.append(_point_facet(len(facets), kids[s].index, kids[s + 1].index, 1.0, 0.0, a + (s + 1) * h, cohesive=False))
    for f in mesh.facets:
        left = children[f.left][-1 if f.normal[0] > 0 else 0].index
        right = children[f.right][0 if f.normal[0] > 0 else -1].index
        facets.append(_point_facet(len(facets), left, right, f.normal[0], f.shift[0], f.points[0][0], f.cohesive))
    return _assemble_mesh(1, blocks, facets, level, f'{mesh.label}/r{level}')


def _axis_bounds(block: Block) -> tuple[float, float, float, float]:
    verts = np.asarray(block.vertices)
    if verts.shape != (4, 2):
        raise GeometryError(f'block {block.index} is not a rectangle; refinement needs rectangular blocks')
    return float(verts[:, 0].min()), float(verts[:, 0].max()), float(verts[:, 1].min()), float(verts[:, 1].max())


def refine_mesh(mesh: UnitCellMesh, level: int) -> UnitCellMesh:
    """
    加密：每块分为 level×level 个矩形，每个矩形沿对角线分为两个三角形

    块内边成为粘结面元（跳跃为零）；原界面面元在两侧网格线处切分，
    使每一段恰好分隔两个子块。level=0 原样返回。
    """
    if level < 0:
        raise InputError(f'refinement level must be >= 0, got {level}')
    if level == 0:
        return mesh
    if mesh.level != 0:
        raise InputError('refine_mesh expects an unrefined mesh')
    if mesh.dim == 1:
        return _refine_1d(mesh, level)

    m = level
    blocks: list[Block] = []
    facets: list[Facet] = []
    children: dict[int, list[Block]] = {}
    grids: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    diag = (-1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))

    for parent in mesh.blocks:
        x0, x1, y0, y1 = _axis_bounds(parent)
        xs = np.linspace(x0, x1, m + 1)
        ys = np.linspace(y0, y1, m + 1)
        grids[parent.index] = (xs, ys)
        ids: dict[tuple[int, int, int], int] = {}
        kids: list[Block] = []
        for c in range(m):
            for a in range(m):
                v00 = (xs[a], ys[c])
                v10 = (xs[a + 1], ys[c])
                v11 = (xs[a + 1], ys[c + 1])
                v01 = (xs[a], ys[c + 1])
                area = 0.5 * (xs[a + 1] - xs[a]) * (ys[c + 1] - ys[c])
                for t, tri in enumerate(((v00, v10, v11), (v00, v11, v01))):
                    verts = tuple(_as_point(v) for v in tri)
                    kid = Block(len(blocks), verts, _as_point(np.mean(np.asarray(tri), axis=0)), area, parent.index)
                    ids[a, c, t] = kid.index
                    blocks.append(kid)
                    kids.append(kid)
        children[parent.index] = kids
        for c in range(m):
            for a in range(m):
                facets.append(_segment_facet(len(facets), ids[a, c, 0], ids[a, c, 1], diag, (0.0, 0.0), (xs[a], ys[c]), (xs[a + 1], ys[c + 1]), gauss=True, cohesive=False))
                if a + 1 < m:
                    facets.append(_segment_facet(len(facets), ids[a, c, 0], ids[a + 1, c, 1], (1.0, 0.0), (0.0, 0.0), (xs[a + 1], ys[c]), (xs[a + 1], ys[c + 1]), gauss=True, cohesive=False))
                if c + 1 < m:
                    facets.append(_segment_facet(len(facets), ids[a, c, 1], ids[a, c + 1, 0], (0.0, 1.0), (0.0, 0.0), (xs[a], ys[c + 1]), (xs[a + 1], ys[c + 1]), gauss=True, cohesive=False))

    for f in mesh.facets:
        p0, p1 = (np.asarray(p) for p in f.endpoints)
        nu = np.asarray(f.normal)
        k = np.asarray(f.shift)
        axis = 0 if abs(nu[0]) < 0.5 else 1
        if abs(abs(nu[1 - axis]) - 1.0) > 1e-12:
            raise GeometryError(f'facet {f.index} is not axis aligned; refinement needs axis-aligned facets')
        span = p1[axis] - p0[axis]
        cuts = {0.0, 1.0}
        for coord in (*grids[f.left][axis], *(grids[f.right][axis] + k[axis])):
            s = (coord - p0[axis]) / span
            if 1e-12 < s < 1.0 - 1e-12:
                cuts.add(round(float(s), 13))
        for s0, s1 in itertools.pairwise(sorted(cuts)):
            q0 = p0 + s0 * (p1 - p0)
            q1 = p0 + s1 * (p1 - p0)
            mid = 0.5 * (q0 + q1)
            left = _locate(children[f.left], mid - LOCATE_NUDGE * nu)
            right = _locate(children[f.right], mid - k + LOCATE_NUDGE * nu)
            facets.append(_segment_facet(len(facets), left, right, f.normal, f.shift, q0, q1, gauss=True, cohesive=f.cohesive))
    return _assemble_mesh(2, blocks, facets, level, f'{mesh.label}/r{level}')


# ---------------------------------------------------------------- tiling


def tile_mesh(mesh: UnitCellMesh, n: int) -> UnitCellMesh:
    """
    ε = 1/n 的 Ω = (0,1)^dim 拼装：n^dim 个缩放单元副本

    跨越 ∂Ω 的面元成为环绕面元（shift 为 ±1 分量），Ω 上保持周期。
    """
    if n < 1:
        raise InputError(f'tiling factor must be >= 1, got {n}')
    eps = 1.0 / n
    dim = mesh.dim
    nb = mesh.n_blocks
    cells = list(itertools.product(range(n), repeat=dim))
    cell_index = {cell: i for i, cell in enumerate(cells)}
    scale_area = eps**dim
    scale_len = eps ** (dim - 1)

    blocks: list[Block] = []
    for ci, cell in enumerate(cells):
        off = np.asarray(cell, dtype=float)
        for b in mesh.blocks:
            verts = tuple(_as_point(eps * (np.asarray(v) + off)) for v in b.vertices)
            blocks.append(Block(ci * nb + b.index, verts, _as_point(eps * (np.asarray(b.centroid) + off)), b.measure * scale_area, b.index))

    facets: list[Facet] = []
    for ci, cell in enumerate(cells):
        off = np.asarray(cell, dtype=float)
        for f in mesh.facets:
            target = np.asarray(cell, dtype=int) + np.rint(np.asarray(f.shift)).astype(int)
            wrapped = np.mod(target, n)
            wrap_shift = (target - wrapped) / n
            facets.append(
                Facet(
                    index=len(facets),
                    left=ci * nb + f.left,
                    right=cell_index[tuple(int(v) for v in wrapped)] * nb + f.right,
                    normal=f.normal,
                    shift=_as_point(wrap_shift),
                    endpoints=tuple(_as_point(eps * (np.asarray(p) + off)) for p in f.endpoints),
                    measure=f.measure * scale_len,
                    points=tuple(_as_point(eps * (np.asarray(p) + off)) for p in f.points),
                    weights=tuple(w * scale_len for w in f.weights),
                    cohesive=f.cohesive,
                )
            )
    tiled = _assemble_mesh(dim, blocks, facets, mesh.level, f'{mesh.label}@N{n}')
    tiled.meta.update({'tiles': n, 'epsilon': eps})
    return tiled


# ---------------------------------------------------------------- postprocessing


def exact_facet_l1(j0: Any, j1: Any, length: float) -> float:
    """
    仿射跳跃 j(s) = j0 + s(j1 − j0), s∈[0,1] 的 ∫|j| 精确值（乘以面元长度）

    |j(s)| 在最小范数参数处可能不光滑（法向跳跃变号），在该点切分积分区间。
    """
    a = np.atleast_1d(np.asarray(j0, dtype=float))
    d = np.atleast_1d(np.asarray(j1, dtype=float)) - a
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(a)) * length
    s_star = -float(a @ d) / dd
    breaks = [s_star] if 0.0 < s_star < 1.0 else None

    def integrand(s: float) -> float:
        return float(np.linalg.norm(a + s * d))

    value, _ = integrate.quad(integrand, 0.0, 1.0, points=breaks, epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(value) * length


def parse_geometry(text: str) -> UnitCellMesh:
    """
    解析 'chain'、'chain:<n>'、'stack:<nx>x<ny>'、'running:<nx>x<ny>:<offset>'

    offset 接受小数或分数（如 1/2）。
    """
    spec = text.strip().lower()
    try:
        kind, _, rest = spec.partition(':')
        if kind == 'chain':
            return build_chain_1d(int(rest) if rest else 1)
        if kind in {'stack', 'running'}:
            size, _, off = rest.partition(':')
            nx, ny = (int(v) for v in size.split('x'))
            if kind == 'stack':
                return build_stack_bond(nx, ny)
            return build_running_bond(nx, ny, float(Fraction(off or '1/2')))
    except (ValueError, ZeroDivisionError) as err:
        raise InputError(f'cannot parse geometry {text!r}: {err}') from err
    raise InputError(f'unknown geometry {text!r} (expected chain[:n], stack:<nx>x<ny> or running:<nx>x<ny>:<offset>)')


__all__ = [
    'Block',
    'BoundaryFace',
    'Facet',
    'QuadratureData',
    'UnitCellMesh',
    'build_chain_1d',
    'build_running_bond',
    'build_stack_bond',
    'exact_facet_l1',
    'parse_geometry',
    'refine_mesh',
    'tile_mesh',
]
