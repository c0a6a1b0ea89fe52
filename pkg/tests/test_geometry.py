from __future__ import annotations

import math

import numpy as np
import pytest

from masonryhom.exception import GeometryError, InputError
from masonryhom.geometry import UnitCellMesh, build_chain_1d, build_running_bond, build_stack_bond, exact_facet_l1, parse_geometry, refine_mesh, tile_mesh


def test_chain_has_one_block_and_one_periodic_facet():
    mesh = build_chain_1d()
    assert mesh.n_blocks == 1
    assert mesh.n_facets == 1
    facet = mesh.facets[0]
    assert facet.measure == 1.0
    assert facet.normal == (1.0,)
    assert facet.left == facet.right == 0
    assert facet.periodic
    assert mesh.partner(0) == 1 and mesh.partner(1) == 0


def test_chain_with_several_blocks():
    mesh = build_chain_1d(4)
    assert mesh.n_blocks == 4
    assert [f.periodic for f in mesh.facets] == [False, False, False, True]
    assert mesh.total_measure == pytest.approx(1.0)


def test_stack_single_brick():
    mesh = build_stack_bond(1, 1)
    assert mesh.n_blocks == 1
    assert mesh.n_facets == 2
    assert all(f.periodic for f in mesh.facets)


def test_stack_two_by_two():
    mesh = build_stack_bond(2, 2)
    assert mesh.n_blocks == 4
    assert mesh.n_facets == 8
    assert sum(f.periodic for f in mesh.facets) == 4
    assert mesh.facet_measure() == pytest.approx(4 * 0.5 * 2)
    assert mesh.ndof == 4 * 6


def test_running_bond_half_offset():
    mesh = build_running_bond(2, 2, 0.5)
    assert mesh.n_blocks == 4
    assert {b.measure for b in mesh.blocks} == {0.25}
    assert mesh.n_facets == 12
    horizontal = [f for f in mesh.facets if f.normal == (0.0, 1.0)]
    assert len(horizontal) == 8
    assert sum(f.measure for f in horizontal) == pytest.approx(2.0)
    assert mesh.blocks[2].vertices[0] == pytest.approx((0.25, 0.5))


def test_running_bond_with_zero_offset_is_stack_bond():
    running = build_running_bond(3, 2, 0.0)
    stack = build_stack_bond(3, 2)
    assert [(f.left, f.right, f.normal, f.shift) for f in running.facets] == [(f.left, f.right, f.normal, f.shift) for f in stack.facets]


@pytest.mark.parametrize(
    ('nx', 'ny', 'offset', 'facets'),
    [(3, 2, 1 / 3, 18), (2, 3, 0.5, 16)],
)
def test_running_bond_offsets_in_units_of_one_over_nx(nx, ny, offset, facets):
    mesh = build_running_bond(nx, ny, offset).validate()
    assert mesh.n_blocks == nx * ny
    assert mesh.n_facets == facets
    assert mesh.facet_measure() == pytest.approx(5.0)
    assert parse_geometry(mesh.label).fingerprint == mesh.fingerprint


@pytest.mark.parametrize('offset', [0.3, 1.0, -0.5])
def test_running_bond_incompatible_offset(offset):
    with pytest.raises(InputError):
        build_running_bond(2, 2, offset)


@pytest.mark.parametrize('builder', [lambda: build_chain_1d(3), lambda: build_stack_bond(2, 3), lambda: build_running_bond(2, 2, 0.5)])
def test_validate_closes_measure_and_pairs_faces(builder):
    mesh = builder()
    assert mesh.total_measure == pytest.approx(1.0)
    for a, b in mesh.periodic_pairs:
        assert mesh.partner(mesh.partner(a)) == a
        assert np.allclose(mesh.boundary_faces[a].normal, -np.asarray(mesh.boundary_faces[b].normal))


def test_validate_rejects_bad_measure():
    data = build_stack_bond(1, 1).to_dict()
    data['blocks'][0]['measure'] = 0.5
    with pytest.raises(GeometryError):
        UnitCellMesh.from_dict(data)


def test_json_roundtrip_keeps_fingerprint():
    mesh = build_running_bond(2, 2, 0.5)
    again = UnitCellMesh.from_dict(mesh.to_dict())
    assert again.fingerprint == mesh.fingerprint
    assert again.fingerprint != build_stack_bond(2, 2).fingerprint


def test_quadrature_view():
    q = build_stack_bond(2, 2).quadrature
    assert q.size == 8
    assert q.weights.sum() == pytest.approx(4.0)
    assert not q.bonded.any()


def test_refine_chain():
    fine = refine_mesh(build_chain_1d(), 3)
    assert fine.n_blocks == 3
    assert fine.facet_measure(cohesive_only=True) == pytest.approx(1.0)
    assert sum(not f.cohesive for f in fine.facets) == 2


def test_refine_stack_splits_facets_on_grid_lines():
    coarse = build_stack_bond(2, 1)
    fine = refine_mesh(coarse, 2)
    assert fine.n_blocks == 2 * 2 * 2 * 2
    assert fine.total_measure == pytest.approx(1.0)
    assert fine.facet_measure(cohesive_only=True) == pytest.approx(coarse.facet_measure())
    assert all(len(f.points) == 2 for f in fine.facets)
    assert refine_mesh(coarse, 0) is coarse


def test_refine_twice_is_rejected():
    with pytest.raises(InputError):
        refine_mesh(refine_mesh(build_chain_1d(), 2), 2)


def test_tile_mesh_scales_blocks_and_facets():
    tiled = tile_mesh(build_stack_bond(1, 1), 3)
    assert tiled.n_blocks == 9
    assert tiled.n_facets == 18
    assert tiled.total_measure == pytest.approx(1.0)
    assert tiled.facet_measure() == pytest.approx(3 * 2)
    assert sum(f.periodic for f in tiled.facets) == 6
    assert tiled.meta['epsilon'] == pytest.approx(1 / 3)
    assert len(tiled.boundary_blocks()) == 8


def test_tile_mesh_rejects_zero():
    with pytest.raises(InputError):
        tile_mesh(build_chain_1d(), 0)


def test_exact_facet_l1():
    assert exact_facet_l1((1.0, 0.0), (1.0, 0.0), 2.0) == pytest.approx(2.0)
    # sign change at the midpoint: ∫|1 − 2s| ds = ½
    assert exact_facet_l1((1.0,), (-1.0,), 1.0) == pytest.approx(0.5)
    assert exact_facet_l1((0.0, 1.0), (0.0, 3.0), 1.0) == pytest.approx(2.0)
    assert exact_facet_l1((1.0, 1.0), (-1.0, 1.0), 1.0) == pytest.approx(0.5 * (math.sqrt(2.0) + math.asinh(1.0)))


@pytest.mark.parametrize(
    ('text', 'blocks'),
    [('chain', 1), ('chain:4', 4), ('stack:2x3', 6), ('running:2x2:1/2', 4), ('Running:2x2', 4)],
)
def test_parse_geometry(text, blocks):
    assert parse_geometry(text).n_blocks == blocks


@pytest.mark.parametrize('text', ['hexagon', 'stack:2', 'running:2x2:a', 'chain:0'])
def test_parse_geometry_errors(text):
    with pytest.raises(InputError):
        parse_geometry(text)
