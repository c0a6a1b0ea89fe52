from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from masonryhom.cellsolver import CellProblem, CellSolution, SolverParams, assemble, reference_density, solve_density, solve_dry
from masonryhom.cones import JumpCone
from masonryhom.exception import ConfigError, GeometryError, InputError
from masonryhom.geometry import UnitCellMesh, build_chain_1d, build_running_bond, build_stack_bond, refine_mesh
from masonryhom.tensors import ElasticityOperator, SymTensor


def chain_problem(xi: float, cone: str = 'opening', **kwargs) -> CellProblem:
    return CellProblem(build_chain_1d(), ElasticityOperator.identity(1), JumpCone.parse(cone, 1), SymTensor(1, (xi,)), **kwargs)


def stack_problem(xi: SymTensor, nx: int = 1, ny: int = 1, cone: str = 'opening') -> CellProblem:
    return CellProblem(build_stack_bond(nx, ny), ElasticityOperator.identity(2), JumpCone.parse(cone, 2), xi)


@pytest.mark.parametrize(
    ('xi', 'value', 'bulk', 'surface'),
    [(0.5, 0.125, 0.125, 0.0), (2.0, 1.5, 0.5, 1.0), (-3.0, 4.5, 4.5, 0.0), (0.0, 0.0, 0.0, 0.0)],
)
def test_chain_density(xi, value, bulk, surface):
    sol = solve_density(chain_problem(xi))
    assert sol.converged
    assert sol.value == pytest.approx(value, abs=1e-7)
    assert sol.bulk_part == pytest.approx(bulk, abs=1e-6)
    assert sol.surface_part == pytest.approx(surface, abs=1e-6)
    assert sol.lower_bound_estimate <= sol.value
    assert sol.gap <= 1e-6


@pytest.mark.parametrize(('xi', 'value'), [(1.0, 0.0), (-1.0, 0.5), (0.0, 0.0), (3.0, 0.0)])
def test_chain_dry_density(xi, value):
    sol = solve_dry(chain_problem(xi))
    assert sol.value == pytest.approx(value, abs=1e-7)
    assert sol.include_surface is False


def test_bonded_chain_is_purely_elastic():
    assert solve_density(chain_problem(2.0, cone='bonded')).value == pytest.approx(2.0, abs=1e-7)


def test_chain_jump_opens_with_unit_slope():
    sol = solve_density(chain_problem(2.0))
    assert sol.jumps.shape == (1, 1)
    assert sol.jumps[0, 0] == pytest.approx(1.0, abs=1e-6)
    assert sol.surface_exact == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize(
    ('xi', 'value'),
    [
        (SymTensor.from_entries(2.0, 0.0), 1.5),
        (SymTensor.from_entries(2.0, 2.0), 3.0),
        (SymTensor.from_entries(2.0, -3.0), 6.0),
        (SymTensor.from_entries(0.5, 0.0), 0.125),
    ],
)
def test_single_brick_separates_the_axes(xi, value):
    sol = solve_density(stack_problem(xi))
    assert sol.converged
    assert sol.value == pytest.approx(value, abs=1e-6)


@pytest.mark.parametrize(('nx', 'ny', 'offset'), [(3, 2, 1 / 3), (2, 3, 0.5), (2, 2, 0.5)])
def test_running_bond_bed_joints_open_fully(nx, ny, offset):
    problem = CellProblem(build_running_bond(nx, ny, offset), ElasticityOperator.identity(2), JumpCone.parse('opening', 2), SymTensor.from_entries(0.0, 2.0))
    sol = solve_density(problem)
    assert sol.converged
    assert sol.value == pytest.approx(1.5, abs=1e-6)


def test_stack_bond_free_dofs():
    system = assemble(stack_problem(SymTensor.identity(2), 2, 2))
    assert system.n_free == 4 * 6 - 2
    assert system.Q.shape == (22, 22)
    assert system.J.shape == (8 * 2, 22)


def test_tiled_single_brick_matches_the_cell():
    one = solve_density(stack_problem(SymTensor.from_entries(2.0, 0.0)))
    four = solve_density(stack_problem(SymTensor.from_entries(2.0, 0.0), 2, 2))
    assert four.value == pytest.approx(one.value, abs=1e-5)


@pytest.mark.parametrize('mesh', [build_running_bond(2, 2, 0.5), refine_mesh(build_stack_bond(1, 1), 2), build_chain_1d(3)], ids=['running', 'refined', 'chain3'])
def test_average_strain_of_periodic_fields_is_xi(mesh):
    dim = mesh.dim
    xi = SymTensor.from_entries(0.3) if dim == 1 else SymTensor.from_entries(0.3, -0.2, 0.1)
    problem = CellProblem(mesh, ElasticityOperator.identity(dim), JumpCone.parse('opening', dim), xi)
    system = assemble(problem)
    dofs = np.random.default_rng(3).normal(size=(mesh.n_blocks, mesh.ndof_per_block))
    assert np.allclose(system.average_strain(dofs, xi).vector, xi.vector, atol=1e-12)


def test_energy_is_translation_invariant():
    problem = CellProblem(build_running_bond(2, 2, 0.5), ElasticityOperator.identity(2), JumpCone.parse('noninterpenetration', 2), SymTensor.from_entries(1.0, 0.5, 0.2))
    system = assemble(problem)
    dofs = np.random.default_rng(5).normal(size=(4, 6))
    shifted = dofs.copy()
    shifted[:, :2] += np.array([0.7, -1.3])
    assert np.allclose(system.jumps(dofs), system.jumps(shifted))
    assert system.bulk_energy(shifted, problem.xi) == pytest.approx(system.bulk_energy(dofs, problem.xi))
    assert system.surface_exact(shifted) == pytest.approx(system.surface_exact(dofs))


def test_energy_of_inadmissible_jumps_is_infinite():
    problem = chain_problem(1.0)
    system = assemble(problem)
    closing = np.array([[0.0, 1.0]])  # slope +1 closes the interface
    assert system.energy(closing, problem.xi, problem.cone) == float('inf')
    opening = np.array([[0.0, -1.0]])
    assert system.energy(opening, problem.xi, problem.cone) == pytest.approx(1.0)


def test_floating_block_is_a_geometry_error():
    chain = build_chain_1d(2)
    wrap = replace(chain.facets[1], index=0, left=0, right=0)
    mesh = UnitCellMesh(1, chain.blocks, (wrap,), chain.boundary_faces, chain.periodic_pairs, 0, 'floating')
    with pytest.raises(GeometryError, match='floating block'):
        assemble(CellProblem(mesh, ElasticityOperator.identity(1), JumpCone.parse('opening', 1), SymTensor(1, (1.0,))))


def test_clamped_blocks_remove_all_their_dofs():
    problem = replace(stack_problem(SymTensor.identity(2), 2, 2), clamped=(0, 1))
    assert assemble(problem).n_free == 2 * 6


def test_systems_are_cached_per_geometry():
    a = assemble(chain_problem(1.0))
    b = assemble(chain_problem(-2.0))
    assert a is b


def test_problem_dimension_mismatch():
    with pytest.raises(InputError):
        CellProblem(build_chain_1d(), ElasticityOperator.identity(2), JumpCone.parse('opening', 1), SymTensor(1, (1.0,)))
    with pytest.raises(InputError):
        chain_problem(1.0, clamped=(3,))


@pytest.mark.parametrize('xi', [SymTensor.from_entries(1.5, -0.5, 0.3), SymTensor.from_entries(-1.0, 2.5, 0.0)])
def test_admm_matches_reference_density(xi):
    problem = stack_problem(xi)
    assert solve_density(problem).value == pytest.approx(reference_density(problem), abs=1e-4)


def test_reference_density_smoothing_stays_below_the_exact_value():
    # exact f(2) = 1.5; the smoothed surface term undershoots by at most s per unit facet weight
    value = reference_density(chain_problem(2.0), smoothing=1e-2)
    assert 1.5 - 1e-2 - 1e-8 <= value < 1.5 - 5e-3
    assert reference_density(chain_problem(2.0)) == pytest.approx(1.5, abs=1e-6)


def test_reference_density_rejects_large_problems():
    with pytest.raises(InputError):
        reference_density(stack_problem(SymTensor.identity(2), 4, 4))


def test_max_iter_returns_flagged_best_iterate():
    params = SolverParams(max_iter=1)
    sol = solve_density(chain_problem(2.0, params=params))
    assert not sol.converged
    assert sol.iterations == 1
    assert np.isfinite(sol.value)
    assert 0.0 <= sol.lower_bound_estimate <= sol.value
    assert sol.gap >= 0.0


def test_solution_json_roundtrip():
    sol = solve_density(chain_problem(2.0))
    again = CellSolution.from_dict(sol.to_dict())
    assert again.value == sol.value
    assert np.array_equal(again.block_dofs, sol.block_dofs)
    assert 'elapsed' not in sol.to_dict(timing=False)
    assert again.lower_bound_estimate == sol.lower_bound_estimate
    assert 'certified_lower_bound' not in sol.to_dict()


def test_solver_params_validation():
    with pytest.raises(InputError):
        SolverParams(rho=-1.0)
    with pytest.raises(ConfigError):
        SolverParams.from_dict({'rho': 1.0, 'momentum': 0.9})
    assert SolverParams.from_dict({'max_iter': 10}).max_iter == 10
