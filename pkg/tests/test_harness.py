from __future__ import annotations

import pytest

from masonryhom.cache import SolveCache
from masonryhom.density import ProblemTemplate
from masonryhom.exception import InputError
from masonryhom.harness import HARNESS_HEADER, EpsilonExperiment, HarnessResult, HarnessRow, check_liminf, run_sweep
from masonryhom.tensors import SymTensor


@pytest.mark.parametrize(('xi', 'expected'), [(2.0, 1.5), (0.5, 0.125), (-1.0, 0.5)])
def test_chain_energy_is_scale_invariant(chain_template: ProblemTemplate, xi, expected):
    result = run_sweep(EpsilonExperiment(chain_template, SymTensor(1, (xi,))))
    assert result.f_hom == pytest.approx(expected, abs=1e-7)
    assert [r.n for r in result.rows] == [1, 2, 4, 8]
    for row in result.rows:
        assert row.energy == pytest.approx(expected, abs=1e-6)
        assert row.converged
    assert result.last_two_difference <= 1e-6
    assert check_liminf(result) == []


def test_tiled_single_brick_tracks_the_cell(stack_template: ProblemTemplate):
    xi = SymTensor.from_entries(2.0, 0.0)
    result = run_sweep(EpsilonExperiment(stack_template, xi, (2, 4)), cache=SolveCache(maxsize=32))
    assert result.all_converged
    assert abs(result.rows[-1].energy - result.f_hom) <= 0.05 * result.f_hom
    assert len(result.to_dict()['rows']) == 2


def test_clamped_boundary_adds_a_layer(chain_template: ProblemTemplate):
    xi = SymTensor(1, (2.0,))
    periodic = run_sweep(EpsilonExperiment(chain_template, xi, (2, 4)))
    clamped = run_sweep(EpsilonExperiment(chain_template, xi, (2, 4), boundary='clamp'))
    for a, b in zip(periodic.rows, clamped.rows, strict=True):
        assert b.energy >= a.energy - 1e-7
    assert check_liminf(clamped) == []


def test_experiment_validation(chain_template: ProblemTemplate):
    xi = SymTensor(1, (1.0,))
    with pytest.raises(InputError):
        EpsilonExperiment(chain_template, xi, (4, 2))
    with pytest.raises(InputError):
        EpsilonExperiment(chain_template, xi, (0, 1))
    with pytest.raises(InputError):
        EpsilonExperiment(chain_template, xi, boundary='dirichlet')  # type: ignore[arg-type]
    with pytest.raises(InputError):
        EpsilonExperiment(chain_template, SymTensor.from_entries(1.0, 0.0))


def test_problem_tiles_and_clamps(chain_template: ProblemTemplate):
    xi = SymTensor(1, (1.0,))
    assert EpsilonExperiment(chain_template, xi).boundary == 'periodic'
    assert EpsilonExperiment(chain_template, xi).problem(4).clamped == ()
    assert EpsilonExperiment(chain_template, xi).problem(4).mesh.n_blocks == 4
    clamped = EpsilonExperiment(chain_template, xi, boundary='clamp').problem(4)
    assert clamped.clamped == (0, 3)


def test_check_liminf_reports_rows_below_the_cell_value(chain_template: ProblemTemplate):
    experiment = EpsilonExperiment(chain_template, SymTensor(1, (2.0,)))
    result = HarnessResult(experiment, 1.5, [HarnessRow(1, 1.0, 1.5, 0.0, 0.5, 1.0, True), HarnessRow(2, 0.5, 1.4, -0.1, 0.5, 0.9, True)])
    assert [r.n for r in check_liminf(result)] == [2]
    assert len(HARNESS_HEADER) == len(result.rows[0].row())
