from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from masonryhom.cones import ConeSpec
from masonryhom.density import DensitySweep
from masonryhom.exception import InputError
from masonryhom.macroeval import AnalyticDensity1D, CellDensity, CrackSegment, MacroElement, MacroField, admissible, evaluate
from masonryhom.tensors import SymTensor

ANALYTIC = AnalyticDensity1D()
SMALL = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def bulk_only() -> MacroField:
    return MacroField.piecewise_1d([0.0, 1.0], [0.0], [0.5])


def with_jump(jump: float) -> MacroField:
    return MacroField.piecewise_1d([0.0, 0.5, 1.0], [0.0, jump], [0.0, 0.0])


def test_bulk_only_field():
    energy = evaluate(bulk_only(), ANALYTIC)
    assert energy.total == pytest.approx(0.125, abs=1e-9)
    assert energy.singular == 0.0


def test_opening_jump_costs_its_recession():
    energy = evaluate(with_jump(0.2), ANALYTIC)
    assert energy.bulk == pytest.approx(0.0, abs=1e-12)
    assert energy.total == pytest.approx(0.2, abs=1e-9)
    assert energy.segments == [pytest.approx(0.2)]


def test_closing_jump_is_inadmissible():
    energy = evaluate(with_jump(-0.2), ANALYTIC)
    assert math.isinf(energy.total)
    assert not energy.admissible
    assert energy.report.segments[0].residual > 0.0


def test_admissibility_examples():
    assert admissible(bulk_only(), ANALYTIC.k_hom)
    assert admissible(with_jump(0.3), ANALYTIC.k_hom)
    assert not admissible(with_jump(-0.3), ANALYTIC.k_hom)


def test_piecewise_1d_skips_continuous_breaks():
    macro = MacroField.piecewise_1d([0.0, 0.5, 1.0], [0.0, -0.5], [0.0, 1.0])
    assert macro.cracks == ()


def test_dry_evaluation_drops_the_singular_part():
    energy = evaluate(with_jump(0.4), ANALYTIC, dry=True)
    assert energy.total == 0.0
    assert energy.segments == [0.0]
    compressed = evaluate(MacroField.piecewise_1d([0.0, 1.0], [0.0], [-2.0]), ANALYTIC, dry=True)
    assert compressed.total == pytest.approx(2.0)


@given(st.floats(min_value=0.0, max_value=3.0), st.floats(min_value=0.0, max_value=5.0))
def test_singular_part_is_one_homogeneous(jump, t):
    base = evaluate(with_jump(jump), ANALYTIC)
    scaled = evaluate(with_jump(jump).scaled(t), ANALYTIC)
    assert scaled.singular == pytest.approx(t * base.singular, abs=1e-12)


@given(SMALL, SMALL, st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
def test_energy_is_convex_along_segments(slope_a, slope_b, jump_a, jump_b):
    def field(slope: float, jump: float) -> MacroField:
        return MacroField.piecewise_1d([0.0, 0.5, 1.0], [0.0, jump], [slope, slope])

    mid = evaluate(field(0.5 * (slope_a + slope_b), 0.5 * (jump_a + jump_b)), ANALYTIC).total
    ends = 0.5 * (evaluate(field(slope_a, jump_a), ANALYTIC).total + evaluate(field(slope_b, jump_b), ANALYTIC).total)
    assert mid <= ends + 1e-12


def test_json_roundtrip():
    macro = with_jump(0.2)
    assert MacroField.from_dict(macro.to_dict()) == macro


def test_declared_jump_must_match_traces():
    data = with_jump(0.2).to_dict()
    data['cracks'][0]['jump'] = [0.5]
    with pytest.raises(InputError, match='disagrees'):
        MacroField.from_dict(data)


def test_malformed_descriptions():
    with pytest.raises(InputError):
        MacroField.from_dict({'dim': 1})
    with pytest.raises(InputError):
        MacroField(1, ())
    with pytest.raises(InputError):
        MacroElement(1, ((1.0,), (0.0,)), (0.0,), ((0.0,),))


def test_dimension_mismatch_with_source(stack_sweep: DensitySweep):
    with pytest.raises(InputError):
        evaluate(bulk_only(), CellDensity(stack_sweep, k_hom=ConeSpec(2, ())))


def test_cell_density_reproduces_the_1d_fixtures(chain_sweep: DensitySweep):
    source = CellDensity(chain_sweep)
    assert evaluate(bulk_only(), source).total == pytest.approx(0.125, abs=1e-7)
    assert evaluate(with_jump(0.2), source).total == pytest.approx(0.2, abs=1e-6)
    assert math.isinf(evaluate(with_jump(-0.2), source).total)


def test_cell_density_in_2d(stack_sweep: DensitySweep):
    left = MacroElement(2, ((0.0, 0.0), (0.5, 0.0), (0.5, 1.0)), (0.0, 0.0), ((0.5, 0.0), (0.0, 0.0)))
    right = MacroElement(2, ((0.5, 0.0), (1.0, 0.0), (0.5, 1.0)), (0.2, 0.0), ((0.5, 0.0), (0.0, 0.0)))
    crack = CrackSegment(0, 1, ((0.5, 0.0), (0.5, 1.0)), (1.0, 0.0))
    macro = MacroField(2, (left, right), (crack,))
    k_hom = ConeSpec.from_tensors([SymTensor.from_entries(1.0, 0.0), SymTensor.from_entries(0.0, 1.0)], 'K_hom')
    energy = evaluate(macro, CellDensity(stack_sweep, k_hom=k_hom))
    assert energy.admissible
    assert energy.bulk == pytest.approx(0.5 * 0.125, abs=1e-6)
    assert energy.singular == pytest.approx(0.2, rel=0.05)
