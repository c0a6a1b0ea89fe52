from __future__ import annotations

import os

import hypothesis
import numpy as np
import pytest
from xtlog import mylog

from masonryhom.cellsolver import clear_system_cache
from masonryhom.cones import JumpCone
from masonryhom.density import DensitySweep, ProblemTemplate
from masonryhom.geometry import build_chain_1d, build_stack_bond
from masonryhom.tensors import ElasticityOperator

np.seterr(all='warn')

hypothesis.settings.register_profile('fast', max_examples=5, deadline=None)
hypothesis.settings.register_profile('ci', max_examples=60, deadline=None, derandomize=True)
hypothesis.settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'ci'))

mylog.set_level('WARNING')


@pytest.fixture(autouse=True)
def _fresh_systems():
    clear_system_cache()
    yield


@pytest.fixture
def chain_template() -> ProblemTemplate:
    return ProblemTemplate(build_chain_1d(), ElasticityOperator.identity(1), JumpCone.parse('opening', 1))


@pytest.fixture
def stack_template() -> ProblemTemplate:
    return ProblemTemplate(build_stack_bond(1, 1), ElasticityOperator.identity(2), JumpCone.parse('opening', 2))


@pytest.fixture
def chain_sweep(chain_template: ProblemTemplate) -> DensitySweep:
    return DensitySweep(chain_template)


@pytest.fixture
def stack_sweep(stack_template: ProblemTemplate) -> DensitySweep:
    return DensitySweep(stack_template)
