import numpy as np
import pytest

from brodylab.dynamics.measures import FamilyParams, LatticeFamily
from brodylab.geometry.curves import Constant, Rational
from brodylab.geometry.projective import ProjectivePoint


@pytest.fixture
def line():
    """[1 : z], the projective line of degree 1 and total energy 1."""
    return Rational([[1.0], [0.0, 1.0]])


@pytest.fixture
def constant():
    return Constant(ProjectivePoint([1.0, 0.5j]))


@pytest.fixture
def small_family():
    return LatticeFamily(FamilyParams(L=4.0, cells=3, seed=7))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def line_df2():
    """Closed form |df|^2 of [1 : z]."""
    return lambda z: 1.0 / (np.pi * (1.0 + np.abs(z) ** 2) ** 2)
