from fractions import Fraction

import pytest
from hypothesis import settings

from hermlat.efield import FieldConfig
from hermlat.lattice import HermSpace

settings.register_profile("hermlat", max_examples=60, deadline=None)
settings.load_profile("hermlat")


@pytest.fixture
def cfg3() -> FieldConfig:
    return FieldConfig(3, 1)


@pytest.fixture
def cfg5() -> FieldConfig:
    return FieldConfig(5, 1)


def diag_lattice(cfg: FieldConfig, *entries):
    """Standard lattice of the diagonal space with the given (rational) norms."""
    return HermSpace.diagonal(cfg, [Fraction(e) for e in entries]).standard_lattice()


def hyperbolic_lattice(cfg: FieldConfig, s: int = 1):
    return HermSpace.hyperbolic(cfg, s).standard_lattice()
