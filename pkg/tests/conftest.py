import numpy as np
import pytest

from codedmm.field_poly import FieldConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def gf11():
    return FieldConfig(11)


@pytest.fixture
def gf7():
    return FieldConfig(7)
