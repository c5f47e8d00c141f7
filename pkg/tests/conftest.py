import numpy as np
import pytest

from kinetics.microdynamics import InteractionParams, SpeciesParams


@pytest.fixture
def gas():
    """Dimensionless species with alpha = 0 (m = k = 1)."""
    return SpeciesParams.dimensionless(0.0)


@pytest.fixture
def gas_half():
    return SpeciesParams.dimensionless(0.5)


@pytest.fixture
def nitrogen():
    return SpeciesParams(name="N2", m=4.6518e-26, alpha=0.0)


@pytest.fixture
def hard_spheres():
    """gamma = 1 with ||b|| = 1."""
    return InteractionParams.from_norm(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
