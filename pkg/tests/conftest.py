import numpy as np
import pytest

from bundlemps.experiments import SpectrumCache
from bundlemps.models import ModelSpec

TFIM_WEAK = ModelSpec("tfim", 12, transverse_field=0.01)
TFIM_CRITICAL = ModelSpec("tfim", 12, transverse_field=1.0)
XXZ = ModelSpec("xxz", 12, anisotropy=1.0)


@pytest.fixture(scope="session")
def spectra():
    # shared with the CLI: $BUNDLEMPS_CACHE or ~/.cache/bundlemps
    return SpectrumCache()


@pytest.fixture(scope="session")
def tfim_weak(spectra):
    return spectra.get(TFIM_WEAK)


@pytest.fixture(scope="session")
def tfim_critical(spectra):
    return spectra.get(TFIM_CRITICAL)


@pytest.fixture(scope="session")
def xxz12(spectra):
    return spectra.get(XXZ)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(rng, n):
    v = rng.standard_normal(2**n)
    return v / np.linalg.norm(v)


_N12_FIXTURES = {"spectra", "tfim_weak", "tfim_critical", "xxz12"}


def pytest_collection_modifyitems(items):
    for item in items:
        uses_n12 = _N12_FIXTURES & set(getattr(item, "fixturenames", ()))
        if uses_n12 or item.module.__name__ == "test_acceptance":
            item.add_marker(pytest.mark.slow)
