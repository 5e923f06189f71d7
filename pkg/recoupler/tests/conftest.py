import numpy as np
import pytest

from recoupler.models import HadamardMatrix, Provenance
from recoupler.services.hadamard import OrderRegistry
from recoupler.services.primes import PrimeSieve
from recoupler.tests.helpers import EQ15_ROWS, EQ16_ROWS, signs_from_rows


@pytest.fixture(scope="session")
def registry():
    return OrderRegistry.build(20000)


@pytest.fixture(scope="session")
def sieve():
    return PrimeSieve(2_000_000)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def eq15():
    return HadamardMatrix.from_signs(signs_from_rows(EQ15_ROWS), Provenance("literal", ("eq15",)))


@pytest.fixture
def eq16():
    return HadamardMatrix.from_signs(signs_from_rows(EQ16_ROWS), Provenance("literal", ("eq16",)))
