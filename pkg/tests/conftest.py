import pytest

from frobenius_lab.core.cache import structure_cache
from frobenius_lab.core.config_manager import DEFAULT_LIMITS
from frobenius_lab.core.lattice import boolean, chain, m3, n5, singleton


@pytest.fixture(scope="function")
def fresh_cache():
    """Empties the process-wide structure cache before and after a test."""
    structure_cache.clear()
    yield structure_cache
    structure_cache.clear()


@pytest.fixture(scope="session")
def named_lattices():
    """The small named lattices most tests run against."""
    return {
        "singleton": singleton(),
        "chain2": chain(2),
        "chain3": chain(3),
        "chain4": chain(4),
        "boolean2": boolean(2),
        "m3": m3(),
        "n5": n5(),
    }


@pytest.fixture(scope="session")
def distributive_lattices(named_lattices):
    return [named_lattices[k] for k in ("singleton", "chain2", "chain3", "chain4", "boolean2")]


@pytest.fixture(scope="session")
def nondistributive_lattices(named_lattices):
    return [named_lattices["m3"], named_lattices["n5"]]


@pytest.fixture(scope="session")
def limits():
    return DEFAULT_LIMITS
