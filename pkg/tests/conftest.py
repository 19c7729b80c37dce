import pytest

from quasiord.rings import (INTEGERS, POLY_BI, POLY_UNI, default_universe)


@pytest.fixture(scope="session")
def z_universe():
    return default_universe(INTEGERS)


@pytest.fixture(scope="session")
def qx_universe():
    return default_universe(POLY_UNI)


@pytest.fixture(scope="session")
def qxy_universe():
    return default_universe(POLY_BI)
