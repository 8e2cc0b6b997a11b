import pytest

from cavitypairing.model import ConstantLifetime, FermiLiquidLifetime, ModelParams


@pytest.fixture(scope="session")
def const_params():
    """Reference constant-lifetime set: gtilde*delta_c = 0.02, c2 = 0.25.

    Vacuum kernel mass is 0.02/T + 0.5, so T_c = 0.04 exactly and
    delta_c / T_c = 25 (thermal corrections ~ exp(-25)).
    """
    return ModelParams.with_gtilde(0.02, delta_c=1.0, q0=0.0, e_f=100.0, k_f=1.0)


@pytest.fixture(scope="session")
def const_lifetime():
    # delta_c * tau = 25, so c2 = (0.02 * 25)**2 = 0.25
    return ConstantLifetime(0.04)


@pytest.fixture(scope="session")
def fl_params():
    return ModelParams.with_gtilde(1e-3, delta_c=50.0, q0=0.0, e_f=1e4, k_f=1.0)


@pytest.fixture(scope="session")
def fl_lifetime():
    return FermiLiquidLifetime()
