import pytest

from blayer import make_confinement, make_wall_potential, minimize_F, solve_continuum


@pytest.fixture(scope="session")
def wall():
    return make_wall_potential()


@pytest.fixture(scope="session")
def linear_cd():
    return solve_continuum(make_confinement("linear:1.0"))


@pytest.fixture(scope="session")
def wall_profile(wall, linear_cd):
    return minimize_F(wall, linear_cd.rho0)
