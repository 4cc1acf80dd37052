import numpy as np
import pytest

from chirpsqueeze import (
    DispersionModel,
    FrequencyGrid,
    PolingProfile,
    PumpCoupling,
    default_phi0,
    qpm_band,
)

# reference linear crystal used throughout: 4.5 mm, K falling 894 -> 720.75
LIN_K0 = 894.0
LIN_ZETA = 38.5
LENGTH_MM = 4.5


@pytest.fixture(scope="session")
def disp_quad():
    return DispersionModel("quadratic")


@pytest.fixture(scope="session")
def disp_sell():
    return DispersionModel("sellmeier")


@pytest.fixture(scope="session")
def lin_profile():
    return PolingProfile.linear(LIN_K0, LIN_ZETA, LENGTH_MM)


@pytest.fixture(scope="session")
def qh_profile():
    return PolingProfile.quadratic_hyperbolic(735.0, 901.0, LENGTH_MM, 0.25, 0.5)


@pytest.fixture(scope="session")
def lin_band(lin_profile, disp_quad):
    return qpm_band(lin_profile, disp_quad)


@pytest.fixture(scope="session")
def qh_band(qh_profile, disp_quad):
    return qpm_band(qh_profile, disp_quad)


@pytest.fixture(scope="session")
def grid_256():
    return FrequencyGrid.symmetric_grid(span=0.55, n=256)


@pytest.fixture(scope="session")
def grid_1024():
    return FrequencyGrid.symmetric_grid(span=0.55, n=1024)


def coupling_for(nu, profile, dispersion):
    """from_nu coupling with the pump phase resolved once, shared by solvers."""
    c = PumpCoupling.from_nu(nu, profile)
    return c.with_phi0(default_phi0(profile, dispersion, c))


def coupling_for_nu0(nu0, profile, dispersion):
    c = PumpCoupling.from_nu0(nu0, profile)
    return c.with_phi0(default_phi0(profile, dispersion, c))
