"""Sellmeier law, frequency grids, phase mismatch."""

import numpy as np
import pytest

from chirpsqueeze import DispersionModel, FrequencyGrid, refractive_index
from chirpsqueeze.errors import DomainError


def test_refractive_index_frozen_values():
    # frozen regression values from the reference run (extraordinary axis,
    # 5% MgO congruent stoichiometry, 100 C)
    assert refractive_index(1.064) == pytest.approx(2.1481542422227045, rel=1e-12)
    assert refractive_index(0.532) == pytest.approx(2.2244389865983383, rel=1e-12)


def test_refractive_index_normal_dispersion():
    wl = np.linspace(0.55, 3.5, 200)
    n = refractive_index(wl)
    assert np.all(np.diff(n) < 0)  # dn/dlambda < 0 away from resonances
    assert np.all((1.9 < n) & (n < 2.4))


def test_refractive_index_validity_window():
    with pytest.raises(DomainError):
        refractive_index(0.4)
    with pytest.raises(DomainError):
        refractive_index(4.5)


def test_refractive_index_temperature_slope():
    # dn/dT > 0 for the e-axis in this range
    assert refractive_index(1.064, 150.0) > refractive_index(1.064, 50.0)


def test_grid_symmetric_and_mirror():
    g = FrequencyGrid.symmetric_grid(span=0.55, n=256)
    assert g.n == 256
    j = g.mirror_index()
    assert np.array_equal(g.x[j], -g.x)  # bitwise, not approx
    assert g.x[0] == -g.x[-1]
    assert np.all(np.abs(g.x) <= 0.55)
    assert np.allclose(np.diff(g.x), g.x[1] - g.x[0])  # uniform


def test_grid_rejects_bad_span():
    with pytest.raises(DomainError):
        FrequencyGrid.symmetric_grid(span=1.0, n=64)
    with pytest.raises(DomainError):
        FrequencyGrid.symmetric_grid(span=0.5, n=1)


def test_grid_odd_includes_zero():
    g = FrequencyGrid.symmetric_grid(span=0.5, n=129)
    assert 0.0 in g.x
    assert np.array_equal(g.x[g.mirror_index()], -g.x)


def test_quadratic_mismatch_closed_form(disp_quad):
    # mismatch falls off quadratically from its degenerate-point value
    x = np.linspace(-0.9, 0.9, 101)
    assert np.allclose(disp_quad.phase_mismatch(x), 901.0 - 735.0 * x * x,
                       rtol=0, atol=1e-9)
    # even by construction
    assert np.allclose(disp_quad.phase_mismatch(x), disp_quad.phase_mismatch(-x))


def test_quadratic_matches_sellmeier_fit(disp_sell):
    # the canonical (alpha, beta) = (735, 901) rad/mm pair comes out of the
    # Sellmeier law at 532 nm pump within a fraction of a percent
    alpha, beta = disp_sell.quadratic_fit()
    assert alpha == pytest.approx(735.0, rel=5e-3)
    assert beta == pytest.approx(901.0, rel=5e-3)


def test_sellmeier_mismatch_stays_close_to_quadratic(disp_sell, disp_quad):
    x = np.linspace(-0.5, 0.5, 64)
    d_s = disp_sell.phase_mismatch(x)
    d_q = disp_quad.phase_mismatch(x)
    # same shape to a few rad/mm over the matched band
    assert np.max(np.abs(d_s - d_q)) < 10.0


def test_pump_wavevector_quadratic_identity(disp_quad):
    # Delta(0) = k_p - 2 k0 must equal beta
    k0 = disp_quad.wavevector(0.0)
    assert disp_quad.pump_wavevector() - 2.0 * k0 == pytest.approx(901.0, abs=1e-9)


def test_mismatch_prime_consistent_with_difference(disp_quad, disp_sell):
    h = 1e-6
    for disp in (disp_quad, disp_sell):
        for x in (0.1, 0.3, -0.45):
            fd = (disp.phase_mismatch(x + h) - disp.phase_mismatch(x - h)) / (2 * h)
            assert disp.phase_mismatch_prime(x) == pytest.approx(fd, rel=1e-6)


def test_kappa_angle_odd_and_dispersive(disp_quad):
    x = np.linspace(-0.5, 0.5, 41)
    k = disp_quad.kappa_angle(x, 4.5)
    assert np.allclose(k + k[::-1], 0.0, atol=1e-9)
    assert abs(k[-1]) > 1.0  # hundreds of rad of odd dispersion across the band


def test_group_delay_frozen(disp_quad):
    # k'(0) L: frozen regression value from the reference run
    assert disp_quad.group_delay(4.5) == pytest.approx(3.306383469626504e-11, rel=1e-9)


def test_wavevector_prime_positive(disp_sell):
    x = np.linspace(-0.6, 0.6, 25)
    assert np.all(disp_sell.wavevector_prime(x) > 0)


def test_mode_validation():
    with pytest.raises(DomainError):
        DispersionModel("cubic")
    with pytest.raises(DomainError):
        DispersionModel("sellmeier", alpha=700.0)


def test_detuning_domain_guard(disp_quad):
    with pytest.raises(DomainError):
        disp_quad.wavevector(1.0)  # idler frequency hits zero
