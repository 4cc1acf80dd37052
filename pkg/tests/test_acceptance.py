"""Acceptance gate: one test per shipped criterion, one verdict line each.

Each test prints ``criterion NN <name>: PASS/FAIL (measurements)`` before
asserting, so a full run leaves a readable scorecard in the captured output.
Bounds marked as frozen regression values come from the reference run of
this package and are asserted at their stated tolerances even where the
measurement is known to sit outside them; those tests document real,
reproducible limits of the first-order model rather than bugs (details in
the assertion messages).
"""

import time

import numpy as np
import pytest

from chirpsqueeze import (
    DispersionModel, FrequencyGrid, PolingProfile, PumpCoupling,
    approx_UV, characterize, default_phi0, exact_UV, ode_UV,
    qpm_band, relative_delay, ripple_average,
)
from chirpsqueeze.characterization import (
    _reliable_runs, angle_gap, band_mask, gain_squeezing_residual, mod_pi_gap,
)
from chirpsqueeze.exact import layer_gain
from chirpsqueeze.poling import design_profile, validity_metrics
from tests.conftest import coupling_for, coupling_for_nu0

NU_SET = (0.01, 0.1, 0.25, 1.0)
SOLVERS = ("exact", "first_order", "ode")


def verdict(num, name, ok, detail):
    line = f"criterion {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line, flush=True)
    return line


@pytest.fixture(scope="module")
def grid_512():
    return FrequencyGrid.symmetric_grid(n=512, span=0.55)


@pytest.fixture(scope="module")
def cached(grid_512, lin_profile, disp_quad):
    """All three solvers at 512 points for every nu in NU_SET, timed."""
    runs = {}
    t0 = time.perf_counter()
    for nu in NU_SET:
        c = coupling_for(nu, lin_profile, disp_quad)
        runs[nu] = {
            "exact": exact_UV(grid_512, lin_profile, disp_quad, c),
            "first_order": approx_UV(grid_512, lin_profile, disp_quad, c),
            "ode": ode_UV(grid_512, lin_profile, disp_quad, c),
        }
    elapsed = time.perf_counter() - t0
    return {"runs": runs, "elapsed_s": elapsed}


@pytest.fixture(scope="module")
def fine_angle_runs(lin_profile, disp_quad):
    """Exact and first-order characterizations at 4096 points, shared phi0."""
    grid = FrequencyGrid.symmetric_grid(n=4096, span=0.55)
    out = {"x": grid.x}
    for nu in (0.01, 1.0):
        c = coupling_for(nu, lin_profile, disp_quad)
        out[nu] = {
            "exact": characterize(exact_UV(grid, lin_profile, disp_quad, c),
                                  disp_quad.omega0),
            "first_order": characterize(approx_UV(grid, lin_profile, disp_quad, c),
                                        disp_quad.omega0),
        }
    return out


def test_criterion_01_unitarity_suite(cached):
    worst = {}
    for nu in NU_SET:
        for tag in SOLVERS:
            r = float(np.max(np.abs(cached["runs"][nu][tag].unitarity_residual())))
            worst[tag] = max(worst.get(tag, 0.0), r)
    elapsed = cached["elapsed_s"]
    ok = all(v < 1e-8 for v in worst.values()) and elapsed < 60.0
    detail = (f"max residual exact={worst['exact']:.2e} "
              f"first_order={worst['first_order']:.2e} ode={worst['ode']:.2e}, "
              f"12 runs in {elapsed:.1f} s")
    assert ok, verdict(1, "unitarity suite", ok, detail)
    verdict(1, "unitarity suite", ok, detail)


def test_criterion_02_exact_ode_equivalence(cached):
    bogs = cached["runs"][0.1]
    ex, od = bogs["exact"], bogs["ode"]
    va, vb = np.abs(ex.V) ** 2, np.abs(od.V) ** 2
    m = va > 1e-12 * float(va.max())
    rel = float(np.max(np.abs(vb[m] - va[m]) / va[m]))
    dphi = float(np.max(np.abs(np.angle(od.U[m] * np.conj(ex.U[m])))))
    ok = rel < 1e-4 and dphi < 1e-5
    detail = f"|V|^2 rel diff {rel:.2e} < 1e-4, U phase diff {dphi:.2e} rad < 1e-5"
    assert ok, verdict(2, "exact-ODE equivalence", ok, detail)
    verdict(2, "exact-ODE equivalence", ok, detail)


def test_criterion_03_squeezing_spectra(cached, grid_512, lin_band):
    """Band-averaged S2 agreement, oscillation, and out-of-band behavior.

    The 5% bound holds at nu = 0.01 and 0.1 but not at 0.25: S2 ripples
    asymmetrically on a linear scale, so its boxcar mean is pulled above the
    flat first-order value as the gain grows (the frozen regression values
    are 0.9%, 4.2% and 9.7%).  In log scale, where the spectra are usually
    drawn, the oscillation is symmetric about the first-order curve; the
    r-based means agree within 1.6% at all three pump levels, so the
    averaged-shape reproduction itself is healthy.
    """
    mask = band_mask(grid_512.x, lin_band)
    devs, oks = {}, []
    osc_ok, oob_ok = True, True
    for nu in (0.01, 0.1, 0.25):
        bogs = cached["runs"][nu]
        ex, fo = bogs["exact"], bogs["first_order"]
        s2e = (np.abs(ex.U) - np.abs(ex.V)) ** 2
        s2f = (np.abs(fo.U) - np.abs(fo.V)) ** 2
        avg = ripple_average(s2e)
        dev = abs(float(np.mean(s2f[mask])) - float(np.mean(avg[mask]))) \
            / float(np.mean(avg[mask]))
        devs[nu] = dev
        oks.append(dev < 0.05)
        d = (s2e - s2f)[mask]
        osc_ok &= int(np.count_nonzero(np.diff(np.sign(d)) != 0)) >= 8
        oob = fo.flags["out_of_band"]
        oob_ok &= float(np.max(np.abs(s2f[oob] - 1.0))) < 1e-9
        oob_ok &= float(np.min(s2e[oob])) < 1.0
    ok = all(oks) and osc_ok and oob_ok
    detail = (f"band-mean S2 deviation {devs[0.01]:.3f}/{devs[0.1]:.3f}/"
              f"{devs[0.25]:.3f} at nu=0.01/0.1/0.25 vs 0.05, "
              f"oscillation {'yes' if osc_ok else 'no'}, "
              f"out-of-band behavior {'ok' if oob_ok else 'bad'}")
    assert ok, verdict(3, "squeezing spectra", ok, detail)
    verdict(3, "squeezing spectra", ok, detail)


def test_criterion_04_layer_gain_family():
    """The asymptotic e^{pi nu} against cosh(pi nu) across nu in [0.5, 2].

    Known red at nu = 0.5: the closed-basis layer gain is 3.5360 there,
    nearer to cosh(pi/2) = 2.5092 (distance 1.03) than to e^{pi/2} = 4.8105
    (distance 1.27).  From nu = 0.6 up the asymptotic form wins every point.
    """
    nus = np.round(np.arange(0.5, 2.01, 0.1), 10)
    rows = []
    for nu in nus:
        g = layer_gain(float(nu))
        de = abs(g - np.exp(np.pi * nu))
        dc = abs(g - np.cosh(np.pi * nu))
        rows.append((float(nu), g, de, dc))
    bad = [r for r in rows if not r[2] < r[3]]
    ok = not bad
    worst = max(rows, key=lambda r: r[2] - r[3])
    detail = (f"{len(rows) - len(bad)}/{len(rows)} points have e^(pi nu) "
              f"closer; worst nu={worst[0]:.1f} gain={worst[1]:.4f} "
              f"dist_exp={worst[2]:.4f} dist_cosh={worst[3]:.4f}")
    assert ok, verdict(4, "layer gain family", ok, detail)
    verdict(4, "layer gain family", ok, detail)


def test_criterion_05_characteristic_angles(fine_angle_runs, lin_band):
    """Exact vs first-order angle gaps at nu = 0.01 and nu = 1.

    Known red in both halves; frozen regression values from the reference
    run.  The first-order angle curves miss a nu-dependent constant (the
    stationary-phase and Stokes contributions of the layer, which the
    adjustable pump-phase convention absorbs in plots), and after per-run
    constant removal the residual shape error is still 0.160 rad (psi_L) and
    0.154 rad (psi_0) at nu = 0.01 against the 0.05 bound, dominated by the
    band-edge lobes; the band interior (10% shrink) sits at 0.127 rad.  At
    nu = 1 the psi_L gap reaches 3.07 rad against the pi/2 + 0.1 bound
    (interior 1.53 rad), growing smoothly toward the upper band edge.  The
    exact solver's phases are certified against the independent ODE route to
    2e-8 rad, so the gap belongs to the first-order model itself.
    """
    x = fine_angle_runs["x"]
    mask2 = band_mask(x, lin_band)
    mask10 = band_mask(x, lin_band, 0.10)
    out = {}
    for nu in (0.01, 1.0):
        ex = fine_angle_runs[nu]["exact"]
        fo = fine_angle_runs[nu]["first_order"]
        m = mask2 & ex.angle_reliable & fo.angle_reliable
        mi = mask10 & ex.angle_reliable & fo.angle_reliable
        out[nu] = {
            "psi_L": angle_gap(fo.psi_L, ex.psi_L, m),
            "psi_0": angle_gap(fo.psi_0, ex.psi_0, m),
            "psi_L_interior": angle_gap(fo.psi_L, ex.psi_L, mi),
        }
    low, high = out[0.01], out[1.0]
    bound_high = np.pi / 2.0 + 0.1
    ok = (low["psi_L"] < 0.05 and low["psi_0"] < 0.05
          and high["psi_L"] < bound_high)
    detail = (f"nu=0.01: psi_L gap {low['psi_L']:.4f}, psi_0 gap "
              f"{low['psi_0']:.4f} vs 0.05 (interior {low['psi_L_interior']:.4f}); "
              f"nu=1: psi_L gap {high['psi_L']:.4f} vs {bound_high:.4f} "
              f"(interior {high['psi_L_interior']:.4f})")
    assert ok, verdict(5, "characteristic angles", ok, detail)
    verdict(5, "characteristic angles", ok, detail)


def test_criterion_06_nonlinear_profile(qh_profile, disp_quad, qh_band):
    grid = FrequencyGrid.symmetric_grid(n=4096, span=0.55)
    mask = band_mask(grid.x, qh_band)
    devs = {}
    for nu0 in (0.01, 0.1, 0.3):
        c = coupling_for_nu0(nu0, qh_profile, disp_quad)
        od = ode_UV(grid, qh_profile, disp_quad, c)
        fo = approx_UV(grid, qh_profile, disp_quad, c)
        v2o = np.abs(od.V[mask]) ** 2
        v2f = np.abs(fo.V[mask]) ** 2
        devs[nu0] = abs(float(np.mean(v2f)) - float(np.mean(v2o))) \
            / float(np.mean(v2o))
        if nu0 == 0.01:
            ch = characterize(od, disp_quad.omega0)
    agree_ok = devs[0.01] < 0.05 and devs[0.1] < 0.05
    deflect_ok = devs[0.3] > 0.05

    m = mask & ch.angle_reliable & (grid.x > 0)
    run = max(_reliable_runs(m), key=len)
    xs, ys = grid.x[run], ch.psi_L[run]
    coef = np.polyfit(xs, ys, 2)
    resid = ys - np.polyval(coef, xs)
    rng = float(np.max(ys) - np.min(ys))
    resid_frac = float(np.max(np.abs(resid))) / rng
    # psi_L = -(alpha L / 2 omega0^2) Omega^2 + ... in normalized units the
    # curvature coefficient is -alpha L / 2
    target = -0.5 * disp_quad.alpha * qh_profile.length_mm
    coef_dev = abs(coef[0] / target - 1.0)
    fit_ok = resid_frac < 0.02 and coef_dev < 0.02
    ok = agree_ok and deflect_ok and fit_ok
    detail = (f"band-avg |V|^2 deviation {devs[0.01]:.3f}/{devs[0.1]:.3f} at "
              f"nu0=0.01/0.1 vs 0.05, deflection {devs[0.3]:.3f} at nu0=0.3, "
              f"psi_L curvature {coef[0]:.1f} vs {target:.2f} "
              f"(dev {coef_dev:.4f}), fit residual {resid_frac:.4f} of range")
    assert ok, verdict(6, "nonlinear profile", ok, detail)
    verdict(6, "nonlinear profile", ok, detail)


def test_criterion_07_validity_diagnostics(qh_profile):
    rows = []
    for nu0 in (0.01, 0.09):
        g = PumpCoupling.from_nu0(nu0, qh_profile).gamma_abs
        m = validity_metrics(qh_profile, g)
        eps_dev = abs(m["max_epsilon_prime"] / (0.18 * np.sqrt(nu0)) - 1.0)
        lam_dev = abs(m["max_abs_lambda_prime"] / 0.001 - 1.0)
        rows.append((nu0, eps_dev, lam_dev))
    ok = all(e < 0.05 and l < 0.05 for _, e, l in rows)
    detail = "; ".join(f"nu0={n}: eps' dev {e:.4f}, lambda' dev {l:.4f} vs 0.05"
                       for n, e, l in rows)
    assert ok, verdict(7, "validity diagnostics", ok, detail)
    verdict(7, "validity diagnostics", ok, detail)


def test_criterion_08_designed_delay(disp_quad):
    # law-mode coefficients picked for a 2 mm focal offset ending at x = 0.45,
    # a geometry distinct from the band-mode case
    w0 = disp_quad.omega0
    a_s2 = 2.0 * disp_quad.alpha * 2.0 / (w0 * w0)
    cases = [
        {"band": (0.25, 0.5)},
        {"delay_slope_s2": a_s2, "delay_offset_s": -a_s2 * 0.45 * w0},
    ]
    worst = 0.0
    for kw in cases:
        profile, rep = design_profile(disp_quad, 4.5, **kw)
        x_lo, x_hi = sorted((rep["x_start"], rep["x_end"]))
        xs = np.linspace(x_lo, x_hi, 257)
        tau = relative_delay(xs, profile, disp_quad, method="angle")
        req = rep["delay_slope_s2"] * xs * disp_quad.omega0 + rep["delay_offset_s"]
        scale = float(np.max(np.abs(req)))
        worst = max(worst, float(np.max(np.abs(tau - req))) / scale)
    ok = worst < 0.01
    detail = f"max relative deviation from the requested law {worst:.2e} vs 0.01"
    assert ok, verdict(8, "designed delay law", ok, detail)
    verdict(8, "designed delay law", ok, detail)


def test_criterion_09_gain_squeezing_identity(cached):
    worst, n_pts = 0.0, 0
    for nu in NU_SET:
        for tag in SOLVERS:
            bog = cached["runs"][nu][tag]
            m = np.abs(bog.unitarity_residual()) < 1e-8
            n_pts += int(np.sum(m))
            if np.any(m):
                worst = max(worst, float(np.max(gain_squeezing_residual(bog)[m])))
    ok = n_pts > 0 and worst < 1e-6
    detail = f"max identity residual {worst:.2e} < 1e-6 over {n_pts} points"
    assert ok, verdict(9, "gain-squeezing identity", ok, detail)
    verdict(9, "gain-squeezing identity", ok, detail)


def test_criterion_10_parity_suite(cached, grid_512, lin_profile, disp_quad):
    tols = {"exact": 1e-7, "ode": 1e-7, "first_order": 1e-12}
    L = lin_profile.length_mm
    k = disp_quad.wavevector(grid_512.x)
    kappa_disp = 0.5 * (k - k[::-1]) * L
    worst = {"r": 0.0, "psi0": 0.0, "kappa_odd": 0.0, "kappa_disp": 0.0}
    ok = True
    for tag in SOLVERS:
        bog = cached["runs"][0.25][tag]
        r = np.log(np.abs(bog.U) + np.abs(bog.V))
        d_r = float(np.max(np.abs(r - r[::-1])))
        w = bog.V * np.conj(bog.U)
        keep = np.abs(w) > 1e-12 * float(np.max(np.abs(w)))
        keep &= keep[::-1]
        d_0 = float(np.max(np.abs(np.angle(
            w[keep] * np.conj(w[::-1][keep])))))
        kappa = 0.5 * np.angle(bog.U * np.conj(bog.U[::-1]))
        d_odd = float(np.max(mod_pi_gap(kappa, -kappa[::-1])))
        d_disp = float(np.max(mod_pi_gap(kappa, kappa_disp)))
        ok &= d_r < tols[tag] and d_0 < tols[tag]
        ok &= d_odd < 1e-9 and d_disp < 1e-9
        for key, v in (("r", d_r), ("psi0", d_0),
                       ("kappa_odd", d_odd), ("kappa_disp", d_disp)):
            worst[key] = max(worst[key], v)
    detail = (f"max even-parity defect r {worst['r']:.2e}, psi_0 "
              f"{worst['psi0']:.2e}; kappa oddness {worst['kappa_odd']:.2e}, "
              f"kappa vs dispersion {worst['kappa_disp']:.2e} vs 1e-9")
    assert ok, verdict(10, "parity suite", ok, detail)
    verdict(10, "parity suite", ok, detail)
