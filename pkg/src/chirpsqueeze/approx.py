"""First-order solver: one amplification layer per detuning.

Each in-band detuning is amplified only near its matching point z_pm, where
K(z_pm) = Delta.  Linearizing K there maps the layer onto the linear-chirp
problem with local gain parameter nu = |gamma|^2 / |K'(z_pm)|; everything
before and after the layer contributes pure phase.  The assembled transfer

    A1 = e^{i (phi + theta)} g_d(nu),
    B1 = e^{i (theta - phi + phi_lay(nu))} g_o(nu),

uses the accumulated pre-phase phi = -(1/2) int_0^{z_pm} (Delta - K) dz,
post-phase theta = -(1/2) int_{z_pm}^{L} (Delta - K) dz, a layer phase model
phi_lay and the layer gain pair (g_d, g_o).  The gain family

    g_d = cosh(pi nu) + mu sinh(pi nu),      g_o = sqrt(g_d^2 - 1)

interpolates between the naive cosh matrix (mu = 0) and the asymptotic
e^{pi nu} (mu = 1, the default, which tracks the closed-basis gain best over
the strong-gain range).

Out-of-band detunings have no matching point; they pass through unchanged
(U = pure propagation phase, V = 0) and are flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dispersion import DispersionModel
from .errors import DomainError
from .poling import PolingProfile, PumpCoupling, qpm_band
from .results import BogoliubovCoefficients


def layer_phase_fit(nu):
    """Phase of the off-diagonal layer transfer, small-nu model.

    Frozen fit -nu + nu^2/4 to the closed-basis layer phase; accurate to a
    few hundredths of a radian for nu < 2.
    """
    nu = np.asarray(nu, dtype=float)
    out = -nu + 0.25 * nu * nu
    return out if out.ndim else float(out)


def layer_transform_family(nu, mu: float = 1.0):
    """Diagonal and off-diagonal layer gains (g_d, g_o) at parameter mu."""
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 0):
        raise DomainError("nu must be nonnegative")
    diag = np.cosh(np.pi * nu) + mu * np.sinh(np.pi * nu)
    if np.any(diag < 1.0 - 1e-12):
        raise DomainError(f"mu = {mu} gives a diagonal gain below 1; "
                          "the family needs cosh + mu sinh >= 1")
    off = np.sqrt(np.maximum(diag * diag - 1.0, 0.0))
    if diag.ndim:
        return diag, off
    return float(diag), float(off)


@dataclass
class FirstOrderParams:
    """Per-detuning layer geometry and closed-form characteristic angles.

    Angles here are continuous closed forms (no unwrapping involved):
    psi_L = (k_p - 2 k_0 - Delta) L / 2 - phi + phi_A / 2 with
    phi_A = phi0 + phi_lay(nu), psi_0 = -phi + phi_A / 2, kappa =
    (k(Omega) - k(-Omega)) L / 2.  Out-of-band entries are NaN.

    z1 solves K(z) = Delta + 2|gamma|, z2 solves K(z) = Delta - 2|gamma|;
    layer_truncated marks detunings whose layer sticks out of the crystal
    (values are still the nominal formulas there).
    """

    x: np.ndarray
    delta: np.ndarray
    nu: np.ndarray
    z_pm: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    r: np.ndarray
    psi_L: np.ndarray
    psi_0: np.ndarray
    kappa: np.ndarray
    out_of_band: np.ndarray
    layer_truncated: np.ndarray
    phi0: float
    mu: float
    meta: dict = field(default_factory=dict)


def default_phi0(profile: PolingProfile, dispersion: DispersionModel,
                 coupling: PumpCoupling, x_ref: float = 0.5) -> float:
    """Pump phase that zeroes the first-order psi_L at the reference detuning.

    The reference is x_ref clipped into the matched band.  This pins the
    output-angle curve the way squeezing-angle plots are usually drawn;
    all three solvers should then be fed the same resolved value.
    """
    x_lo, x_hi = qpm_band(profile, dispersion)
    xr = float(np.clip(x_ref, x_lo, x_hi))
    delta = dispersion.phase_mismatch(xr)
    z_pm = profile.phase_match_point(delta)
    nu = profile.local_nu(coupling.gamma_abs, z_pm)
    phi = -0.5 * (delta * z_pm - profile.K_antiderivative(z_pm))
    kp = dispersion.pump_wavevector()
    k0c = dispersion.wavevector(0.0)
    L = profile.length_mm
    psi_bare = 0.5 * (kp - 2.0 * k0c - delta) * L - phi
    return float(-2.0 * psi_bare - layer_phase_fit(nu))


def first_order_params(x, profile: PolingProfile, dispersion: DispersionModel,
                       coupling: PumpCoupling, mu: float = 1.0,
                       phi1_model=layer_phase_fit) -> FirstOrderParams:
    """Layer decomposition of every grid detuning."""
    x = np.asarray(getattr(x, "x", x), dtype=float)
    g = coupling.gamma_abs
    if coupling.phi0 is None:
        phi0 = default_phi0(profile, dispersion, coupling)
    else:
        phi0 = float(coupling.phi0)
    L = profile.length_mm
    delta = np.asarray(dispersion.phase_mismatch(x), dtype=float)
    n = x.size
    nu = np.zeros(n)
    z_pm = np.full(n, np.nan)
    z1 = np.full(n, np.nan)
    z2 = np.full(n, np.nan)
    phi = np.full(n, np.nan)
    theta = np.full(n, np.nan)
    oob = np.zeros(n, dtype=bool)
    trunc = np.zeros(n, dtype=bool)
    IK_L = profile.K_antiderivative(L)
    for i in range(n):
        d = float(delta[i])
        if not profile.K_min <= d <= profile.K_max:
            oob[i] = True
            continue
        zp = profile.phase_match_point(d)
        z_pm[i] = zp
        nu[i] = profile.local_nu(g, zp) if g > 0 else 0.0
        a, b, fa, fb = profile.turning_points(d, g)
        z1[i], z2[i] = a, b
        trunc[i] = fa or fb
        IK_p = profile.K_antiderivative(zp)
        phi[i] = -0.5 * (d * zp - IK_p)
        theta[i] = -0.5 * (d * (L - zp) - (IK_L - IK_p))
    diag, off = layer_transform_family(nu, mu)
    r = np.log(diag + off)
    r[oob] = 0.0
    kp = dispersion.pump_wavevector()
    k0c = dispersion.wavevector(0.0)
    phi_A = phi0 + phi1_model(nu)
    psi_L = np.where(oob, np.nan,
                     0.5 * (kp - 2.0 * k0c - delta) * L - phi + 0.5 * phi_A)
    psi_0 = np.where(oob, np.nan, -phi + 0.5 * phi_A)
    kappa = 0.5 * (np.asarray(dispersion.wavevector(x), dtype=float)
                   - np.asarray(dispersion.wavevector(-x), dtype=float)) * L
    return FirstOrderParams(x, delta, nu, z_pm, z1, z2, phi, theta, r,
                            psi_L, psi_0, kappa, oob, trunc, phi0, mu,
                            meta={"gamma_abs": g})


def approx_UV(x, profile: PolingProfile, dispersion: DispersionModel,
              coupling: PumpCoupling, mu: float = 1.0,
              phi1_model=layer_phase_fit) -> BogoliubovCoefficients:
    """First-order Bogoliubov coefficients on a detuning grid.

    A coupling with phi0 = None resolves the pump phase through
    :func:`default_phi0`; pass an explicit value to align with the other
    solvers.
    """
    p = first_order_params(x, profile, dispersion, coupling, mu=mu,
                           phi1_model=phi1_model)
    L = profile.length_mm
    k = np.asarray(dispersion.wavevector(p.x), dtype=float)
    k_c = dispersion.wavevector(0.0)
    free = np.exp(1j * (k - k_c) * L)
    diag, off = layer_transform_family(p.nu, mu)
    inb = ~p.out_of_band
    U = free.astype(complex).copy()
    V = np.zeros_like(U)
    prop = np.exp(1j * (0.5 * p.delta[inb] * L - 0.5 * profile.K_antiderivative(L)))
    A1 = diag[inb] * np.exp(1j * (p.phi[inb] + p.theta[inb]))
    B1 = off[inb] * np.exp(1j * (p.theta[inb] - p.phi[inb]
                                 + phi1_model(p.nu[inb])))
    U[inb] = A1 * free[inb] * prop
    V[inb] = B1 * free[inb] * prop * np.exp(1j * p.phi0)
    meta = {"mu": mu, "gamma_abs": coupling.gamma_abs,
            "nu_min": float(np.min(p.nu[inb])) if np.any(inb) else 0.0,
            "nu_max": float(np.max(p.nu[inb])) if np.any(inb) else 0.0}
    return BogoliubovCoefficients(p.x, U, V, "first_order", p.phi0,
                                  flags={"out_of_band": p.out_of_band,
                                         "layer_truncated": p.layer_truncated},
                                  meta=meta)


def relative_delay(x, profile: PolingProfile, dispersion: DispersionModel,
                   method: str = "angle"):
    """Signal-idler delay tau(Omega) in seconds, first-order geometry.

    Both routes share the factor L - z_pm (distance the pair co-propagates
    after its creation layer) but weight it differently:

    * "angle": with the mismatch slope, tau = Delta'(Omega) (L - z_pm),
      the derivative -2 d psi_L / d Omega of the closed-form output angle;
    * "group": with the group-slowness difference of idler and signal,
      tau = (L - z_pm) [1/v_g(-Omega) - 1/v_g(Omega)].

    The two agree identically since Delta' = k'(-Omega) - k'(Omega); having
    both exercised independently guards the sign conventions.  NaN out of
    band.
    """
    x = np.asarray(getattr(x, "x", x), dtype=float)
    delta = np.asarray(dispersion.phase_mismatch(x), dtype=float)
    L = profile.length_mm
    tau = np.full(x.size, np.nan)
    for i in range(x.size):
        d = float(delta[i])
        if not profile.K_min <= d <= profile.K_max:
            continue
        zp = profile.phase_match_point(d)
        if method == "angle":
            dprime = dispersion.phase_mismatch_prime(x[i]) / dispersion.omega0
            tau[i] = dprime * (L - zp)
        elif method == "group":
            tau[i] = (L - zp) * (dispersion.wavevector_prime(-x[i])
                                 - dispersion.wavevector_prime(x[i]))
        else:
            raise DomainError("method must be 'angle' or 'group'")
    return tau
