"""Poling profiles K(z), pump coupling, and phase-matching geometry.

A chirped quasi-phase-matched grating is described by its local spatial
frequency K(z) on [0, L].  For a detuning with mismatch Delta the crystal has

* a perfect phase-matching point z_pm where K(z_pm) = Delta,
* turning points z1, z2 where K(z) = Delta +- 2|gamma|, bounding the
  amplification layer,
* a local gain parameter nu(Omega) = |gamma|^2 / |K'(z_pm)|.

Profiles must be strictly monotonic and positive; the slow-variation
requirement is quantified by ``validity_metrics``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .dispersion import DispersionModel
from .errors import (
    DesignInfeasibleError,
    DomainError,
    OutOfBandError,
    SingularProfileError,
)

_MONOTONICITY_SAMPLES = 4097


class PolingProfile:
    """Monotonic local spatial frequency K(z) of the poling grating.

    Use the constructors :meth:`linear`, :meth:`quadratic_hyperbolic` or
    :meth:`from_table`; the generic ``__init__`` wires evaluators.

    Attributes
    ----------
    kind : str
        One of "linear", "quadratic_hyperbolic", "table".
    length_mm : float
        Crystal length L.
    params : dict
        Closed-form parameters of the profile (kind dependent).
    """

    def __init__(self, kind, length_mm, evaluators, params):
        if length_mm <= 0:
            raise DomainError("crystal length must be positive")
        self.kind = kind
        self.length_mm = float(length_mm)
        self._K, self._K1, self._K2, self._Kint = evaluators
        self.params = dict(params)
        self._validate_shape()

    def _validate_shape(self):
        z = np.linspace(0.0, self.length_mm, _MONOTONICITY_SAMPLES)
        K = self._K(z)
        if np.any(K <= 0):
            raise SingularProfileError("profile K(z) must stay positive on [0, L]")
        dK = np.diff(K)
        if np.all(dK < 0):
            self.decreasing = True
        elif np.all(dK > 0):
            self.decreasing = False
        else:
            raise SingularProfileError("profile K(z) must be strictly monotonic on [0, L]")
        self.K_start = float(K[0])
        self.K_end = float(K[-1])
        self.K_min = min(self.K_start, self.K_end)
        self.K_max = max(self.K_start, self.K_end)

    # ---- constructors ----

    @classmethod
    def linear(cls, K0: float, zeta: float, length_mm: float) -> "PolingProfile":
        """Linearly chirped profile K(z) = K0 - zeta z (zeta may be negative)."""
        if zeta == 0.0:
            raise SingularProfileError("linear profile needs a nonzero chirp rate")
        K0 = float(K0)
        zeta = float(zeta)
        evals = (
            lambda z: K0 - zeta * np.asarray(z, dtype=float),
            lambda z: np.full_like(np.asarray(z, dtype=float), -zeta),
            lambda z: np.zeros_like(np.asarray(z, dtype=float)),
            lambda z: K0 * np.asarray(z, dtype=float)
            - 0.5 * zeta * np.asarray(z, dtype=float) ** 2,
        )
        return cls("linear", length_mm, evals, {"K0": K0, "zeta": zeta})

    @classmethod
    def quadratic_hyperbolic(
        cls,
        alpha: float,
        beta: float,
        length_mm: float,
        x_start: float,
        x_end: float,
    ) -> "PolingProfile":
        """Profile matching a quadratic mismatch along a hyperbolic z_pm law.

        The phase-matched detuning moves as Omega_pm(z)/omega0 = c/(L + d - z)
        from x_start at the input facet to x_end at the output facet, which
        with Delta = beta - alpha x^2 gives

            K(z) = beta - alpha c^2 / (L + d - z)^2,
            d = L x_start / (x_end - x_start),   c = d x_end.

        First-order consequence: the signal-idler delay is linear in Omega
        over the band (see ``design_profile``).
        """
        L = float(length_mm)
        for name, val in (("x_start", x_start), ("x_end", x_end)):
            if not 0.0 < val < 1.0:
                raise DesignInfeasibleError(
                    f"{name}={val:g} must lie in (0, 1): both facet-matched "
                    "detunings Omega_pm(0), Omega_pm(L) must be positive"
                )
        if x_start == x_end:
            raise DesignInfeasibleError("x_start and x_end must differ (nonzero chirp)")
        d = L * x_start / (x_end - x_start)
        if not (d > 0.0 or d < -L):
            # pole of (L + d - z)^-2 would enter the crystal
            raise DesignInfeasibleError("singular geometry: need d > 0 or d < -L")
        c = d * x_end
        alpha = float(alpha)
        beta = float(beta)

        def K(z):
            u = L + d - np.asarray(z, dtype=float)
            return beta - alpha * c * c / (u * u)

        def K1(z):
            u = L + d - np.asarray(z, dtype=float)
            return -2.0 * alpha * c * c / (u * u * u)

        def K2(z):
            u = L + d - np.asarray(z, dtype=float)
            return -6.0 * alpha * c * c / (u ** 4)

        def Kint(z):
            z = np.asarray(z, dtype=float)
            u = L + d - z
            return beta * z - alpha * c * c * (1.0 / u - 1.0 / (L + d))

        params = {
            "alpha": alpha,
            "beta": beta,
            "d_mm": d,
            "c_norm": c,
            "x_start": x_start,
            "x_end": x_end,
        }
        return cls("quadratic_hyperbolic", length_mm, (K, K1, K2, Kint), params)

    @classmethod
    def from_table(cls, z_mm, K_rad_per_mm, length_mm=None) -> "PolingProfile":
        """Profile from samples (z, K), interpolated by a monotone cubic."""
        z = np.asarray(z_mm, dtype=float)
        K = np.asarray(K_rad_per_mm, dtype=float)
        if z.ndim != 1 or z.shape != K.shape or z.size < 4:
            raise DomainError("need matching 1-d z and K arrays with >= 4 samples")
        if np.any(np.diff(z) <= 0):
            raise DomainError("z samples must be strictly increasing")
        if z[0] > 0.0:
            raise DomainError("table must start at z = 0")
        interp = PchipInterpolator(z, K, extrapolate=False)
        L = float(z[-1]) if length_mm is None else float(length_mm)
        if L > z[-1]:
            raise DomainError("table does not cover the crystal length")
        d1 = interp.derivative()
        d2 = d1.derivative()
        anti = interp.antiderivative()
        evals = (
            lambda zz: np.asarray(interp(zz), dtype=float),
            lambda zz: np.asarray(d1(zz), dtype=float),
            lambda zz: np.asarray(d2(zz), dtype=float),
            lambda zz: np.asarray(anti(zz), dtype=float),
        )
        return cls("table", L, evals, {"n_samples": int(z.size)})

    # ---- evaluators ----

    def _check_z(self, z):
        z = np.asarray(z, dtype=float)
        tol = 1e-9 * self.length_mm
        if np.any(z < -tol) or np.any(z > self.length_mm + tol):
            raise DomainError("z outside the crystal [0, L]")
        return np.clip(z, 0.0, self.length_mm)

    def K(self, z):
        out = self._K(self._check_z(z))
        return out if isinstance(out, np.ndarray) and out.ndim else float(out)

    def K_prime(self, z):
        out = self._K1(self._check_z(z))
        return out if isinstance(out, np.ndarray) and out.ndim else float(out)

    def K_second(self, z):
        out = self._K2(self._check_z(z))
        return out if isinstance(out, np.ndarray) and out.ndim else float(out)

    def K_antiderivative(self, z):
        """Integral of K from 0 to z, closed form per kind."""
        out = self._Kint(self._check_z(z))
        return out if isinstance(out, np.ndarray) and out.ndim else float(out)

    def period_um(self, z):
        """Local poling period Lambda = 2 pi / K in micrometers."""
        return 2.0 * np.pi / self.K(z) * 1e3

    # ---- phase-matching geometry ----

    def phase_match_point(self, delta: float) -> float:
        """Position z_pm in [0, L] where K(z_pm) = delta.

        Raises OutOfBandError when delta is outside the profile range.
        Bisection bracket then Newton polish; |K(z_pm) - delta| converges to
        1e-12 relative.
        """
        delta = float(delta)
        if not self.K_min <= delta <= self.K_max:
            raise OutOfBandError(
                f"mismatch {delta:.6g} rad/mm outside profile range "
                f"[{self.K_min:.6g}, {self.K_max:.6g}]"
            )
        L = self.length_mm
        if self.kind == "linear":
            z = (self.params["K0"] - delta) / self.params["zeta"]
            return float(min(max(z, 0.0), L))
        z = brentq(lambda zz: self._K(zz) - delta, 0.0, L, xtol=1e-14 * L, rtol=8.9e-16)
        # Newton polish
        for _ in range(2):
            d1 = self._K1(z)
            if abs(d1) < 1e-300:
                raise SingularProfileError("vanishing K'(z) at the matching point")
            z = z - (self._K(z) - delta) / d1
            z = min(max(float(z), 0.0), L)
        return float(z)

    def turning_points(self, delta: float, gamma_abs: float):
        """Amplification-layer boundaries for a given mismatch.

        Returns ``(z1, z2, truncated_low, truncated_high)`` where z1 solves
        K(z) = delta + 2|gamma| and z2 solves K(z) = delta - 2|gamma|.
        A boundary falling outside the crystal is clamped to the facet and
        flagged (truncated_low refers to z1, truncated_high to z2).
        """
        out = []
        flags = []
        for target in (delta + 2.0 * gamma_abs, delta - 2.0 * gamma_abs):
            if self.K_min <= target <= self.K_max:
                out.append(self.phase_match_point(target))
                flags.append(False)
            else:
                # layer extends beyond the crystal on this side
                if (target > self.K_max) == (not self.decreasing):
                    out.append(self.length_mm)
                else:
                    out.append(0.0)
                flags.append(True)
        return out[0], out[1], flags[0], flags[1]

    def local_nu(self, gamma_abs: float, z_pm) -> float:
        """Gain parameter nu = |gamma|^2 / |K'(z_pm)|."""
        slope = np.abs(self.K_prime(z_pm))
        if np.any(slope < 1e-12 * self.K_max / self.length_mm):
            raise SingularProfileError("K'(z_pm) too small for a local gain parameter")
        out = gamma_abs * gamma_abs / slope
        return out if isinstance(out, np.ndarray) and out.ndim else float(out)

    def nu0(self, gamma_abs: float) -> float:
        """Normalized pump intensity |gamma|^2 L / |K(0) - K(L)|."""
        return gamma_abs * gamma_abs * self.length_mm / abs(self.K_start - self.K_end)


@dataclass(frozen=True)
class PumpCoupling:
    """Undepleted monochromatic pump coupling.

    gamma_abs is the coupling strength |gamma| in rad/mm; phi0 the pump phase
    convention entering V (None means "resolve by the plot normalization",
    done at the configuration layer).
    """

    gamma_abs: float
    phi0: float | None = None

    def __post_init__(self):
        if self.gamma_abs < 0:
            raise DomainError("|gamma| must be nonnegative")

    @classmethod
    def from_nu(cls, nu: float, profile: PolingProfile, phi0=None) -> "PumpCoupling":
        """From the gain parameter of a linear profile, nu = |gamma|^2 / zeta."""
        if nu < 0:
            raise DomainError("nu must be nonnegative")
        if profile.kind != "linear":
            raise DomainError("nu fixes |gamma| only for a linear profile; use nu0")
        return cls(float(np.sqrt(nu * abs(profile.params["zeta"]))), phi0)

    @classmethod
    def from_nu0(cls, nu0: float, profile: PolingProfile, phi0=None) -> "PumpCoupling":
        """From the normalized intensity nu0 = |gamma|^2 L / |K(0) - K(L)|."""
        if nu0 < 0:
            raise DomainError("nu0 must be nonnegative")
        g2 = nu0 * abs(profile.K_start - profile.K_end) / profile.length_mm
        return cls(float(np.sqrt(g2)), phi0)

    def with_phi0(self, phi0: float) -> "PumpCoupling":
        return PumpCoupling(self.gamma_abs, float(phi0))


def qpm_band(profile: PolingProfile, dispersion: DispersionModel, x_max: float = 0.95):
    """Positive-detuning band [x_lo, x_hi] covered by the profile.

    A detuning is in band when its mismatch falls inside the profile range so
    a perfect phase-matching point exists.  Assumes Delta decreases with |x|
    (normal dispersion around the degenerate point).
    """
    dx = 1e-4

    def f_hi(x):
        return dispersion.phase_mismatch(x) - profile.K_max

    def f_lo(x):
        return dispersion.phase_mismatch(x) - profile.K_min

    if f_hi(dx) <= 0.0 and f_lo(dx) >= 0.0:
        x_lo = 0.0
    elif f_hi(dx) > 0.0:
        if f_hi(x_max) > 0.0:
            raise OutOfBandError("profile range not reached by the mismatch")
        x_lo = brentq(f_hi, dx, x_max, xtol=1e-12)
    else:
        # even the degenerate point is below the profile range
        raise OutOfBandError("mismatch lies below the profile range everywhere")
    if f_lo(x_max) > 0.0:
        raise OutOfBandError(f"mismatch still above profile minimum at x = {x_max}")
    x_hi = brentq(f_lo, max(x_lo, dx), x_max, xtol=1e-12)
    return float(x_lo), float(x_hi)


def validity_metrics(
    profile: PolingProfile,
    gamma_abs: float,
    n_samples: int = 2001,
    include_arrays: bool = False,
):
    """Slow-variation and first-order-validity diagnostics of a profile.

    Evaluated on a uniform z grid; every interior z doubles as the matching
    point of some detuning.

    Returns a dict with:

    * ``max_abs_lambda_prime``: max |d Lambda / dz| of the poling period,
      the basic slow-poling figure (dimensionless),
    * ``max_epsilon``: curvature-of-profile error of the linearized layer,
      eps = |K''(z_pm) (z_tp - z_pm)| / (2 |K'(z_pm)|) with z_tp the farther
      turning point,
    * ``max_epsilon_prime``: eps' = |gamma K''(z_pm)| / K'(z_pm)^2, the
      layer-curvature parameter controlling first-order accuracy.
    """
    L = profile.length_mm
    z = np.linspace(0.0, L, n_samples)
    K = profile.K(z)
    K1 = profile.K_prime(z)
    K2 = profile.K_second(z)
    lam_prime = 2.0 * np.pi * np.abs(K1) / (K * K)
    eps_prime = gamma_abs * np.abs(K2) / (K1 * K1)
    eps = np.zeros_like(z)
    if gamma_abs > 0.0:
        for i, zi in enumerate(z):
            z1, z2, _, _ = profile.turning_points(float(K[i]), gamma_abs)
            far = max(abs(z1 - zi), abs(z2 - zi))
            eps[i] = 0.5 * np.abs(K2[i]) * far / np.abs(K1[i])
    i_lam = int(np.argmax(lam_prime))
    i_ep = int(np.argmax(eps_prime))
    out = {
        "max_abs_lambda_prime": float(lam_prime[i_lam]),
        "argmax_lambda_prime_z_mm": float(z[i_lam]),
        "max_epsilon": float(np.max(eps)),
        "max_epsilon_prime": float(eps_prime[i_ep]),
        "argmax_epsilon_prime_z_mm": float(z[i_ep]),
        "nu0": profile.nu0(gamma_abs) if gamma_abs > 0 else 0.0,
    }
    if include_arrays:
        out["z_mm"] = z
        out["abs_lambda_prime"] = lam_prime
        out["epsilon"] = eps
        out["epsilon_prime"] = eps_prime
    return out


def design_profile(
    dispersion: DispersionModel,
    length_mm: float,
    band=None,
    delay_slope_s2: float | None = None,
    delay_offset_s: float | None = None,
):
    """Design a poling profile realizing a linear signal-idler delay law.

    Either give the matched band as ``band=(x_start, x_end)`` (normalized
    detunings matched at the input and output facets) or the delay law
    tau(Omega) = a Omega + b directly via ``delay_slope_s2`` (a, in s^2/rad)
    and ``delay_offset_s`` (b, in s).  The two parameterizations are related
    through d = a omega0^2 / (2 alpha), Omega_pm(L) = -b/a and
    Omega_pm(0) = Omega_pm(L) d / (L + d).

    Returns ``(profile, report)`` where the report carries the realized
    delay-law coefficients and facet parameters.  The quadratic representation
    (alpha, beta) of the dispersion law is used; a Sellmeier model is fitted
    first.
    """
    if dispersion.mode == "quadratic":
        alpha, beta = dispersion.alpha, dispersion.beta
    else:
        alpha, beta = dispersion.quadratic_fit()
    w0 = dispersion.omega0
    L = float(length_mm)
    if band is not None:
        if delay_slope_s2 is not None or delay_offset_s is not None:
            raise DomainError("give either band edges or the delay law, not both")
        x_start, x_end = float(band[0]), float(band[1])
        if x_start == x_end:
            raise DesignInfeasibleError("band edges must differ")
        d = L * x_start / (x_end - x_start)
        a = 2.0 * alpha * d / (w0 * w0)
        b = -a * x_end * w0
    else:
        if delay_slope_s2 is None or delay_offset_s is None:
            raise DomainError("need band edges or both delay-law coefficients")
        a = float(delay_slope_s2)
        b = float(delay_offset_s)
        if a == 0.0:
            raise DesignInfeasibleError("zero delay slope leaves the band degenerate")
        d = a * w0 * w0 / (2.0 * alpha)
        x_end = -b / (a * w0)
        if abs(L + d) < 1e-12 * L:
            raise DesignInfeasibleError("d = -L makes the facet-matching law singular")
        x_start = x_end * d / (L + d)
    for name, val in (("Omega_pm(0)", x_start), ("Omega_pm(L)", x_end)):
        if val <= 0.0:
            raise DesignInfeasibleError(
                f"{name}/omega0 = {val:.4g} must be positive: a linear delay law "
                "requires both facet-matched detunings above the degenerate point "
                "(sign pattern a > 0, b < 0 with d > 0, or a < 0, b > 0 with d < -L)"
            )
    profile = PolingProfile.quadratic_hyperbolic(alpha, beta, L, x_start, x_end)
    report = {
        "kind": "quadratic_hyperbolic",
        "alpha_rad_per_mm": alpha,
        "beta_rad_per_mm": beta,
        "length_mm": L,
        "d_mm": profile.params["d_mm"],
        "x_start": x_start,
        "x_end": x_end,
        "delay_slope_s2": a,
        "delay_offset_s": b,
        "delay_slope_fs_per_unit_x": a * w0 * 1e15,
        "delay_offset_fs": b * 1e15,
        "K_start_rad_per_mm": profile.K_start,
        "K_end_rad_per_mm": profile.K_end,
        "decreasing": profile.decreasing,
    }
    return profile, report
