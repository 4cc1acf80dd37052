"""Material dispersion and frequency-grid utilities.

Conventions used throughout the package:

* lengths in mm, spatial frequencies in rad/mm,
* optical frequencies as dimensionless detunings x = Omega/omega0 in (-1, 1),
  where omega0 is half the pump frequency (the degenerate point),
* the collinear type-I phase mismatch is

      Delta(Omega) = k_p - k(Omega) - k(-Omega),

  an even function of the detuning.

Two dispersion laws are provided: a temperature-dependent Sellmeier model for
the extraordinary axis of 5% MgO-doped congruent lithium niobate, and a pure
quadratic model Delta(Omega) = beta - alpha (Omega/omega0)^2 that isolates the
leading even order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

# speed of light in mm/s so that k = n * omega / c is in rad/mm
C_MM_PER_S = 2.99792458e11

# Sellmeier coefficients for the extraordinary index of 5% MgO-doped congruent
# LiNbO3, Gayer, Sacks, Galun and Arie, Appl. Phys. B 91, 343 (2008), Table 2.
# n^2 = a1 + b1 f + (a2 + b2 f)/(L^2 - (a3 + b3 f)^2) + (a4 + b4 f)/(L^2 - a5^2)
#       - a6 L^2,   L in um, f = (T - 24.5)(T + 570.82), T in Celsius.
GAYER_E_A = (5.756, 0.0983, 0.2020, 189.32, 12.52, 1.32e-2)
GAYER_E_B = (2.860e-6, 4.700e-8, 6.113e-8, 1.516e-4)
REFERENCE_TEMPERATURE_C = 24.5
# fit range of the coefficients
VALID_WAVELENGTH_UM = (0.5, 4.0)


def refractive_index(wavelength_um, temperature_c: float = REFERENCE_TEMPERATURE_C):
    """Extraordinary refractive index of 5% MgO-doped congruent LiNbO3.

    Parameters
    ----------
    wavelength_um : float or ndarray
        Vacuum wavelength in micrometers, inside ``VALID_WAVELENGTH_UM``.
    temperature_c : float
        Crystal temperature in degrees Celsius.

    Returns
    -------
    float or ndarray
        The index n_e(wavelength, T).
    """
    lam = np.asarray(wavelength_um, dtype=float)
    lo, hi = VALID_WAVELENGTH_UM
    if np.any(lam < lo) or np.any(lam > hi):
        raise DomainError(
            f"wavelength {np.min(lam):.4g}..{np.max(lam):.4g} um outside the "
            f"Sellmeier validity window [{lo}, {hi}] um"
        )
    a1, a2, a3, a4, a5, a6 = GAYER_E_A
    b1, b2, b3, b4 = GAYER_E_B
    t0 = REFERENCE_TEMPERATURE_C
    f = (temperature_c - t0) * (temperature_c + t0 + 2.0 * 273.16)
    lam2 = lam * lam
    n2 = (
        a1
        + b1 * f
        + (a2 + b2 * f) / (lam2 - (a3 + b3 * f) ** 2)
        + (a4 + b4 * f) / (lam2 - a5 * a5)
        - a6 * lam2
    )
    n = np.sqrt(n2)
    return float(n) if np.isscalar(wavelength_um) else n


def _check_detuning(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1.0):
        raise DomainError("normalized detuning must satisfy |Omega/omega0| < 1")
    return x


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing grid of normalized detunings x = Omega/omega0.

    Symmetric grids are built by exact mirroring so that every x has a partner
    -x down to the last bit, which the parity and angle routines rely on.
    """

    x: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise DomainError("grid must be a 1-d array with at least 2 points")
        if np.any(np.diff(x) <= 0):
            raise DomainError("grid must be strictly increasing")
        if np.any(np.abs(x) >= 1.0):
            raise DomainError("grid detunings must satisfy |x| < 1")
        object.__setattr__(self, "x", x)
        if self.symmetric and np.max(np.abs(x + x[::-1])) != 0.0:
            raise DomainError("grid marked symmetric but x + reversed(x) != 0")

    @classmethod
    def symmetric_grid(cls, span: float = 0.55, n: int = 1024) -> "FrequencyGrid":
        """Uniform mirror-symmetric grid of n points covering about (-span, span).

        Even n uses midpoint offsets (no zero sample, spacing 2*span/n); odd n
        includes zero with spacing 2*span/(n-1).
        """
        if n < 2:
            raise DomainError("need at least 2 grid points")
        if not 0.0 < span < 1.0:
            raise DomainError("span must lie in (0, 1)")
        if n % 2 == 0:
            m = n // 2
            pos = (np.arange(m) + 0.5) * (2.0 * span / n)
            x = np.concatenate([-pos[::-1], pos])
        else:
            m = (n - 1) // 2
            pos = np.arange(1, m + 1) * (span / m)
            x = np.concatenate([-pos[::-1], [0.0], pos])
        return cls(x=x, symmetric=True)

    @property
    def n(self) -> int:
        return self.x.size

    def mirror_index(self):
        """Index array j with x[j[i]] == -x[i]."""
        if not self.symmetric:
            raise DomainError("mirror pairing requires a symmetric grid")
        return np.arange(self.n)[::-1]

    def omega(self, omega0: float):
        return self.x * omega0


class DispersionModel:
    """Wavevector and phase-mismatch law around the degenerate frequency.

    Parameters
    ----------
    mode : {"sellmeier", "quadratic"}
        "sellmeier" evaluates k(Omega) from the material index.  "quadratic"
        uses Delta(Omega) = beta - alpha x^2 exactly, with the odd part of the
        wavevector carried by a frozen first-order coefficient so that group
        delays and the odd angle remain defined.
    pump_wavelength_um : float
        Pump vacuum wavelength (the generated band is centered at twice this).
    temperature_c : float
        Crystal temperature for the Sellmeier law.
    alpha, beta : float
        Quadratic-mode coefficients in rad/mm.
    k0, kprime0 : float, optional
        Quadratic mode only: wavevector (rad/mm) and its frequency derivative
        (s/mm) at the degenerate point.  Default: evaluated from the Sellmeier
        law at the same pump and temperature, so both modes describe the same
        crystal.
    """

    def __init__(
        self,
        mode: str = "sellmeier",
        pump_wavelength_um: float = 0.532,
        temperature_c: float = REFERENCE_TEMPERATURE_C,
        alpha: float | None = None,
        beta: float | None = None,
        k0: float | None = None,
        kprime0: float | None = None,
    ):
        if mode not in ("sellmeier", "quadratic"):
            raise DomainError(f"unknown dispersion mode {mode!r}")
        self.mode = mode
        self.pump_wavelength_um = float(pump_wavelength_um)
        self.temperature_c = float(temperature_c)
        # degenerate point: half the pump frequency
        self.omega0 = np.pi * C_MM_PER_S / (self.pump_wavelength_um * 1e-3)
        self.center_wavelength_um = 2.0 * self.pump_wavelength_um
        if mode == "quadratic":
            self.alpha = 735.0 if alpha is None else float(alpha)
            self.beta = 901.0 if beta is None else float(beta)
            if k0 is None or kprime0 is None:
                ref = DispersionModel(
                    "sellmeier",
                    pump_wavelength_um=pump_wavelength_um,
                    temperature_c=temperature_c,
                )
                k0 = ref.wavevector(0.0) if k0 is None else k0
                kprime0 = ref.wavevector_prime(0.0) if kprime0 is None else kprime0
            self.k0 = float(k0)
            self.kprime0 = float(kprime0)
        else:
            if alpha is not None or beta is not None:
                raise DomainError("alpha/beta apply to the quadratic mode only")
            self.alpha = None
            self.beta = None

    # wavelength of the sideband at normalized detuning x
    def _wavelength_um(self, x):
        return self.center_wavelength_um / (1.0 + x)

    def wavevector(self, x):
        """k(Omega) in rad/mm at normalized detuning x = Omega/omega0."""
        x = _check_detuning(x)
        if self.mode == "sellmeier":
            lam = self._wavelength_um(x)
            n = refractive_index(lam, self.temperature_c)
            k = 2.0 * np.pi * n / (lam * 1e-3)
        else:
            # k0 + k'(0) Omega + (alpha/omega0^2) Omega^2 / 2
            k = self.k0 + self.kprime0 * self.omega0 * x + 0.5 * self.alpha * x * x
        return k if isinstance(k, np.ndarray) else float(k)

    def pump_wavevector(self) -> float:
        if self.mode == "sellmeier":
            n = refractive_index(self.pump_wavelength_um, self.temperature_c)
            return 2.0 * np.pi * n / (self.pump_wavelength_um * 1e-3)
        # chosen so that Delta(0) = beta exactly
        return 2.0 * self.k0 + self.beta

    def phase_mismatch(self, x):
        """Delta(Omega) = k_p - k(Omega) - k(-Omega) in rad/mm; even in x."""
        x = _check_detuning(x)
        if self.mode == "quadratic":
            d = self.beta - self.alpha * x * x
            return d if isinstance(d, np.ndarray) else float(d)
        return self.pump_wavevector() - self.wavevector(x) - self.wavevector(-x)

    def phase_mismatch_prime(self, x, h: float = 1e-6):
        """d Delta / dx in rad/mm per unit normalized detuning."""
        x = _check_detuning(x)
        if self.mode == "quadratic":
            d = -2.0 * self.alpha * x
            return d if isinstance(d, np.ndarray) else float(d)
        return (self.phase_mismatch(x + h) - self.phase_mismatch(x - h)) / (2.0 * h)

    def wavevector_prime(self, x, h: float = 1e-6):
        """dk/domega in s/mm at detuning x (the inverse group velocity)."""
        x = _check_detuning(x)
        if self.mode == "quadratic":
            d = (self.kprime0 * self.omega0 + self.alpha * x) / self.omega0
            return d if isinstance(d, np.ndarray) else float(d)
        dk_dx = (self.wavevector(x + h) - self.wavevector(x - h)) / (2.0 * h)
        return dk_dx / self.omega0

    def kappa_angle(self, x, length_mm: float):
        """Odd characteristic angle kappa = [k(Omega) - k(-Omega)] L / 2 in rad.

        Solver independent: depends only on the odd part of the dispersion.
        Approximately tau_g Omega with tau_g the common group delay.
        """
        x = _check_detuning(x)
        k = 0.5 * (self.wavevector(x) - self.wavevector(-x)) * length_mm
        return k if isinstance(k, np.ndarray) else float(k)

    def group_delay(self, length_mm: float) -> float:
        """Common group delay tau_g = k'(0) L in seconds."""
        return self.wavevector_prime(0.0) * length_mm

    def quadratic_fit(self, h: float = 1e-3):
        """Fit Delta(Omega) ~ beta - alpha x^2 at the degenerate point.

        Central second difference with step h in normalized detuning plus one
        Richardson refinement.  Returns (alpha, beta) in rad/mm.
        """
        beta = float(self.phase_mismatch(0.0))

        def second_diff(step):
            return (
                self.phase_mismatch(step)
                - 2.0 * beta
                + self.phase_mismatch(-step)
            ) / (step * step)

        d_h = second_diff(h)
        d_h2 = second_diff(h / 2.0)
        second = (4.0 * d_h2 - d_h) / 3.0
        alpha = -0.5 * second
        return float(alpha), beta

    def to_quadratic(self) -> "DispersionModel":
        """Quadratic model matching this law at the degenerate point."""
        alpha, beta = self.quadratic_fit()
        return DispersionModel(
            "quadratic",
            pump_wavelength_um=self.pump_wavelength_um,
            temperature_c=self.temperature_c,
            alpha=alpha,
            beta=beta,
            k0=self.wavevector(0.0),
            kprime0=self.wavevector_prime(0.0),
        )
