"""Result containers shared by the solver and characterization layers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyLossError, DomainError


@dataclass
class BogoliubovCoefficients:
    """Frequency-domain input-output coefficients of the squeezer.

    The output operator at detuning Omega = x omega0 is
    b_out(x) = U(x) b_in(x) + V(x) b_in(-x)^dag, with |U|^2 - |V|^2 = 1
    exact for lossless propagation.

    x is the normalized detuning grid; flags carries boolean per-frequency
    markers ("out_of_band", "layer_truncated" where applicable); meta keeps
    provenance of the run (solver settings, coupling, profile kind).
    """

    x: np.ndarray
    U: np.ndarray
    V: np.ndarray
    solver: str
    phi0: float = 0.0
    flags: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.U = np.asarray(self.U, dtype=complex)
        self.V = np.asarray(self.V, dtype=complex)
        if not (self.x.shape == self.U.shape == self.V.shape):
            raise DomainError("x, U, V must share one shape")

    def unitarity_residual(self) -> np.ndarray:
        return np.abs(self.U) ** 2 - np.abs(self.V) ** 2 - 1.0

    def require_unitarity(self, tol: float = 1e-8) -> float:
        """Largest |‖U‖^2 - ‖V‖^2 - 1|; raises AccuracyLossError above tol."""
        worst = float(np.max(np.abs(self.unitarity_residual())))
        if worst > tol:
            raise AccuracyLossError(
                f"unitarity residual {worst:.3e} exceeds {tol:.3e}", residual=worst
            )
        return worst

    def mirror_index(self) -> np.ndarray:
        """Index array j with x[j] = -x, for symmetric grids only."""
        rev = self.x[::-1]
        if not np.array_equal(rev, -self.x):
            raise DomainError("coefficients were not computed on a symmetric grid")
        return np.arange(self.x.size)[::-1]


@dataclass
class SqueezingCharacterization:
    """Spectra and characteristic angles derived from (U, V).

    S is the photon-flux spectral density |V|^2 / 2 pi, S1 and S2 the
    antisqueezed and squeezed quadrature spectra ((|U| +- |V|)^2), r the
    squeezing parameter ln(|U| + |V|).  psi_L and psi_0 are the unwrapped
    output and input characteristic angles, kappa the principal-value
    rotation angle (defined modulo pi), tau_s the signal-idler delay
    -2 d psi_L / d Omega in seconds.

    angle_reliable marks detunings where |V| is large enough for the angle
    of V to be numerically meaningful; angles and tau are NaN elsewhere.
    """

    x: np.ndarray
    S: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    S2_db: np.ndarray
    r: np.ndarray
    psi_L: np.ndarray
    psi_0: np.ndarray
    kappa: np.ndarray
    tau_s: np.ndarray
    angle_reliable: np.ndarray
    solver: str
    meta: dict = field(default_factory=dict)
