"""Ultrabroadband squeezed light from chirped quasi-phase-matched crystals.

Simulates collinear degenerate parametric down-conversion with an undepleted
monochromatic pump in a crystal whose poling spatial frequency K(z) is
chirped.  Three independent routes produce the Bogoliubov coefficients
(U, V) of the output field:

* :func:`exact_UV`     closed-basis solution for a linear chirp,
* :func:`approx_UV`    first-order single-layer model for any monotonic K(z),
* :func:`ode_UV`       direct integration of the coupled-mode equations.

From (U, V), :func:`characterize` derives optical and squeezing spectra,
the squeezing parameter, the characteristic angles psi_L, psi_0, kappa and
the signal-idler delay; :func:`design_profile` inverts the first-order
delay law into a poling profile.
"""

from .characterization import (
    band_mask,
    characterize,
    gain_squeezing_residual,
    ripple_average,
    spectra,
)
from .dispersion import DispersionModel, FrequencyGrid, refractive_index
from .errors import (
    AccuracyLossError,
    ChirpSqueezeError,
    ConfigError,
    DesignInfeasibleError,
    DomainError,
    OutOfBandError,
    SingularProfileError,
    StiffnessError,
    UnwrapError,
)
from .exact import WhittakerBasis, exact_UV, layer_gain, layer_phase
from .approx import (
    approx_UV,
    default_phi0,
    first_order_params,
    layer_transform_family,
    relative_delay,
)
from .ode import integrate_AB, ode_UV
from .poling import (
    PolingProfile,
    PumpCoupling,
    design_profile,
    qpm_band,
    validity_metrics,
)
from .results import BogoliubovCoefficients, SqueezingCharacterization

__version__ = "0.1.0"

__all__ = [
    "AccuracyLossError",
    "BogoliubovCoefficients",
    "ChirpSqueezeError",
    "ConfigError",
    "DesignInfeasibleError",
    "DispersionModel",
    "DomainError",
    "FrequencyGrid",
    "OutOfBandError",
    "PolingProfile",
    "PumpCoupling",
    "SingularProfileError",
    "SqueezingCharacterization",
    "StiffnessError",
    "UnwrapError",
    "WhittakerBasis",
    "approx_UV",
    "band_mask",
    "characterize",
    "default_phi0",
    "design_profile",
    "exact_UV",
    "first_order_params",
    "gain_squeezing_residual",
    "integrate_AB",
    "layer_gain",
    "layer_phase",
    "layer_transform_family",
    "ode_UV",
    "qpm_band",
    "refractive_index",
    "relative_delay",
    "ripple_average",
    "spectra",
    "validity_metrics",
]
