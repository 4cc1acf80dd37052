"""Closed-basis solver for the linearly chirped grating.

For K(z) = K0 - zeta z (zeta > 0) the two-mode equations reduce, in the
scaled coordinate

    xi = sqrt(zeta) z + (Delta - K0) / sqrt(zeta),

to a parabolic-cylinder equation with complex index i nu, nu = |gamma|^2 /
zeta.  The transfer matrix over any [xi_start, xi_end] follows from one
fundamental pair

    phi1(xi) = D_{i nu}(xi e^{i pi/4}),      phi2(xi) = D_{-1-i nu}(-xi e^{-i pi/4}),

both solutions of phi'' = -(xi^2/4 - nu + i/2) phi.  Rather than evaluating
D along rotated rays, the pair is continued from exact initial values at
xi = 0 by high-order integration of that single scalar equation; solutions
stay bounded (phase ~ xi^2/4, no exponential growth), so the continuation
is benign.  A Wronskian certificate guards the accuracy.

This route shares no propagation code with the direct z-domain integrator
in :mod:`.ode`; agreement between the two is a genuine cross-check.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import loggamma

from .errors import AccuracyLossError, DomainError
from .results import BogoliubovCoefficients

_HALF_LN_PI = 0.5 * np.log(np.pi)
_LN_2 = np.log(2.0)
_NU_ZERO = 1e-14
_XI_HARD_LIMIT = 400.0


def parabolic_initial_values(nu: float):
    """Values and slopes of the fundamental pair at xi = 0.

    From D_a(0) = 2^{a/2} sqrt(pi) / Gamma((1-a)/2) and
    D_a'(0) = -2^{(a+1)/2} sqrt(pi) / Gamma(-a/2), with the chain rule for
    the rotated arguments.  Computed through log-gamma to keep relative
    accuracy for all nu.
    """
    a1 = 1j * nu            # index of phi1
    a2 = -1.0 - 1j * nu     # index of phi2
    p1 = np.exp(0.5 * a1 * _LN_2 + _HALF_LN_PI - loggamma(0.5 * (1.0 - a1)))
    d1 = -np.exp(1j * np.pi / 4 + 0.5 * (a1 + 1.0) * _LN_2 + _HALF_LN_PI
                 - loggamma(-0.5 * a1))
    p2 = np.exp(0.5 * a2 * _LN_2 + _HALF_LN_PI - loggamma(0.5 * (1.0 - a2)))
    d2 = np.exp(-1j * np.pi / 4 + 0.5 * (a2 + 1.0) * _LN_2 + _HALF_LN_PI
                - loggamma(-0.5 * a2))
    return complex(p1), complex(d1), complex(p2), complex(d2)


def analytic_wronskian(nu: float) -> complex:
    """phi1 phi2' - phi1' phi2 = e^{-i pi/4} e^{pi nu / 2} (xi independent)."""
    return complex(np.exp(-1j * np.pi / 4) * np.exp(0.5 * np.pi * nu))


class WhittakerBasis:
    """Continued fundamental pair (phi1, phi2) with dense evaluation.

    Integrates phi'' = -(xi^2/4 - nu + i/2) phi from xi = 0 in both
    directions with a high-order explicit scheme and keeps the dense
    interpolants.  ``eval`` returns (phi1, phi1', phi2, phi2') at arbitrary
    points, extending the integration range on demand.
    """

    def __init__(self, nu: float, xi_max: float = 40.0,
                 rtol: float = 1e-12, atol: float = 1e-14):
        if nu <= 0:
            raise DomainError("basis needs nu > 0; use the nu = 0 closed form")
        self.nu = float(nu)
        self.sigma = float(np.sqrt(nu))
        self.rtol = rtol
        self.atol = atol
        self._y0 = np.array(parabolic_initial_values(nu), dtype=complex)
        self.xi_max = 0.0
        self._extend(max(xi_max, 5.0))

    def _rhs(self, xi, y):
        c = -(0.25 * xi * xi - self.nu + 0.5j)
        return np.array([y[1], c * y[0], y[3], c * y[2]], dtype=complex)

    def _extend(self, xi_max: float):
        if xi_max > _XI_HARD_LIMIT:
            raise AccuracyLossError(
                f"scaled coordinate {xi_max:.1f} beyond the supported range "
                f"{_XI_HARD_LIMIT:.0f}; the grating is too long/detuned for "
                "this route"
            )
        sols = []
        for sign in (+1.0, -1.0):
            res = solve_ivp(
                self._rhs, (0.0, sign * xi_max), self._y0, method="DOP853",
                dense_output=True, rtol=self.rtol, atol=self.atol,
            )
            if not res.success:
                raise AccuracyLossError(f"basis continuation failed: {res.message}")
            sols.append(res.sol)
        self._sol_plus, self._sol_minus = sols
        self.xi_max = xi_max
        self._certify()

    def _certify(self, n: int = 33, tol: float = 1e-8):
        xi = np.linspace(-self.xi_max, self.xi_max, n)
        p1, d1, p2, d2 = self.eval(xi, _extend=False)
        w = p1 * d2 - d1 * p2
        err = float(np.max(np.abs(w / analytic_wronskian(self.nu) - 1.0)))
        if err > tol:
            raise AccuracyLossError(
                f"Wronskian drift {err:.3e} exceeds {tol:.0e}", residual=err
            )
        self.wronskian_error = err

    def eval(self, xi, _extend: bool = True):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if xi.size and _extend:
            need = float(np.max(np.abs(xi)))
            if need > self.xi_max:
                self._extend(need * 1.05 + 2.0)
        out = np.empty((4, xi.size), dtype=complex)
        pos = xi >= 0.0
        if np.any(pos):
            out[:, pos] = self._sol_plus(xi[pos])
        if np.any(~pos):
            out[:, ~pos] = self._sol_minus(xi[~pos])
        return out[0], out[1], out[2], out[3]


def exact_AB(nu: float, xi_start, xi_end, basis: WhittakerBasis | None = None):
    """Transfer coefficients over [xi_start, xi_end] at gain parameter nu.

    Returns (A, B) with b+(end) = A b+(start) + B b-(start)^dag in the
    co-rotating frame; |A|^2 - |B|^2 = 1.  Vectorized over the endpoints.
    For nu = 0 the closed form A = e^{-i(xi_end^2 - xi_start^2)/4}, B = 0
    is used.
    """
    scalar = np.isscalar(xi_start) and np.isscalar(xi_end)
    xs, xe = np.broadcast_arrays(
        np.atleast_1d(np.asarray(xi_start, dtype=float)),
        np.atleast_1d(np.asarray(xi_end, dtype=float)),
    )
    if nu < _NU_ZERO:
        A = np.exp(-0.25j * (xe * xe - xs * xs))
        B = np.zeros_like(A)
    else:
        if basis is None:
            need = max(float(np.max(np.abs(xs))), float(np.max(np.abs(xe))))
            basis = WhittakerBasis(nu, xi_max=need + 2.0)
        elif abs(basis.nu - nu) > 1e-12 * max(nu, 1.0):
            raise DomainError("basis was built for a different nu")
        sigma = basis.sigma
        W = analytic_wronskian(nu)
        p1e, _, p2e, _ = basis.eval(xe)
        p1s, d1s, p2s, d2s = basis.eval(xs)
        # reciprocal components (phi' + i xi phi / 2) / sigma at the start
        r1s = (d1s + 0.5j * xs * p1s) / sigma
        r2s = (d2s + 0.5j * xs * p2s) / sigma
        A = (sigma / W) * (p1e * r2s - p2e * r1s)
        B = -(sigma / W) * (p1e * p2s - p2e * p1s)
    if scalar:
        return complex(A[0]), complex(B[0])
    return A, B


def layer_gain(nu: float, basis: WhittakerBasis | None = None) -> float:
    """Amplitude gain across one full amplification layer.

    The layer spans the turning points xi = -+ 2 sqrt(nu); the diagonal
    transfer coefficient over it is real.  Approaches e^{pi nu} for strong
    coupling and 1 + O(nu) for weak.
    """
    if nu < _NU_ZERO:
        return 1.0
    half = 2.0 * np.sqrt(nu)
    A, _ = exact_AB(nu, -half, half, basis=basis)
    if abs(A.imag) > 1e-6 * max(abs(A.real), 1.0):
        raise AccuracyLossError(
            f"layer gain came out non-real (imag {A.imag:.3e})", residual=abs(A.imag)
        )
    return float(A.real)


def layer_phase(nu: float, basis: WhittakerBasis | None = None) -> float:
    """Phase of the off-diagonal layer transfer, arg B over the layer.

    Small and negative for moderate nu (close to -nu + nu^2/4); exactly the
    correction the first-order route adds to the pump phase.
    """
    if nu < _NU_ZERO:
        return 0.0
    half = 2.0 * np.sqrt(nu)
    _, B = exact_AB(nu, -half, half, basis=basis)
    return float(np.angle(B))


def exact_UV(x, profile, dispersion, coupling,
             basis: WhittakerBasis | None = None) -> BogoliubovCoefficients:
    """Bogoliubov coefficients U, V on a detuning grid, linear chirp only.

    Valid at every detuning (in or out of the matched band); the
    out_of_band flag is informational.  phi0 = None is treated as 0.
    """
    x = np.asarray(getattr(x, "x", x), dtype=float)
    if profile.kind != "linear":
        raise DomainError("closed-basis route requires a linear profile")
    zeta = profile.params["zeta"]
    if zeta <= 0:
        raise DomainError("closed-basis route requires a decreasing profile "
                          "(zeta > 0); use the direct integrator otherwise")
    K0 = profile.params["K0"]
    L = profile.length_mm
    g = coupling.gamma_abs
    nu = g * g / zeta
    root = np.sqrt(zeta)
    delta = np.asarray(dispersion.phase_mismatch(x), dtype=float)
    xi_s = (delta - K0) / root
    xi_e = root * L + xi_s
    if nu >= _NU_ZERO and basis is None:
        need = max(float(np.max(np.abs(xi_s))), float(np.max(np.abs(xi_e))))
        basis = WhittakerBasis(nu, xi_max=need + 2.0)
    A, B = exact_AB(nu, xi_s, xi_e, basis=basis)
    k = np.asarray(dispersion.wavevector(x), dtype=float)
    k_c = dispersion.wavevector(0.0)
    phase = np.exp(1j * ((k - k_c) * L + 0.5 * delta * L
                         - 0.5 * profile.K_antiderivative(L)))
    phi0 = 0.0 if coupling.phi0 is None else float(coupling.phi0)
    U = A * phase
    V = B * phase * np.exp(1j * phi0)
    oob = (delta > profile.K_max) | (delta < profile.K_min)
    meta = {
        "nu": nu,
        "zeta": zeta,
        "gamma_abs": g,
        "wronskian_error": getattr(basis, "wronskian_error", 0.0),
    }
    return BogoliubovCoefficients(x, U, V, "exact", phi0,
                                  flags={"out_of_band": oob}, meta=meta)
