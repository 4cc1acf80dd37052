"""Observable spectra and characteristic angles from (U, V).

The squeezed output at detuning pair (Omega, -Omega) is fully described by

* the photon-flux spectral density S = |V|^2 / 2 pi,
* quadrature spectra S1 = (|U| + |V|)^2 (antisqueezed) and
  S2 = (|U| - |V|)^2 (squeezed), with S1 S2 = 1 when |U|^2 - |V|^2 = 1,
* the squeezing parameter r = ln(|U| + |V|) = -ln S2 / 2,
* three characteristic angles: psi_L = arg[U(Omega) V(-Omega)] / 2 (output),
  psi_0 = arg[V(Omega) / U(Omega)] / 2 (input), and the rotation
  kappa = arg[U(Omega) / U(-Omega)] / 2, physically defined modulo pi.

psi_L and psi_0 vary by thousands of radians across a broadband grid and
are unwrapped along contiguous runs where |V| is large enough for its phase
to mean anything; kappa would need far finer grids than are practical, so
it is reported as a principal value.  The signal-idler delay is
tau = -2 d psi_L / d Omega.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, UnwrapError
from .results import BogoliubovCoefficients, SqueezingCharacterization

RELIABILITY_FLOOR = 1e-6
BAND_SHRINK = 0.02
MAX_HALF_STEP = np.pi / 4


def spectra(bog: BogoliubovCoefficients) -> dict:
    """Magnitude observables; see the module docstring for definitions."""
    aU = np.abs(bog.U)
    aV = np.abs(bog.V)
    S = aV * aV / (2.0 * np.pi)
    S1 = (aU + aV) ** 2
    S2 = (aU - aV) ** 2
    return {
        "S": S,
        "S1": S1,
        "S2": S2,
        "S2_db": 10.0 * np.log10(S2),
        "r": np.log(aU + aV),
    }


def _reliable_runs(mask: np.ndarray):
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return []
    return np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)


def _unwrap_half(raw_full_angle: np.ndarray, mask: np.ndarray):
    """Half of the unwrapped angle along each reliable run; NaN elsewhere.

    Returns (half_angle, max_half_step).  Each run starts from its own
    principal value, so separate runs carry independent additive constants.
    """
    out = np.full(raw_full_angle.shape, np.nan)
    max_step = 0.0
    for run in _reliable_runs(mask):
        seg = np.unwrap(raw_full_angle[run])
        out[run] = 0.5 * seg
        if run.size > 1:
            max_step = max(max_step, 0.5 * float(np.max(np.abs(np.diff(seg)))))
    return out, max_step


def characterize(bog: BogoliubovCoefficients, omega0: float,
                 strict_unwrap: bool = False,
                 reliability: float = RELIABILITY_FLOOR) -> SqueezingCharacterization:
    """Full characterization on a symmetric detuning grid.

    strict_unwrap raises UnwrapError when an unwrapped half-angle jumps by
    more than pi/4 between neighbors inside a reliable run (the grid is then
    too coarse to trust the branch tracking); otherwise the largest step is
    only recorded in meta["max_half_step_rad"].
    """
    j = bog.mirror_index()
    sp = spectra(bog)
    aV2 = np.abs(bog.V) ** 2
    peak = float(np.max(aV2)) if aV2.size else 0.0
    rel = aV2 >= reliability * peak if peak > 0.0 else np.zeros(aV2.shape, bool)
    rel_pair = rel & rel[j]

    raw_L = np.angle(bog.U * bog.V[j])
    raw_0 = np.angle(bog.V * np.conj(bog.U))
    psi_L, step_L = _unwrap_half(raw_L, rel_pair)
    psi_0, step_0 = _unwrap_half(raw_0, rel)
    kappa = 0.5 * np.angle(bog.U * np.conj(bog.U[j]))
    max_step = max(step_L, step_0)
    if strict_unwrap and max_step > MAX_HALF_STEP:
        raise UnwrapError(
            f"angle step {max_step:.3f} rad between grid neighbors exceeds "
            f"{MAX_HALF_STEP:.3f}; refine the grid to track the branch"
        )

    omega = bog.x * omega0
    tau = np.full(bog.x.shape, np.nan)
    for run in _reliable_runs(rel_pair):
        if run.size >= 2:
            tau[run] = -2.0 * np.gradient(psi_L[run], omega[run])

    meta = {
        "max_half_step_rad": max_step,
        "reliability_threshold": reliability,
        "phi0": bog.phi0,
        "flags": bog.flags,
        "solver_meta": bog.meta,
    }
    return SqueezingCharacterization(
        x=bog.x, S=sp["S"], S1=sp["S1"], S2=sp["S2"], S2_db=sp["S2_db"],
        r=sp["r"], psi_L=psi_L, psi_0=psi_0, kappa=kappa, tau_s=tau,
        angle_reliable=rel_pair, solver=bog.solver, meta=meta,
    )


# ---- band utilities ----

def shrunk_band(band, fraction: float = BAND_SHRINK):
    """Band pulled in by the given fraction of its width at each edge.

    Metrics are evaluated on this slightly smaller interval so that
    edge-layer truncation does not dominate band averages.
    """
    lo, hi = float(band[0]), float(band[1])
    if not hi > lo:
        raise DomainError("band must satisfy hi > lo")
    w = hi - lo
    return lo + fraction * w, hi - fraction * w


def band_mask(x, band, fraction: float = BAND_SHRINK) -> np.ndarray:
    """Boolean mask of grid points whose |x| lies in the shrunk band."""
    lo, hi = shrunk_band(band, fraction)
    ax = np.abs(np.asarray(x, dtype=float))
    return (ax >= lo) & (ax <= hi)


# ---- ripple handling ----

def _boxcar(y: np.ndarray, width: int) -> np.ndarray:
    w = np.ones(width)
    # same-length average with edge correction by the actual overlap count
    return np.convolve(y, w, mode="same") / np.convolve(np.ones_like(y), w, mode="same")


def ripple_average(y, running_fraction: int = 16, min_crossings: int = 4):
    """Boxcar average over one local ripple period.

    The period is estimated from zero crossings of the signal against a wide
    running mean (twice the median crossing spacing); with fewer than
    min_crossings crossings the input is returned unchanged.  Assumes a
    uniform grid.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 8:
        return y.copy()
    base = _boxcar(y, max(3, (n // running_fraction) | 1))
    d = y - base
    s = np.sign(d)
    s[s == 0] = 1.0
    cross = np.flatnonzero(s[1:] != s[:-1])
    if cross.size < min_crossings:
        return y.copy()
    width = int(round(2.0 * float(np.median(np.diff(cross)))))
    return _boxcar(y, max(3, width | 1))


# ---- comparison metrics ----

def relative_band_error(y_test, y_ref, mask) -> float:
    """Band-averaged |y_test - y_ref| over band-averaged |y_ref|."""
    y_test = np.asarray(y_test, dtype=float)[mask]
    y_ref = np.asarray(y_ref, dtype=float)[mask]
    keep = np.isfinite(y_test) & np.isfinite(y_ref)
    if not np.any(keep):
        return float("nan")
    return float(np.mean(np.abs(y_test[keep] - y_ref[keep]))
                 / np.mean(np.abs(y_ref[keep])))


def angle_gap(psi_a, psi_b, mask) -> float:
    """Largest masked deviation after per-run removal of the mean offset.

    Unwrapped angle curves carry an arbitrary additive constant per
    contiguous unwrap run (branch starts, pump-phase conventions), and the
    two sides of a symmetric band are separate runs, so the offset is
    removed independently on every contiguous masked stretch; what remains
    is a pure shape comparison.
    """
    d = np.asarray(psi_a, dtype=float) - np.asarray(psi_b, dtype=float)
    d = np.where(np.asarray(mask, dtype=bool), d, np.nan)
    worst = float("nan")
    for run in _reliable_runs(np.isfinite(d)):
        seg = d[run]
        dev = float(np.max(np.abs(seg - np.mean(seg))))
        if not worst >= dev:
            worst = dev
    return worst


def mod_pi_gap(a, b):
    """Elementwise distance between angles defined modulo pi."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), np.pi)
    return np.minimum(d, np.pi - d)


def gain_squeezing_residual(bog: BogoliubovCoefficients) -> np.ndarray:
    """Residual of the gain-squeezing relation S2 (sqrt G + sqrt(G-1))^2 = 1.

    G = |U|^2 is the parametric intensity gain; the relation is exact under
    |U|^2 - |V|^2 = 1, so the residual measures both solver unitarity and
    the identity itself.
    """
    G = np.abs(bog.U) ** 2
    S2 = (np.abs(bog.U) - np.abs(bog.V)) ** 2
    return np.abs(S2 * (np.sqrt(G) + np.sqrt(np.maximum(G - 1.0, 0.0))) ** 2 - 1.0)
