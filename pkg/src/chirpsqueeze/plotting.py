"""Figure rendering for the command-line report path.

Everything draws through the Agg backend straight to files; no interactive
windows.  Angle panels are plotted relative to a reference detuning because
the unwrapped curves carry arbitrary additive constants.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_DPI = 150
_SOLVER_STYLE = {
    "exact": {"color": "tab:blue", "lw": 1.0},
    "ode": {"color": "tab:green", "lw": 1.0, "ls": "--"},
    "first_order": {"color": "tab:orange", "lw": 1.4},
}


def _style(tag):
    return _SOLVER_STYLE.get(tag, {"lw": 1.0})


def _mark_band(ax, band):
    if band is None:
        return
    for edge in band:
        for s in (+1.0, -1.0):
            ax.axvline(s * edge, color="0.6", lw=0.6, ls=":")


def _rebase(x, psi, ref):
    """Angle curve minus its value at the finite point nearest ref."""
    ok = np.isfinite(psi)
    if not np.any(ok):
        return psi
    idx = np.flatnonzero(ok)
    i = idx[np.argmin(np.abs(x[idx] - ref))]
    return psi - psi[i]


def plot_spectrum(chars, band, path):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7.0, 7.0), sharex=True)
    for ch in chars:
        ax1.plot(ch.x, ch.S, label=ch.solver, **_style(ch.solver))
        ax2.plot(ch.x, ch.S2_db, label=ch.solver, **_style(ch.solver))
    ax1.set_ylabel(r"$S(\Omega)$  [photons / (rad/s)]")
    ax2.set_ylabel(r"$S_2$  [dB]")
    ax2.set_xlabel(r"$\Omega / \omega_0$")
    for ax in (ax1, ax2):
        _mark_band(ax, band)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_angles(chars, band, path, ref_hi=0.5, ref_lo=0.1):
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 9.0), sharex=True)
    for ch in chars:
        st = _style(ch.solver)
        axes[0].plot(ch.x, _rebase(ch.x, ch.psi_L, ref_hi), label=ch.solver, **st)
        axes[1].plot(ch.x, _rebase(ch.x, ch.psi_0, ref_lo), label=ch.solver, **st)
        axes[2].plot(ch.x, ch.tau_s * 1e15, label=ch.solver, **st)
    axes[0].set_ylabel(r"$\psi_L$  [rad]")
    axes[1].set_ylabel(r"$\psi_0$  [rad]")
    axes[2].set_ylabel(r"$\tau$  [fs]")
    axes[2].set_xlabel(r"$\Omega / \omega_0$")
    for ax in axes:
        _mark_band(ax, band)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_mu_study(nu_values, gain_exact, candidates, path):
    """Layer gain against the candidate family, log scale plus relative error.

    candidates maps label -> gain array on the same nu grid.
    """
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7.0, 7.0), sharex=True)
    ax1.semilogy(nu_values, gain_exact, "k.-", lw=1.2, label="reference")
    for label, g in candidates.items():
        ax1.semilogy(nu_values, g, lw=1.0, label=label)
        ax2.plot(nu_values, np.asarray(g) / np.asarray(gain_exact) - 1.0,
                 lw=1.0, label=label)
    ax2.axhline(0.0, color="0.6", lw=0.6)
    ax1.set_ylabel("layer gain")
    ax2.set_ylabel("relative error")
    ax2.set_xlabel(r"$\nu$")
    ax1.legend(fontsize=8)
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_design(profile, x, tau_fs, tau_requested_fs, metrics, path):
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 9.0))
    z = np.linspace(0.0, profile.length_mm, 513)
    axes[0].plot(z, profile.K(z), "tab:blue", lw=1.2)
    axes[0].set_xlabel("z  [mm]")
    axes[0].set_ylabel(r"$K(z)$  [rad/mm]")
    ax0b = axes[0].twinx()
    ax0b.plot(z, profile.period_um(z), "tab:gray", lw=0.8)
    ax0b.set_ylabel(r"$\Lambda$  [$\mu$m]", color="tab:gray")

    axes[1].plot(x, tau_fs, "tab:blue", lw=1.2, label="profile")
    if tau_requested_fs is not None:
        axes[1].plot(x, tau_requested_fs, "k--", lw=0.8, label="requested")
    axes[1].set_xlabel(r"$\Omega / \omega_0$")
    axes[1].set_ylabel(r"$\tau$  [fs]")
    axes[1].legend(fontsize=8)

    axes[2].plot(metrics["z_mm"], metrics["epsilon_prime"], "tab:red", lw=1.0,
                 label=r"$\epsilon'$")
    axes[2].plot(metrics["z_mm"], metrics["abs_lambda_prime"], "tab:purple",
                 lw=1.0, label=r"$|\Lambda'|$")
    axes[2].set_xlabel("z  [mm]")
    axes[2].set_ylabel("validity measures")
    axes[2].legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
