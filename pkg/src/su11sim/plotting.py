"""Figure rendering for the CLI report path.

Every command that writes a delimited table also renders a PNG next to it
(same stem) unless plotting is disabled.  Figures are deliberately plain:
data, model overlays where available, and the shot-noise reference line.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_fringe_figure", "save_sweep_figure", "save_scan_figure"]

plt.rcParams["figure.figsize"] = (7.0, 5.0)
plt.rcParams["axes.grid"] = True
plt.rcParams["grid.alpha"] = 0.3


def _finalize(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_fringe_figure(curve, path) -> None:
    """Two panels: detected mean versus phase, and sensitivity versus phase."""
    fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True)
    ax0.plot(curve.phi, curve.mean_out, color="C0")
    ax0.set_ylabel("mean photons / pulse")
    ok = ~curve.singular
    ax1.semilogy(curve.phi[ok], curve.delta_phi[ok], color="C1")
    if np.any(curve.singular):
        ax1.plot(curve.phi[curve.singular], np.full(np.sum(curve.singular), np.nan), "x")
    ax1.set_xlabel("phase (rad)")
    ax1.set_ylabel(r"$\Delta\phi$ (rad)")
    _finalize(fig, path)


def save_sweep_figure(sweep, path) -> None:
    """Best sensitivity normalized to the SNL against detection transmission."""
    fig, ax = plt.subplots()
    ax.plot(sweep.eta, sweep.ratio, "o-", color="C3")
    ax.axhline(1.0, color="k", ls="--", lw=1, label="shot noise limit")
    ax.set_xlabel(r"detection transmission $\eta$")
    ax.set_ylabel(r"$\Delta\phi_{min} / \Delta\phi_{SNL}$")
    ax.legend()
    _finalize(fig, path)


def save_scan_figure(scan, path, model_phi=None, model_mean=None) -> None:
    """Scan points with statistical error bars, plus the model mean if given."""
    fig, ax = plt.subplots()
    sem = np.asarray(scan.std_photons) / np.sqrt(np.maximum(scan.n_pulses_kept, 1))
    ax.errorbar(scan.phi_rad, scan.mean_photons, yerr=sem, fmt="o", ms=4, color="C0",
                label="simulated scan")
    if model_phi is not None and model_mean is not None:
        ax.plot(model_phi, model_mean, "-", color="C1", label="model")
    ax.set_xlabel("phase (rad)")
    ax.set_ylabel("mean photons / pulse")
    ax.legend()
    _finalize(fig, path)
