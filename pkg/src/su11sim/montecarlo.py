"""Pulse-ensemble simulation of the fringe-scan experiment.

Each simulated pulse draws a pump energy, scales both parametric gains with
the pump field amplitude (r propto sqrt(E), exponent configurable), computes
the per-pulse output mean and variance from the interferometer model plus the
visibility background, and converts them into a detected reading through the
detector model.  A monitor channel (an auxiliary high-gain crystal watching
the same pump) supports post-selection on pump energy.

Randomness is explicit: every scan position owns an independent stream
spawned deterministically from the scan seed, so results are reproducible
and independent of any parallel schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import detection, interferometer
from .analysis import distance_to_phase
from .detection import DetectorModel
from .errors import DataError, EmptyWindowError
from .interferometer import InterferometerConfig, SensitivityCurve

__all__ = [
    "PumpModel",
    "PulseRecord",
    "FringeScan",
    "sample_pump",
    "g2",
    "post_select",
    "run_scan",
    "estimate_sensitivity",
    "min_estimated_sensitivity",
]


@dataclass(frozen=True)
class PumpModel:
    """Pump-pulse statistics and the coupling of pump energy to gain.

    Gains scale as (E / mean_energy)^coupling_exponent; the default 0.5
    makes r proportional to the pump field amplitude.  The monitor channel
    reads monitor_gain * exp(2 * monitor_r * scale) photons plus detector
    noise, mimicking an auxiliary high-gain crystal.
    """

    mean_energy_uj: float = 20.0
    sigma_energy_uj: float = 20.0 * math.sqrt(1.00001 - 1.0)
    coupling_exponent: float = 0.5
    monitor_r: float = 3.0
    monitor_gain: float = 1e4

    def __post_init__(self):
        if not (self.mean_energy_uj > 0.0):
            raise ValueError("mean pulse energy must be positive")
        if self.sigma_energy_uj < 0.0:
            raise ValueError("energy spread must be >= 0")

    @classmethod
    def from_g2(cls, g2_value: float, mean_energy_uj: float = 20.0, **kwargs):
        """Set the energy spread from the intensity correlation g2(0) >= 1."""
        if g2_value < 1.0:
            raise ValueError("g2(0) must be >= 1 for classical pump light")
        sigma = mean_energy_uj * math.sqrt(g2_value - 1.0)
        return cls(mean_energy_uj=mean_energy_uj, sigma_energy_uj=sigma, **kwargs)


@dataclass(frozen=True)
class PulseRecord:
    """One simulated pulse: pump energy, monitor reading, signal reading."""

    pump_energy_uj: float
    monitor_reading: float
    signal_reading: float

    def __post_init__(self):
        vals = (self.pump_energy_uj, self.monitor_reading, self.signal_reading)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("pulse record fields must be finite")
        if self.monitor_reading < 0.0 or self.signal_reading < 0.0:
            raise ValueError("readings must be >= 0")


@dataclass
class FringeScan:
    """Aggregated statistics of one scan of the crystal separation."""

    position_mm: np.ndarray
    phi_rad: np.ndarray
    n_pulses_kept: np.ndarray
    mean_photons: np.ndarray
    std_photons: np.ndarray
    n_pulses_total: int = 0
    seed: int | None = None
    window: tuple[float, float] = (-math.inf, math.inf)
    monitor_g2: float = float("nan")
    kept_fraction: float = float("nan")

    def __post_init__(self):
        pos = np.asarray(self.position_mm, dtype=float)
        if pos.size > 1 and np.any(np.diff(pos) <= 0.0):
            raise ValueError("scan positions must be strictly increasing")
        if self.n_pulses_total and np.any(np.asarray(self.n_pulses_kept) > self.n_pulses_total):
            raise ValueError("kept pulses cannot exceed the total per position")


def sample_pump(pm: PumpModel, rng, size=None):
    """Draw pump pulse energies: Gaussian around the mean, clamped positive."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    draw = rng.normal(pm.mean_energy_uj, pm.sigma_energy_uj, size)
    out = np.clip(draw, 0.0, None)
    return float(out) if size is None else out


def g2(intensities) -> float:
    """Normalized intensity correlation at zero delay, <I^2>/<I>^2.

    Computed as 1 + Var(I)/<I>^2, which is algebraically identical and
    returns exactly 1 for constant input.
    """
    x = np.asarray(intensities, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one intensity sample")
    if np.any(x < 0.0):
        raise ValueError("intensities must be >= 0")
    mean = float(np.mean(x))
    if mean == 0.0:
        raise ValueError("mean intensity is zero")
    return 1.0 + float(np.var(x)) / mean**2


def post_select(records, window) -> list:
    """Keep the pulses whose monitor reading lies inside [lo, hi], order preserved."""
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"window must satisfy lo < hi, got {window!r}")
    return [rec for rec in records if lo <= rec.monitor_reading <= hi]


def _pulse_batch(cfg, pm, dm, phi, n_pulses, rng):
    """Simulate one position: returns (energies, monitor, signal) arrays.

    Signal readings are Gaussian with exactly the per-pulse (mean, variance)
    of the model plus detector noise, without clamping: near the bright
    fringe the photon noise of the amplified light exceeds its mean, and a
    clamp at zero would bias every ensemble statistic the scan exists to
    estimate.  Negative samples represent below-baseline charge readings.
    """
    energy = sample_pump(pm, rng, n_pulses)
    scale = (energy / pm.mean_energy_uj) ** pm.coupling_exponent
    r1 = cfg.r1 * scale
    r2 = cfg.r2_abs * scale
    mean_q, var_q = interferometer.chain_moments(cfg, phi, r1=r1, r2_abs=r2)
    if cfg.visibility < 1.0:
        n_in = cfg.nu * np.sinh(r1) ** 2
        amp = cfg.eta * cfg.mu * n_in * np.exp(2.0 * r2)
        bg = amp * (1.0 - cfg.visibility) / (2.0 * cfg.visibility)
    else:
        bg = 0.0
    mean_det = mean_q + bg
    sigma = np.sqrt(var_q + bg + np.asarray(detection.noise_at(dm, np.clip(mean_det, 0.0, None))) ** 2)
    signal = rng.normal(mean_det, sigma)
    mon_mean = pm.monitor_gain * np.exp(2.0 * pm.monitor_r * scale)
    monitor = detection.sample_reading(dm, mon_mean, 0.0, rng)
    return energy, monitor, signal


def run_scan(
    cfg: InterferometerConfig,
    pm: PumpModel,
    dm: DetectorModel,
    positions_mm,
    n_pulses: int,
    window=(-math.inf, math.inf),
    seed: int = 0,
    period_mm: float = 52.0,
    phi0: float = 0.0,
) -> FringeScan:
    """Simulate a fringe scan: n_pulses per crystal position, post-selected.

    Raises EmptyWindowError if the post-selection window rejects every pulse
    at some position.
    """
    if n_pulses < 100:
        raise ValueError("need at least 100 pulses per position")
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"window must satisfy lo < hi, got {window!r}")
    positions = np.asarray(list(positions_mm), dtype=float)
    if positions.size == 0:
        raise ValueError("need at least one scan position")
    if np.any(np.diff(positions) <= 0.0):
        raise ValueError("scan positions must be strictly increasing")

    phis = np.asarray(distance_to_phase(positions, period_mm, phi0), dtype=float)
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(positions.size)]

    kept = np.zeros(positions.size, dtype=int)
    means = np.zeros(positions.size)
    stds = np.zeros(positions.size)
    all_monitor = []
    for i, (phi, rng) in enumerate(zip(phis, streams)):
        _, monitor, signal = _pulse_batch(cfg, pm, dm, float(phi), n_pulses, rng)
        all_monitor.append(monitor)
        mask = (monitor >= lo) & (monitor <= hi)
        n_kept = int(np.count_nonzero(mask))
        if n_kept == 0:
            raise EmptyWindowError(
                f"post-selection window {window!r} kept no pulses at position {positions[i]} mm"
            )
        sel = signal[mask]
        kept[i] = n_kept
        means[i] = float(np.mean(sel))
        stds[i] = float(np.std(sel, ddof=1)) if n_kept > 1 else 0.0

    monitor_all = np.concatenate(all_monitor)
    return FringeScan(
        position_mm=positions,
        phi_rad=phis,
        n_pulses_kept=kept,
        mean_photons=means,
        std_photons=stds,
        n_pulses_total=n_pulses,
        seed=seed,
        window=(float(lo), float(hi)),
        monitor_g2=g2(monitor_all),
        kept_fraction=float(np.sum(kept)) / (n_pulses * positions.size),
    )


def estimate_sensitivity(scan: FringeScan) -> SensitivityCurve:
    """Data-driven sensitivity: finite-difference slope and per-position noise.

    Interior rows use central differences on (phi, mean); endpoints use
    one-sided differences and are flagged.  Rows whose slope falls below the
    stationary-point floor are flagged singular with infinite delta_phi.
    The statistical standard error of each estimate is propagated from the
    sample-variance and slope uncertainties.
    """
    phi = np.asarray(scan.phi_rad, dtype=float)
    y = np.asarray(scan.mean_photons, dtype=float)
    std = np.asarray(scan.std_photons, dtype=float)
    n = np.asarray(scan.n_pulses_kept, dtype=float)
    m = phi.size
    if m < 3:
        raise DataError(f"need at least 3 positions to estimate slopes, got {m}")

    slope = np.empty(m)
    slope_var = np.empty(m)
    sem2 = std**2 / np.maximum(n, 1.0)
    slope[1:-1] = (y[2:] - y[:-2]) / (phi[2:] - phi[:-2])
    slope_var[1:-1] = (sem2[2:] + sem2[:-2]) / (phi[2:] - phi[:-2]) ** 2
    slope[0] = (y[1] - y[0]) / (phi[1] - phi[0])
    slope_var[0] = (sem2[1] + sem2[0]) / (phi[1] - phi[0]) ** 2
    slope[-1] = (y[-1] - y[-2]) / (phi[-1] - phi[-2])
    slope_var[-1] = (sem2[-1] + sem2[-2]) / (phi[-1] - phi[-2]) ** 2

    one_sided = np.zeros(m, dtype=bool)
    one_sided[0] = one_sided[-1] = True
    singular = np.abs(slope) <= interferometer.SLOPE_FLOOR

    delta = np.full(m, np.inf)
    delta_sigma = np.full(m, np.inf)
    ok = ~singular
    delta[ok] = std[ok] / np.abs(slope[ok])
    # relative variance: sample std contributes 1/(2(n-1)), the slope its own term
    rel_var = np.zeros(m)
    rel_var[ok] = 1.0 / (2.0 * np.maximum(n[ok] - 1.0, 1.0)) + slope_var[ok] / slope[ok] ** 2
    delta_sigma[ok] = delta[ok] * np.sqrt(rel_var[ok])
    return SensitivityCurve(
        phi=phi,
        mean_out=y,
        noise=std,
        slope=slope,
        delta_phi=delta,
        singular=singular,
        one_sided=one_sided,
        delta_phi_sigma=delta_sigma,
    )


def min_estimated_sensitivity(curve: SensitivityCurve) -> tuple[float, float, float]:
    """Best (phi, delta_phi, sigma) among trustworthy rows of an estimated curve.

    Endpoint and singular rows are excluded.
    """
    mask = ~curve.singular
    if curve.one_sided is not None:
        mask &= ~curve.one_sided
    if not np.any(mask):
        raise DataError("no interior, non-singular rows to minimize over")
    idx = np.flatnonzero(mask)
    best = idx[np.argmin(curve.delta_phi[idx])]
    sigma = float(curve.delta_phi_sigma[best]) if curve.delta_phi_sigma is not None else math.nan
    return float(curve.phi[best]), float(curve.delta_phi[best]), sigma
