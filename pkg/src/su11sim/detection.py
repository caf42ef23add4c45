"""Charge-integrating detector model: calibration curve, inversion, noise.

The detector responds linearly above a knee (about 2000 photons per pulse)
and loses sensitivity below it.  The sub-knee curve is a smooth
one-parameter saturating-deficit shape chosen to match the linear branch in
value and slope at the knee:

    response(N) = gain * [N - deficit * (knee/3) * (1 - (1 - N/knee)^3)]   N < knee
                = gain * N - gain * deficit * knee / 3                      N >= knee

so the local slope is gain * (1 - deficit * (1 - N/knee)^2): strictly
positive for deficit < 1, below gain everywhere under the knee, equal to
gain above it.  The detector noise is a constant floor in the linear regime
and rises quadratically toward a larger dark value at zero flux.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

__all__ = ["DetectorModel", "response", "invert_response", "noise_at", "sample_reading"]


@dataclass(frozen=True)
class DetectorModel:
    """Calibration and noise parameters of the charge-integrating detector."""

    gain: float = 1.0
    knee: float = 2000.0
    deficit: float = 0.5
    noise_linear: float = 290.0
    noise_dark: float = 1000.0

    def __post_init__(self):
        if not (self.gain > 0.0 and math.isfinite(self.gain)):
            raise ValueError("gain must be positive")
        if not (self.knee > 0.0 and math.isfinite(self.knee)):
            raise ValueError("knee must be positive")
        if not (0.0 <= self.deficit < 1.0):
            raise ValueError("deficit must lie in [0, 1)")
        if self.noise_linear < 0.0 or self.noise_dark < 0.0:
            raise ValueError("noise levels must be >= 0")


def response(model: DetectorModel, photons):
    """Mean pulse area for a given mean photon number (strictly increasing)."""
    n = np.asarray(photons, dtype=float)
    if np.any(n < 0.0):
        raise ValueError("photon number must be >= 0")
    g, k, d = model.gain, model.knee, model.deficit
    frac = np.clip(1.0 - n / k, 0.0, None)
    below = g * (n - d * (k / 3.0) * (1.0 - frac**3))
    above = g * n - g * d * k / 3.0
    out = np.where(n < k, below, above)
    return float(out) if out.ndim == 0 else out


def invert_response(model: DetectorModel, area: float) -> float:
    """Photon number producing a given mean pulse area.

    Analytic on the linear branch; monotone root-finding below the knee.
    """
    if area < 0.0:
        raise ValueError("pulse area must be >= 0")
    g, k, d = model.gain, model.knee, model.deficit
    knee_area = g * k * (1.0 - d / 3.0)
    if area >= knee_area:
        return area / g + d * k / 3.0
    if area == 0.0:
        return 0.0
    return brentq(lambda n: response(model, n) - area, 0.0, k, xtol=1e-12, rtol=8.9e-16)


def noise_at(model: DetectorModel, photons):
    """Detector noise (photons) at a given flux: the linear-regime floor above
    the knee, rising smoothly to the dark value as the flux goes to zero."""
    n = np.asarray(photons, dtype=float)
    frac = np.clip(1.0 - n / model.knee, 0.0, None)
    out = model.noise_linear + (model.noise_dark - model.noise_linear) * frac**2
    return float(out) if out.ndim == 0 else out


def sample_reading(model: DetectorModel, true_mean, true_var, rng):
    """One detected reading (photons): Gaussian around the true mean.

    The sample variance is true_var plus the squared detector noise at the
    operating flux; readings are clamped at zero.  rng may be an integer
    seed or a numpy Generator; arrays broadcast elementwise, and a fixed
    seed reproduces the draw exactly.
    """
    if np.any(np.asarray(true_var) < 0.0):
        raise ValueError("true_var must be >= 0")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    mean = np.asarray(true_mean, dtype=float)
    sigma = np.sqrt(np.asarray(true_var, dtype=float) + np.asarray(noise_at(model, mean)) ** 2)
    out = np.clip(rng.normal(mean, sigma), 0.0, None)
    return float(out) if out.ndim == 0 else out
