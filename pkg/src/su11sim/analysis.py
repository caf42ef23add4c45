"""Fringe analysis: distance-to-phase conversion, sin^2 fitting, gain extraction.

The fringe model fitted to scan data is

    y(phi) = A sin^2(phi - phi0) + B,

whose amplitude in the high-gain regime is A = eta*mu*N_inside*exp(2|r2|),
so the second-amplifier gain follows as |r2| = ln(A / (eta*mu*N_inside)) / 2.
The gain of the first amplifier and the filtered-mode transmission come from
the photon numbers emitted by each crystal alone:

    r1 = asinh( sqrt(N / N2) * sinh(r2) ),     nu = N / sinh^2(r1).

The fitter is a damped Gauss-Newton (Levenberg-Marquardt) loop with the
analytic Jacobian of the sin^2 model; iteration cap 200, relative chi^2
tolerance 1e-10.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DataError, InconsistentMeasurementWarning

__all__ = [
    "FitResult",
    "period",
    "distance_to_phase",
    "visibility",
    "extract_gains",
    "fit_fringe",
    "fit_fringe_points",
]

_MAX_ITER = 200
_CHI2_RTOL = 1e-10


def period(lambda_p_nm: float, delta_n_air: float) -> float:
    """Interference period D = 2*lambda_p / delta_n_air, in mm.

    lambda_p is the pump wavelength in nm; delta_n_air the air dispersion
    between pump and signal wavelengths (dimensionless).
    """
    if lambda_p_nm <= 0.0 or delta_n_air <= 0.0:
        raise ValueError("pump wavelength and air dispersion must be positive")
    return 2.0 * lambda_p_nm * 1e-6 / delta_n_air


def distance_to_phase(d_mm, period_mm: float, phi0: float = 0.0):
    """Phase at crystal separation d: phi0 + pi * d / D (a shift of D gives pi)."""
    if period_mm <= 0.0:
        raise ValueError("period must be positive")
    return phi0 + math.pi * np.asarray(d_mm, dtype=float) / period_mm


def visibility(amplitude: float, background: float) -> float:
    """Fringe visibility (max-min)/(max+min) of A sin^2 + B, i.e. A/(A+2B)."""
    if amplitude <= 0.0:
        raise ValueError("amplitude must be positive")
    if background < 0.0:
        raise ValueError("background must be >= 0")
    return amplitude / (amplitude + 2.0 * background)


def extract_gains(n_inside: float, n2: float, r2_abs: float) -> tuple[float, float]:
    """First-amplifier gain and mode transmission from photon-number ratios.

    n_inside and n2 are the photon numbers emitted (within the filter
    bandwidths) by the first and second crystal alone.  A derived nu > 1 is
    physically inconsistent and triggers a warning, not an error.
    """
    if n_inside <= 0.0 or n2 <= 0.0 or r2_abs <= 0.0:
        raise ValueError("photon numbers and gain must be positive")
    r1 = math.asinh(math.sqrt(n_inside / n2) * math.sinh(r2_abs))
    nu = n_inside / math.sinh(r1) ** 2
    if nu > 1.0:
        warnings.warn(
            f"derived mode transmission nu={nu:.4g} exceeds 1; inconsistent measurement",
            InconsistentMeasurementWarning,
            stacklevel=2,
        )
    return r1, nu


@dataclass
class FitResult:
    """Fitted fringe parameters with standard errors.

    r2_abs is derived from the amplitude via the high-gain relation and is
    only meaningful when eta, mu and n_inside were supplied and positive.
    r1 and nu are filled in when the second-crystal photon number is also
    known (see extract_gains).
    """

    amplitude: float
    background: float
    phase_offset: float
    r2_abs: float
    amplitude_err: float
    background_err: float
    phase_offset_err: float
    r2_abs_err: float
    residual_norm: float
    n_points: int
    n_iterations: int
    r1: float | None = None
    nu: float | None = None


def _sin2_model(phi, a, b, phi0):
    return a * np.sin(phi - phi0) ** 2 + b


def _normalize_phi0(phi0: float) -> float:
    """Map the fitted offset into [-pi/2, pi/2); the model is pi-periodic."""
    phi0 = math.fmod(phi0, math.pi)
    if phi0 >= math.pi / 2.0:
        phi0 -= math.pi
    elif phi0 < -math.pi / 2.0:
        phi0 += math.pi
    return phi0


def fit_fringe_points(phi, y, sigma=None) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Weighted least squares of A sin^2(phi - phi0) + B against (phi, y).

    sigma, when given, holds per-point standard errors of y (used as
    weights and for the parameter covariance).  Returns (params, errors,
    weighted residual norm, iterations) with params = (A, B, phi0), A > 0.
    """
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    if phi.size != y.size:
        raise DataError("phi and y must have the same length")
    if phi.size < 5:
        raise DataError(f"need at least 5 points to fit a fringe, got {phi.size}")
    if np.ptp(phi) < math.pi / 2.0 - 1e-9:
        raise DataError(
            f"phase values span {np.ptp(phi):.4g} rad; need at least half a period (pi/2)"
        )
    weighted = sigma is not None
    if weighted:
        sigma = np.asarray(sigma, dtype=float)
        if np.any(~np.isfinite(sigma)) or np.any(sigma <= 0.0):
            weighted = False
    w = 1.0 / sigma if weighted else np.ones_like(y)

    span = float(np.max(y) - np.min(y))
    if span <= 0.0:
        raise DataError("degenerate data: all y values are equal")
    a, b = span, float(np.min(y))
    phi0 = _normalize_phi0(float(phi[int(np.argmin(y))]))

    p = np.array([a, b, phi0])
    resid = (y - _sin2_model(phi, *p)) * w
    chi2 = float(resid @ resid)
    lam = 1e-3
    n_iter = 0
    converged = False
    while n_iter < _MAX_ITER:
        n_iter += 1
        s2 = np.sin(phi - p[2]) ** 2
        jac = np.column_stack(
            [s2, np.ones_like(phi), -p[0] * np.sin(2.0 * (phi - p[2]))]
        ) * w[:, None]
        jtj = jac.T @ jac
        jtr = jac.T @ resid
        step_ok = False
        for _ in range(50):
            damped = jtj + lam * np.diag(np.diag(jtj))
            try:
                delta = np.linalg.solve(damped, jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            p_new = p + delta
            resid_new = (y - _sin2_model(phi, *p_new)) * w
            chi2_new = float(resid_new @ resid_new)
            if chi2_new <= chi2:
                step_ok = True
                break
            lam *= 10.0
        if not step_ok:
            break
        improvement = chi2 - chi2_new
        p, resid, chi2 = p_new, resid_new, chi2_new
        lam = max(lam / 10.0, 1e-12)
        if improvement <= _CHI2_RTOL * max(chi2, 1e-300):
            converged = True
            break
    if not converged and n_iter >= _MAX_ITER:
        raise ConvergenceError(f"fringe fit did not converge in {_MAX_ITER} iterations")

    if p[0] < 0.0:
        # -|A| sin^2(x) + B == |A| sin^2(x + pi/2) + (B - |A|)
        p = np.array([-p[0], p[1] + p[0], p[2] - math.pi / 2.0])
    p[2] = _normalize_phi0(p[2])

    s2 = np.sin(phi - p[2]) ** 2
    jac = np.column_stack(
        [s2, np.ones_like(phi), -p[0] * np.sin(2.0 * (phi - p[2]))]
    ) * w[:, None]
    jtj = jac.T @ jac
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = np.full((3, 3), np.nan)
    if not weighted and phi.size > 3:
        cov = cov * chi2 / (phi.size - 3)
    errors = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    return p, errors, math.sqrt(chi2), n_iter


def fit_fringe(scan, eta: float, mu: float, n_inside: float) -> FitResult:
    """Fit a fringe scan and derive |r2| from the fitted amplitude.

    The scan provides per-position means; where per-position standard
    deviations and kept-pulse counts are available the fit is weighted by
    the standard error of each mean.
    """
    phi = np.asarray(scan.phi_rad, dtype=float)
    y = np.asarray(scan.mean_photons, dtype=float)
    sigma = None
    std = getattr(scan, "std_photons", None)
    n_kept = getattr(scan, "n_pulses_kept", None)
    if std is not None and n_kept is not None:
        std = np.asarray(std, dtype=float)
        n_kept = np.asarray(n_kept, dtype=float)
        if np.all(std > 0.0) and np.all(n_kept > 0):
            sigma = std / np.sqrt(n_kept)
    return fit_result_from_points(phi, y, sigma, eta, mu, n_inside)


def fit_result_from_points(phi, y, sigma, eta: float, mu: float, n_inside: float) -> FitResult:
    """Fit raw (phi, y) points and package the result with the derived gain."""
    if eta <= 0.0 or mu <= 0.0 or n_inside <= 0.0:
        raise ValueError("eta, mu and n_inside must be positive to derive |r2|")
    p, errs, rnorm, n_iter = fit_fringe_points(phi, y, sigma)
    denom = eta * mu * n_inside
    if p[0] <= 0.0:
        raise DataError("fitted amplitude is not positive; cannot derive |r2|")
    r2 = 0.5 * math.log(p[0] / denom)
    r2_err = 0.5 * errs[0] / p[0]
    return FitResult(
        amplitude=float(p[0]),
        background=float(p[1]),
        phase_offset=float(p[2]),
        r2_abs=r2,
        amplitude_err=float(errs[0]),
        background_err=float(errs[1]),
        phase_offset_err=float(errs[2]),
        r2_abs_err=r2_err,
        residual_norm=rnorm,
        n_points=int(np.asarray(phi).size),
        n_iterations=n_iter,
    )
