"""Single-mode Gaussian states: symplectic operations, loss, photon statistics.

Conventions
-----------
Quadratures are x = a + a*, p = -i(a - a*), so the vacuum covariance matrix
is the 2x2 identity (variance 1 per quadrature).  With a zero mean vector the
mean photon number is (Tr cov - 2)/4 and every formula below assumes this
normalization.

A squeeze of magnitude r and phase theta stretches the quadrature along the
phase-plane direction theta/2 by e^r and compresses the orthogonal direction
by e^-r.  theta = 0 therefore anti-squeezes x; theta = pi squeezes x.  The
symplectic matrix is

    S(r, theta) = cosh(r) I + sinh(r) [[cos theta,  sin theta],
                                       [sin theta, -cos theta]].

Exact cardinal phases (multiples of pi/2) are snapped so that e.g.
S(r, pi) is exactly diagonal; this keeps cancellation identities of the
interferometer chain exact at double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussianState",
    "SqueezeParams",
    "vacuum",
    "apply_squeeze",
    "apply_rotation",
    "apply_loss",
    "photon_mean",
    "photon_var",
    "fidelity",
    "wigner",
]

_TWO_PI = 2.0 * math.pi
# Uncertainty bound: physical single-mode states have det(cov) >= 1.
_DET_FLOOR = 1.0 - 1e-9
# Trig values below this are artifacts of evaluating sin/cos at float
# multiples of pi and are snapped to zero.
_TRIG_SNAP = 4e-16


@dataclass(frozen=True)
class GaussianState:
    """A single-mode Gaussian state: quadrature mean vector and 2x2 covariance.

    The covariance matrix is stored exactly symmetric; construction rejects
    matrices that violate the uncertainty bound det(cov) >= 1 or positivity.
    Instances are immutable (arrays are marked read-only).
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(2)
        cov = np.array(self.cov, dtype=float).reshape(2, 2)
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("state moments must be finite")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if abs(cov[0, 1] - cov[1, 0]) > 1e-9 * scale:
            raise ValueError("covariance matrix must be symmetric")
        off = 0.5 * (cov[0, 1] + cov[1, 0])
        cov[0, 1] = off
        cov[1, 0] = off
        det = cov[0, 0] * cov[1, 1] - off * off
        if det < _DET_FLOOR:
            raise ValueError(f"covariance violates the uncertainty bound: det={det!r}")
        if cov[0, 0] <= 0.0 or cov[1, 1] <= 0.0:
            raise ValueError("covariance must be positive definite")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze magnitude r >= 0 and phase angle theta, stored in [0, 2*pi)."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r >= 0.0):
            raise ValueError(f"squeeze magnitude must be finite and >= 0, got {self.r!r}")
        if not math.isfinite(self.theta):
            raise ValueError("squeeze phase must be finite")
        object.__setattr__(self, "theta", self.theta % _TWO_PI)


def vacuum() -> GaussianState:
    """The vacuum state: zero mean, identity covariance."""
    return GaussianState(np.zeros(2), np.eye(2))


def _squeeze_matrix(r: float, theta: float) -> np.ndarray:
    ch = math.cosh(r)
    sh = math.sinh(r)
    c = math.cos(theta)
    s = math.sin(theta)
    if abs(c) < _TRIG_SNAP:
        c = 0.0
    if abs(s) < _TRIG_SNAP:
        s = 0.0
    return np.array([[ch + sh * c, sh * s], [sh * s, ch - sh * c]])


def apply_squeeze(state: GaussianState, params: SqueezeParams) -> GaussianState:
    """Apply the single-mode squeeze S(r, theta) as a symplectic congruence."""
    if params.r == 0.0:
        return state
    s = _squeeze_matrix(params.r, params.theta)
    return GaussianState(s @ state.mean, s @ state.cov @ s.T)


def apply_rotation(state: GaussianState, phi: float) -> GaussianState:
    """Rotate the phase plane by phi (the phase shift acquired between the amplifiers)."""
    if not math.isfinite(phi):
        raise ValueError("rotation angle must be finite")
    if phi == 0.0:
        return state
    c, s = math.cos(phi), math.sin(phi)
    rot = np.array([[c, -s], [s, c]])
    return GaussianState(rot @ state.mean, rot @ state.cov @ rot.T)


def apply_loss(state: GaussianState, eta: float) -> GaussianState:
    """Attenuation channel with transmission eta: cov -> eta*cov + (1-eta)*I.

    eta = 0 yields the vacuum exactly; eta = 1 returns the input unchanged.
    """
    if not (0.0 <= eta <= 1.0):
        raise ValueError(f"transmission must lie in [0, 1], got {eta!r}")
    if eta == 1.0:
        return state
    if eta == 0.0:
        return vacuum()
    cov = eta * state.cov + (1.0 - eta) * np.eye(2)
    return GaussianState(math.sqrt(eta) * state.mean, cov)


def photon_mean(state: GaussianState) -> float:
    """Mean photon number, (Tr cov - 2 + |mean|^2) / 4."""
    n = (state.cov[0, 0] + state.cov[1, 1] - 2.0 + float(state.mean @ state.mean)) / 4.0
    return max(n, 0.0)


def photon_var(state: GaussianState) -> float:
    """Photon-number variance from the second moments of the covariance.

    For zero mean this is (Tr cov^2 - 2)/8; a displaced state adds
    mean^T cov mean / 4.  Vacuum gives exactly 0.
    """
    c = state.cov
    tr_sq = c[0, 0] ** 2 + c[1, 1] ** 2 + 2.0 * c[0, 1] ** 2
    v = (tr_sq - 2.0) / 8.0 + float(state.mean @ c @ state.mean) / 4.0
    return max(v, 0.0)


def fidelity(a: GaussianState, b: GaussianState) -> float:
    """Quantum state fidelity (squared-overlap convention) of two Gaussian states.

    Computed from the symplectic invariants det(cov_a), det(cov_b) and
    det(cov_a + cov_b), so it is exactly invariant under common symplectic
    operations.  For a pure pair this equals |<psi_a|psi_b>|^2; it is 1 iff
    the states coincide.
    """
    ca, cb = a.cov, b.cov
    det_a = ca[0, 0] * ca[1, 1] - ca[0, 1] * ca[1, 0]
    det_b = cb[0, 0] * cb[1, 1] - cb[0, 1] * cb[1, 0]
    csum = ca + cb
    det_sum = csum[0, 0] * csum[1, 1] - csum[0, 1] * csum[1, 0]
    delta = max((det_a - 1.0) * (det_b - 1.0), 0.0)
    f = 2.0 / (math.sqrt(det_sum + delta) - math.sqrt(delta))
    du = a.mean - b.mean
    if du[0] != 0.0 or du[1] != 0.0:
        inv = np.linalg.inv(csum)
        f *= math.exp(-0.5 * float(du @ inv @ du))
    return min(f, 1.0)


def wigner(state: GaussianState, x: float, p: float) -> float:
    """Wigner function evaluated at phase-plane point (x, p).

    The plane is scaled so the vacuum peak is 1/pi and the distribution
    integrates to one:  W(z) = exp(-(z-c)^T cov^-1 (z-c)) / (pi sqrt(det cov))
    with center c = mean/2.
    """
    c = state.cov
    det = c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0]
    dx = x - 0.5 * state.mean[0]
    dp = p - 0.5 * state.mean[1]
    quad = (c[1, 1] * dx * dx - 2.0 * c[0, 1] * dx * dp + c[0, 0] * dp * dp) / det
    return math.exp(-quad) / (math.pi * math.sqrt(det))
