"""Brute-force truncated-Fock-space simulator.

This module is the independent verification oracle for the Gaussian
formalism: states are dense density matrices on the Fock basis
{|0>, ..., |d-1>}, squeeze operators are built by dense matrix exponentials
of the truncated generator, and loss is the exact Kraus sum of the damping
channel.  Nothing here touches the covariance-matrix code.

Phase conventions match :mod:`su11sim.gaussian`: a squeeze with phase theta
anti-squeezes the quadrature direction theta/2 (Bogoliubov action
a -> a cosh r + a^dag e^{i theta} sinh r), and a rotation by phi maps
a -> a e^{i phi} in the Heisenberg picture of the inverse, i.e.
rho -> e^{i phi n} rho e^{-i phi n}.

The oracle is only trustworthy while the untruncated state would keep
negligible weight above the cutoff; squeezed-vacuum construction computes
that tail analytically and refuses to proceed when it exceeds 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import TruncationError

__all__ = [
    "FockState",
    "squeezed_vacuum_fock",
    "squeezed_vacuum_leakage",
    "apply_loss_fock",
    "apply_rotation_fock",
    "apply_squeeze_fock",
    "photon_stats_fock",
    "interferometer_chain_fock",
]

_LEAKAGE_LIMIT = 1e-8
_MIN_CUTOFF = 16


@dataclass(frozen=True)
class FockState:
    """Density matrix on a truncated Fock basis, plus a truncation-tail estimate.

    ``leakage`` upper-bounds the probability the untruncated state would
    carry at or above the cutoff.  It is analytic for squeezed vacuum and is
    propagated conservatively through channels (loss never increases it; a
    second squeeze adds the measured occupancy of the top Fock levels).
    """

    rho: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("rho must be a square matrix")
        object.__setattr__(self, "rho", rho)

    @property
    def cutoff(self) -> int:
        return self.rho.shape[0]


def squeezed_vacuum_leakage(r: float, cutoff: int) -> float:
    """Probability weight of the exact squeezed vacuum at Fock levels >= cutoff.

    Uses the closed-form photon-number distribution
    P(2m) = (2m)! tanh^{2m}(r) / (4^m (m!)^2 cosh r) via a stable recurrence.
    """
    if r == 0.0:
        return 0.0
    t2 = math.tanh(r) ** 2
    p = 1.0 / math.cosh(r)
    total = 0.0
    m = 0
    while 2 * m < cutoff:
        total += p
        p *= t2 * (2 * m + 1) / (2 * m + 2)
        m += 1
    return max(1.0 - total, 0.0)


@lru_cache(maxsize=64)
def _squeeze_operator(r: float, theta: float, cutoff: int) -> np.ndarray:
    """exp(r (e^{i theta} adag^2 - e^{-i theta} a^2) / 2) on the truncated space."""
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)
    adag2 = (a @ a).conj().T
    phase = complex(math.cos(theta), math.sin(theta))
    gen = 0.5 * r * (phase * adag2 - np.conj(phase) * (a @ a))
    return expm(gen)


def squeezed_vacuum_fock(r: float, theta: float = 0.0, cutoff: int = 256) -> FockState:
    """Squeezed vacuum built by exponentiating the truncated squeeze generator.

    Raises :class:`TruncationError` when the analytic truncation tail exceeds
    1e-8 for the requested (r, cutoff).
    """
    if cutoff < _MIN_CUTOFF:
        raise ValueError(f"cutoff must be >= {_MIN_CUTOFF}")
    if not (math.isfinite(r) and r >= 0.0):
        raise ValueError("squeeze magnitude must be finite and >= 0")
    leak = squeezed_vacuum_leakage(r, cutoff)
    if leak > _LEAKAGE_LIMIT:
        raise TruncationError(
            f"cutoff {cutoff} too small for r={r}: truncation leakage {leak:.3e}"
        )
    if r == 0.0:
        rho = np.zeros((cutoff, cutoff), dtype=complex)
        rho[0, 0] = 1.0
        return FockState(rho, 0.0)
    op = _squeeze_operator(float(r), float(theta % (2.0 * math.pi)), cutoff)
    psi = op[:, 0]
    return FockState(np.outer(psi, psi.conj()), leak)


def apply_loss_fock(state: FockState, eta: float) -> FockState:
    """Pure-loss channel with transmission eta as a Kraus-operator sum.

    The Kraus family K_k |n> = sqrt(C(n,k) (1-eta)^k eta^{n-k}) |n-k> is
    exactly trace preserving on the truncated space because loss only moves
    population downward.
    """
    if not (0.0 <= eta <= 1.0):
        raise ValueError(f"transmission must lie in [0, 1], got {eta!r}")
    if eta == 1.0:
        return state
    d = state.cutoff
    rho = state.rho
    out = np.zeros_like(rho)
    if eta == 0.0:
        out[0, 0] = np.trace(rho)
        return FockState(out, state.leakage)
    from scipy.special import gammaln

    idx = np.arange(d, dtype=float)
    log_eta = math.log(eta)
    log_one_minus = math.log1p(-eta)
    for k in range(d):
        m = d - k
        i = idx[:m]
        log_amp = 0.5 * (
            gammaln(i + k + 1.0)
            - gammaln(i + 1.0)
            - gammaln(k + 1.0)
            + k * log_one_minus
            + i * log_eta
        )
        amp = np.exp(log_amp)
        out[:m, :m] += np.multiply.outer(amp, amp) * rho[k:, k:]
    out = 0.5 * (out + out.conj().T)
    return FockState(out, state.leakage)


def apply_rotation_fock(state: FockState, phi: float) -> FockState:
    """Phase rotation rho -> e^{i phi n} rho e^{-i phi n}."""
    n = np.arange(state.cutoff)
    phase = np.exp(1j * phi * n)
    return FockState(phase[:, None] * state.rho * phase.conj()[None, :], state.leakage)


def apply_squeeze_fock(state: FockState, r: float, theta: float) -> FockState:
    """Apply a squeeze operator to an arbitrary Fock state.

    The reported leakage grows by the output occupancy of the top 16 Fock
    levels, a pragmatic proxy for the truncation error this operation can
    introduce.
    """
    if not (math.isfinite(r) and r >= 0.0):
        raise ValueError("squeeze magnitude must be finite and >= 0")
    if r == 0.0:
        return state
    op = _squeeze_operator(float(r), float(theta % (2.0 * math.pi)), state.cutoff)
    rho = op @ state.rho @ op.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    top = float(np.sum(np.real(np.diag(rho)[-16:])))
    return FockState(rho, state.leakage + max(top, 0.0))


def photon_stats_fock(state: FockState) -> tuple[float, float]:
    """Exact (mean, variance) of the photon number from the diagonal of rho."""
    p = np.real(np.diag(state.rho))
    n = np.arange(state.cutoff, dtype=float)
    mean = float(np.dot(n, p))
    var = float(np.dot(n * n, p)) - mean * mean
    return mean, max(var, 0.0)


def _loss_diagonal(p: np.ndarray, eta: float) -> np.ndarray:
    """Photon-number distribution after loss: binomial redistribution of the diagonal.

    Identical to the diagonal of the full Kraus sum, at O(d^2) cost.
    """
    d = p.size
    if eta == 1.0:
        return p
    out = np.zeros(d)
    if eta == 0.0:
        out[0] = p.sum()
        return out
    from scipy.special import gammaln

    idx = np.arange(d, dtype=float)
    log_eta = math.log(eta)
    log_one_minus = math.log1p(-eta)
    for k in range(d):
        m = d - k
        i = idx[:m]
        log_w = (
            gammaln(i + k + 1.0)
            - gammaln(i + 1.0)
            - gammaln(k + 1.0)
            + k * log_one_minus
            + i * log_eta
        )
        out[:m] += np.exp(log_w) * p[k:]
    return out


@lru_cache(maxsize=16)
def _chain_mid_state(r1: float, mu: float, cutoff: int) -> np.ndarray:
    """Squeezed vacuum after the internal loss; phi-independent part of the chain."""
    state = squeezed_vacuum_fock(r1, 0.0, cutoff)
    state = apply_loss_fock(state, mu)
    return state.rho


def interferometer_chain_fock(
    r1: float,
    r2_abs: float,
    mu: float,
    eta_nu: float,
    phi: float,
    cutoff: int = 256,
) -> tuple[float, float]:
    """Output photon (mean, variance) of the full two-amplifier chain.

    Pipeline: squeezed vacuum r1 -> loss mu -> rotate phi -> squeeze
    (r2, theta=pi) -> loss eta_nu, all in the truncated Fock space.  This is
    the independent check of the covariance-matrix chain and is only valid
    while the intermediate states stay far from the cutoff (keep
    r1 + r2 <~ 1.7 for cutoff 256).  The phi-independent front of the chain
    is cached, and the final loss acts on the photon-number distribution
    only, which is exact for diagonal statistics.
    """
    rho = _chain_mid_state(float(r1), float(mu), cutoff)
    n = np.arange(cutoff)
    phase = np.exp(1j * phi * n)
    rho = phase[:, None] * rho * phase.conj()[None, :]
    op = _squeeze_operator(float(r2_abs), math.pi, cutoff)
    rho = op @ rho @ op.conj().T
    p = _loss_diagonal(np.real(np.diag(rho)), eta_nu)
    nf = n.astype(float)
    mean = float(np.dot(nf, p))
    var = float(np.dot(nf * nf, p)) - mean * mean
    return mean, max(var, 0.0)
