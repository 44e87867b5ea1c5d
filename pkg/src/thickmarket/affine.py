"""Closed-form value-function slopes, continuation weights, and bounds.

The homeowner value is affine in match quality, H_m(e) = A_m*e + D_m.
Imposing n-periodicity on the slope recursion A_m = 1 + beta*phi_{m+1}*A_{m+1}
gives a closed form for A_m, and unrolling the intercept recursion expresses
D_m as a weighted sum of future mover values, D_m = sum_r w_{m,r} X_{m+r}.
This module computes those objects together with the compact box on which
the one-step equilibrium map is a self-map, and the damping threshold below
which the damped map is theoretically guaranteed to contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HazardProfile, PeriodicSeries
from .errors import DomainError


@dataclass(frozen=True)
class Box:
    """Coordinate bounds [X_lo, X_hi]^n x [v_lo, v_hi]^n for the map's domain."""

    v_lo: float
    v_hi: float
    X_lo: float
    X_hi: float

    def contains(self, X: np.ndarray, v: np.ndarray, slack: float = 0.0) -> bool:
        return bool(
            np.all(X >= self.X_lo - slack) and np.all(X <= self.X_hi + slack)
            and np.all(v >= self.v_lo - slack) and np.all(v <= self.v_hi + slack)
        )


@dataclass(frozen=True)
class AffineCoefficients:
    """Slopes A_m, weight table w_{m,r}, and derived bounds.

    W[i, j] holds w_{m,r} for m = i+1 and r = j+1 (r = 1..n lags ahead).
    Wstar is max_m sum_r w_{m,r}; lambda_bar is the damping threshold
    (1-beta) / ((A_max/A_min)*(beta+Wstar)).
    """

    A: PeriodicSeries
    Phi: float
    W: np.ndarray
    Wstar: float
    A_min: float
    A_max: float
    lambda_bar: float
    box: Box
    beta: float
    u: float
    _D_matrix: np.ndarray  # row m0: D = _D_matrix @ X with calendar indexing

    @property
    def period(self) -> int:
        return self.A.period

    def continuation_weights(self, X: np.ndarray) -> np.ndarray:
        """D_m = sum_r w_{m,r} X_{m+r}, broadcasting over leading axes of X."""
        return X @ self._D_matrix.T


def compute_affine_coefficients(hazards: HazardProfile, beta: float,
                                u: float) -> AffineCoefficients:
    """Evaluate the closed forms for A, the weights w, and all bounds.

    Parameters
    ----------
    hazards : HazardProfile
        Monthly survival probabilities phi_m, each strictly in (0, 1).
    beta : float
        Effective monthly discount factor, strictly in (0, 1).
    u : float
        Per-month housing service flow, strictly positive.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if not u > 0.0:
        raise DomainError(f"u must be positive, got {u}")
    phi = hazards.survival.values
    n = phi.size

    Phi = float(np.prod(phi))
    denom = 1.0 - beta ** n * Phi

    A = np.empty(n)
    W = np.empty((n, n))
    beta_pows = beta ** np.arange(n + 1)
    for m0 in range(n):
        # prods[s] = prod_{j=1..s} phi_{m+j}, s = 0..n-1 (empty product = 1)
        ahead = phi[(m0 + 1 + np.arange(n - 1)) % n]
        prods = np.concatenate(([1.0], np.cumprod(ahead)))
        A[m0] = np.dot(beta_pows[:n], prods) / denom
        W[m0, :] = beta_pows[1:] * prods * (1.0 - phi[(m0 + 1 + np.arange(n)) % n]) / denom

    row_sums = W.sum(axis=1)
    Wstar = float(row_sums.max())
    A_min = float(A.min())
    A_max = float(A.max())
    lambda_bar = (1.0 - beta) / ((A_max / A_min) * (beta + Wstar))

    phi_max = hazards.phi_max
    phi_min = hazards.phi_min
    v_lo = 1.0 - phi_max
    v_hi = (1.0 - phi_min) / (1.0 - phi_max)
    X_lo = u / (1.0 - beta)
    X_hi = X_lo + A_max * v_hi / (2.0 * (1.0 - beta))
    box = Box(v_lo=v_lo, v_hi=v_hi, X_lo=X_lo, X_hi=X_hi)

    # Scatter the lag-indexed weights onto calendar positions so that
    # D = Dmat @ X in one matvec: column (m0 + r) mod n gets w_{m, r}.
    Dmat = np.zeros((n, n))
    for m0 in range(n):
        Dmat[m0, (m0 + 1 + np.arange(n)) % n] = W[m0, :]

    return AffineCoefficients(
        A=PeriodicSeries(A), Phi=Phi, W=W, Wstar=Wstar,
        A_min=A_min, A_max=A_max, lambda_bar=lambda_bar, box=box,
        beta=beta, u=u, _D_matrix=Dmat,
    )
