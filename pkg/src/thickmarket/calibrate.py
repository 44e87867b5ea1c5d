"""Hazard calibration from observed monthly move shares.

Monthly moving hazards are taken proportional to the observed share of
annual moves in each month, 1 - phi_m = kappa * s_m, with the scalar kappa
pinned by the annual move rate eta through the survival identity
prod_m (1 - kappa * s_m) = 1 - eta. The product is strictly decreasing in
kappa and equals one at kappa = 0, so the root is unique and bisection is
exact enough at tolerance 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HazardProfile, PeriodicSeries
from .errors import DataError, DomainError

_BISECTION_MAX_STEPS = 200
_PRODUCT_TOL = 1e-12


@dataclass(frozen=True)
class MoveShares:
    """Nonnegative monthly move shares summing to one."""

    shares: PeriodicSeries
    label: str = "custom"
    source: str = "user"
    original_sum: float = 1.0   # sum of the raw inputs before normalization

    def __post_init__(self):
        s = self.shares.values
        if np.any(s < 0.0):
            raise DomainError("move shares must be nonnegative")
        if abs(s.sum() - 1.0) > 1e-12:
            raise DomainError(f"move shares must sum to 1, got {s.sum():.15g}")


@dataclass(frozen=True)
class CalibrationScale:
    """The proportionality scalar kappa matching an annual move rate eta."""

    kappa: float
    eta: float


def normalize_shares(raw, label: str = "custom", source: str = "user") -> MoveShares:
    """Normalize raw nonnegative monthly counts or percentages to shares.

    The original sum is kept for diagnostics (published tables often sum
    to 99.9 or 100.1 because of rounding).
    """
    arr = np.asarray(raw, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("move shares cannot contain negative entries")
    total = float(arr.sum())
    if not total > 0.0:
        raise DomainError("move shares must have a positive sum")
    return MoveShares(shares=PeriodicSeries(arr / total), label=label,
                      source=source, original_sum=total)


def survival_product(shares: MoveShares, kappa: float) -> float:
    """prod_m (1 - kappa * s_m), the implied annual survival probability."""
    return float(np.prod(1.0 - kappa * shares.shares.values))


def solve_kappa(shares: MoveShares, eta: float) -> CalibrationScale:
    """Find the unique kappa with prod(1 - kappa*s_m) = 1 - eta by bisection.

    The root lies in (0, 1/max_m s_m): the product decreases strictly from
    1 to 0 on that interval, so the endpoints always bracket the target for
    any eta in (0, 1).
    """
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    s_max = float(shares.shares.values.max())
    target = 1.0 - eta

    lo, hi = 0.0, (1.0 - 1e-12) / s_max
    f_lo = survival_product(shares, lo) - target
    f_hi = survival_product(shares, hi) - target
    if not (f_lo > 0.0 and f_hi < 0.0):
        raise DomainError("bisection endpoints fail to bracket the root")

    kappa = 0.5 * (lo + hi)
    for _ in range(_BISECTION_MAX_STEPS):
        kappa = 0.5 * (lo + hi)
        f_mid = survival_product(shares, kappa) - target
        if abs(f_mid) < _PRODUCT_TOL:
            break
        if f_mid > 0.0:
            lo = kappa
        else:
            hi = kappa
    return CalibrationScale(kappa=kappa, eta=eta)


def hazards_from_shares(shares: MoveShares, eta: float) -> HazardProfile:
    """Monthly survival profile phi_m = 1 - kappa * s_m at the solved kappa."""
    scale = solve_kappa(shares, eta)
    return HazardProfile.from_hazard(scale.kappa * shares.shares.values)


def compose_beta(annual_interest_rate: float, delta: float) -> tuple[float, float]:
    """Monthly discount pair (beta_hat, beta) from an annual interest rate.

    beta_hat = (1 + rate)^(-1/12) is pure time discounting; the effective
    beta = beta_hat * (1 - delta) also prices in the monthly probability
    delta that a transaction in progress is disrupted.
    """
    if annual_interest_rate <= -1.0:
        raise DomainError(
            f"annual interest rate must exceed -1, got {annual_interest_rate}")
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"delta must lie in [0, 1), got {delta}")
    beta_hat = (1.0 + annual_interest_rate) ** (-1.0 / 12.0)
    if not beta_hat < 1.0:
        raise DomainError(
            f"a non-positive interest rate gives beta_hat = {beta_hat:.6g} >= 1, "
            "outside the model's discount domain")
    beta = beta_hat * (1.0 - delta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"effective beta must lie in (0, 1), got {beta}")
    return beta_hat, beta


def shares_from_trends(panel, years, label: str = "custom") -> MoveShares:
    """Average within-year monthly shares of a search-interest series.

    For each year in ``years`` the 12 monthly values are divided by their
    annual sum, and the per-year share vectors are averaged. Within-year
    shares are invariant to any per-download rescaling of the series, so
    indices from different query windows can be pooled safely.

    Every year used must have all 12 months present and a positive annual
    total; otherwise a ``DataError`` is raised.
    """
    years = sorted(int(y) for y in years)
    if not years:
        raise DataError("at least one year is required to form shares")
    lookup = {(int(y), int(m)): float(val)
              for y, m, val in zip(panel.years, panel.months, panel.values)}
    share_rows = []
    for year in years:
        row = np.array([lookup.get((year, m), np.nan) for m in range(1, 13)])
        if np.any(np.isnan(row)):
            missing = [m for m in range(1, 13) if (year, m) not in lookup]
            raise DataError(f"year {year} is missing months {missing}")
        total = row.sum()
        if not total > 0.0:
            raise DataError(f"year {year} has a non-positive annual total")
        share_rows.append(row / total)
    mean_shares = np.mean(share_rows, axis=0)
    return MoveShares(shares=PeriodicSeries(mean_shares / mean_shares.sum()),
                      label=label, source="trends",
                      original_sum=float(mean_shares.sum()))
