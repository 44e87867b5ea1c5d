"""Monthly search-and-matching housing market equilibrium and seasonality tests."""

from .affine import AffineCoefficients, Box, compute_affine_coefficients
from .calibrate import (
    CalibrationScale,
    MoveShares,
    compose_beta,
    hazards_from_shares,
    normalize_shares,
    shares_from_trends,
    solve_kappa,
)
from .core import (
    HazardProfile,
    ModelParams,
    MonthIndex,
    PeriodicSeries,
    seasonal_deviation,
)
from .errors import ConvergenceError, DataError, DomainError, RankDeficientError
from .mapping import (
    EquilibriumState,
    apply_T,
    apply_T_damped,
    compute_outputs,
    reservation_cutoffs,
)
from .solver import (
    EquilibriumSolution,
    SolverConfig,
    residual,
    solve_equilibrium,
    solve_with_endogenous_u,
)

__version__ = "0.1.0"

__all__ = [
    "AffineCoefficients",
    "Box",
    "CalibrationScale",
    "ConvergenceError",
    "DataError",
    "DomainError",
    "EquilibriumSolution",
    "EquilibriumState",
    "HazardProfile",
    "ModelParams",
    "MonthIndex",
    "MoveShares",
    "PeriodicSeries",
    "RankDeficientError",
    "SolverConfig",
    "apply_T",
    "apply_T_damped",
    "compose_beta",
    "compute_affine_coefficients",
    "compute_outputs",
    "hazards_from_shares",
    "normalize_shares",
    "reservation_cutoffs",
    "residual",
    "seasonal_deviation",
    "shares_from_trends",
    "solve_equilibrium",
    "solve_kappa",
    "solve_with_endogenous_u",
]
