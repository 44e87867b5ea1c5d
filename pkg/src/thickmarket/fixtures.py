"""Bundled calibration inputs: published move-share columns and defaults.

The two share columns are the published survey estimates of the monthly
distribution of household moves (percent of annual moves), for the
2017-2019 and 2021-2023 averaging windows. As printed they sum to 99.9
and 100.1 because of rounding; they are renormalized to exact shares
before entering the model. Annual move rates and the remaining default
parameters follow the same calibration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .calibrate import MoveShares, normalize_shares
from .errors import DataError

# Percent of annual moves by calendar month, January..December, as printed.
SIPP_PRE_RAW = (4.7, 4.7, 7.1, 8.1, 8.9, 12.7, 11.4, 11.3, 10.0, 7.4, 7.1, 6.5)
SIPP_POST_RAW = (5.5, 5.6, 8.9, 9.5, 9.8, 9.7, 9.5, 11.4, 9.9, 7.0, 6.5, 6.8)

ETA_PRE = 0.103
ETA_POST = 0.083

DEFAULT_ANNUAL_RATE = 0.06
DEFAULT_DELTA = 0.025
DEFAULT_THETA = 0.5
DEFAULT_RENT_PRICE_RATIO = 0.03


def sipp_pre_shares() -> MoveShares:
    return normalize_shares(SIPP_PRE_RAW, label="pre", source="sipp_table")


def sipp_post_shares() -> MoveShares:
    return normalize_shares(SIPP_POST_RAW, label="post", source="sipp_table")


@dataclass(frozen=True)
class FixtureLibrary:
    sipp_pre: MoveShares
    sipp_post: MoveShares
    eta_pre: float
    eta_post: float
    annual_rate: float
    delta: float
    theta: float
    rent_price_ratio: float


def fixture_library() -> FixtureLibrary:
    return FixtureLibrary(
        sipp_pre=sipp_pre_shares(),
        sipp_post=sipp_post_shares(),
        eta_pre=ETA_PRE,
        eta_post=ETA_POST,
        annual_rate=DEFAULT_ANNUAL_RATE,
        delta=DEFAULT_DELTA,
        theta=DEFAULT_THETA,
        rent_price_ratio=DEFAULT_RENT_PRICE_RATIO,
    )


def shares_fixture(name: str) -> tuple[MoveShares, float]:
    """Resolve a named share fixture to (shares, default eta)."""
    if name in ("sipp-pre", "sipp_pre", "pre"):
        return sipp_pre_shares(), ETA_PRE
    if name in ("sipp-post", "sipp_post", "post"):
        return sipp_post_shares(), ETA_POST
    raise DataError(f"unknown share fixture '{name}' (use sipp-pre or sipp-post)")


def load_biannual_benchmark() -> dict:
    """Parameter file for the two-season benchmark replication (n = 2)."""
    ref = resources.files("thickmarket").joinpath("data/nt_biannual.json")
    with ref.open("r", encoding="utf-8") as fh:
        return json.load(fh)
