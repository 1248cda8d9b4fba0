"""Chi-square independence tests, sentiment jittering, quantile regression
on the gender x source dummy design, and bootstrap significance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .bias import CountTable
from .model import Gender, SourceType
from .sentiment import score_fifths

DEFAULT_TAUS = (0.1, 0.25, 0.5, 0.75, 0.9)
JITTER_HALF_WIDTH = 0.05  # a quarter of the 0.2 grid step: ties break,
# class membership never changes


# ---------------------------------------------------------------------------
# Chi-square test of independence on a 2x2 table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiSquareResult:
    observed: tuple[tuple[float, float], tuple[float, float]]
    expected: tuple[tuple[float, float], tuple[float, float]]
    statistic: float
    p_value: float
    residual_signs: tuple[tuple[str, str], tuple[str, str]]

    def to_json_dict(self) -> dict:
        return {
            "observed": [list(r) for r in self.observed],
            "expected": [list(r) for r in self.expected],
            "chi2": self.statistic,
            "p_value": self.p_value,
            "residual_signs": [list(r) for r in self.residual_signs],
        }


def chi_square(observed: Sequence[Sequence[float]]) -> ChiSquareResult:
    """Pearson chi-square statistic for a 2x2 contingency table.

    Expected counts assume independence of rows and columns; each cell is
    additionally labelled higher/lower than expected.
    """
    obs = [[float(observed[i][j]) for j in range(2)] for i in range(2)]
    if any(v < 0 for row in obs for v in row):
        raise ValueError("observed counts must be nonnegative")
    rows = [sum(r) for r in obs]
    cols = [obs[0][j] + obs[1][j] for j in range(2)]
    total = sum(rows)
    if any(m <= 0 for m in rows + cols):
        raise ValueError("chi-square undefined: a marginal is zero")
    expected = [[rows[i] * cols[j] / total for j in range(2)] for i in range(2)]
    stat = sum(
        (obs[i][j] - expected[i][j]) ** 2 / expected[i][j]
        for i in range(2)
        for j in range(2)
    )

    def sign(o: float, e: float) -> str:
        if o > e:
            return "higher"
        if o < e:
            return "lower"
        return "equal"

    return ChiSquareResult(
        observed=tuple(tuple(r) for r in obs),
        expected=tuple(tuple(r) for r in expected),
        statistic=stat,
        p_value=math.erfc(math.sqrt(stat / 2)),  # chi2 survival, 1 dof
        residual_signs=tuple(
            tuple(sign(obs[i][j], expected[i][j]) for j in range(2)) for i in range(2)
        ),
    )


def contingency_by_source(
    table: CountTable,
) -> tuple[tuple[int, int], tuple[int, int]]:
    """Word counts as (traditional, online) rows x (F, M) columns."""
    counts = table.source_gender_counts()
    return tuple(
        tuple(counts.get((st, g), 0) for g in (Gender.F, Gender.M))
        for st in (SourceType.TRADITIONAL, SourceType.ONLINE)
    )


# ---------------------------------------------------------------------------
# Jittering
# ---------------------------------------------------------------------------


def jitter(
    scores: Sequence[Union[int, float, Fraction]],
    seed: int,
    h: float = JITTER_HALF_WIDTH,
) -> np.ndarray:
    """Add uniform (-h, h) noise to grid sentiment scores, seeded.

    Inputs must lie on the eleven-point grid; with the default h the
    jittered value stays within 0.05 of its grid point, so rounding back
    to the grid recovers the original sentiment class.
    """
    if h < 0:
        raise ValueError("jitter half-width must be nonnegative")
    grid = np.asarray([score_fifths(s) / 5.0 for s in scores], dtype=float)
    if len(grid) == 0:
        return grid
    if h == 0:
        return grid
    u = np.random.default_rng(seed).uniform(-h, h, size=len(grid))
    return grid + u


# ---------------------------------------------------------------------------
# Quantile regression on the saturated dummy design
# ---------------------------------------------------------------------------


def pinball_loss(y: np.ndarray, fitted: np.ndarray, tau: float) -> float:
    """Total check loss rho_tau summed over observations."""
    u = np.asarray(y, dtype=float) - np.asarray(fitted, dtype=float)
    return float(np.sum(u * (tau - (u < 0))))


def _as_tau_fraction(tau: Union[float, Fraction]) -> Fraction:
    frac = Fraction(str(tau)) if not isinstance(tau, Fraction) else tau
    if not 0 < frac < 1:
        raise ValueError(f"tau must be in (0, 1), got {tau}")
    return frac


def cell_quantile(values: Sequence[float], tau: Union[float, Fraction]) -> float:
    """Pinball-optimal sample quantile with deterministic tie handling.

    When n*tau is not an integer the minimizer is the unique order
    statistic of rank ceil(n*tau). When it is an integer the minimizers
    form an interval between two order statistics and the midpoint is
    returned, which keeps antisymmetric samples at exactly zero.
    """
    if not len(values):
        raise ValueError("empty cell")
    frac = _as_tau_fraction(tau)
    ordered = sorted(float(v) for v in values)
    n = len(ordered)
    m = frac * n
    if m.denominator == 1:
        k = int(m)
        if k >= n:
            return ordered[-1]
        return (ordered[k - 1] + ordered[k]) / 2
    return ordered[math.ceil(m) - 1]


@dataclass(frozen=True)
class QuantileModel:
    tau: float
    coefficients: tuple[Optional[float], Optional[float], Optional[float], Optional[float]]
    cell_quantiles: dict[tuple[int, int], float]
    cell_sizes: dict[tuple[int, int], int]
    loss: float

    def to_json_dict(self) -> dict:
        names = ("intercept", "gender", "source", "gender_x_source")
        return {
            "tau": self.tau,
            "coefficients": dict(zip(names, self.coefficients)),
            "cells": {
                f"g{g}s{s}": {"quantile": q, "n": self.cell_sizes[(g, s)]}
                for (g, s), q in sorted(self.cell_quantiles.items())
            },
            "loss": self.loss,
        }


def quantile_regression(
    y: Sequence[float],
    gender_dummy: Sequence[int],
    source_dummy: Sequence[int],
    tau: Union[float, Fraction],
) -> QuantileModel:
    """Fit Quantile(Y) = b0 + b1*Gender + b2*Source + b3*Gender*Source.

    Dummy coding: Gender = 1 for women, Source = 1 for online outlets, so
    the reference cell is men/traditional. The design is saturated, so the
    check-loss program separates by cell and is solved exactly: each
    observed cell's fitted value is its pinball-optimal quantile and the
    coefficients are recovered from the cell fits. Every cell implied by
    the dummy levels present in the data must be nonempty; coefficients
    whose cells are outside the design are not identified and reported as
    None.
    """
    y = np.asarray(list(y), dtype=float)
    g = np.asarray(list(gender_dummy), dtype=int)
    s = np.asarray(list(source_dummy), dtype=int)
    if not (len(y) == len(g) == len(s)):
        raise ValueError("y, gender and source must have equal length")
    if len(y) == 0:
        raise ValueError("empty sample")
    if not set(np.unique(g)) <= {0, 1} or not set(np.unique(s)) <= {0, 1}:
        raise ValueError("dummies must be 0/1")

    cells: dict[tuple[int, int], np.ndarray] = {}
    for gv in np.unique(g):
        for sv in np.unique(s):
            members = y[(g == gv) & (s == sv)]
            if len(members) == 0:
                raise ValueError(f"empty design cell gender={gv}, source={sv}")
            cells[(int(gv), int(sv))] = members

    frac = _as_tau_fraction(tau)
    fits = {cell: cell_quantile(vals, frac) for cell, vals in cells.items()}
    q = fits.get

    b0 = q((0, 0))
    b1 = fits[(1, 0)] - b0 if {(1, 0), (0, 0)} <= fits.keys() else None
    b2 = fits[(0, 1)] - b0 if {(0, 1), (0, 0)} <= fits.keys() else None
    b3 = (
        fits[(1, 1)] - fits[(1, 0)] - fits[(0, 1)] + fits[(0, 0)]
        if len(fits) == 4
        else None
    )
    if b0 is None:
        raise ValueError("reference cell gender=0, source=0 is empty")

    loss = sum(
        pinball_loss(vals, np.full(len(vals), fits[cell]), float(frac))
        for cell, vals in cells.items()
    )
    return QuantileModel(
        tau=float(frac),
        coefficients=(b0, b1, b2, b3),
        cell_quantiles=fits,
        cell_sizes={cell: len(vals) for cell, vals in cells.items()},
        loss=loss,
    )


# ---------------------------------------------------------------------------
# Bootstrap significance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BootstrapCI:
    lower: Optional[float]
    upper: Optional[float]
    significant: Optional[bool]

    def to_json_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "significant": self.significant}


@dataclass(frozen=True)
class BootstrapResult:
    tau: float
    n_replicates: int
    discarded: int
    intervals: tuple[BootstrapCI, BootstrapCI, BootstrapCI, BootstrapCI]

    def to_json_dict(self) -> dict:
        names = ("intercept", "gender", "source", "gender_x_source")
        return {
            "tau": self.tau,
            "replicates": self.n_replicates,
            "discarded": self.discarded,
            "intervals": {n: ci.to_json_dict() for n, ci in zip(names, self.intervals)},
        }


def bootstrap_significance(
    y: Sequence[float],
    gender_dummy: Sequence[int],
    source_dummy: Sequence[int],
    tau: Union[float, Fraction],
    n_replicates: int,
    seed: int,
) -> BootstrapResult:
    """Case-resampling percentile intervals for the regression coefficients.

    Each replicate resamples rows with replacement using a seed derived
    from (seed, replicate index), so replicates are reproducible and
    order-independent. Resamples that lose a design cell are discarded and
    redrawn, up to 10x the replicate budget. A coefficient is flagged
    significant when its 95% interval excludes zero.
    """
    if n_replicates < 100:
        raise ValueError("bootstrap needs at least 100 replicates")
    y = np.asarray(list(y), dtype=float)
    g = np.asarray(list(gender_dummy), dtype=int)
    s = np.asarray(list(source_dummy), dtype=int)
    n = len(y)
    base = quantile_regression(y, g, s, tau)  # validates the design
    needed = set(base.cell_quantiles)

    draws: list[tuple[Optional[float], ...]] = []
    attempts = 0
    discarded = 0
    rep = 0
    while len(draws) < n_replicates:
        if attempts >= 10 * n_replicates:
            raise RuntimeError(
                "bootstrap exhausted its redraw budget without filling "
                f"{n_replicates} replicates ({discarded} discarded)"
            )
        rng = np.random.default_rng([seed, rep])
        rep += 1
        attempts += 1
        idx = rng.integers(0, n, size=n)
        cells = {(int(gv), int(sv)) for gv, sv in zip(g[idx], s[idx])}
        if cells != needed:
            discarded += 1
            continue
        model = quantile_regression(y[idx], g[idx], s[idx], tau)
        draws.append(model.coefficients)

    intervals = []
    for j in range(4):
        vals = [d[j] for d in draws]
        if any(v is None for v in vals):
            intervals.append(BootstrapCI(None, None, None))
            continue
        arr = np.asarray(vals, dtype=float)
        lo, hi = (float(np.percentile(arr, p)) for p in (2.5, 97.5))
        intervals.append(BootstrapCI(lo, hi, not (lo <= 0.0 <= hi)))
    return BootstrapResult(
        tau=float(_as_tau_fraction(tau)),
        n_replicates=n_replicates,
        discarded=discarded,
        intervals=tuple(intervals),
    )
