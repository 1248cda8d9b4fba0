"""Daily personalization trends: moving averages, dominance shares and the
Simpson-rule area between the gender trend curves."""

from __future__ import annotations

import datetime
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

Point = tuple[float, float]
SeriesLike = Union["DailySeries", Sequence[Point]]

MA_WINDOW = 90


@dataclass(frozen=True)
class DailySeries:
    """Ordered (date, fraction) pairs; gaps allowed, dates strictly increasing."""

    points: tuple[tuple[datetime.date, float], ...]

    def __post_init__(self) -> None:
        for (d0, _), (d1, _) in zip(self.points, self.points[1:]):
            if d1 <= d0:
                raise ValueError("dates must be strictly increasing")
        for _, v in self.points:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"daily fraction {v} outside [0, 1]")

    @property
    def dates(self) -> list[datetime.date]:
        return [d for d, _ in self.points]

    @property
    def values(self) -> np.ndarray:
        return np.asarray([v for _, v in self.points], dtype=float)

    def zero_filled(self) -> "DailySeries":
        """Every calendar day between first and last, missing days as 0."""
        if not self.points:
            return self
        lookup = dict(self.points)
        start, end = self.points[0][0], self.points[-1][0]
        days = (end - start).days + 1
        filled = tuple(
            (start + datetime.timedelta(days=i), lookup.get(start + datetime.timedelta(days=i), 0.0))
            for i in range(days)
        )
        return DailySeries(filled)


def moving_average(series: DailySeries, window: int = MA_WINDOW) -> DailySeries:
    """Trailing mean over the last `window` days of the zero-filled series.

    A day with no personalized mentions genuinely has fraction zero, so
    missing days are filled with 0 before averaging (not interpolated);
    the output starts at the first day with a full window behind it.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    filled = series.zero_filled()
    values = filled.values
    if len(values) < window:
        raise ValueError(
            f"series spans {len(values)} days, shorter than the {window}-day window"
        )
    means = np.lib.stride_tricks.sliding_window_view(values, window).mean(axis=1)
    dates = filled.dates[window - 1 :]
    return DailySeries(tuple(zip(dates, (float(m) for m in means))))


def _as_xy(series: SeriesLike) -> list[Point]:
    if isinstance(series, DailySeries):
        return [(float(d.toordinal()), v) for d, v in series.points]
    return [(float(x), float(y)) for x, y in series]


def _aligned(a: SeriesLike, b: SeriesLike) -> tuple[list[float], list[float], list[float]]:
    pa = dict(_as_xy(a))
    pb = dict(_as_xy(b))
    common = sorted(set(pa) & set(pb))
    if not common:
        raise ValueError("series domains are disjoint")
    return common, [pa[x] for x in common], [pb[x] for x in common]


def dominance_fractions(
    f_series: SeriesLike, m_series: SeriesLike
) -> tuple[float, float, float]:
    """Shares of days where each trend strictly dominates, plus the tie share."""
    _, fv, mv = _aligned(f_series, m_series)
    n = len(fv)
    f_days = sum(1 for a, b in zip(fv, mv) if a > b)
    m_days = sum(1 for a, b in zip(fv, mv) if b > a)
    return f_days / n, m_days / n, (n - f_days - m_days) / n


# ---------------------------------------------------------------------------
# Simpson integration
# ---------------------------------------------------------------------------


def _chunk_integral(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Integral of the interpolating polynomial through 2-4 points.

    On uniform grids this reproduces the trapezoid, Simpson 1/3 and
    Simpson 3/8 rules exactly; on non-uniform chunks (which arise only at
    inserted zero crossings) it integrates the interpolant through the
    same points. Coordinates are shifted to the chunk origin to keep the
    Vandermonde solve well conditioned.
    """
    n = len(xs)
    if n == 2:
        return (xs[1] - xs[0]) * (ys[0] + ys[1]) / 2
    u = np.asarray(xs, dtype=float) - xs[0]
    v = np.vander(u, n, increasing=True)
    coef = np.linalg.solve(v, np.asarray(ys, dtype=float))
    top = u[-1]
    return float(sum(c * top ** (k + 1) / (k + 1) for k, c in enumerate(coef)))


def simpson_integral(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Composite Simpson integral over an ordered grid.

    Pairs of intervals use the 1/3 rule; an odd interval count is finished
    with the 3/8 rule on the final three intervals; a single interval
    falls back to the trapezoid.
    """
    if len(xs) != len(ys):
        raise ValueError("xs and ys differ in length")
    if len(xs) < 2:
        return 0.0
    intervals = len(xs) - 1
    total = 0.0
    i = 0
    while intervals - i > 0:
        left = intervals - i
        if left == 1:
            total += _chunk_integral(xs[i : i + 2], ys[i : i + 2])
            i += 1
        elif left == 3:
            total += _chunk_integral(xs[i : i + 4], ys[i : i + 4])
            i += 3
        else:
            total += _chunk_integral(xs[i : i + 3], ys[i : i + 3])
            i += 2
    return total


def _split_segments(xs: Sequence[float], ds: Sequence[float]) -> list[tuple[int, list[Point]]]:
    """Maximal sign-constant runs, with interpolated zero crossings inserted.

    Exact zeros and inserted crossings act as shared segment boundaries;
    all-zero runs carry no sign and are dropped.
    """
    segments: list[tuple[int, list[Point]]] = []
    current: list[Point] = [(xs[0], ds[0])]
    cur_sign = int(np.sign(ds[0]))

    for i in range(1, len(xs)):
        x, d = xs[i], ds[i]
        s = int(np.sign(d))
        if cur_sign == 0:
            current.append((x, d))
            cur_sign = s
            if s == 0:
                current = [(x, 0.0)]
        elif s == cur_sign:
            current.append((x, d))
        elif s == 0:
            current.append((x, 0.0))
            segments.append((cur_sign, current))
            current = [(x, 0.0)]
            cur_sign = 0
        else:
            prev_x, prev_d = current[-1]
            cross = prev_x + prev_d / (prev_d - d) * (x - prev_x)
            current.append((cross, 0.0))
            segments.append((cur_sign, current))
            current = [(cross, 0.0), (x, d)]
            cur_sign = s
    if cur_sign != 0 and len(current) > 1:
        segments.append((cur_sign, current))
    return segments


def area_decomposition(
    f_series: SeriesLike, m_series: SeriesLike
) -> tuple[float, float, float]:
    """Area between two trend curves, split by which one dominates.

    The pointwise difference is cut into maximal sign-constant segments
    (zero crossings located by linear interpolation and inserted as grid
    points); each segment is integrated with the composite Simpson rule.
    Returns (A_F, A_M, A) with A = A_F + A_M by construction.
    """
    xs, fv, mv = _aligned(f_series, m_series)
    if len(xs) < 3:
        raise ValueError("area decomposition needs at least 3 aligned points")
    ds = [a - b for a, b in zip(fv, mv)]
    a_f = 0.0
    a_m = 0.0
    for sign, seg in _split_segments(xs, ds):
        sx = [p[0] for p in seg]
        sy = [p[1] for p in seg]
        piece = simpson_integral(sx, sy)
        if sign > 0:
            a_f += piece
        elif sign < 0:
            a_m += -piece
    return a_f, a_m, a_f + a_m
