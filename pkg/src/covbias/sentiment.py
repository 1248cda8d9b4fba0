"""Annotator-score aggregation, sentiment classes and inter-annotator agreement.

Aggregate scores live on the eleven-point grid -1, -0.8, ..., 0.8, 1 and are
kept as exact rationals (fifths) internally so that class membership never
depends on float rounding; floats appear only at serialization.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import LexiconError

Score = Union[int, float, Fraction]

VALID_RAW_SCORES = (-1, 0, 1)


class SentimentClass(str, Enum):
    STRONG_NEGATIVE = "strong_negative"
    WEAKLY_NEGATIVE = "weakly_negative"
    NEUTRAL = "neutral"
    WEAKLY_POSITIVE = "weakly_positive"
    STRONG_POSITIVE = "strong_positive"


# Bucket edges in fifths of the aggregate score (score * 5).
_CLASS_BY_FIFTHS = {
    -5: SentimentClass.STRONG_NEGATIVE,
    -4: SentimentClass.STRONG_NEGATIVE,
    -3: SentimentClass.WEAKLY_NEGATIVE,
    -2: SentimentClass.WEAKLY_NEGATIVE,
    -1: SentimentClass.NEUTRAL,
    0: SentimentClass.NEUTRAL,
    1: SentimentClass.NEUTRAL,
    2: SentimentClass.WEAKLY_POSITIVE,
    3: SentimentClass.WEAKLY_POSITIVE,
    4: SentimentClass.STRONG_POSITIVE,
    5: SentimentClass.STRONG_POSITIVE,
}


def aggregate_score(scores: Sequence[int]) -> Fraction:
    """Mean of the five annotator scores, as an exact rational.

    The result is one of the eleven values k/5, k = -5..5.
    """
    if len(scores) != 5:
        raise ValueError(f"expected exactly 5 annotator scores, got {len(scores)}")
    for s in scores:
        if s not in VALID_RAW_SCORES:
            raise ValueError(f"annotator score {s!r} not in {{-1, 0, 1}}")
    return Fraction(sum(scores), 5)


def score_fifths(score: Score) -> int:
    """Map an aggregate score to its grid position k = score * 5 in -5..5.

    Raises ValueError for values off the eleven-point grid; this guards
    against float drift sneaking into class assignment.
    """
    if isinstance(score, (int, Fraction)):
        k = Fraction(score) * 5
        if k.denominator != 1 or not -5 <= k <= 5:
            raise ValueError(f"score {score} is not on the (k-5)/5 grid")
        return int(k)
    k = score * 5.0
    rounded = round(k)
    if abs(k - rounded) > 1e-9 or not -5 <= rounded <= 5:
        raise ValueError(f"score {score} is not on the (k-5)/5 grid")
    return int(rounded)


def classify(score: Score) -> SentimentClass:
    """Sentiment class of an aggregate score on the eleven-point grid."""
    return _CLASS_BY_FIFTHS[score_fifths(score)]


@dataclass(frozen=True)
class AnnotationMatrix:
    """Annotator scores per lexicon word; missing cells are None.

    Rows are keyed by (lemma, upos). Rows with fewer than two ratings
    carry no agreement information and are excluded from alpha.
    """

    rows: Mapping[tuple[str, str], tuple[Optional[int], ...]]

    @classmethod
    def from_csv(cls, path) -> "AnnotationMatrix":
        rows: dict[tuple[str, str], tuple[Optional[int], ...]] = {}
        with open(path, encoding="utf-8-sig", newline="") as fh:
            for lineno, rec in enumerate(csv.reader(fh), start=1):
                if not rec or all(not c.strip() for c in rec):
                    continue
                if len(rec) < 3:
                    raise LexiconError(
                        f"{path}: line {lineno}: expected lemma,upos,scores..."
                    )
                key = (rec[0].strip(), rec[1].strip())
                if key in rows:
                    raise LexiconError(f"{path}: duplicate row for {key}")
                cells = []
                for c in rec[2:]:
                    c = c.strip()
                    if not c:
                        cells.append(None)
                        continue
                    v = int(c)
                    if v not in VALID_RAW_SCORES:
                        raise LexiconError(
                            f"{path}: line {lineno}: score {v} not in {{-1, 0, 1}}"
                        )
                    cells.append(v)
                rows[key] = tuple(cells)
        return cls(rows)

    def units(self) -> list[list[int]]:
        """Rating lists of the units with at least two ratings."""
        out = []
        for cells in self.rows.values():
            ratings = [c for c in cells if c is not None]
            if len(ratings) >= 2:
                out.append(ratings)
        return out


@dataclass(frozen=True)
class AlphaResult:
    value: float
    d_o: float
    d_e: float
    marginals: dict[int, int]
    n_units: int
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.value,
            "D_o": self.d_o,
            "D_e": self.d_e,
            "value_marginals": {str(k): v for k, v in sorted(self.marginals.items())},
            "units": self.n_units,
            "degenerate": self.degenerate,
        }


def _ordinal_distances(values: Sequence, marginals: Mapping) -> dict:
    """delta^2(c, k) = (sum of marginals from c to k - (n_c + n_k)/2)^2."""
    dist = {}
    for i, c in enumerate(values):
        for j in range(i, len(values)):
            k = values[j]
            between = sum(Fraction(marginals[values[g]]) for g in range(i, j + 1))
            d2 = (between - Fraction(marginals[c] + marginals[k], 2)) ** 2
            dist[(c, k)] = d2
            dist[(k, c)] = d2
    return dist


def krippendorff_alpha(
    matrix: Union[AnnotationMatrix, Iterable[Sequence[int]]],
) -> AlphaResult:
    """Krippendorff's alpha with the ordinal metric.

    Accepts an AnnotationMatrix or any iterable of per-unit rating lists.
    Computed from the coincidence matrix; the ordinal distance weights use
    the coincidence value marginals. Exact rational arithmetic throughout,
    so permutation and duplication invariances hold to the bit.
    """
    if isinstance(matrix, AnnotationMatrix):
        units = matrix.units()
    else:
        units = [list(u) for u in matrix if len(u) >= 2]
    if len(units) < 2:
        raise ValueError("alpha needs at least 2 units with >= 2 ratings each")

    marginals: dict[int, int] = {}
    for ratings in units:
        for r in ratings:
            marginals[r] = marginals.get(r, 0) + 1
    values = sorted(marginals)
    n = sum(marginals.values())

    # Coincidence matrix: ordered pairs of distinct positions within a unit,
    # weighted by 1/(m_u - 1).
    coincidence: dict[tuple[int, int], Fraction] = {}
    for ratings in units:
        w = Fraction(1, len(ratings) - 1)
        for i, a in enumerate(ratings):
            for j, b in enumerate(ratings):
                if i != j:
                    coincidence[(a, b)] = coincidence.get((a, b), Fraction(0)) + w

    dist = _ordinal_distances(values, marginals)

    d_o = sum(coincidence[p] * dist[p] for p in coincidence) / n
    d_e = Fraction(0)
    for c in values:
        for k in values:
            if c != k:
                d_e += Fraction(marginals[c] * marginals[k]) * dist[(c, k)]
    d_e /= n * (n - 1)

    if d_e == 0:
        return AlphaResult(1.0, float(d_o), 0.0, marginals, len(units), degenerate=True)
    alpha = 1 - d_o / d_e
    return AlphaResult(float(alpha), float(d_o), float(d_e), marginals, len(units))
