"""Report assembly: sentiment fraction tables, distinctive-word rankings,
descriptive breakdowns and deterministic serialization helpers."""

from __future__ import annotations

import bisect
import csv
import json
import logging
from typing import Optional, Sequence

from .bias import LeaveOneOutResult
from .extraction import DescriptiveStats
from .lexicon import Lexicon
from .model import Category, Gender, PersonalizationRecord
from .sentiment import SentimentClass, classify

log = logging.getLogger(__name__)

SENTIMENT_COLUMNS = [cls.value for cls in SentimentClass]


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def sentiment_fraction_rows(
    records: Sequence[PersonalizationRecord],
    lexicon: Lexicon,
) -> list[list]:
    """Per category: lexicon class distribution plus per-gender fractions.

    Gender rows are fractions of record events over the five sentiment
    classes and sum to 1; empty (category, gender) slices are omitted
    with a warning.
    """
    rows: list[list] = []
    for category in Category:
        dist = lexicon.class_distribution(category)
        total = sum(dist.values())
        if total:
            rows.append(
                [category.value, "lexicon"]
                + [dist[cls] / total for cls in SentimentClass]
            )
        for gender in (Gender.M, Gender.F):
            tally = {cls: 0 for cls in SentimentClass}
            n = 0
            for rec in records:
                if rec.category == category and rec.gender == gender:
                    tally[classify(rec.aggregate_sentiment)] += 1
                    n += 1
            if n == 0:
                log.warning(
                    "no records for category=%s gender=%s; row omitted",
                    category.value,
                    gender.value,
                )
                continue
            rows.append(
                [category.value, gender.value]
                + [tally[cls] / n for cls in SentimentClass]
            )
    return rows


def distinctive_word_rows(
    loo: LeaveOneOutResult,
    gender: Gender,
    lexicon: Optional[Lexicon] = None,
    category: Optional[Category] = None,
    negative_only: bool = False,
) -> list[list]:
    """Ranked distinctive words for one gender: lemma, upos, weight, diss.

    A category filter keeps only lexicon words of that category; the
    negative-only variant additionally keeps words classed as negative.
    """
    rows = []
    for word in loo.distinctive_for(gender):
        if category is not None or negative_only:
            entry = lexicon.get(word.lemma, word.upos) if lexicon else None
            if entry is None:
                continue
            if category is not None and entry.category != category:
                continue
            if negative_only and entry.sentiment not in (
                SentimentClass.STRONG_NEGATIVE,
                SentimentClass.WEAKLY_NEGATIVE,
            ):
                continue
        rows.append(
            [word.lemma, word.upos, float(word.weight), float(word.diss_without)]
        )
    return rows


def table1_rows(descriptives: DescriptiveStats) -> list[list]:
    """Dataset breakdown rows mirroring the coverage/personalization layout."""
    cov = descriptives.coverage.to_json_dict()
    pers = descriptives.personalization.to_json_dict()
    rows = []
    for field in ("politicians", "contents", "sentences", "words", "distinct_words"):
        rows.append(
            [
                field,
                cov["F"][field],
                cov["M"][field],
                pers["F"][field],
                pers["M"][field],
            ]
        )
    return rows


def ccdf_points(values: Sequence[int]) -> list[tuple[int, float]]:
    """P(V >= x) for x = 0..max(V); equals 1 at x = 0 for nonempty data."""
    if not values:
        return []
    n = len(values)
    ordered = sorted(values)
    out = []
    for x in range(0, ordered[-1] + 1):
        idx = bisect.bisect_left(ordered, x)
        out.append((x, (n - idx) / n))
    return out
