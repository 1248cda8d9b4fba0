"""Gender-adjusted coverage statistics.

Count tables aggregate word events per gender (and optional category,
source type and day); correction factors rescale for the structural
imbalance in both representation and coverage; on top of those sit the
per-word coverage bias index, distribution summaries, the dissimilarity
index and its leave-one-out variant used to rank gender-distinctive words.

All index arithmetic is exact (fractions over integer counts); floats
appear only when results are serialized.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .model import Category, Gender, SourceType

WordKey = tuple[str, str]  # (lemma, upos)
CellKey = tuple[
    str,
    str,
    Gender,
    Optional[Category],
    Optional[SourceType],
    Optional[datetime.date],
]
RATE_MODES = ("ratio", "literal")


class CountTable:
    """Associative aggregate of word-event counts.

    Cells are keyed by (lemma, upos, gender, category, source_type, date);
    category is None for words outside the lexicon. Politician identities
    are tracked per (gender, category, source_type) so that slices report
    their own politician tallies. Merging tables is cellwise addition plus
    set union, hence order-independent.
    """

    def __init__(self) -> None:
        self.cells: dict[CellKey, int] = {}
        self.pids: dict[tuple[Gender, Optional[Category], Optional[SourceType]], set[str]] = {}

    def add(
        self,
        lemma: str,
        upos: str,
        gender: Gender,
        category: Optional[Category] = None,
        source_type: Optional[SourceType] = None,
        date: Optional[datetime.date] = None,
        pid: Optional[str] = None,
        n: int = 1,
    ) -> None:
        if n < 0:
            raise ValueError("counts must be nonnegative")
        key = (lemma, upos, gender, category, source_type, date)
        self.cells[key] = self.cells.get(key, 0) + n
        if pid is not None:
            self.pids.setdefault((gender, category, source_type), set()).add(pid)

    def update(self, other: "CountTable") -> None:
        for key, n in other.cells.items():
            self.cells[key] = self.cells.get(key, 0) + n
        for key, pids in other.pids.items():
            self.pids.setdefault(key, set()).update(pids)

    @classmethod
    def merged(cls, tables: Iterable["CountTable"]) -> "CountTable":
        out = cls()
        for t in tables:
            out.update(t)
        return out

    # -- marginals ---------------------------------------------------------

    def total(self, gender: Gender) -> int:
        return sum(n for (_, _, g, _, _, _), n in self.cells.items() if g == gender)

    @property
    def grand_total(self) -> int:
        return sum(self.cells.values())

    def politicians(self, gender: Gender) -> int:
        seen: set[str] = set()
        for (g, _, _), pids in self.pids.items():
            if g == gender:
                seen.update(pids)
        return len(seen)

    def politician_ids(self, gender: Gender) -> set[str]:
        seen: set[str] = set()
        for (g, _, _), pids in self.pids.items():
            if g == gender:
                seen.update(pids)
        return seen

    def word_counts(self) -> dict[WordKey, dict[Gender, int]]:
        out: dict[WordKey, dict[Gender, int]] = {}
        for (lemma, upos, g, _, _, _), n in self.cells.items():
            per = out.setdefault((lemma, upos), {Gender.F: 0, Gender.M: 0})
            per[g] += n
        return out

    def word_categories(self) -> dict[WordKey, Optional[Category]]:
        """Lexicon category per word; None for out-of-lexicon words."""
        out: dict[WordKey, Optional[Category]] = {}
        for (lemma, upos, _, cat, _, _) in self.cells:
            key = (lemma, upos)
            if cat is not None or key not in out:
                out[key] = cat if cat is not None else out.get(key)
        return out

    def by_day(self, gender: Gender) -> dict[datetime.date, int]:
        out: dict[datetime.date, int] = {}
        for (_, _, g, _, _, day), n in self.cells.items():
            if g == gender and day is not None:
                out[day] = out.get(day, 0) + n
        return out

    def source_gender_counts(self) -> dict[tuple[SourceType, Gender], int]:
        out: dict[tuple[SourceType, Gender], int] = {}
        for (_, _, g, _, st, _), n in self.cells.items():
            if st is not None:
                out[(st, g)] = out.get((st, g), 0) + n
        return out

    # -- slicing -----------------------------------------------------------

    def slice(
        self,
        category: Optional[Category] = None,
        source_type: Optional[SourceType] = None,
        lexicon_only: bool = False,
    ) -> "CountTable":
        out = CountTable()
        for key, n in self.cells.items():
            _, _, _, cat, st, _ = key
            if category is not None and cat != category:
                continue
            if lexicon_only and cat is None:
                continue
            if source_type is not None and st != source_type:
                continue
            out.cells[key] = out.cells.get(key, 0) + n
        for (g, cat, st), pids in self.pids.items():
            if category is not None and cat != category:
                continue
            if lexicon_only and cat is None:
                continue
            if source_type is not None and st != source_type:
                continue
            out.pids.setdefault((g, cat, st), set()).update(pids)
        return out

    # -- serialization -----------------------------------------------------

    def to_csv_rows(self) -> list[tuple[str, str, str, str, str, int]]:
        """Date-aggregated rows (lemma, upos, gender, category, source_type, count)."""
        agg: dict[tuple[str, str, str, str, str], int] = {}
        for (lemma, upos, g, cat, st, _), n in self.cells.items():
            k = (
                lemma,
                upos,
                g.value,
                cat.value if cat is not None else "",
                st.value if st is not None else "",
            )
            agg[k] = agg.get(k, 0) + n
        return [k + (agg[k],) for k in sorted(agg)]

    def to_json_dict(self) -> dict:
        cells = [
            [
                lemma,
                upos,
                g.value,
                cat.value if cat is not None else None,
                st.value if st is not None else None,
                day.isoformat() if day is not None else None,
                n,
            ]
            for (lemma, upos, g, cat, st, day), n in sorted(
                self.cells.items(),
                key=lambda kv: tuple(str(x) for x in kv[0]),
            )
        ]
        pids = [
            [
                g.value,
                cat.value if cat is not None else None,
                st.value if st is not None else None,
                sorted(members),
            ]
            for (g, cat, st), members in sorted(
                self.pids.items(), key=lambda kv: tuple(str(x) for x in kv[0])
            )
        ]
        return {"cells": cells, "politicians": pids}

    @classmethod
    def from_json_dict(cls, d: dict) -> "CountTable":
        out = cls()
        for lemma, upos, g, cat, st, day, n in d["cells"]:
            key = (
                lemma,
                upos,
                Gender(g),
                Category(cat) if cat is not None else None,
                SourceType(st) if st is not None else None,
                datetime.date.fromisoformat(day) if day is not None else None,
            )
            out.cells[key] = out.cells.get(key, 0) + n
        for g, cat, st, members in d["politicians"]:
            key = (
                Gender(g),
                Category(cat) if cat is not None else None,
                SourceType(st) if st is not None else None,
            )
            out.pids.setdefault(key, set()).update(members)
        return out


# ---------------------------------------------------------------------------
# Correction factors and adjusted rates
# ---------------------------------------------------------------------------


def factors_from_marginals(
    d_f: int, d_m: int, n_f: int, n_m: int
) -> tuple[Fraction, Fraction]:
    """Correction factors from word totals and politician tallies.

    a_g = |D_g| / |G| is the average words per politician; each factor is
    a_g over the mean of the two averages, so c_F + c_M = 2 identically.
    """
    if n_f <= 0:
        raise ValueError("correction factor undefined: no women politicians")
    if n_m <= 0:
        raise ValueError("correction factor undefined: no men politicians")
    if d_f <= 0:
        raise ValueError("correction factor undefined: no words for women")
    if d_m <= 0:
        raise ValueError("correction factor undefined: no words for men")
    a_f = Fraction(d_f, n_f)
    a_m = Fraction(d_m, n_m)
    a_mean = (a_f + a_m) / 2
    return a_f / a_mean, a_m / a_mean


def correction_factors(table: CountTable) -> tuple[Fraction, Fraction]:
    return factors_from_marginals(
        table.total(Gender.F),
        table.total(Gender.M),
        table.politicians(Gender.F),
        table.politicians(Gender.M),
    )


def _adjusted_rate(
    count: int, d_total: int, factor: Fraction, mode: str
) -> Fraction:
    rate = Fraction(count, d_total)
    if mode == "ratio":
        return rate / factor
    if mode == "literal":
        return rate / (factor * d_total)
    raise ValueError(f"unknown rates mode {mode!r}")


def adjusted_rates(
    table: CountTable,
    factors: tuple[Fraction, Fraction],
    mode: str = "ratio",
) -> dict[WordKey, tuple[Fraction, Fraction]]:
    """Per-word gender-adjusted incidence rates.

    mode="ratio" divides the raw incidence rate by the correction factor;
    mode="literal" additionally divides by the gender word total, exactly
    as printed. Words with zero counts for both genders map to (0, 0).
    """
    c_f, c_m = factors
    d_f = table.total(Gender.F)
    d_m = table.total(Gender.M)
    out: dict[WordKey, tuple[Fraction, Fraction]] = {}
    for word, per in table.word_counts().items():
        out[word] = (
            _adjusted_rate(per[Gender.F], d_f, c_f, mode),
            _adjusted_rate(per[Gender.M], d_m, c_m, mode),
        )
    return out


def coverage_bias_index(rate_f: Fraction, rate_m: Fraction) -> Fraction:
    """Normalized difference of the adjusted rates; +1 women-exclusive."""
    total = rate_f + rate_m
    if total <= 0:
        raise ValueError("coverage bias index undefined: both rates are zero")
    return (rate_f - rate_m) / total


@dataclass(frozen=True)
class WordBias:
    lemma: str
    upos: str
    count_f: int
    count_m: int
    rate_f: Fraction
    rate_m: Fraction
    index: Fraction
    category: Optional[Category] = None

    @property
    def weight(self) -> int:
        return self.count_f + self.count_m


@dataclass(frozen=True)
class BiasProfile:
    mode: str
    c_f: Fraction
    c_m: Fraction
    words: tuple[WordBias, ...]
    excluded: int  # words with zero counts for both genders
    label: str = ""

    def select(self, category: Optional[Category]) -> tuple[WordBias, ...]:
        if category is None:
            return self.words
        return tuple(w for w in self.words if w.category == category)

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "mode": self.mode,
            "c_F": float(self.c_f),
            "c_M": float(self.c_m),
            "excluded_words": self.excluded,
            "words": [word_bias_json(w) for w in self.words],
        }


def word_bias_json(w: WordBias) -> dict:
    return {
        "lemma": w.lemma,
        "upos": w.upos,
        "category": w.category.value if w.category else None,
        "count_F": w.count_f,
        "count_M": w.count_m,
        "adjusted_rate_F": float(w.rate_f),
        "adjusted_rate_M": float(w.rate_m),
        "index": float(w.index),
        "weight": w.weight,
    }


def bias_profile(table: CountTable, mode: str = "ratio", label: str = "") -> BiasProfile:
    """Correction factors plus per-word adjusted rates and bias indices.

    Rates are relative to the whole table's gender totals; a word's
    category is carried along so distributions can be summarized per
    category without renormalizing.
    """
    factors = correction_factors(table)
    rates = adjusted_rates(table, factors, mode)
    counts = table.word_counts()
    categories = table.word_categories()
    words = []
    excluded = 0
    for key in sorted(rates):
        r_f, r_m = rates[key]
        if r_f == 0 and r_m == 0:
            excluded += 1
            continue
        per = counts[key]
        words.append(
            WordBias(
                lemma=key[0],
                upos=key[1],
                count_f=per[Gender.F],
                count_m=per[Gender.M],
                rate_f=r_f,
                rate_m=r_m,
                index=coverage_bias_index(r_f, r_m),
                category=categories.get(key),
            )
        )
    return BiasProfile(
        mode=mode,
        c_f=factors[0],
        c_m=factors[1],
        words=tuple(words),
        excluded=excluded,
        label=label,
    )


# ---------------------------------------------------------------------------
# Distribution summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryStats:
    mu: float
    gamma3: float
    q1: float
    d5: float
    q3: float
    d9: float
    iqr: float
    n_words: int
    total_weight: int
    weighting: str
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "mu": self.mu,
            "gamma3": self.gamma3,
            "Q1": self.q1,
            "D5": self.d5,
            "Q3": self.q3,
            "D9": self.d9,
            "IQR": self.iqr,
            "n_words": self.n_words,
            "total_weight": self.total_weight,
            "weighting": self.weighting,
            "degenerate": self.degenerate,
        }


def weighted_quantile(
    values: Sequence[Union[Fraction, float]],
    weights: Sequence[int],
    p: Fraction,
) -> Fraction:
    """Quantile of a weighted sample via inversion of the cumulative weights.

    Returns the smallest value whose cumulative weight reaches p times the
    total; when the target lands exactly on a cumulative boundary the
    inverse is set-valued and the midpoint of the bracketing values is
    returned (so symmetric data has median zero).
    """
    if not values:
        raise ValueError("empty sample")
    if len(values) != len(weights):
        raise ValueError("values and weights differ in length")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    pairs = sorted(
        (Fraction(v), w) for v, w in zip(values, weights) if w > 0
    )
    if not pairs:
        raise ValueError("all weights are zero")
    total = sum(w for _, w in pairs)
    target = p * total
    cum = 0
    for i, (v, w) in enumerate(pairs):
        cum += w
        if cum > target:
            return v
        if cum == target:
            if i + 1 < len(pairs):
                return (v + pairs[i + 1][0]) / 2
            return v
    return pairs[-1][0]


def interpolated_quantile(values: Sequence[float], p: float) -> float:
    """Unweighted quantile, linear interpolation between order statistics."""
    return float(np.quantile(np.asarray([float(v) for v in values]), p))


def index_summary(
    values: Sequence[Union[Fraction, float]],
    weights: Optional[Sequence[int]] = None,
) -> SummaryStats:
    """Weighted (or unweighted) mean, Fisher skewness and quantiles."""
    if not values:
        raise ValueError("cannot summarize an empty distribution")
    x = np.asarray([float(v) for v in values], dtype=float)
    if weights is None:
        w = np.ones(len(x))
        q1, d5, q3, d9 = (interpolated_quantile(x, p) for p in (0.25, 0.5, 0.75, 0.9))
        weighting = "none"
    else:
        w = np.asarray(list(weights), dtype=float)
        if w.sum() <= 0:
            raise ValueError("total weight must be positive")
        q1, d5, q3, d9 = (
            float(weighted_quantile(values, list(weights), Fraction(*p)))
            for p in ((1, 4), (1, 2), (3, 4), (9, 10))
        )
        weighting = "counts"
    total = w.sum()
    mu = float((w * x).sum() / total)
    m2 = float((w * (x - mu) ** 2).sum() / total)
    m3 = float((w * (x - mu) ** 3).sum() / total)
    degenerate = m2 == 0.0
    gamma3 = 0.0 if degenerate else m3 / m2**1.5
    return SummaryStats(
        mu=mu,
        gamma3=gamma3,
        q1=q1,
        d5=d5,
        q3=q3,
        d9=d9,
        iqr=q3 - q1,
        n_words=len(x),
        total_weight=int(sum(weights)) if weights is not None else len(x),
        weighting=weighting,
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class IndexDistribution:
    stats: SummaryStats
    bin_edges: tuple[float, ...]
    bin_weights: tuple[float, ...]
    density_x: tuple[float, ...]
    density_y: tuple[float, ...]
    bandwidth: float

    def to_json_dict(self) -> dict:
        return {
            "stats": self.stats.to_json_dict(),
            "histogram": {
                "edges": list(self.bin_edges),
                "weights": list(self.bin_weights),
            },
            "density": {
                "x": list(self.density_x),
                "y": list(self.density_y),
                "bandwidth": self.bandwidth,
            },
        }


def index_distribution(
    profile: BiasProfile,
    category: Optional[Category] = None,
    weighting: str = "counts",
    bins: int = 40,
    density_points: int = 201,
) -> IndexDistribution:
    """Summary statistics plus plot-ready histogram and kernel density.

    With a category, only that category's words enter; rates and indices
    stay as computed on the full table. Default weighting is the per-word
    total count; weighting="none" treats every word equally. The density
    is a Gaussian kernel estimate with Silverman bandwidth on a fixed
    grid over [-1, 1].
    """
    selected = profile.select(category)
    if not selected:
        raise ValueError(
            f"no words with a defined index in category "
            f"{category.value if category else 'all'}"
        )
    values = [w.index for w in selected]
    weights = [w.weight for w in selected] if weighting == "counts" else None
    stats = index_summary(values, weights)

    x = np.asarray([float(v) for v in values])
    w = (
        np.asarray([float(v) for v in weights])
        if weights is not None
        else np.ones(len(x))
    )
    hist, edges = np.histogram(x, bins=bins, range=(-1.0, 1.0), weights=w)

    total = w.sum()
    sigma = float(np.sqrt((w * (x - stats.mu) ** 2).sum() / total))
    n_eff = float(total**2 / (w**2).sum())
    spread = min(s for s in (sigma, stats.iqr / 1.34) if s > 0) if sigma > 0 else 0.0
    bandwidth = 0.9 * spread * n_eff ** (-1 / 5) if spread > 0 else 0.05
    grid = np.linspace(-1.0, 1.0, density_points)
    diff = (grid[:, None] - x[None, :]) / bandwidth
    dens = (w[None, :] * np.exp(-0.5 * diff**2)).sum(axis=1)
    dens /= total * bandwidth * np.sqrt(2 * np.pi)

    return IndexDistribution(
        stats=stats,
        bin_edges=tuple(float(e) for e in edges),
        bin_weights=tuple(float(h) for h in hist),
        density_x=tuple(float(g) for g in grid),
        density_y=tuple(float(d) for d in dens),
        bandwidth=bandwidth,
    )


# ---------------------------------------------------------------------------
# Dissimilarity and leave-one-out distinctive words
# ---------------------------------------------------------------------------


def _diss_from_counts(
    counts: dict[WordKey, dict[Gender, int]],
    d_f: int,
    d_m: int,
    n_f: int,
    n_m: int,
    mode: str,
    skip: Optional[WordKey] = None,
) -> Fraction:
    c_f, c_m = factors_from_marginals(d_f, d_m, n_f, n_m)
    acc = Fraction(0)
    for word, per in counts.items():
        if word == skip:
            continue
        r_f = _adjusted_rate(per[Gender.F], d_f, c_f, mode)
        r_m = _adjusted_rate(per[Gender.M], d_m, c_m, mode)
        acc += abs(r_f - r_m)
    return (c_f * c_m) / (c_f + c_m) * acc


def dissimilarity(
    table: CountTable,
    factors: Optional[tuple[Fraction, Fraction]] = None,
    mode: str = "ratio",
) -> Fraction:
    """Aggregate absolute gap between the gender rate distributions, in [0, 1]."""
    if factors is None:
        factors = correction_factors(table)
    c_f, c_m = factors
    rates = adjusted_rates(table, factors, mode)
    acc = sum((abs(r_f - r_m) for r_f, r_m in rates.values()), Fraction(0))
    return (c_f * c_m) / (c_f + c_m) * acc


@dataclass(frozen=True)
class LeaveOneOutWord:
    lemma: str
    upos: str
    diss_without: Optional[Fraction]
    weight: Optional[Fraction]  # base dissimilarity minus diss_without
    distinctive: bool
    gender: Gender


@dataclass(frozen=True)
class LeaveOneOutResult:
    base_diss: Fraction
    mode: str
    words: tuple[LeaveOneOutWord, ...]  # ranked by weight, descending

    def distinctive_for(self, gender: Gender) -> list[LeaveOneOutWord]:
        return [w for w in self.words if w.distinctive and w.gender == gender]


def leave_one_out(
    table: CountTable,
    factors: Optional[tuple[Fraction, Fraction]] = None,
    mode: str = "ratio",
    holdout: Optional[Iterable[WordKey]] = None,
) -> LeaveOneOutResult:
    """Dissimilarity after omitting each word, with distinctive labels.

    For each held-out word the correction factors and adjusted rates are
    recomputed on the reduced totals (politician tallies are table-level
    and unaffected by dropping one word) and the sum runs over every
    remaining word. A word is distinctive when its omission strictly
    lowers the dissimilarity; the gender label follows the larger
    original adjusted rate, women on ties. `holdout` restricts which
    words are held out (default: all of them); the dissimilarity sums
    always cover the whole table.
    """
    counts = table.word_counts()
    if len(counts) < 2:
        raise ValueError("leave-one-out needs at least 2 distinct words")
    if factors is None:
        factors = correction_factors(table)
    d_f = table.total(Gender.F)
    d_m = table.total(Gender.M)
    n_f = table.politicians(Gender.F)
    n_m = table.politicians(Gender.M)
    base = dissimilarity(table, factors, mode)
    base_rates = adjusted_rates(table, factors, mode)
    held = sorted(counts) if holdout is None else sorted(set(holdout) & counts.keys())

    out = []
    for word in held:
        per = counts[word]
        rd_f = d_f - per[Gender.F]
        rd_m = d_m - per[Gender.M]
        r_f, r_m = base_rates[word]
        gender = Gender.M if r_m > r_f else Gender.F
        if rd_f <= 0 or rd_m <= 0:
            # Removing the word would empty one gender's corpus; the
            # reduced-corpus factors are undefined.
            out.append(LeaveOneOutWord(word[0], word[1], None, None, False, gender))
            continue
        without = _diss_from_counts(counts, rd_f, rd_m, n_f, n_m, mode, skip=word)
        out.append(
            LeaveOneOutWord(
                lemma=word[0],
                upos=word[1],
                diss_without=without,
                weight=base - without,
                distinctive=without < base,
                gender=gender,
            )
        )
    def rank(w: LeaveOneOutWord):
        if w.weight is None:
            return (1, Fraction(0), w.lemma, w.upos)
        return (0, -w.weight, w.lemma, w.upos)

    out.sort(key=rank)
    return LeaveOneOutResult(base_diss=base, mode=mode, words=tuple(out))


# ---------------------------------------------------------------------------
# Reliability scenarios for the index
# ---------------------------------------------------------------------------


def reliability_curve(
    w_f: int,
    w_m: int,
    d_total: int,
    n_f: int,
    n_m: int,
    d_f_values: Sequence[int],
    mode: str = "ratio",
) -> list[Fraction]:
    """Index of one word as the split of the word total across genders varies.

    For each |D_F| on the grid (with |D_M| = total - |D_F|) the correction
    factors are recomputed and the index of a word with fixed per-gender
    counts evaluated. Used to check the ordering of the balanced and
    unbalanced-sample scenarios.
    """
    curve = []
    for d_f in d_f_values:
        d_m = d_total - d_f
        c_f, c_m = factors_from_marginals(d_f, d_m, n_f, n_m)
        r_f = _adjusted_rate(w_f, d_f, c_f, mode)
        r_m = _adjusted_rate(w_m, d_m, c_m, mode)
        curve.append(coverage_bias_index(r_f, r_m))
    return curve
