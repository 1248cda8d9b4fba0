"""End-to-end pipeline: config, resumable stages and the report bundle.

Stages communicate through files in the output directory, so each one can
be rerun from the previous stage's artifacts:

    extract  -> records.jsonl, counts.csv, count_table.json,
                descriptives.json, diagnostics.json
    analyze  -> bias_profile.json, summary_stats.json, chi_square.json,
                sentiment_fractions.csv, distinctive_*.csv, quantiles.csv,
                quantile_coefficients.json, temporal_*.json, trend_*.csv
    report   -> manifest.json, table1.csv, ccdf_*.csv

Given the same inputs, config and seed, the bundle is byte-identical on
rerun: every stochastic step derives its generator from the configured
seed and all serialization is order-stable.
"""

from __future__ import annotations

import concurrent.futures
import configparser
import dataclasses
import datetime
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from . import bias, inference, reporting, temporal
from .bias import CountTable
from .entities import RoleGazetteer
from .errors import ConfigError, StageError
from .extraction import DEFAULT_MODAL_LEMMAS, ExtractionResult, extract_records
from .ingestion import CorpusBundle, CorpusDiagnostics, read_corpus, read_metadata, read_stopwords
from .lexicon import Lexicon, read_lexicon
from .model import Category, Document, Gender, PersonalizationRecord, Sentence, SourceType
from .registry import PoliticianRegistry, read_registry
from .sentiment import AnnotationMatrix, krippendorff_alpha
from .temporal import DailySeries

log = logging.getLogger(__name__)

ATTRIBUTION_POLICY = "nearest-mention-in-tree-distance-ties-to-both"
FILL_POLICY = "missing-days-zero-filled"


@dataclass
class PipelineConfig:
    conllu: tuple[str, ...]
    metadata: str
    registry: str
    lexicon: str
    out: str
    stopwords: Optional[str] = None
    lemma_map: Optional[str] = None
    gazetteer: Optional[str] = None
    radius: int = 2
    direction: str = "undirected"
    rates_mode: str = "ratio"
    seed: int = 42
    jitter: float = 0.05
    ma_window: int = 90
    bootstrap: int = 200
    workers: int = 1
    bins: int = 40
    window_start: Optional[datetime.date] = None
    window_end: Optional[datetime.date] = None

    @classmethod
    def from_ini(cls, path, **overrides) -> "PipelineConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise ConfigError(f"config file {path!r} not found")
        if not parser.has_section("covbias"):
            raise ConfigError(f"{path}: missing [covbias] section")
        section = parser["covbias"]

        def get(key, default=None):
            value = section.get(key)
            return value if value not in (None, "") else default

        kwargs = {
            "conllu": tuple(
                p.strip() for p in (get("conllu") or "").split(",") if p.strip()
            ),
            "metadata": get("metadata"),
            "registry": get("registry"),
            "lexicon": get("lexicon"),
            "out": get("out"),
            "stopwords": get("stopwords"),
            "lemma_map": get("lemma_map"),
            "gazetteer": get("gazetteer"),
        }
        for key, cast in (
            ("radius", int),
            ("seed", int),
            ("ma_window", int),
            ("bootstrap", int),
            ("workers", int),
            ("bins", int),
            ("jitter", float),
        ):
            raw = get(key)
            if raw is not None:
                kwargs[key] = cast(raw)
        for key in ("direction", "rates_mode"):
            raw = get(key)
            if raw is not None:
                kwargs[key] = raw
        for key in ("window_start", "window_end"):
            raw = get(key)
            if raw is not None:
                kwargs[key] = datetime.date.fromisoformat(raw)
        for key, value in overrides.items():
            if value is not None:
                kwargs[key] = value
        missing = [k for k in ("metadata", "registry", "lexicon", "out") if not kwargs.get(k)]
        if missing or not kwargs["conllu"]:
            missing = (["conllu"] if not kwargs["conllu"] else []) + missing
            raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")
        return cls(**kwargs)

    def validate(self) -> None:
        for label, path in [("metadata", self.metadata), ("registry", self.registry), ("lexicon", self.lexicon)]:
            if not os.path.exists(path):
                raise ConfigError(f"{label} file does not exist: {path}")
        for path in self.conllu:
            if not os.path.exists(path):
                raise ConfigError(f"conllu file does not exist: {path}")
        for label, path in [
            ("stopwords", self.stopwords),
            ("lemma_map", self.lemma_map),
            ("gazetteer", self.gazetteer),
        ]:
            if path and not os.path.exists(path):
                raise ConfigError(f"{label} file does not exist: {path}")
        if self.radius < 1:
            raise ConfigError("radius must be >= 1")
        if self.direction not in ("undirected", "children"):
            raise ConfigError("direction must be 'undirected' or 'children'")
        if self.rates_mode not in bias.RATE_MODES:
            raise ConfigError(f"rates_mode must be one of {bias.RATE_MODES}")
        if self.jitter < 0:
            raise ConfigError("jitter must be nonnegative")
        if self.ma_window < 1:
            raise ConfigError("ma_window must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def window(self) -> Optional[tuple[datetime.date, datetime.date]]:
        if self.window_start and self.window_end:
            return (self.window_start, self.window_end)
        return None

    def bundle(self) -> CorpusBundle:
        return CorpusBundle(
            conllu=self.conllu,
            metadata=self.metadata,
            registry=self.registry,
            lexicon=self.lexicon,
            stopwords=self.stopwords,
            lemma_map=self.lemma_map,
            window=self.window(),
        )

    def to_json_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["conllu"] = list(self.conllu)
        for key in ("window_start", "window_end"):
            if out[key] is not None:
                out[key] = out[key].isoformat()
        return out

    def config_hash(self) -> str:
        canon = json.dumps(self.to_json_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def path(self, name: str) -> str:
        return os.path.join(self.out, name)


def derive_seed(seed: int, *indices: int) -> int:
    """Deterministic child seed for one stochastic step."""
    return int(np.random.SeedSequence([seed, *indices]).generate_state(1)[0])


def _load_side_inputs(cfg: PipelineConfig) -> tuple[PoliticianRegistry, Lexicon, RoleGazetteer]:
    registry = read_registry(cfg.registry)
    stopwords = read_stopwords(cfg.stopwords) if cfg.stopwords else set()
    lexicon = read_lexicon(cfg.lexicon, stopwords=stopwords if stopwords else None)
    gaz = RoleGazetteer.from_file(cfg.gazetteer) if cfg.gazetteer else RoleGazetteer()
    return registry, lexicon, gaz


# ---------------------------------------------------------------------------
# ingest-check
# ---------------------------------------------------------------------------


def ingest_check(cfg: PipelineConfig) -> dict:
    """Validate every input file and return a summary without writing."""
    cfg.validate()
    registry, lexicon, _ = _load_side_inputs(cfg)
    metadata = read_metadata(cfg.metadata, cfg.window())
    diagnostics = CorpusDiagnostics()
    docs: set[str] = set()
    sentences = 0
    tokens = 0
    for doc, sentence in read_corpus(cfg.bundle(), diagnostics):
        docs.add(doc.doc_id)
        sentences += 1
        tokens += len(sentence.tokens)
    return {
        "documents_parsed": len(docs),
        "documents_in_metadata": len(metadata),
        "sentences": sentences,
        "tokens": tokens,
        "politicians": len(registry),
        "lexicon_entries": len(lexicon),
        "rejected_sentences": len(diagnostics.rejected_sentences),
    }


# ---------------------------------------------------------------------------
# extract
# ---------------------------------------------------------------------------


def _doc_chunks(
    stream: Iterable[tuple[Document, Sentence]], docs_per_chunk: int
) -> Iterator[list[tuple[Document, Sentence]]]:
    chunk: list[tuple[Document, Sentence]] = []
    seen: set[str] = set()
    for doc, sentence in stream:
        if doc.doc_id not in seen and len(seen) >= docs_per_chunk:
            yield chunk
            chunk = []
            seen = set()
        seen.add(doc.doc_id)
        chunk.append((doc, sentence))
    if chunk:
        yield chunk


def _extract_chunk(args) -> ExtractionResult:
    pairs, registry, lexicon, radius, direction, variants = args
    return extract_records(
        pairs,
        registry,
        lexicon,
        radius=radius,
        direction=direction,
        gazetteer=RoleGazetteer(variants),
        modal_lemmas=DEFAULT_MODAL_LEMMAS,
    )


def stage_extract(cfg: PipelineConfig) -> ExtractionResult:
    cfg.validate()
    os.makedirs(cfg.out, exist_ok=True)
    registry, lexicon, gaz = _load_side_inputs(cfg)
    diagnostics = CorpusDiagnostics()
    stream = read_corpus(cfg.bundle(), diagnostics)

    result = ExtractionResult()
    if cfg.workers == 1:
        for chunk in _doc_chunks(stream, 500):
            result.merge(
                _extract_chunk(
                    (chunk, registry, lexicon, cfg.radius, cfg.direction, gaz.variants)
                )
            )
    else:
        tasks = (
            (chunk, registry, lexicon, cfg.radius, cfg.direction, gaz.variants)
            for chunk in _doc_chunks(stream, 200)
        )
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map() yields in submission order, so merging stays deterministic
            for part in pool.map(_extract_chunk, tasks):
                result.merge(part)

    with open(cfg.path("records.jsonl"), "w", encoding="utf-8", newline="\n") as fh:
        for rec in result.records:
            fh.write(json.dumps(rec.to_json_dict(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
    reporting.write_csv(
        cfg.path("counts.csv"),
        ["lemma", "upos", "gender", "category", "source_type", "count"],
        result.counts.to_csv_rows(),
    )
    reporting.write_json(cfg.path("count_table.json"), result.counts.to_json_dict())
    reporting.write_json(cfg.path("descriptives.json"), result.descriptives.to_json_dict())
    reporting.write_json(
        cfg.path("diagnostics.json"),
        {
            "ingest": diagnostics.to_json_dict(),
            "matching": result.diagnostics.to_json_dict(),
        },
    )
    return result


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _load_records(path) -> list[PersonalizationRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(PersonalizationRecord.from_json_dict(json.loads(line)))
    return out


def _daily_fraction_series(
    coverage_by_day: dict[datetime.date, int],
    personalization_by_day: dict[datetime.date, int],
    grid: list[datetime.date],
) -> DailySeries:
    points = []
    for day in grid:
        denom = coverage_by_day.get(day, 0)
        num = personalization_by_day.get(day, 0)
        points.append((day, num / denom if denom else 0.0))
    return DailySeries(tuple(points))


def stage_analyze(cfg: PipelineConfig) -> dict:
    cfg.validate()
    stopwords = read_stopwords(cfg.stopwords) if cfg.stopwords else set()
    lexicon = read_lexicon(cfg.lexicon, stopwords=stopwords if stopwords else None)
    with open(cfg.path("count_table.json"), encoding="utf-8") as fh:
        table = CountTable.from_json_dict(json.load(fh))
    records = _load_records(cfg.path("records.jsonl"))
    categories = list(Category)

    # ---- bias profile, dissimilarity, leave-one-out, summaries -----------
    # Rates and indices are computed against the full coverage totals;
    # categories only select which words each table/ranking reports.
    profiles_json: dict = {
        "rates_mode": cfg.rates_mode,
        "radius": cfg.radius,
        "direction": cfg.direction,
        "attribution": ATTRIBUTION_POLICY,
    }
    summaries: dict = {}
    try:
        profile = bias.bias_profile(table, mode=cfg.rates_mode, label="coverage")
    except ValueError as exc:
        log.warning("bias profile skipped: %s", exc)
        profile = None
        profiles_json["skipped"] = str(exc)
        summaries["skipped"] = str(exc)
    if profile is not None:
        factors = (profile.c_f, profile.c_m)
        diss = bias.dissimilarity(table, factors, cfg.rates_mode)
        profiles_json.update(
            {
                "c_F": float(profile.c_f),
                "c_M": float(profile.c_m),
                "dissimilarity": float(diss),
                "excluded_words": profile.excluded,
                "politicians": {
                    "F": table.politicians(Gender.F),
                    "M": table.politicians(Gender.M),
                },
                "word_totals": {
                    "F": table.total(Gender.F),
                    "M": table.total(Gender.M),
                },
            }
        )
        profiles_json["categories"] = {}
        for category in categories:
            selected = profile.select(category)
            profiles_json["categories"][category.value] = {
                "n_words": len(selected),
                "words": [bias.word_bias_json(w) for w in selected],
            }
            if not selected:
                summaries[category.value] = {"skipped": "no words"}
                continue
            dist = bias.index_distribution(
                profile, category=category, weighting="counts", bins=cfg.bins
            )
            unweighted = bias.index_summary([w.index for w in selected])
            summaries[category.value] = {
                "weighted": dist.to_json_dict(),
                "unweighted": unweighted.to_json_dict(),
            }
    # Distinctive words come from the category slice: within one facet,
    # which words drive the gap between the gender distributions?
    for category in categories:
        slice_table = table.slice(category=category)
        loo = None
        slice_info: dict = {}
        try:
            slice_factors = bias.correction_factors(slice_table)
            loo = bias.leave_one_out(slice_table, slice_factors, cfg.rates_mode)
            slice_info = {
                "c_F": float(slice_factors[0]),
                "c_M": float(slice_factors[1]),
                "dissimilarity": float(loo.base_diss),
            }
        except ValueError as exc:
            log.warning("distinctive words skipped for %s: %s", category.value, exc)
            slice_info = {"skipped": str(exc)}
        if "categories" in profiles_json and category.value in profiles_json["categories"]:
            profiles_json["categories"][category.value]["slice"] = slice_info
        for gender in Gender:
            rows = reporting.distinctive_word_rows(loo, gender) if loo else []
            reporting.write_csv(
                cfg.path(f"distinctive_{category.value}_{gender.value}.csv"),
                ["lemma", "upos", "weight", "diss_without"],
                rows,
            )
            negative = (
                reporting.distinctive_word_rows(loo, gender, lexicon, negative_only=True)
                if loo
                else []
            )
            reporting.write_csv(
                cfg.path(f"distinctive_{category.value}_{gender.value}_negative.csv"),
                ["lemma", "upos", "weight", "diss_without"],
                negative,
            )
    reporting.write_json(cfg.path("bias_profile.json"), profiles_json)
    reporting.write_json(cfg.path("summary_stats.json"), summaries)

    # ---- annotator agreement ---------------------------------------------
    matrix = AnnotationMatrix(
        {(e.lemma, e.upos): e.scores for e in sorted(lexicon, key=lambda e: (e.lemma, e.upos))}
    )
    alpha_json: dict = {"overall": krippendorff_alpha(matrix).to_json_dict()}
    for category in categories:
        rows = {
            (e.lemma, e.upos): e.scores
            for e in sorted(lexicon, key=lambda e: (e.lemma, e.upos))
            if e.category == category
        }
        if len(rows) >= 2:
            alpha_json[category.value] = krippendorff_alpha(
                AnnotationMatrix(rows)
            ).to_json_dict()
    reporting.write_json(cfg.path("agreement.json"), alpha_json)

    # ---- sentiment fractions ----------------------------------------------
    reporting.write_csv(
        cfg.path("sentiment_fractions.csv"),
        ["category", "group"] + reporting.SENTIMENT_COLUMNS,
        reporting.sentiment_fraction_rows(records, lexicon),
    )

    # ---- chi-square --------------------------------------------------------
    chi_json = {}
    for label, tbl in (
        ("coverage", table),
        ("personalization", table.slice(lexicon_only=True)),
    ):
        observed = inference.contingency_by_source(tbl)
        try:
            chi_json[label] = inference.chi_square(observed).to_json_dict()
        except ValueError as exc:
            log.warning("chi-square %s skipped: %s", label, exc)
            chi_json[label] = {"skipped": str(exc), "observed": [list(r) for r in observed]}
    reporting.write_json(cfg.path("chi_square.json"), chi_json)

    # ---- quantile regression ----------------------------------------------
    quantile_rows = []
    coef_json: dict = {"taus": list(inference.DEFAULT_TAUS), "jitter_h": cfg.jitter}
    for c_idx, category in enumerate(categories):
        cat_records = [r for r in records if r.category == category]
        entry: dict = {}
        if not cat_records:
            coef_json[category.value] = {"skipped": "no records"}
            continue
        jitter_seed = derive_seed(cfg.seed, 1, c_idx)
        y = inference.jitter(
            [r.aggregate_sentiment for r in cat_records], jitter_seed, cfg.jitter
        )
        g_dummy = [1 if r.gender == Gender.F else 0 for r in cat_records]
        s_dummy = [1 if r.source_type == SourceType.ONLINE else 0 for r in cat_records]
        entry["jitter_seed"] = jitter_seed
        entry["n"] = len(cat_records)
        try:
            models = {
                tau: inference.quantile_regression(y, g_dummy, s_dummy, tau)
                for tau in inference.DEFAULT_TAUS
            }
        except ValueError as exc:
            log.warning("quantile regression skipped for %s: %s", category.value, exc)
            coef_json[category.value] = {"skipped": str(exc)}
            continue
        for gender, g_val in ((Gender.F, 1), (Gender.M, 0)):
            for source, s_val in (
                (SourceType.ONLINE, 1),
                (SourceType.TRADITIONAL, 0),
            ):
                fitted = [
                    models[tau].cell_quantiles.get((g_val, s_val))
                    for tau in inference.DEFAULT_TAUS
                ]
                if any(f is None for f in fitted):
                    continue
                quantile_rows.append(
                    [category.value, gender.value, source.value] + fitted
                )
        entry["models"] = {
            str(tau): models[tau].to_json_dict() for tau in inference.DEFAULT_TAUS
        }
        boot_seed = derive_seed(cfg.seed, 2, c_idx)
        entry["bootstrap_seed"] = boot_seed
        entry["bootstrap"] = {
            str(tau): inference.bootstrap_significance(
                y, g_dummy, s_dummy, tau, cfg.bootstrap, boot_seed
            ).to_json_dict()
            for tau in inference.DEFAULT_TAUS
        }
        coef_json[category.value] = entry
    reporting.write_csv(
        cfg.path("quantiles.csv"),
        ["category", "gender", "source_type", "D1", "Q1", "D5", "Q3", "D9"],
        quantile_rows,
    )
    reporting.write_json(cfg.path("quantile_coefficients.json"), coef_json)

    # ---- temporal ----------------------------------------------------------
    all_days = sorted(set(table.by_day(Gender.F)) | set(table.by_day(Gender.M)))
    grid = (
        [
            all_days[0] + datetime.timedelta(days=i)
            for i in range((all_days[-1] - all_days[0]).days + 1)
        ]
        if all_days
        else []
    )
    for category in categories:
        pers_slice = table.slice(category=category)
        out: dict = {"ma_window": cfg.ma_window, "fill_policy": FILL_POLICY}
        series = {}
        if not grid:
            out["skipped"] = "no dated coverage"
        else:
            for gender in Gender:
                daily = _daily_fraction_series(
                    table.by_day(gender), pers_slice.by_day(gender), grid
                )
                try:
                    series[gender] = temporal.moving_average(daily, cfg.ma_window)
                except ValueError as exc:
                    out["skipped"] = str(exc)
                    break
        if "skipped" not in out and len(series[Gender.F].points) < 3:
            out["skipped"] = "fewer than 3 trend points after averaging"
        if "skipped" not in out:
            f_ma, m_ma = series[Gender.F], series[Gender.M]
            share_f, share_m, ties = temporal.dominance_fractions(f_ma, m_ma)
            a_f, a_m, a = temporal.area_decomposition(f_ma, m_ma)
            out.update(
                {
                    "A_F": a_f,
                    "A_M": a_m,
                    "A": a,
                    "share_F": share_f,
                    "share_M": share_m,
                    "tie_share": ties,
                }
            )
            for gender in Gender:
                reporting.write_csv(
                    cfg.path(f"trend_{category.value}_{gender.value}.csv"),
                    ["date", "value"],
                    [[d.isoformat(), v] for d, v in series[gender].points],
                )
        reporting.write_json(cfg.path(f"temporal_{category.value}.json"), out)

    return {"records": len(records)}


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def stage_report(cfg: PipelineConfig) -> dict:
    cfg.validate()
    with open(cfg.path("descriptives.json"), encoding="utf-8") as fh:
        desc = json.load(fh)
    with open(cfg.path("diagnostics.json"), encoding="utf-8") as fh:
        diagnostics = json.load(fh)
    with open(cfg.path("count_table.json"), encoding="utf-8") as fh:
        table = CountTable.from_json_dict(json.load(fh))

    for dataset, tbl in (
        ("coverage", table),
        ("personalization", table.slice(lexicon_only=True)),
    ):
        for gender in Gender:
            if desc[dataset][gender.value]["words"] != tbl.total(gender):
                raise StageError(
                    "report",
                    ValueError(
                        f"descriptive word total for {dataset}/{gender.value} "
                        "does not match the count table"
                    ),
                )

    rows = []
    for field in ("politicians", "contents", "sentences", "words", "distinct_words"):
        rows.append(
            [
                field,
                desc["coverage"]["F"][field],
                desc["coverage"]["M"][field],
                desc["personalization"]["F"][field],
                desc["personalization"]["M"][field],
            ]
        )
    reporting.write_csv(
        cfg.path("table1.csv"),
        ["measure", "coverage_F", "coverage_M", "personalization_F", "personalization_M"],
        rows,
    )

    for dataset in ("coverage", "personalization"):
        for kind, key in (
            ("neighbors", "words_per_sentence"),
            ("sentences", "sentences_per_politician"),
        ):
            ccdf_rows = []
            for gender in Gender:
                for x, frac in reporting.ccdf_points(desc[dataset][gender.value][key]):
                    ccdf_rows.append([gender.value, x, frac])
            reporting.write_csv(
                cfg.path(f"ccdf_{kind}_{dataset}.csv"),
                ["gender", "x", "ccdf"],
                ccdf_rows,
            )

    counts = {
        dataset: {
            g.value: {
                k: desc[dataset][g.value][k]
                for k in ("politicians", "contents", "sentences", "words", "distinct_words")
            }
            for g in Gender
        }
        for dataset in ("coverage", "personalization")
    }
    manifest = {
        "config": cfg.to_json_dict(),
        "config_hash": cfg.config_hash(),
        "modes": {
            "rates_mode": cfg.rates_mode,
            "radius": cfg.radius,
            "direction": cfg.direction,
            "jitter_h": cfg.jitter,
            "ma_window": cfg.ma_window,
            "seed": cfg.seed,
            "attribution": ATTRIBUTION_POLICY,
            "fill_policy": FILL_POLICY,
        },
        "counts": counts,
        "diagnostics": diagnostics,
    }
    reporting.write_json(cfg.path("manifest.json"), manifest)
    return manifest


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run extract, analyze and report; abort naming the failing stage.

    The config is validated up front, so a bad path fails before any
    processing rather than inside the first stage.
    """
    cfg.validate()
    for stage_name, stage in (
        ("extract", stage_extract),
        ("analyze", stage_analyze),
        ("report", stage_report),
    ):
        try:
            outcome = stage(cfg)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(stage_name, exc) from exc
    return outcome
