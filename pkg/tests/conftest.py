import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from covbias.bias import CountTable
from covbias.ingestion import CorpusBundle
from covbias.model import Gender

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA, name)


@pytest.fixture
def tiny_bundle() -> CorpusBundle:
    return CorpusBundle(
        conllu=(data_path("tiny.conllu"),),
        metadata=data_path("metadata.jsonl"),
        registry=data_path("registry.csv"),
        lexicon=data_path("lexicon.csv"),
        stopwords=data_path("stopwords.txt"),
        lemma_map=data_path("lemma_map.tsv"),
    )


def table_from_counts(word_counts: dict, n_f: int, n_m: int) -> CountTable:
    """CountTable from {(lemma, upos): (count_f, count_m)} plus synthetic
    politician tallies of the requested sizes."""
    table = CountTable()
    for (lemma, upos), (wf, wm) in word_counts.items():
        if wf:
            table.add(lemma, upos, Gender.F, n=wf)
        if wm:
            table.add(lemma, upos, Gender.M, n=wm)
    table.pids[(Gender.F, None, None)] = {f"f{i}" for i in range(n_f)}
    table.pids[(Gender.M, None, None)] = {f"m{i}" for i in range(n_m)}
    return table


def write_config(path, out_dir, ma_window=1, bootstrap=100, **extra) -> str:
    """INI config pointing at the tiny fixture corpus."""
    keys = {
        "conllu": data_path("tiny.conllu"),
        "metadata": data_path("metadata.jsonl"),
        "registry": data_path("registry.csv"),
        "lexicon": data_path("lexicon.csv"),
        "stopwords": data_path("stopwords.txt"),
        "lemma_map": data_path("lemma_map.tsv"),
        "out": out_dir,
        "ma_window": ma_window,
        "bootstrap": bootstrap,
    }
    keys.update(extra)
    lines = ["[covbias]"] + [f"{k} = {v}" for k, v in keys.items()]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return str(path)
