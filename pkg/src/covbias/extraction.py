"""Dependency-tree neighborhoods of mentions and personalization records.

A mention's neighborhood holds the content words (ADJ/NOUN/VERB, no
auxiliaries, modals or filtered tokens) within a bounded tree distance of
its span. Neighborhood words intersected with the lexicon become
personalization records; all neighborhood words feed the coverage counts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .bias import CountTable
from .entities import MatchDiagnostics, RoleGazetteer, find_mentions
from .lexicon import Lexicon
from .model import (
    Document,
    Gender,
    Mention,
    PersonalizationRecord,
    Sentence,
    Token,
)
from .registry import PoliticianRegistry

CANDIDATE_POS = frozenset({"ADJ", "NOUN", "VERB"})
DEFAULT_MODAL_LEMMAS = frozenset({"potere", "dovere", "volere", "solere"})
DIRECTIONS = ("undirected", "children")


class DependencyTree:
    """Adjacency view of one sentence's parse, with distance queries."""

    def __init__(self, sentence: Sentence):
        self.sentence = sentence
        self.heads = {t.index: t.head for t in sentence.tokens}
        self.children: dict[int, list[int]] = {t.index: [] for t in sentence.tokens}
        self.roots: list[int] = []
        for t in sentence.tokens:
            if t.head == 0:
                self.roots.append(t.index)
            else:
                if t.head not in self.children:
                    raise ValueError(
                        f"{sentence.doc_id}[{sentence.index}]: head {t.head} "
                        f"of token {t.index} missing from sentence"
                    )
                self.children[t.head].append(t.index)
        if not self.roots:
            raise ValueError(f"{sentence.doc_id}[{sentence.index}]: tree has no root")
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        for start in self.heads:
            seen = set()
            node = start
            while node != 0:
                if node in seen:
                    raise ValueError(
                        f"{self.sentence.doc_id}[{self.sentence.index}]: "
                        f"cyclic head chain through token {node}"
                    )
                seen.add(node)
                node = self.heads[node]

    def distances(self, sources: Iterable[int], direction: str = "undirected") -> dict[int, int]:
        """BFS distance from a source set to every reachable token.

        "undirected" walks head and child edges both ways; "children"
        walks only downward, counting tokens inside the subtrees of the
        sources.
        """
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        dist = {s: 0 for s in sources}
        queue = deque(dist)
        while queue:
            node = queue.popleft()
            nxt = list(self.children[node])
            if direction == "undirected" and self.heads[node] != 0:
                nxt.append(self.heads[node])
            for other in nxt:
                if other not in dist:
                    dist[other] = dist[node] + 1
                    queue.append(other)
        return dist

    def distance(self, a: int, b: int) -> Optional[int]:
        return self.distances([a]).get(b)


def build_tree(sentence: Sentence) -> DependencyTree:
    return DependencyTree(sentence)


def eligible_word(token: Token, modal_lemmas: frozenset[str] = DEFAULT_MODAL_LEMMAS) -> bool:
    """Can this token be selected as a neighborhood word at all?"""
    if token.filtered:
        return False
    if token.upos not in CANDIDATE_POS:
        return False
    if token.upos == "VERB" and token.lemma in modal_lemmas:
        return False
    return True


def neighborhood(
    tree: DependencyTree,
    mention: Mention,
    radius: int,
    direction: str = "undirected",
    modal_lemmas: frozenset[str] = DEFAULT_MODAL_LEMMAS,
) -> list[Token]:
    """Content words within `radius` tree steps of the mention span.

    Mention tokens themselves are never words; PROPN stays out (proper
    nouns are entities, not descriptors), as do auxiliaries, configured
    modal verbs and filtered tokens. Monotone in the radius.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    span = set(mention.span)
    dist = tree.distances(span, direction)
    out = []
    for token in tree.sentence.tokens:
        if token.index in span:
            continue
        d = dist.get(token.index)
        if d is None or d > radius:
            continue
        if eligible_word(token, modal_lemmas):
            out.append(token)
    return out


class DatasetTally:
    """Per-gender descriptive counts for one dataset (coverage or pers.)."""

    def __init__(self) -> None:
        self.docs: dict[Gender, set[str]] = {g: set() for g in Gender}
        self.sentences: dict[Gender, set[tuple[str, int]]] = {g: set() for g in Gender}
        self.words: dict[Gender, int] = {g: 0 for g in Gender}
        self.lemmas: dict[Gender, set[str]] = {g: set() for g in Gender}
        self.pids: dict[Gender, set[str]] = {g: set() for g in Gender}
        self.pid_sentences: dict[Gender, set[tuple[str, str, int]]] = {g: set() for g in Gender}
        self.words_per_sentence: dict[Gender, dict[tuple[str, int], int]] = {
            g: {} for g in Gender
        }

    def add(self, gender: Gender, pid: str, doc_id: str, sent_index: int, lemma: str) -> None:
        key = (doc_id, sent_index)
        self.docs[gender].add(doc_id)
        self.sentences[gender].add(key)
        self.words[gender] += 1
        self.lemmas[gender].add(lemma)
        self.pids[gender].add(pid)
        self.pid_sentences[gender].add((pid, doc_id, sent_index))
        per = self.words_per_sentence[gender]
        per[key] = per.get(key, 0) + 1

    def merge(self, other: "DatasetTally") -> None:
        for g in Gender:
            self.docs[g] |= other.docs[g]
            self.sentences[g] |= other.sentences[g]
            self.words[g] += other.words[g]
            self.lemmas[g] |= other.lemmas[g]
            self.pids[g] |= other.pids[g]
            self.pid_sentences[g] |= other.pid_sentences[g]
            for key, n in other.words_per_sentence[g].items():
                self.words_per_sentence[g][key] = (
                    self.words_per_sentence[g].get(key, 0) + n
                )

    def sentences_per_politician(self, gender: Gender) -> list[int]:
        per: dict[str, int] = {}
        for pid, _, _ in self.pid_sentences[gender]:
            per[pid] = per.get(pid, 0) + 1
        return sorted(per.values())

    def to_json_dict(self) -> dict:
        return {
            g.value: {
                "politicians": len(self.pids[g]),
                "contents": len(self.docs[g]),
                "sentences": len(self.sentences[g]),
                "words": self.words[g],
                "distinct_words": len(self.lemmas[g]),
                "words_per_sentence": sorted(self.words_per_sentence[g].values()),
                "sentences_per_politician": self.sentences_per_politician(g),
            }
            for g in Gender
        }


class DescriptiveStats:
    def __init__(self) -> None:
        self.coverage = DatasetTally()
        self.personalization = DatasetTally()

    def merge(self, other: "DescriptiveStats") -> None:
        self.coverage.merge(other.coverage)
        self.personalization.merge(other.personalization)

    def to_json_dict(self) -> dict:
        return {
            "coverage": self.coverage.to_json_dict(),
            "personalization": self.personalization.to_json_dict(),
        }


@dataclass
class ExtractionResult:
    records: list[PersonalizationRecord] = field(default_factory=list)
    counts: CountTable = field(default_factory=CountTable)
    descriptives: DescriptiveStats = field(default_factory=DescriptiveStats)
    diagnostics: MatchDiagnostics = field(default_factory=MatchDiagnostics)

    def merge(self, other: "ExtractionResult") -> None:
        self.records.extend(other.records)
        self.counts.update(other.counts)
        self.descriptives.merge(other.descriptives)
        self.diagnostics.merge(other.diagnostics)


def extract_records(
    stream: Iterable[tuple[Document, Sentence]],
    registry: PoliticianRegistry,
    lexicon: Lexicon,
    radius: int = 2,
    direction: str = "undirected",
    gazetteer: Optional[RoleGazetteer] = None,
    modal_lemmas: frozenset[str] = DEFAULT_MODAL_LEMMAS,
) -> ExtractionResult:
    """Run mention detection and neighborhood extraction over a stream.

    Every neighborhood word is attributed to its nearest mention in tree
    distance (ties attribute to all tied mentions) and counted in the
    coverage table; words found in the lexicon additionally yield one
    personalization record per occurrence, so a sentence may contribute
    several records.
    """
    gaz = gazetteer if gazetteer is not None else RoleGazetteer()
    result = ExtractionResult()
    for doc, sentence in stream:
        mentions = find_mentions(sentence, doc, registry, gaz, result.diagnostics)
        if not mentions:
            continue
        tree = build_tree(sentence)
        spans: set[int] = set()
        for m in mentions:
            spans |= set(m.span)
        dist_maps = [(m, tree.distances(set(m.span), direction)) for m in mentions]
        for token in sentence.tokens:
            if token.index in spans or not eligible_word(token, modal_lemmas):
                continue
            near = [
                (m, dm[token.index])
                for m, dm in dist_maps
                if dm.get(token.index) is not None and dm[token.index] <= radius
            ]
            if not near:
                continue
            best = min(d for _, d in near)
            for m, d in near:
                if d != best:
                    continue
                gender = registry.gender_of(m.pid)
                entry = lexicon.get(token.lemma, token.upos)
                result.counts.add(
                    token.lemma,
                    token.upos,
                    gender,
                    category=entry.category if entry else None,
                    source_type=doc.source_type,
                    date=doc.date,
                    pid=m.pid,
                )
                result.descriptives.coverage.add(
                    gender, m.pid, doc.doc_id, sentence.index, token.lemma
                )
                if entry is not None:
                    result.records.append(
                        PersonalizationRecord(
                            pid=m.pid,
                            gender=gender,
                            doc_id=doc.doc_id,
                            date=doc.date,
                            source_type=doc.source_type,
                            lemma=token.lemma,
                            upos=token.upos,
                            category=entry.category,
                            aggregate_sentiment=float(entry.aggregate),
                            sentence_index=sentence.index,
                        )
                    )
                    result.descriptives.personalization.add(
                        gender, m.pid, doc.doc_id, sentence.index, token.lemma
                    )
    return result
