"""Streaming readers for parsed corpora and their side files.

The CoNLL-U reader yields one (Document, Sentence) pair at a time, so
memory stays bounded by a single document regardless of corpus size.
Tokens flagged as stopwords, digits, URLs or bare punctuation remain in
the tree (their heads still resolve) but are excluded downstream.
"""

from __future__ import annotations

import datetime
import json
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .errors import ConlluFormatError, MetadataError
from .model import Document, Sentence, SourceType, Token, normalize_lemma

_DIGITS_RE = re.compile(r"[\d.,:%/\-]+")
_NEWDOC_RE = re.compile(r"#\s*newdoc\s+id\s*=\s*(\S+)")
_SENTID_RE = re.compile(r"#\s*sent_id\s*=\s*(\S+)")


def read_stopwords(path) -> set[str]:
    """One lemma per line; normalized on load."""
    out = set()
    with open(path, encoding="utf-8-sig") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            norm = normalize_lemma(line)
            if norm:
                out.add(norm)
    return out


def read_lemma_map(path) -> dict[str, str]:
    """Surface-to-lemma overrides, one tab-separated pair per line."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise MetadataError(
                    f"{path}: line {lineno}: expected surface<TAB>lemma"
                )
            surface = normalize_lemma(parts[0])
            if surface is None:
                continue
            out[surface] = parts[1].strip()
    return out


def read_metadata(
    path,
    window: Optional[tuple[datetime.date, datetime.date]] = None,
) -> dict[str, Document]:
    """Document metadata JSONL keyed by doc_id; duplicates are rejected."""
    docs: dict[str, Document] = {}
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MetadataError(f"{path}: line {lineno}: bad JSON: {exc}") from None
            doc_id = obj.get("doc_id")
            if not doc_id:
                raise MetadataError(f"{path}: line {lineno}: missing doc_id")
            for key in ("date", "source_id", "source_type"):
                if key not in obj:
                    raise MetadataError(f"doc {doc_id!r}: missing {key!r}")
            try:
                date = datetime.date.fromisoformat(obj["date"])
            except ValueError:
                raise MetadataError(
                    f"doc {doc_id!r}: bad date {obj['date']!r}"
                ) from None
            try:
                source_type = SourceType(obj["source_type"])
            except ValueError:
                raise MetadataError(
                    f"doc {doc_id!r}: unknown source_type {obj['source_type']!r}"
                ) from None
            if doc_id in docs:
                raise MetadataError(f"duplicate doc_id {doc_id!r}")
            if window is not None and not window[0] <= date <= window[1]:
                raise MetadataError(
                    f"doc {doc_id!r}: date {date} outside analysis window "
                    f"{window[0]}..{window[1]}"
                )
            docs[doc_id] = Document(
                doc_id=doc_id,
                date=date,
                source_id=str(obj["source_id"]),
                source_type=source_type,
            )
    return docs


@dataclass
class CorpusDiagnostics:
    rejected_sentences: list[tuple[str, str, str]] = field(default_factory=list)

    def reject(self, doc_id: str, sent_id: str, reason: str) -> None:
        self.rejected_sentences.append((doc_id, sent_id, reason))

    def merge(self, other: "CorpusDiagnostics") -> None:
        self.rejected_sentences.extend(other.rejected_sentences)

    def to_json_dict(self) -> dict:
        return {
            "rejected_sentences": [list(r) for r in self.rejected_sentences],
        }


@dataclass(frozen=True)
class CorpusBundle:
    """Paths to everything one analysis run consumes."""

    conllu: tuple[str, ...]
    metadata: str
    registry: str
    lexicon: str
    stopwords: Optional[str] = None
    lemma_map: Optional[str] = None
    window: Optional[tuple[datetime.date, datetime.date]] = None


def _is_digits(lemma: str) -> bool:
    return bool(_DIGITS_RE.fullmatch(lemma)) and any(c.isdigit() for c in lemma)


def _is_url(text: str) -> bool:
    low = text.lower()
    return "://" in low or low.startswith("www.") or low.startswith("http")


def _make_token(
    index: int,
    surface: str,
    raw_lemma: str,
    upos: str,
    head: int,
    deprel: str,
    stopwords: set[str],
    lemma_map: dict[str, str],
) -> Token:
    norm_surface = normalize_lemma(surface) if surface else None
    if norm_surface is not None and norm_surface in lemma_map:
        raw_lemma = lemma_map[norm_surface]
    elif raw_lemma == "_":
        raw_lemma = surface
    norm = normalize_lemma(raw_lemma) if raw_lemma else None
    if norm is None:
        # Nothing lexical remains: keep the raw string for the tree,
        # never select the token as a word.
        return Token(index, surface, raw_lemma or surface, upos, head, deprel, filtered=True)
    filtered = norm in stopwords or _is_digits(norm) or _is_url(surface) or _is_url(norm)
    return Token(index, surface, norm, upos, head, deprel, filtered=filtered)


def _validate_tree(tokens: Sequence[Token]) -> Optional[str]:
    """Reason the sentence must be rejected, or None if the tree is sound."""
    n = len(tokens)
    heads = {t.index: t.head for t in tokens}
    if not any(h == 0 for h in heads.values()):
        return "no root token (no head = 0)"
    for start in heads:
        seen = set()
        node = start
        while node != 0:
            if node in seen:
                return f"cyclic head chain through token {node}"
            seen.add(node)
            node = heads[node]
    return None


def iter_conllu(
    path,
    stopwords: set[str],
    lemma_map: dict[str, str],
    diagnostics: CorpusDiagnostics,
    seen_docs: set[str],
) -> Iterator[tuple[str, Sentence]]:
    """Yield (doc_id, Sentence) pairs from one CoNLL-U file.

    Requires `# newdoc id = ...` before the first sentence of a document
    and `# sent_id = ...` on every sentence. Multiword-token ranges and
    empty nodes are skipped (they are not syntactic words). Malformed
    rows raise with their line number; sentences with cyclic heads or no
    root are rejected with a diagnostic instead.
    """
    doc_id: Optional[str] = None
    sent_id: Optional[str] = None
    sent_index = 0
    rows: list[tuple[int, str, str, str, int, str]] = []
    block_start_line = 0

    def flush(lineno: int) -> Optional[tuple[str, Sentence]]:
        nonlocal rows, sent_id, sent_index, block_start_line
        if not rows:
            sent_id = None
            return None
        if doc_id is None:
            raise ConlluFormatError("sentence before any '# newdoc id' comment", block_start_line)
        if sent_id is None:
            raise ConlluFormatError("sentence without '# sent_id' comment", block_start_line)
        expected = list(range(1, len(rows) + 1))
        if [r[0] for r in rows] != expected:
            raise ConlluFormatError(
                f"token ids are not 1..{len(rows)} in sentence {sent_id!r}", block_start_line
            )
        for idx, _, _, _, head, _ in rows:
            if head > len(rows):
                raise ConlluFormatError(
                    f"head {head} of token {idx} out of range in sentence {sent_id!r}",
                    block_start_line,
                )
        tokens = tuple(
            _make_token(idx, form, lemma, upos, head, deprel, stopwords, lemma_map)
            for idx, form, lemma, upos, head, deprel in rows
        )
        reason = _validate_tree(tokens)
        out = None
        if reason is not None:
            diagnostics.reject(doc_id, sent_id, reason)
        else:
            out = (doc_id, Sentence(doc_id=doc_id, index=sent_index, tokens=tokens))
        sent_index += 1
        rows = []
        sent_id = None
        block_start_line = 0
        return out

    with open(path, encoding="utf-8-sig") as fh:
        lineno = 0
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                result = flush(lineno)
                if result:
                    yield result
                continue
            if line.startswith("#"):
                m = _NEWDOC_RE.match(line)
                if m:
                    if rows:
                        raise ConlluFormatError("newdoc inside a sentence block", lineno)
                    doc_id = m.group(1)
                    if doc_id in seen_docs:
                        raise ConlluFormatError(f"duplicate document {doc_id!r}", lineno)
                    seen_docs.add(doc_id)
                    sent_index = 0
                    continue
                m = _SENTID_RE.match(line)
                if m:
                    sent_id = m.group(1)
                    if not rows:
                        block_start_line = lineno
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise ConlluFormatError(
                    f"expected 10 tab-separated columns, got {len(cols)}", lineno
                )
            tok_id, form, lemma, upos, _xpos, _feats, head, deprel, _deps, _misc = cols
            if "-" in tok_id or "." in tok_id:
                continue  # multiword-token range or empty node
            if not rows and block_start_line == 0:
                block_start_line = lineno
            try:
                idx = int(tok_id)
                head_i = int(head)
            except ValueError:
                raise ConlluFormatError(
                    f"non-integer ID or HEAD ({tok_id!r}, {head!r})", lineno
                ) from None
            rows.append((idx, form, lemma, upos, head_i, deprel))
        result = flush(lineno + 1)
        if result:
            yield result


def read_corpus(
    bundle: CorpusBundle,
    diagnostics: Optional[CorpusDiagnostics] = None,
) -> Iterator[tuple[Document, Sentence]]:
    """Stream (Document, Sentence) pairs for every parse file in the bundle.

    Every sentence's document must resolve in the metadata; document
    order within a file is preserved.
    """
    stopwords = read_stopwords(bundle.stopwords) if bundle.stopwords else set()
    lemma_map = read_lemma_map(bundle.lemma_map) if bundle.lemma_map else {}
    metadata = read_metadata(bundle.metadata, bundle.window)
    diag = diagnostics if diagnostics is not None else CorpusDiagnostics()
    seen_docs: set[str] = set()
    for path in bundle.conllu:
        for doc_id, sentence in iter_conllu(path, stopwords, lemma_map, diag, seen_docs):
            doc = metadata.get(doc_id)
            if doc is None:
                raise MetadataError(f"document {doc_id!r} has no metadata entry")
            yield doc, sentence
