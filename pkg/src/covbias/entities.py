"""Politician mention detection: name+surname, role+surname, specific role."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import Document, Mention, MentionPattern, Sentence, normalize_lemma
from .registry import PoliticianRegistry, TokenTuple

# Mention-surface role words mapped to the registry's canonical keywords.
# "presidente della Regione X" and "governatore della Regione X" denote the
# same office, so presidente resolves to governatore.
DEFAULT_ROLE_VARIANTS: dict[str, str] = {
    "sindaco": "sindaco",
    "sindaca": "sindaco",
    "ministro": "ministro",
    "ministra": "ministro",
    "sottosegretario": "sottosegretario",
    "sottosegretaria": "sottosegretario",
    "governatore": "governatore",
    "governatrice": "governatore",
    "presidente": "governatore",
}

# Connectives allowed between a role keyword and its jurisdiction.
_PREPOSITIONS = {"di", "d", "del", "dello", "della", "dell", "dei", "degli", "delle"}
_FILLERS = {"regione", "città", "citta", "comune", "provincia"}

_PATTERN_PRECEDENCE = {
    MentionPattern.NAME_SURNAME: 0,
    MentionPattern.ROLE_SURNAME: 1,
    MentionPattern.SPECIFIC_ROLE: 2,
}


class RoleGazetteer:
    """Maps role words as they appear in text to canonical registry keywords."""

    def __init__(self, variants: Optional[dict[str, str]] = None):
        self.variants = dict(DEFAULT_ROLE_VARIANTS if variants is None else variants)

    @classmethod
    def from_file(cls, path) -> "RoleGazetteer":
        """One role per line: `canonical` or `canonical = variant, variant`.

        The canonical keyword is always its own variant.
        """
        variants: dict[str, str] = {}
        with open(path, encoding="utf-8-sig") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                canonical_s, _, syns = line.partition("=")
                canonical = normalize_lemma(canonical_s)
                if canonical is None:
                    continue
                variants[canonical] = canonical
                for syn in syns.split(","):
                    syn = syn.strip()
                    if syn:
                        norm = normalize_lemma(syn)
                        if norm:
                            variants[norm] = canonical
        return cls(variants)

    def canonical(self, word: Optional[str]) -> Optional[str]:
        if word is None:
            return None
        return self.variants.get(word)


@dataclass
class MatchDiagnostics:
    """Tally of mentions dropped because role resolution was ambiguous."""

    ambiguous: dict[str, int] = field(default_factory=dict)

    def drop(self, pattern: MentionPattern) -> None:
        self.ambiguous[pattern.value] = self.ambiguous.get(pattern.value, 0) + 1

    def merge(self, other: "MatchDiagnostics") -> None:
        for key, n in other.ambiguous.items():
            self.ambiguous[key] = self.ambiguous.get(key, 0) + n

    def to_json_dict(self) -> dict:
        return {"ambiguous_mentions": dict(sorted(self.ambiguous.items()))}


@dataclass(frozen=True)
class _Candidate:
    start: int  # 1-based, inclusive
    end: int
    pattern: MentionPattern
    pid: str

    @property
    def length(self) -> int:
        return self.end - self.start + 1


def _match_tuple(norms: list[Optional[str]], pos: int, target: TokenTuple) -> bool:
    if pos + len(target) > len(norms):
        return False
    return all(norms[pos + k] == target[k] for k in range(len(target)))


def find_mentions(
    sentence: Sentence,
    doc: Document,
    registry: PoliticianRegistry,
    gazetteer: Optional[RoleGazetteer] = None,
    diagnostics: Optional[MatchDiagnostics] = None,
) -> list[Mention]:
    """All non-overlapping politician mentions in one sentence.

    Matching is case-insensitive over normalized surfaces (role words also
    match on the lemma, which catches inflected forms). Role patterns are
    gated by tenure at the document date; an ambiguous resolution drops
    the mention and bumps the diagnostics tally. Overlaps resolve longest
    match first; the result is ordered by span start, then by pattern
    precedence (name+surname, role+surname, specific role).
    """
    gaz = gazetteer if gazetteer is not None else RoleGazetteer()
    diag = diagnostics if diagnostics is not None else MatchDiagnostics()
    tokens = sentence.tokens
    n = len(tokens)
    norms: list[Optional[str]] = [normalize_lemma(t.surface) for t in tokens]
    lemmas: list[Optional[str]] = [t.lemma if not t.filtered else None for t in tokens]

    candidates: list[_Candidate] = []

    def resolve(pids: set[str], start: int, end: int, pattern: MentionPattern) -> None:
        if len(pids) == 1:
            candidates.append(_Candidate(start, end, pattern, next(iter(pids))))
        elif len(pids) > 1:
            diag.drop(pattern)

    # Full-name and surname tuples, longest first so the greedy scan
    # prefers the most specific reading at each position.
    name_keys = sorted(registry.full_names, key=lambda t: (-len(t), t))
    surname_keys = sorted(registry.surnames, key=lambda t: (-len(t), t))

    for i in range(n):
        for key in name_keys:
            if _match_tuple(norms, i, key):
                resolve(
                    registry.full_names[key],
                    i + 1,
                    i + len(key),
                    MentionPattern.NAME_SURNAME,
                )
                break

        canonical = gaz.canonical(norms[i]) or gaz.canonical(lemmas[i])
        if canonical is None:
            continue

        # role + surname, e.g. "ministro Fedeli"
        for key in surname_keys:
            if _match_tuple(norms, i + 1, key):
                holders = registry.surnames[key] & registry.holders_of_keyword(
                    canonical, doc.date
                )
                resolve(
                    holders, i + 1, i + 1 + len(key), MentionPattern.ROLE_SURNAME
                )
                break

        # specific role, e.g. "sindaco di Roma", "presidente della Regione Lazio"
        j = i + 1
        if j < n and norms[j] in _PREPOSITIONS:
            j += 1
            if j < n and norms[j] in _FILLERS:
                j += 1
                if j < n and norms[j] in _PREPOSITIONS:
                    j += 1
            for jur in registry.jurisdictions_of_keyword(canonical):
                if _match_tuple(norms, j, jur):
                    holders = registry.holders_of_role(canonical, jur, doc.date)
                    resolve(
                        holders,
                        i + 1,
                        j + len(jur),
                        MentionPattern.SPECIFIC_ROLE,
                    )
                    break

    # Longest-match-wins on overlap (equal lengths fall back to pattern
    # precedence); each token belongs to at most one mention.
    chosen: list[_Candidate] = []
    taken: set[int] = set()
    for cand in sorted(
        candidates,
        key=lambda c: (-c.length, _PATTERN_PRECEDENCE[c.pattern], c.start, c.pid),
    ):
        span = set(range(cand.start, cand.end + 1))
        if span & taken:
            continue
        taken |= span
        chosen.append(cand)

    chosen.sort(key=lambda c: (c.start, _PATTERN_PRECEDENCE[c.pattern]))
    return [
        Mention(
            pid=c.pid,
            doc_id=sentence.doc_id,
            sentence_index=sentence.index,
            start=c.start,
            end=c.end,
            pattern=c.pattern,
        )
        for c in chosen
    ]
