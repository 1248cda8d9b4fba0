"""Deterministic synthetic corpus generator with planted gender effects.

Builds a parsed news corpus in which women politicians' coverage devotes
twice the share of words to the physical category that men's does, and a
small set of physical words is used for women only. Every file the
pipeline consumes is written from one seeded generator, so the corpus is
reproducible bit for bit.
"""

from __future__ import annotations

import datetime
import json
import os

import numpy as np

START = datetime.date(2017, 1, 1)
SPAN_DAYS = 540

GIVEN_F = ["Anna", "Chiara", "Elena", "Giulia", "Laura", "Paola"]
GIVEN_M = [
    "Marco", "Paolo", "Luca", "Andrea", "Stefano", "Franco",
    "Bruno", "Carlo", "Dario", "Enzo", "Fabio", "Guido", "Ivo", "Nino",
]
SURNAMES = [
    "Bianchi", "Verdi", "Russo", "Ferrari", "Esposito", "Romano",
    "Colombo", "Ricci", "Marino", "Greco", "Bruno", "Gallo",
    "Conti", "Costa", "Fontana", "Moretti", "Rinaldi", "Villa",
    "Serra", "Leone",
]
CITIES = [
    "Torino", "Milano", "Roma", "Napoli", "Bologna", "Firenze",
    "Genova", "Palermo", "Bari", "Verona", "Padova", "Trieste",
    "Brescia", "Parma", "Modena", "Prato", "Rimini", "Salerno",
    "Ferrara", "Ancona",
]

# (lemma, upos, category, annotator scores)
LEXICON_ROWS = [
    ("deciso", "ADJ", "moral_behavioral", (1, 1, 0, 1, 1)),
    ("duro", "ADJ", "moral_behavioral", (-1, 0, 0, -1, 0)),
    ("cinico", "ADJ", "moral_behavioral", (-1, -1, 0, -1, -1)),
    ("incapace", "ADJ", "moral_behavioral", (-1, -1, -1, -1, -1)),
    ("abile", "ADJ", "moral_behavioral", (1, 1, 0, 0, 1)),
    ("prepotente", "ADJ", "moral_behavioral", (-1, -1, -1, 0, -1)),
    ("sceriffo", "NOUN", "moral_behavioral", (-1, -1, 0, -1, -1)),
    ("coraggio", "NOUN", "moral_behavioral", (1, 1, 1, 0, 1)),
    ("follia", "NOUN", "moral_behavioral", (-1, -1, -1, 0, 0)),
    ("gaffe", "NOUN", "moral_behavioral", (-1, -1, 0, 0, -1)),
    ("elegante", "ADJ", "physical", (1, 1, 1, 1, 1)),
    ("robusto", "ADJ", "physical", (0, -1, 0, 0, 0)),
    ("magro", "ADJ", "physical", (0, 0, -1, 0, 0)),
    ("stanco", "ADJ", "physical", (0, -1, 0, -1, 0)),
    ("sorriso", "NOUN", "physical", (1, 0, 0, 1, 0)),
    ("abito", "NOUN", "physical", (0, 0, 0, 0, 0)),
    ("capello", "NOUN", "physical", (0, 0, 0, 0, 0)),
    ("sguardo", "NOUN", "physical", (0, 0, 1, 0, 0)),
    ("ricco", "ADJ", "socio_economic", (0, -1, 0, -1, 0)),
    ("povero", "ADJ", "socio_economic", (-1, -1, 0, 0, -1)),
    ("borghese", "ADJ", "socio_economic", (0, -1, 0, 0, -1)),
    ("mamma", "NOUN", "socio_economic", (0, 0, 0, 0, 0)),
    ("padre", "NOUN", "socio_economic", (0, 0, 0, 0, 0)),
    ("patrimonio", "NOUN", "socio_economic", (0, 0, -1, 0, 0)),
    ("stipendio", "NOUN", "socio_economic", (0, 0, 0, -1, 0)),
    ("laurea", "NOUN", "socio_economic", (1, 0, 0, 1, 0)),
]

# Physical words planted as women-only usage.
PLANTED_F_PHYSICAL = [
    ("bambolina", "NOUN", "physical", (-1, -1, -1, 0, -1)),
    ("reginetta", "NOUN", "physical", (-1, 0, -1, 0, -1)),
    ("tacco", "NOUN", "physical", (0, 0, 0, -1, 0)),
]

STOPWORDS = [
    "il", "la", "lo", "i", "gli", "le", "di", "del", "della", "dello",
    "dei", "degli", "delle", "a", "al", "alla", "e", "ed", "che", "un",
    "una", "uno", "per", "con", "su", "da", "in", "si", "suo", "sua",
]

FILLER_ADJ = ["nuovo", "vecchio", "grande", "piccolo", "lungo", "breve"]
FILLER_NOUN = ["piano", "progetto", "discorso", "problema", "consiglio", "bilancio"]
FILLER_VERB = ["presentare", "annunciare", "difendere", "criticare"]

CAT_SHARE = {
    # composition of lexicon-word usage per gender; women's physical
    # share is double the men's
    "F": {"moral_behavioral": 0.35, "physical": 0.50, "socio_economic": 0.15},
    "M": {"moral_behavioral": 0.50, "physical": 0.25, "socio_economic": 0.25},
}
P_DOC_FEMALE = 0.22  # below the women's share of the registry (6/20)
P_ONLINE = 0.45
P_FILLER_TARGET = 0.30  # sentence carries a non-lexicon word instead


def _politicians():
    rows = []
    role_cycle = ["sindaco", "governatore", "ministro"]
    portfolios = ["interno", "istruzione", "economia", "salute", "esteri", "lavoro", "cultura"]
    city_iter = iter(CITIES)
    portfolio_iter = iter(portfolios)
    for k in range(20):
        gender = "F" if k < 6 else "M"
        given = GIVEN_F[k] if gender == "F" else GIVEN_M[k - 6]
        surname = SURNAMES[k]
        role = role_cycle[k % 3]
        jurisdiction = next(portfolio_iter) if role == "ministro" else next(city_iter)
        rows.append((f"p{k:02d}", given, surname, gender, role, jurisdiction))
    return rows


def _score_csv(rows):
    return "\n".join(
        f"{lemma},{upos},{category},{','.join(str(s) for s in scores)}"
        for lemma, upos, category, scores in rows
    )


class SentenceWriter:
    def __init__(self):
        self.lines = []

    def add(self, sent_id, rows):
        self.lines.append(f"# sent_id = {sent_id}")
        for i, (form, lemma, upos, head, deprel) in enumerate(rows, start=1):
            self.lines.append(
                f"{i}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{deprel}\t_\t_"
            )
        self.lines.append("")


def _sentence_rows(template, pol, word, filler_adj, filler_verb):
    """Token rows for one templated sentence around one mention."""
    pid, given, surname, gender, role, jurisdiction = pol
    lemma, upos = word[0], word[1]
    role_word = role if gender == "M" else {
        "sindaco": "sindaca",
        "ministro": "ministra",
        "governatore": "governatrice",
    }[role]
    if template == 0 and upos == "ADJ":
        # <Given> <Surname> è <ADJ> .
        return [
            (given, given, "PROPN", 4, "nsubj"),
            (surname, surname, "PROPN", 1, "flat:name"),
            ("è", "essere", "AUX", 4, "cop"),
            (lemma, lemma, "ADJ", 0, "root"),
            (".", ".", "PUNCT", 4, "punct"),
        ]
    if template == 1 and upos == "ADJ":
        # Il <role> <Surname> è <filler-ADJ> e <ADJ> .
        return [
            ("Il", "il", "DET", 2, "det"),
            (role_word, role, "NOUN", 5, "nsubj"),
            (surname, surname, "PROPN", 2, "appos"),
            ("è", "essere", "AUX", 5, "cop"),
            (filler_adj, filler_adj, "ADJ", 0, "root"),
            ("e", "e", "CCONJ", 7, "cc"),
            (lemma, lemma, "ADJ", 5, "conj"),
            (".", ".", "PUNCT", 5, "punct"),
        ]
    if template == 2 and upos == "NOUN":
        # Il <role> di <Jur> ha un <NOUN> .
        prep = "di" if role != "governatore" else "della"
        return [
            ("Il", "il", "DET", 2, "det"),
            (role_word, role, "NOUN", 5, "nsubj"),
            (prep, prep, "ADP", 4, "case"),
            (jurisdiction, jurisdiction, "PROPN", 2, "nmod"),
            ("ha", "avere", "VERB", 0, "root"),
            ("un", "uno", "DET", 7, "det"),
            (lemma, lemma, "NOUN", 5, "obj"),
            (".", ".", "PUNCT", 5, "punct"),
        ]
    # fallback: <Given> <Surname> <filler-VERB> il <NOUN> .
    return [
        (given, given, "PROPN", 3, "nsubj"),
        (surname, surname, "PROPN", 1, "flat:name"),
        (filler_verb, filler_verb, "VERB", 0, "root"),
        ("il", "il", "DET", 5, "det"),
        (lemma, lemma, "NOUN", 3, "obj"),
        (".", ".", "PUNCT", 3, "punct"),
    ]


def generate(out_dir, n_docs=5000, seed=42):
    """Write corpus files under out_dir and return a dict of paths."""
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(seed)
    pols = _politicians()
    f_pols = [p for p in pols if p[3] == "F"]
    m_pols = [p for p in pols if p[3] == "M"]
    lexicon_by_cat = {}
    for row in LEXICON_ROWS:
        lexicon_by_cat.setdefault(row[2], []).append(row)
    categories = sorted(CAT_SHARE["F"])

    metadata_lines = []
    conllu_lines = []

    for d in range(n_docs):
        doc_id = f"doc{d:05d}"
        date = START + datetime.timedelta(days=int(rng.integers(0, SPAN_DAYS)))
        # The first docs deterministically cover every (gender, source,
        # category) cell so saturated regressions always fit.
        forced = None
        if d < 12:
            forced = (
                "F" if d % 2 == 0 else "M",
                "online" if (d // 2) % 2 == 0 else "traditional",
                categories[(d // 4) % 3],
            )
        gender = forced[0] if forced else ("F" if rng.random() < P_DOC_FEMALE else "M")
        source = forced[1] if forced else (
            "online" if rng.random() < P_ONLINE else "traditional"
        )
        source_id = "webnews" if source == "online" else "quotidiano"
        metadata_lines.append(
            json.dumps(
                {
                    "doc_id": doc_id,
                    "date": date.isoformat(),
                    "source_id": source_id,
                    "source_type": source,
                },
                sort_keys=True,
            )
        )
        conllu_lines.append(f"# newdoc id = {doc_id}")
        pool = f_pols if gender == "F" else m_pols
        pol = pool[int(rng.integers(0, len(pool)))]
        n_sentences = 1 + int(rng.random() < 0.3)
        for s in range(n_sentences):
            shares = CAT_SHARE[gender]
            if forced:
                category = forced[2]
            else:
                category = rng.choice(categories, p=[shares[c] for c in categories])
            use_filler = (not forced) and rng.random() < P_FILLER_TARGET
            if use_filler:
                if rng.random() < 0.5:
                    word = (FILLER_ADJ[int(rng.integers(0, len(FILLER_ADJ)))], "ADJ")
                else:
                    word = (FILLER_NOUN[int(rng.integers(0, len(FILLER_NOUN)))], "NOUN")
            elif gender == "F" and category == "physical" and rng.random() < 0.4:
                row = PLANTED_F_PHYSICAL[int(rng.integers(0, len(PLANTED_F_PHYSICAL)))]
                word = (row[0], row[1])
            else:
                rows = lexicon_by_cat[category]
                row = rows[int(rng.integers(0, len(rows)))]
                word = (row[0], row[1])
            if word[1] == "ADJ":
                template = int(rng.integers(0, 2))
            else:
                template = 2 + int(rng.integers(0, 2))
            rows_out = _sentence_rows(
                template,
                pol,
                word,
                FILLER_ADJ[int(rng.integers(0, len(FILLER_ADJ)))],
                FILLER_VERB[int(rng.integers(0, len(FILLER_VERB)))],
            )
            sent_writer = SentenceWriter()
            sent_writer.add(f"{doc_id}.s{s}", rows_out)
            conllu_lines.extend(sent_writer.lines)

    paths = {
        "conllu": os.path.join(out_dir, "corpus.conllu"),
        "metadata": os.path.join(out_dir, "metadata.jsonl"),
        "registry": os.path.join(out_dir, "registry.csv"),
        "lexicon": os.path.join(out_dir, "lexicon.csv"),
        "stopwords": os.path.join(out_dir, "stopwords.txt"),
    }
    with open(paths["conllu"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(conllu_lines) + "\n")
    with open(paths["metadata"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(metadata_lines) + "\n")
    with open(paths["registry"], "w", encoding="utf-8") as fh:
        for pid, given, surname, gender, role, jurisdiction in pols:
            fh.write(f"{pid};{given};{surname};{gender};{role}:{jurisdiction};;\n")
    with open(paths["lexicon"], "w", encoding="utf-8") as fh:
        fh.write(_score_csv(LEXICON_ROWS + PLANTED_F_PHYSICAL) + "\n")
    with open(paths["stopwords"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(STOPWORDS) + "\n")
    return paths


def write_config(paths, out_dir, config_path, seed=42, bootstrap=100, ma_window=90):
    lines = [
        "[covbias]",
        f"conllu = {paths['conllu']}",
        f"metadata = {paths['metadata']}",
        f"registry = {paths['registry']}",
        f"lexicon = {paths['lexicon']}",
        f"stopwords = {paths['stopwords']}",
        f"out = {out_dir}",
        f"seed = {seed}",
        f"bootstrap = {bootstrap}",
        f"ma_window = {ma_window}",
    ]
    with open(config_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return config_path
