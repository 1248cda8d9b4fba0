import datetime

import pytest
from hypothesis import given
from hypothesis import strategies as st

from covbias.model import (
    Category,
    Gender,
    Mention,
    MentionPattern,
    PersonalizationRecord,
    Sentence,
    SourceType,
    Token,
    normalize_lemma,
)


class TestNormalizeLemma:
    def test_case_folding(self):
        assert normalize_lemma("Sceriffo") == "sceriffo"

    def test_diacritics_preserved(self):
        assert normalize_lemma("città") == "città"

    def test_punctuation_only_is_non_lexical(self):
        assert normalize_lemma("...") is None

    def test_edge_punctuation_stripped(self):
        assert normalize_lemma("«bello»,") == "bello"

    def test_interior_punctuation_kept(self):
        assert normalize_lemma("d'oro") == "d'oro"

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            normalize_lemma("")

    @given(st.text(min_size=1, max_size=30))
    def test_idempotent(self, raw):
        once = normalize_lemma(raw)
        if once is not None:
            assert normalize_lemma(once) == once


class TestEnums:
    @pytest.mark.parametrize("enum_cls", [Gender, SourceType, Category, MentionPattern])
    def test_round_trip(self, enum_cls):
        for member in enum_cls:
            assert enum_cls(member.value) is member

    def test_category_values(self):
        assert {c.value for c in Category} == {
            "moral_behavioral",
            "physical",
            "socio_economic",
        }


class TestToken:
    def test_rejects_self_head(self):
        with pytest.raises(ValueError):
            Token(1, "a", "a", "NOUN", 1, "root")

    def test_rejects_zero_index(self):
        with pytest.raises(ValueError):
            Token(0, "a", "a", "NOUN", 1, "root")

    def test_rejects_empty_lemma(self):
        with pytest.raises(ValueError):
            Token(1, "a", "", "NOUN", 0, "root")


class TestSentence:
    def test_rejects_out_of_range_head(self):
        tokens = (
            Token(1, "a", "a", "NOUN", 3, "dep"),
            Token(2, "b", "b", "NOUN", 0, "root"),
        )
        with pytest.raises(ValueError):
            Sentence(doc_id="d", index=0, tokens=tokens)


class TestMention:
    def test_span(self):
        m = Mention("p", "d", 0, 2, 4, MentionPattern.NAME_SURNAME)
        assert list(m.span) == [2, 3, 4]

    def test_rejects_inverted_span(self):
        with pytest.raises(ValueError):
            Mention("p", "d", 0, 4, 2, MentionPattern.NAME_SURNAME)


class TestRecordSerialization:
    def test_json_round_trip(self):
        rec = PersonalizationRecord(
            pid="p1",
            gender=Gender.F,
            doc_id="d9",
            date=datetime.date(2019, 4, 3),
            source_type=SourceType.ONLINE,
            lemma="bello",
            upos="ADJ",
            category=Category.PHYSICAL,
            aggregate_sentiment=0.8,
            sentence_index=2,
        )
        assert PersonalizationRecord.from_json_dict(rec.to_json_dict()) == rec
