import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bookprobe.corpus import (
    BookMeta,
    Character,
    CharacterGazetteer,
    Paragraph,
    build_passages,
    ingest_book,
    load_corpus_config,
    tag_character_names,
)
from bookprobe.errors import ConfigError, EmptyDocumentError, IngestError, StructuralError
from bookprobe.perturb import MASK_TOKEN


@pytest.fixture
def meta():
    return BookMeta(book_id="bk", author="A. Author", titles={"en": ["Some Book"]})


@pytest.fixture
def gazetteer():
    return CharacterGazetteer(
        {
            "bk": [
                Character(name="Tom", aliases={"en": ["Tom"], "es": ["Tomás"]}),
                Character(name="Huck", aliases={"en": ["Huck", "Huckleberry"]}),
            ]
        }
    )


class TestIngestBook:
    def test_blank_line_split(self, meta):
        paras = ingest_book("A.\n\nB.\n\n\nC.", meta, "en")
        assert [p.text for p in paras] == ["A.", "B.", "C."]
        assert [p.seq for p in paras] == [0, 1, 2]

    def test_all_whitespace_is_empty_document(self, meta):
        with pytest.raises(EmptyDocumentError):
            ingest_book("   \n\n  ", meta, "en")

    def test_undecodable_bytes(self, meta):
        with pytest.raises(IngestError):
            ingest_book(b"\xff\xfe\x00bad", meta, "en")

    def test_paragraph_count_matches_line_scanner(self, meta):
        # Independent count: scan lines, count transitions into non-blank runs.
        blocks = [f"Paragraph number {i} has a few words in it." for i in range(120)]
        raw = "\n\n".join(blocks)
        expected = 0
        in_block = False
        for line in raw.split("\n"):
            if line.strip():
                if not in_block:
                    expected += 1
                in_block = True
            else:
                in_block = False
        paras = ingest_book(raw, meta, "en")
        assert expected == 120
        assert len(paras) == expected
        assert [p.seq for p in paras] == list(range(120))

    def test_single_newline_splitter(self, meta):
        paras = ingest_book("one\ntwo\nthree", meta, "en", splitter="single-newline")
        assert len(paras) == 3

    def test_internal_whitespace_collapsed(self, meta):
        paras = ingest_book("word   word\tword", meta, "en")
        assert paras[0].text == "word word word"

    def test_sentence_ids_stable(self, meta):
        paras = ingest_book("First one. Second one?\n\nAnother block.", meta, "en")
        assert paras[0].sentence_ids == ("bk:en:0:0", "bk:en:0:1")
        assert paras[1].sentence_ids == ("bk:en:1:0",)


class TestTagCharacterNames:
    def test_single_mention(self, gazetteer):
        p = Paragraph(book_id="bk", lang="en", seq=0,
                      text="Of course if Tom was home he'd put it right in a moment,")
        tags = tag_character_names(p, gazetteer)
        assert len(tags) == 1
        name, (start, end) = tags[0]
        assert name == "Tom"
        assert p.text[start:end] == "Tom"

    def test_no_mentions(self, gazetteer):
        p = Paragraph(book_id="bk", lang="en", seq=0, text="nobody here at all")
        assert tag_character_names(p, gazetteer) == []

    def test_whole_token_rejects_substring(self, gazetteer):
        p = Paragraph(book_id="bk", lang="en", seq=0, text="Tomas spoke")
        assert tag_character_names(p, gazetteer) == []

    def test_language_aliases_with_english_fallback(self, gazetteer):
        p = Paragraph(book_id="bk", lang="es", seq=0, text="Entonces Tomás y Huck salieron")
        names = {name for name, _ in tag_character_names(p, gazetteer)}
        assert names == {"Tom", "Huck"}

    def test_longest_match_wins(self):
        g = CharacterGazetteer(
            {"bk": [Character(name="Sawyer", aliases={"en": ["Tom Sawyer", "Tom"]})]}
        )
        p = Paragraph(book_id="bk", lang="en", seq=0, text="Tom Sawyer came by")
        tags = tag_character_names(p, g)
        assert [(n, p.text[s:e]) for n, (s, e) in tags] == [("Sawyer", "Tom Sawyer")]

    def test_spans_never_overlap(self, gazetteer):
        p = Paragraph(book_id="bk", lang="en", seq=0,
                      text="Huckleberry and Huck and Tom and Tom")
        tags = tag_character_names(p, gazetteer)
        spans = [span for _, span in tags]
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            assert e1 <= s2
        for _, (s, e) in tags:
            assert p.text[s:e] in {"Tom", "Huck", "Huckleberry"}

    def test_case_sensitive_first_letter(self, gazetteer):
        p = Paragraph(book_id="bk", lang="en", seq=0, text="a tom cat walked in")
        assert tag_character_names(p, gazetteer) == []


def group_of(texts: dict[str, str], seq: int = 0) -> dict[str, Paragraph]:
    return {
        lang: Paragraph(book_id="bk", lang=lang, seq=seq, text=text)
        for lang, text in texts.items()
    }


class TestBuildPassages:
    def test_single_name_multiple_mentions_masked(self, gazetteer):
        groups = [group_of({"en": "Tom saw Tom near the fence", "es": "Tomás vio a Tomás"})]
        one, no, discarded = build_passages(groups, gazetteer)
        assert len(one) == 1 and not no and not discarded
        p = one[0]
        assert p.gold_name == "Tom"
        assert p.masked_texts["en"] == f"{MASK_TOKEN} saw {MASK_TOKEN} near the fence"
        assert p.masked_texts["es"] == f"{MASK_TOKEN} vio a {MASK_TOKEN}"
        assert p.name_aliases == {"en": "Tom", "es": "Tomás"}

    def test_two_names_discarded(self, gazetteer):
        groups = [group_of({"en": "Tom and Huck ran off", "es": "Tomás corrió"})]
        one, no, discarded = build_passages(groups, gazetteer)
        assert not one and not no and len(discarded) == 1

    def test_zero_names_no_name_set(self, gazetteer):
        groups = [group_of({"en": "the river was quiet", "es": "el río estaba quieto"})]
        one, no, discarded = build_passages(groups, gazetteer)
        assert not one and len(no) == 1 and not discarded
        assert no[0].has_character is False
        assert no[0].masked_texts == {}

    def test_language_incomplete_group_names_missing_language(self, gazetteer):
        groups = [
            group_of({"en": "Tom sat", "es": "Tomás se sentó"}),
            group_of({"en": "Tom stood"}, seq=1),
        ]
        with pytest.raises(StructuralError, match="es"):
            build_passages(groups, gazetteer)

    def test_unmaskable_translation_discarded(self, gazetteer):
        # Spanish translation dropped the name entirely.
        groups = [group_of({"en": "Tom waited", "es": "esperó un rato"})]
        one, no, discarded = build_passages(groups, gazetteer)
        assert not one and not no and len(discarded) == 1
        assert "es" in discarded[0][1]

    def test_partition_covers_input_exactly_once(self, gazetteer):
        groups = [
            group_of({"en": "Tom sat still"}, 0),
            group_of({"en": "nothing to see"}, 1),
            group_of({"en": "Tom met Huck"}, 2),
            group_of({"en": "Huck hid away"}, 3),
        ]
        one, no, discarded = build_passages(groups, gazetteer, langs=["en"])
        assert len(one) + len(no) + len(discarded) == len(groups)
        ids = [p.passage_id for p in one + no]
        assert len(ids) == len(set(ids))

    def test_masked_invariant_holds(self, mock_library):
        _, gazetteer, passages = mock_library
        for p in passages:
            for lang, masked in p.masked_texts.items():
                assert MASK_TOKEN in masked
                character = gazetteer.character(p.book_id, p.gold_name)
                for alias in character.aliases_for(lang):
                    assert alias not in masked


class TestConfigLoading:
    def test_round_trip(self, tmp_path):
        config = {
            "books": [
                {
                    "book_id": "bk",
                    "author": "A. Author",
                    "titles": {"en": ["Some Book"], "vi": ["Sách Nào"]},
                    "pub_years": {"en": 1900},
                    "copyrighted": False,
                    "characters": [{"name": "Tom", "aliases": {"en": ["Tom"]}}],
                }
            ]
        }
        path = tmp_path / "corpus.json"
        path.write_text(json.dumps(config), encoding="utf-8")
        metas, gazetteer = load_corpus_config(path)
        assert metas["bk"].accepted_titles("vi") == ["Some Book", "Sách Nào"]
        assert gazetteer.character("bk", "Tom").aliases_for("vi") == ["Tom"]

    def test_titles_must_include_english(self):
        with pytest.raises(ConfigError):
            BookMeta(book_id="x", author="a", titles={"es": ["T"]})

    def test_duplicate_character_names_rejected(self):
        with pytest.raises(ConfigError):
            CharacterGazetteer(
                {"bk": [Character("Tom", {"en": ["Tom"]}), Character("Tom", {"en": ["T"]})]}
            )

    @given(st.lists(st.sampled_from(["Tom", "Huck", "nobody", "the river"]), min_size=1, max_size=4))
    def test_partition_property(self, subjects):
        g = CharacterGazetteer(
            {"bk": [Character("Tom", {"en": ["Tom"]}), Character("Huck", {"en": ["Huck"]})]}
        )
        groups = [
            group_of({"en": f"{subject} waited by the door"}, seq=i)
            for i, subject in enumerate(subjects)
        ]
        one, no, discarded = build_passages(groups, g, langs=["en"])
        assert len(one) + len(no) + len(discarded) == len(groups)
