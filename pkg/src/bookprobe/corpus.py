"""Book ingestion, gazetteer-based character tagging, and passage construction.

A corpus config file (JSON, schema in docs/schemas.md) carries book metadata
and the per-book character gazetteer; raw books come in as plain-text UTF-8.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import ConfigError, EmptyDocumentError, IngestError, NoNameError, StructuralError
from .perturb import find_alias_spans, mask_character

__all__ = [
    "BookMeta",
    "Paragraph",
    "CharacterGazetteer",
    "Passage",
    "PassagePartition",
    "load_corpus_config",
    "ingest_book",
    "tag_character_names",
    "build_passages",
]


@dataclass(frozen=True)
class BookMeta:
    book_id: str
    author: str
    titles: dict[str, list[str]]  # lang -> accepted titles, first entry canonical
    pub_years: dict[str, int] = field(default_factory=dict)
    copyrighted: bool = False

    def __post_init__(self) -> None:
        if "en" not in self.titles:
            raise ConfigError(f"book {self.book_id!r}: titles must include 'en'")
        for lang, aliases in self.titles.items():
            if not aliases:
                raise ConfigError(f"book {self.book_id!r}: empty title list for {lang!r}")

    def accepted_titles(self, lang: str) -> list[str]:
        """English titles plus the passage language's titles, deduplicated."""
        seen: dict[str, None] = {}
        for t in self.titles.get("en", []) + self.titles.get(lang, []):
            seen.setdefault(t)
        return list(seen)


@dataclass(frozen=True)
class Paragraph:
    book_id: str
    lang: str
    seq: int
    text: str
    sentence_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Character:
    name: str
    aliases: dict[str, list[str]]  # lang -> alias strings

    def aliases_for(self, lang: str) -> list[str]:
        """Aliases in the given language, falling back to English."""
        return self.aliases.get(lang) or self.aliases.get("en") or []


class CharacterGazetteer:
    """Per-book rosters of character names with per-language aliases."""

    def __init__(self, rosters: dict[str, list[Character]]):
        for book_id, chars in rosters.items():
            names = [c.name for c in chars]
            if len(names) != len(set(names)):
                raise ConfigError(f"book {book_id!r}: duplicate canonical names")
            for c in chars:
                if not c.aliases.get("en"):
                    raise ConfigError(
                        f"book {book_id!r}: character {c.name!r} needs at least one 'en' alias"
                    )
                if any(not v for v in c.aliases.values()):
                    raise ConfigError(f"book {book_id!r}: character {c.name!r} has an empty alias list")
        self._rosters = rosters

    def characters(self, book_id: str) -> list[Character]:
        if book_id not in self._rosters:
            raise ConfigError(f"no gazetteer entry for book {book_id!r}")
        return self._rosters[book_id]

    def character(self, book_id: str, name: str) -> Character:
        for c in self.characters(book_id):
            if c.name == name:
                return c
        raise ConfigError(f"book {book_id!r}: unknown character {name!r}")

    def books(self) -> list[str]:
        return sorted(self._rosters)


@dataclass
class Passage:
    passage_id: str
    book_id: str
    texts: dict[str, str]
    gold_name: str | None = None
    name_aliases: dict[str, str] = field(default_factory=dict)
    has_character: bool = False
    masked_texts: dict[str, str] = field(default_factory=dict)
    token_counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.has_character != (self.gold_name is not None):
            raise StructuralError(
                f"passage {self.passage_id!r}: has_character must mirror gold_name presence"
            )
        if self.has_character and set(self.masked_texts) != set(self.texts):
            raise StructuralError(
                f"passage {self.passage_id!r}: masked_texts must cover every language"
            )

    @property
    def languages(self) -> list[str]:
        return sorted(self.texts)


class PassagePartition(NamedTuple):
    one_name_set: list[Passage]
    no_name_set: list[Passage]
    discarded: list[tuple[dict[str, Paragraph], str]]  # (group, reason)


def load_corpus_config(path: str | Path) -> tuple[dict[str, BookMeta], CharacterGazetteer]:
    """Read book metadata and gazetteer from the JSON config (docs/schemas.md)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    metas: dict[str, BookMeta] = {}
    rosters: dict[str, list[Character]] = {}
    for book in raw.get("books", []):
        try:
            meta = BookMeta(
                book_id=book["book_id"],
                author=book["author"],
                titles=book["titles"],
                pub_years={k: int(v) for k, v in book.get("pub_years", {}).items()},
                copyrighted=bool(book.get("copyrighted", False)),
            )
        except KeyError as exc:
            raise ConfigError(f"book entry missing field {exc}") from exc
        if meta.book_id in metas:
            raise ConfigError(f"duplicate book_id {meta.book_id!r}")
        metas[meta.book_id] = meta
        rosters[meta.book_id] = [
            Character(name=c["name"], aliases=c["aliases"]) for c in book.get("characters", [])
        ]
    return metas, CharacterGazetteer(rosters)


_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def _sentence_ids(book_id: str, lang: str, seq: int, text: str) -> tuple[str, ...]:
    n = max(1, len(_SENTENCE_SPLIT.split(text)))
    return tuple(f"{book_id}:{lang}:{seq}:{k}" for k in range(n))


def ingest_book(
    raw_text: str | bytes,
    meta: BookMeta,
    lang: str,
    splitter: str = "blank-line",
) -> list[Paragraph]:
    """Split a plain-text book into trimmed, sequentially numbered paragraphs.

    ``splitter`` is "blank-line" (default, paragraphs separated by one or more
    empty lines) or "single-newline" for texts that put one paragraph per line.
    """
    if isinstance(raw_text, bytes):
        try:
            raw_text = raw_text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError(f"book {meta.book_id!r}: input is not valid UTF-8") from exc
    if splitter == "blank-line":
        blocks = re.split(r"\n\s*\n", raw_text)
    elif splitter == "single-newline":
        blocks = raw_text.split("\n")
    else:
        raise ConfigError(f"unknown splitter {splitter!r}")

    paragraphs: list[Paragraph] = []
    for block in blocks:
        text = re.sub(r"\s+", " ", block).strip()
        if not text:
            continue
        seq = len(paragraphs)
        paragraphs.append(
            Paragraph(
                book_id=meta.book_id,
                lang=lang,
                seq=seq,
                text=text,
                sentence_ids=_sentence_ids(meta.book_id, lang, seq, text),
            )
        )
    if not paragraphs:
        raise EmptyDocumentError(f"book {meta.book_id!r} ({lang}): no paragraphs found")
    return paragraphs


def tag_character_names(
    p: Paragraph, g: CharacterGazetteer
) -> list[tuple[str, tuple[int, int]]]:
    """Whole-token character-name matches in one paragraph.

    Returns (canonical_name, (start, end)) pairs in document order;
    overlaps resolve to the longest alias. Aliases for the paragraph's
    language are used, falling back to English.
    """
    alias_owner: dict[str, str] = {}
    for character in g.characters(p.book_id):
        for alias in character.aliases_for(p.lang):
            # Longer alias wins ties between characters sharing a surface form.
            if alias not in alias_owner:
                alias_owner[alias] = character.name
    spans = find_alias_spans(p.text, list(alias_owner))
    return [(alias_owner[alias], (start, end)) for start, end, alias in spans]


def _distinct_names(paragraph: Paragraph, g: CharacterGazetteer) -> list[str]:
    seen: dict[str, None] = {}
    for name, _ in tag_character_names(paragraph, g):
        seen.setdefault(name)
    return list(seen)


def build_passages(
    groups: Iterable[dict[str, Paragraph]],
    g: CharacterGazetteer,
    langs: list[str] | None = None,
) -> PassagePartition:
    """Partition aligned paragraph groups into one-name and no-name passage sets.

    A group is a language-complete mapping lang -> Paragraph for one aligned
    excerpt. Grouping is decided on the English text: exactly one distinct
    canonical name puts the group in the one-name set (with every language
    masked), zero names in the no-name set, two or more distinct names (or a
    language whose text cannot be masked) discards the group.
    """
    groups = list(groups)
    one_name: list[Passage] = []
    no_name: list[Passage] = []
    discarded: list[tuple[dict[str, Paragraph], str]] = []

    expected = set(langs) if langs is not None else (set(groups[0]) if groups else set())
    if "en" not in expected:
        raise StructuralError("aligned groups must include an 'en' paragraph")

    for group in groups:
        missing = expected - set(group)
        if missing:
            raise StructuralError(f"group missing language(s): {', '.join(sorted(missing))}")

        en_para = group["en"]
        book_id = en_para.book_id
        passage_id = f"{book_id}-{en_para.seq:05d}"
        texts = {lang: group[lang].text for lang in expected}
        names = _distinct_names(en_para, g)

        if len(names) > 1:
            discarded.append((group, f"multiple names: {', '.join(sorted(names))}"))
            continue
        if not names:
            no_name.append(Passage(passage_id=passage_id, book_id=book_id, texts=texts))
            continue

        character = g.character(book_id, names[0])
        masked: dict[str, str] = {}
        unmaskable = None
        for lang in expected:
            try:
                masked[lang] = mask_character(texts[lang], character.aliases_for(lang))
            except NoNameError:
                unmaskable = lang
                break
        if unmaskable is not None:
            discarded.append((group, f"name not maskable in {unmaskable!r}"))
            continue

        aliases = {lang: character.aliases_for(lang)[0] for lang in expected}
        one_name.append(
            Passage(
                passage_id=passage_id,
                book_id=book_id,
                texts=texts,
                gold_name=character.name,
                name_aliases=aliases,
                has_character=True,
                masked_texts=masked,
            )
        )
    return PassagePartition(one_name, no_name, discarded)
