"""Deterministic passage perturbations: masking, word shuffling, MT placeholder guard."""

from __future__ import annotations

import hashlib
import logging
import random
import re

from .errors import NoNameError

MASK_TOKEN = "[MASK]"
PLACEHOLDER_TOKEN = "@@PLACEHOLDER@@"

logger = logging.getLogger(__name__)

__all__ = [
    "MASK_TOKEN",
    "PLACEHOLDER_TOKEN",
    "mask_character",
    "shuffle_words",
    "derive_seed",
    "protect_placeholders",
    "restore_placeholders",
]


def _whole_token_pattern(alias: str) -> re.Pattern:
    # Word boundaries by hand: \b misbehaves when an alias starts/ends with
    # punctuation (e.g. "Mr.Lorry").
    return re.compile(r"(?<![\w])" + re.escape(alias) + r"(?![\w])")


def find_alias_spans(text: str, aliases: list[str]) -> list[tuple[int, int, str]]:
    """All non-overlapping whole-token alias occurrences, longest match winning.

    Matching is literal: case-sensitive, diacritic-exact. Returns
    (start, end, alias) triples in document order.
    """
    candidates: list[tuple[int, int, str]] = []
    for alias in aliases:
        for m in _whole_token_pattern(alias).finditer(text):
            candidates.append((m.start(), m.end(), alias))
    # Longest match first at equal starts, then greedy left-to-right.
    candidates.sort(key=lambda c: (c[0], -(c[1] - c[0])))
    chosen: list[tuple[int, int, str]] = []
    last_end = -1
    for start, end, alias in candidates:
        if start >= last_end:
            chosen.append((start, end, alias))
            last_end = end
    return chosen


def mask_character(text: str, aliases: list[str]) -> str:
    """Replace every whole-token occurrence of any alias with the mask token.

    Raises NoNameError when no alias occurs; all characters outside the
    replaced spans are preserved byte-for-byte.
    """
    spans = find_alias_spans(text, aliases)
    if not spans:
        raise NoNameError(f"no occurrence of {aliases!r} in text")
    out: list[str] = []
    pos = 0
    for start, end, _ in spans:
        out.append(text[pos:start])
        out.append(MASK_TOKEN)
        pos = end
    out.append(text[pos:])
    return "".join(out)


def derive_seed(passage_id: str, lang: str, perturbation: str) -> int:
    """Stable shuffle seed for one (passage, language, perturbation) cell."""
    digest = hashlib.sha256(f"{passage_id}\x1f{lang}\x1f{perturbation}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def shuffle_words(text: str, seed: int) -> str:
    """Seeded Fisher-Yates permutation of whitespace tokens, joined by single spaces.

    Punctuation stays attached to its token; the mask token shuffles like any
    other word. Deterministic in (text, seed).
    """
    tokens = text.split()
    rng = random.Random(seed)
    for i in range(len(tokens) - 1, 0, -1):
        j = rng.randrange(i + 1)
        tokens[i], tokens[j] = tokens[j], tokens[i]
    return " ".join(tokens)


def protect_placeholders(text: str) -> str:
    """Swap each mask token for the MT-safe placeholder."""
    return text.replace(MASK_TOKEN, PLACEHOLDER_TOKEN)


def restore_placeholders(text: str) -> str:
    """Inverse of protect_placeholders."""
    if MASK_TOKEN in text:
        logger.warning("restore_placeholders: text already contains %s; result ambiguous", MASK_TOKEN)
    return text.replace(PLACEHOLDER_TOKEN, MASK_TOKEN)
