"""Token-count filtering and per-book stratified sampling."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .corpus import Passage

__all__ = [
    "TokenizerHandle",
    "whitespace_tokenizer",
    "load_subword_tokenizer",
    "filter_min_tokens",
    "stratified_sample",
]


@dataclass(frozen=True)
class TokenizerHandle:
    name: str
    count_fn: Callable[[str], int]

    def count(self, text: str) -> int:
        return self.count_fn(text)


def whitespace_tokenizer() -> TokenizerHandle:
    return TokenizerHandle(name="whitespace", count_fn=lambda text: len(text.split()))


def load_subword_tokenizer(vocab_path: str | Path, name: str | None = None) -> TokenizerHandle:
    """Greedy longest-match subword counter over a one-piece-per-line vocab file.

    Pieces not covered by the vocabulary count one token per character, so the
    count is defined for any input.
    """
    pieces = set()
    max_len = 1
    with open(vocab_path, encoding="utf-8") as fh:
        for line in fh:
            piece = line.rstrip("\n")
            if piece:
                pieces.add(piece)
                max_len = max(max_len, len(piece))

    def count(text: str) -> int:
        total = 0
        for word in text.split():
            i = 0
            while i < len(word):
                for size in range(min(max_len, len(word) - i), 0, -1):
                    if word[i : i + size] in pieces:
                        i += size
                        break
                else:
                    i += 1
                total += 1
        return total

    return TokenizerHandle(name=name or Path(vocab_path).stem, count_fn=count)


def filter_min_tokens(
    passages: list[Passage],
    lang: str,
    min_tokens: int,
    tok: TokenizerHandle,
) -> list[Passage]:
    """Keep passages whose token count in ``lang`` is at least ``min_tokens``.

    Counts are computed once and cached on each record's token_counts map, so
    downstream length bucketing sees the same numbers.
    """
    if min_tokens < 0:
        raise ValueError("min_tokens must be >= 0")
    kept: list[Passage] = []
    for p in passages:
        if lang not in p.token_counts:
            p.token_counts[lang] = tok.count(p.texts.get(lang, ""))
        if p.token_counts[lang] >= min_tokens:
            kept.append(p)
    return kept


def _largest_remainder_quotas(sizes: dict[str, int], cap: int) -> dict[str, int]:
    total = sum(sizes.values())
    raw = {name: cap * size / total for name, size in sizes.items()}
    quotas = {name: int(raw[name]) for name in sizes}
    leftover = cap - sum(quotas.values())
    # Ties on the fractional remainder break toward the lexicographically
    # smaller name.
    order = sorted(sizes, key=lambda name: (-(raw[name] - quotas[name]), name))
    for name in order[:leftover]:
        quotas[name] += 1
    return quotas


def stratified_sample(passages: list[Passage], cap: int = 100, seed: int = 0) -> list[Passage]:
    """At most ``cap`` passages from one book, balanced across gold names.

    Quotas are proportional to stratum sizes with largest-remainder rounding;
    sampling within a stratum is without replacement, seeded, and independent
    of input order (records are ordered by passage_id first).
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    books = {p.book_id for p in passages}
    if len(books) > 1:
        raise ValueError(f"stratified_sample expects one book, got {sorted(books)}")
    if len(passages) <= cap:
        return list(passages)

    ordered = sorted(passages, key=lambda p: p.passage_id)
    strata: dict[str, list[Passage]] = {}
    for p in ordered:
        strata.setdefault(p.gold_name or "", []).append(p)

    quotas = _largest_remainder_quotas({name: len(ps) for name, ps in strata.items()}, cap)
    rng = random.Random(seed)
    chosen: list[Passage] = []
    for name in sorted(strata):
        stratum = strata[name]
        take = min(quotas[name], len(stratum))
        chosen.extend(rng.sample(stratum, take))
    return sorted(chosen, key=lambda p: p.passage_id)
