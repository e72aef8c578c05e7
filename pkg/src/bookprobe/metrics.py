"""Text normalization and the n-gram/edit-distance metrics used across the toolkit.

All scores are sentence-level and live on a 0..100 scale except
:func:`levenshtein_similarity`, which is a 0..1 ratio.
"""

from __future__ import annotations

import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass

__all__ = [
    "MetricConfig",
    "normalize_text",
    "levenshtein_distance",
    "levenshtein_similarity",
    "smoothed_bleu",
    "chrf_pp",
]


@dataclass(frozen=True)
class MetricConfig:
    """Orders and weights for the n-gram metrics."""

    bleu_max_order: int = 4
    chrf_char_order: int = 6
    chrf_word_order: int = 2
    chrf_beta: float = 2.0

    def __post_init__(self) -> None:
        if self.bleu_max_order < 1 or self.chrf_char_order < 1 or self.chrf_word_order < 1:
            raise ValueError("n-gram orders must be >= 1")
        if self.chrf_beta <= 0:
            raise ValueError("chrf_beta must be > 0")


DEFAULT_METRIC_CONFIG = MetricConfig()

# Folds for common letters that NFKD decomposition leaves untouched.
_FOLD_TABLE = str.maketrans(
    {
        "ß": "ss",
        "æ": "ae",
        "Æ": "AE",
        "ø": "o",
        "Ø": "O",
        "œ": "oe",
        "Œ": "OE",
        "đ": "d",
        "Đ": "D",
        "ð": "d",
        "Ð": "D",
        "þ": "th",
        "Þ": "Th",
        "ł": "l",
        "Ł": "L",
        "ħ": "h",
        "Ħ": "H",
        "ı": "i",
    }
)


def _fold_diacritics(s: str) -> str:
    decomposed = unicodedata.normalize("NFKD", s.translate(_FOLD_TABLE))
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_edge_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def normalize_text(s: str) -> str:
    """Fold diacritics, lowercase, strip edge punctuation per token, collapse spaces.

    Idempotent; tokens consisting solely of punctuation are dropped.
    """
    folded = _fold_diacritics(s).lower()
    tokens = [_strip_edge_punct(t) for t in folded.split()]
    return " ".join(t for t in tokens if t)


def levenshtein_distance(a: str, b: str) -> int:
    """Edit distance with unit insert/delete/substitute costs."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        curr = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            curr.append(min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost))
        prev = curr
    return prev[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - distance/max(len); two empty strings are perfectly similar."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / max(len(a), len(b))


def _word_ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def smoothed_bleu(
    hypothesis: str,
    reference: str,
    cfg: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """Sentence BLEU over whitespace tokens with add-one smoothing for orders >= 2.

    The unigram precision is unsmoothed: zero unigram overlap (or an empty
    hypothesis) scores 0. Brevity penalty is min(1, exp(1 - |ref|/|hyp|)) on
    token counts. Returns 0..100.
    """
    hyp = hypothesis.split()
    ref = reference.split()
    if not hyp:
        return 0.0

    log_sum = 0.0
    n_orders = cfg.bleu_max_order
    for n in range(1, n_orders + 1):
        hyp_ngrams = _word_ngrams(hyp, n)
        ref_ngrams = _word_ngrams(ref, n)
        matched = sum(min(c, ref_ngrams[g]) for g, c in hyp_ngrams.items())
        total = sum(hyp_ngrams.values())
        if n == 1:
            if matched == 0:
                return 0.0
            p = matched / total
        else:
            p = (matched + 1) / (total + 1)
        log_sum += math.log(p)

    bp = min(1.0, math.exp(1.0 - len(ref) / len(hyp)))
    return 100.0 * bp * math.exp(log_sum / n_orders)


def _char_ngrams(s: str, n: int) -> Counter:
    return Counter(s[i : i + n] for i in range(len(s) - n + 1))


def chrf_pp(
    hypothesis: str,
    reference: str,
    cfg: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> float:
    """Character+word n-gram F-score (beta weights recall). Returns 0..100.

    Precision and recall are each arithmetically averaged over character
    orders 1..chrf_char_order (whitespace removed first) and word orders
    1..chrf_word_order; an order contributes only if at least one side has
    n-grams of that order.
    """
    hyp_chars = re.sub(r"\s+", "", hypothesis)
    ref_chars = re.sub(r"\s+", "", reference)
    hyp_words = hypothesis.split()
    ref_words = reference.split()

    grams: list[tuple[Counter, Counter]] = []
    for n in range(1, cfg.chrf_char_order + 1):
        grams.append((_char_ngrams(hyp_chars, n), _char_ngrams(ref_chars, n)))
    for n in range(1, cfg.chrf_word_order + 1):
        grams.append((_word_ngrams(hyp_words, n), _word_ngrams(ref_words, n)))

    precision_sum = 0.0
    recall_sum = 0.0
    counted = 0
    for hyp_ngrams, ref_ngrams in grams:
        hyp_total = sum(hyp_ngrams.values())
        ref_total = sum(ref_ngrams.values())
        if hyp_total == 0 and ref_total == 0:
            continue
        matched = sum(min(c, ref_ngrams[g]) for g, c in hyp_ngrams.items())
        precision_sum += matched / hyp_total if hyp_total else 0.0
        recall_sum += matched / ref_total if ref_total else 0.0
        counted += 1

    if counted == 0:
        return 0.0
    precision = precision_sum / counted
    recall = recall_sum / counted
    if precision + recall == 0.0:
        return 0.0
    beta_sq = cfg.chrf_beta**2
    return 100.0 * (1 + beta_sq) * precision * recall / (beta_sq * precision + recall)
