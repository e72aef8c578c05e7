"""Monotone paragraph alignment via BLEU similarity, plus the length/BLEU filters.

The target-language book is first machine-translated to English (the pivot);
alignment then scores English paragraphs against pivot paragraphs with
sentence BLEU and finds the best monotone 1:1 matching by dynamic programming.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .corpus import Paragraph
from .errors import EmptyInputError
from .metrics import DEFAULT_METRIC_CONFIG, MetricConfig, smoothed_bleu

__all__ = [
    "Verdict",
    "AlignmentCandidate",
    "FilterConfig",
    "similarity_matrix",
    "align_monotone",
    "build_candidates",
    "apply_filters",
]


class Verdict(str, Enum):
    KEPT = "kept"
    DROPPED_LENGTH = "dropped_length"
    DROPPED_BLEU = "dropped_bleu"
    PENDING_REVIEW = "pending_review"


@dataclass(frozen=True)
class AlignmentCandidate:
    en_seq: int
    tgt_seq: int
    lang: str
    pivot_text: str
    bleu: float
    en_chars: int
    tgt_chars: int
    verdict: Verdict = Verdict.PENDING_REVIEW

    def __post_init__(self) -> None:
        if not 0.0 <= self.bleu <= 100.0:
            raise ValueError("bleu must be in [0, 100]")


@dataclass(frozen=True)
class FilterConfig:
    bleu_threshold: float = 5.0
    length_ratio: float = 3.0

    def __post_init__(self) -> None:
        if self.bleu_threshold < 0:
            raise ValueError("bleu_threshold must be >= 0")
        if self.length_ratio <= 1:
            raise ValueError("length_ratio must be > 1")


def similarity_matrix(
    en_paras: list[Paragraph],
    pivot_paras: list[Paragraph],
    cfg: MetricConfig = DEFAULT_METRIC_CONFIG,
) -> np.ndarray:
    """Pairwise smoothed BLEU, entry (i, j) scoring pivot j against English reference i."""
    if not en_paras or not pivot_paras:
        raise EmptyInputError("similarity_matrix needs non-empty paragraph lists")
    sim = np.zeros((len(en_paras), len(pivot_paras)))
    for i, en in enumerate(en_paras):
        for j, pivot in enumerate(pivot_paras):
            sim[i, j] = smoothed_bleu(pivot.text, en.text, cfg)
    return sim


def align_monotone(sim: np.ndarray, skip_penalty: float = 1.0) -> list[tuple[int, int]]:
    """Best monotone 1:1 matching under the net-gain objective.

    A matched pair (i, j) contributes sim[i, j] - skip_penalty; unmatched rows
    and columns cost nothing, so a pair is only matched when its similarity
    beats the skip penalty and the empty matching scores 0. Both coordinates
    of the result are strictly increasing.
    """
    sim = np.asarray(sim, dtype=float)
    if sim.ndim != 2:
        raise ValueError("similarity matrix must be 2-dimensional")
    m, n = sim.shape

    # score[i][j]: best value using the first i rows and j columns.
    score = np.zeros((m + 1, n + 1))
    # move: 0 = skip row, 1 = skip column, 2 = match. Skips preferred on ties
    # so zero-gain matches never enter the result.
    move = np.zeros((m + 1, n + 1), dtype=np.int8)
    move[0, 1:] = 1
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            best = score[i - 1, j]
            best_move = 0
            if score[i, j - 1] > best:
                best = score[i, j - 1]
                best_move = 1
            matched = score[i - 1, j - 1] + sim[i - 1, j - 1] - skip_penalty
            if matched > best:
                best = matched
                best_move = 2
            score[i, j] = best
            move[i, j] = best_move

    pairs: list[tuple[int, int]] = []
    i, j = m, n
    while i > 0 and j > 0:
        if move[i, j] == 2:
            pairs.append((i - 1, j - 1))
            i -= 1
            j -= 1
        elif move[i, j] == 1:
            j -= 1
        else:
            i -= 1
    pairs.reverse()
    return pairs


def build_candidates(
    en_paras: list[Paragraph],
    tgt_paras: list[Paragraph],
    pivot_paras: list[Paragraph],
    pairs: list[tuple[int, int]],
    sim: np.ndarray,
    lang: str,
) -> list[AlignmentCandidate]:
    """Materialize matched (i, j) pairs as filterable candidates."""
    return [
        AlignmentCandidate(
            en_seq=i,
            tgt_seq=j,
            lang=lang,
            pivot_text=pivot_paras[j].text,
            bleu=float(sim[i, j]),
            en_chars=len(en_paras[i].text),
            tgt_chars=len(tgt_paras[j].text),
        )
        for i, j in pairs
    ]


def apply_filters(
    cands: list[AlignmentCandidate], cfg: FilterConfig = FilterConfig()
) -> list[AlignmentCandidate]:
    """Set verdicts: length filter first, then the BLEU threshold.

    The English side is dropped when strictly longer than length_ratio times
    the target side (character counts); BLEU exactly at the threshold is kept.
    Idempotent and order-preserving.
    """
    out: list[AlignmentCandidate] = []
    for cand in cands:
        if cand.en_chars > cfg.length_ratio * cand.tgt_chars:
            verdict = Verdict.DROPPED_LENGTH
        elif cand.bleu < cfg.bleu_threshold:
            verdict = Verdict.DROPPED_BLEU
        else:
            verdict = Verdict.PENDING_REVIEW
        out.append(replace(cand, verdict=verdict))
    return out
