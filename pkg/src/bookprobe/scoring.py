"""Response parsing, per-task scoring, and the wrong-answer taxonomy.

Scoring is a pure function of (raw response, gold data, config); re-scoring a
result file reproduces it byte for byte. Score records serialize with sorted
keys (field reference in docs/schemas.md).
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field, replace
from typing import Iterable

from .corpus import BookMeta, CharacterGazetteer, Passage
from .metrics import chrf_pp, levenshtein_similarity, normalize_text
from .perturb import MASK_TOKEN
from .probe import ProbeResult, ProbeTask, select_text, split_for_prefix

__all__ = [
    "ScoreConfig",
    "ScoreRecord",
    "DpAnswer",
    "parse_dp_response",
    "extract_name_candidates",
    "score_direct_probe",
    "score_name_cloze",
    "score_prefix_probe",
    "classify_error",
    "score_probe_result",
    "score_many",
]

ERROR_CLASSES = (
    "abstention",
    "mask_echo",
    "pronoun",
    "honorific",
    "same_book_entity",
    "correct_author_wrong_title",
    "multi_guess",
    "broken_output",
    "other_wrong",
)

_DEFAULT_PRONOUNS = {
    "en": ["he", "she", "him", "her", "they", "them", "it", "i", "you", "we", "his", "hers"],
    "es": ["el", "ella", "ellos", "ellas", "usted", "yo", "tu"],
    "tr": ["o", "onlar", "ben", "sen", "biz", "siz"],
    "vi": ["anh", "chi", "co", "ong", "ba", "toi", "no"],
}

_DEFAULT_HONORIFICS = {
    "en": ["mr", "mrs", "ms", "miss", "dr", "sir", "madam", "lady", "lord", "mister", "master"],
    "es": ["senor", "senora", "senorita", "don", "dona"],
    "tr": ["bey", "hanim", "efendi"],
    "vi": ["ngai", "thay"],
}

_ABSTENTION_SUBSTRINGS = ("unknown", "book name", "author name")

# Common sentence-leading words that are not name guesses.
_NON_NAME_STARTERS = frozenset(
    "the a an i it this that he she they we you however based but and so if "
    "in on at of for to my his her their there here is was are note answer "
    "i'm it's that's there's let's i'll he's she's".split()
)


@dataclass(frozen=True)
class ScoreConfig:
    dp_fuzzy_threshold: float = 0.9
    nc_fuzzy_threshold: float = 0.7
    honorifics: dict[str, list[str]] = field(default_factory=lambda: dict(_DEFAULT_HONORIFICS))
    pronouns: dict[str, list[str]] = field(default_factory=lambda: dict(_DEFAULT_PRONOUNS))
    abstention_markers: tuple[str, ...] = ("unknown", "none", "n/a", "")
    name_pick: str = "last"  # or "first"
    broken_nontext_ratio: float = 0.4

    def __post_init__(self) -> None:
        for value in (self.dp_fuzzy_threshold, self.nc_fuzzy_threshold):
            if not 0 < value <= 1:
                raise ValueError("fuzzy thresholds must be in (0, 1]")


@dataclass(frozen=True)
class DpAnswer:
    title: str
    author: str
    n_candidates: int = 1


@dataclass(frozen=True)
class ScoreRecord:
    passage_id: str
    book_id: str
    lang: str
    task: str
    perturbation: str
    endpoint_id: str
    correct: bool | None = None
    lenient_correct: bool | None = None
    metric_value: float | None = None
    parsed_title: str | None = None
    parsed_author: str | None = None
    prediction: str | None = None
    error_class: str | None = None


_QUOTED_PAIR = re.compile(
    r"[\"']?title[\"']?\s*[:=-]\s*[\"“]?(?P<title>[^\"”\n,]+)[\"”]?\s*,?\s*"
    r"[\"']?author[\"']?\s*[:=-]\s*[\"“]?(?P<author>[^\"”\n]+?)[\"”]?\s*(?:$|[,.;\n])",
    re.IGNORECASE,
)
_TITLE_LINE = re.compile(r"^\W*title\W*[:=-]\s*(?P<value>.+)$", re.IGNORECASE | re.MULTILINE)
_AUTHOR_LINE = re.compile(r"^\W*author\W*[:=-]\s*(?P<value>.+)$", re.IGNORECASE | re.MULTILINE)


def _clean_field(value: str) -> str:
    return value.strip().strip("\"'“”*").strip()


def parse_dp_response(raw: str) -> DpAnswer | None:
    """Extract a labeled (title, author) pair, or None when unparseable.

    Quoted labeled fields are tried first, then line-based "title:"/"author:"
    heuristics. n_candidates counts distinct labeled pairs for multi-guess
    detection.
    """
    pairs = [
        (_clean_field(m.group("title")), _clean_field(m.group("author")))
        for m in _QUOTED_PAIR.finditer(raw)
    ]
    pairs = [p for p in pairs if p[0] and p[1]]
    if pairs:
        distinct = {(normalize_text(t), normalize_text(a)) for t, a in pairs}
        title, author = pairs[0]
        return DpAnswer(title=title, author=author, n_candidates=len(distinct))

    titles = [_clean_field(m.group("value")) for m in _TITLE_LINE.finditer(raw)]
    authors = [_clean_field(m.group("value")) for m in _AUTHOR_LINE.finditer(raw)]
    titles = [t for t in titles if t]
    authors = [a for a in authors if a]
    if titles and authors:
        return DpAnswer(
            title=titles[0],
            author=authors[0],
            n_candidates=max(len(set(titles)), len(set(authors))),
        )
    return None


def extract_name_candidates(raw: str) -> list[str]:
    """Name-like guesses in a cloze answer: capitalized token runs outside quotes."""
    unquoted = re.sub(r'"[^"]*"', " ", raw)
    candidates: list[str] = []
    run: list[str] = []
    for token in unquoted.split():
        stripped = token.strip(".,;:!?()[]{}*")
        word = stripped.rstrip("'’")
        starts_upper = bool(word) and word[0].isupper()
        if starts_upper and (run or word.lower() not in _NON_NAME_STARTERS):
            run.append(stripped)
            continue
        if run:
            candidates.append(" ".join(run))
            run = []
    if run:
        candidates.append(" ".join(run))
    return candidates


def _pick_prediction(raw: str, cfg: ScoreConfig) -> str:
    candidates = extract_name_candidates(raw)
    if not candidates:
        return raw.strip()
    return candidates[-1] if cfg.name_pick == "last" else candidates[0]


def score_direct_probe(
    parsed: DpAnswer | None,
    gold: BookMeta,
    lang: str,
    cfg: ScoreConfig,
    probe: ProbeResult,
) -> ScoreRecord:
    """Fuzzy author+title match against English plus passage-language titles."""
    correct = False
    title = author = None
    if parsed is not None:
        title, author = parsed.title, parsed.author
        author_ok = (
            levenshtein_similarity(normalize_text(author), normalize_text(gold.author))
            >= cfg.dp_fuzzy_threshold
        )
        title_ok = _title_matches(title, gold, lang, cfg.dp_fuzzy_threshold)
        correct = author_ok and title_ok
    return ScoreRecord(
        passage_id=probe.passage_id,
        book_id=probe.book_id,
        lang=probe.lang,
        task=probe.task,
        perturbation=probe.perturbation,
        endpoint_id=probe.endpoint_id,
        correct=correct,
        parsed_title=title,
        parsed_author=author,
    )


def _title_matches(title: str, gold: BookMeta, lang: str, threshold: float) -> bool:
    pred = normalize_text(title)
    return any(
        levenshtein_similarity(pred, normalize_text(t)) >= threshold
        for t in gold.accepted_titles(lang)
    )


def _gold_name_forms(passage: Passage, lang: str) -> list[str]:
    forms = [passage.gold_name or ""]
    alias = passage.name_aliases.get(lang)
    if alias:
        forms.append(alias)
    en_alias = passage.name_aliases.get("en")
    if en_alias:
        forms.append(en_alias)
    return [normalize_text(f) for f in forms if f]


def score_name_cloze(
    raw: str,
    passage: Passage,
    lang: str,
    cfg: ScoreConfig,
    probe: ProbeResult,
) -> ScoreRecord:
    """Exact normalized match is the headline; the fuzzy column is lenient-only."""
    prediction = _pick_prediction(raw, cfg)
    normalized = normalize_text(prediction)
    golds = _gold_name_forms(passage, lang)
    correct = normalized in golds
    lenient = correct or any(
        levenshtein_similarity(normalized, g) >= cfg.nc_fuzzy_threshold for g in golds
    )
    return ScoreRecord(
        passage_id=probe.passage_id,
        book_id=probe.book_id,
        lang=probe.lang,
        task=probe.task,
        perturbation=probe.perturbation,
        endpoint_id=probe.endpoint_id,
        correct=correct,
        lenient_correct=lenient,
        prediction=prediction,
    )


def score_prefix_probe(raw: str, gold_continuation: str, probe: ProbeResult) -> ScoreRecord:
    if not gold_continuation:
        raise ValueError("gold continuation must be non-empty")
    return ScoreRecord(
        passage_id=probe.passage_id,
        book_id=probe.book_id,
        lang=probe.lang,
        task=probe.task,
        perturbation=probe.perturbation,
        endpoint_id=probe.endpoint_id,
        metric_value=chrf_pp(raw, gold_continuation),
    )


def _letter_scripts(text: str) -> dict[str, int]:
    counts: dict[str, int] = {}
    for ch in text:
        if ch.isalpha():
            name = unicodedata.name(ch, "")
            script = name.split()[0] if name else "UNKNOWN"
            counts[script] = counts.get(script, 0) + 1
    return counts


def _looks_broken(raw: str, cfg: ScoreConfig) -> bool:
    stripped = raw.strip()
    if not stripped:
        return False
    scripts = _letter_scripts(stripped)
    total_letters = sum(scripts.values())
    if total_letters:
        major = sorted(scripts.values(), reverse=True)
        if len(major) >= 2 and major[1] / total_letters > 0.1:
            return True
    nontext = sum(1 for ch in stripped if not (ch.isalnum() or ch.isspace() or ch in ".,;:!?'\"-()"))
    return nontext / len(stripped) > cfg.broken_nontext_ratio


def classify_error(
    record: ScoreRecord,
    raw: str,
    gold: BookMeta | None,
    passage: Passage | None,
    roster: CharacterGazetteer | None,
    cfg: ScoreConfig,
) -> str:
    """First matching taxonomy rule wins; every incorrect record gets a label.

    Rule order: abstention, mask_echo, pronoun, honorific, same_book_entity,
    correct_author_wrong_title (direct probe only), multi_guess,
    broken_output, other_wrong.
    """
    normalized_raw = normalize_text(raw)
    if normalized_raw in cfg.abstention_markers or any(
        marker in normalized_raw for marker in _ABSTENTION_SUBSTRINGS
    ):
        return "abstention"

    if MASK_TOKEN in raw:
        return "mask_echo"

    prediction = normalize_text(record.prediction or record.parsed_title or "")
    lang = record.lang
    if prediction and prediction in {normalize_text(p) for p in cfg.pronouns.get(lang, []) + cfg.pronouns.get("en", [])}:
        return "pronoun"
    if prediction and prediction in {normalize_text(h) for h in cfg.honorifics.get(lang, []) + cfg.honorifics.get("en", [])}:
        return "honorific"

    if roster is not None and passage is not None and record.task == "name_cloze" and prediction:
        gold_name = normalize_text(passage.gold_name or "")
        for character in roster.characters(passage.book_id):
            if normalize_text(character.name) == gold_name:
                continue
            for alias_list in character.aliases.values():
                if any(normalize_text(a) == prediction for a in alias_list):
                    return "same_book_entity"

    if record.task == "direct_probe" and gold is not None and record.parsed_author is not None:
        author_ok = (
            levenshtein_similarity(
                normalize_text(record.parsed_author), normalize_text(gold.author)
            )
            >= cfg.dp_fuzzy_threshold
        )
        if author_ok:
            return "correct_author_wrong_title"

    if record.task == "name_cloze":
        n_candidates = len({normalize_text(c) for c in extract_name_candidates(raw)})
    else:
        parsed = parse_dp_response(raw)
        n_candidates = parsed.n_candidates if parsed else 1
    if n_candidates >= 2:
        return "multi_guess"

    if _looks_broken(raw, cfg):
        return "broken_output"
    return "other_wrong"


def score_probe_result(
    probe: ProbeResult,
    passage: Passage,
    meta: BookMeta,
    roster: CharacterGazetteer,
    cfg: ScoreConfig = ScoreConfig(),
) -> ScoreRecord:
    """Score one raw probe row, attaching an error class when it is wrong."""
    task = ProbeTask(kind=probe.task, perturbation=probe.perturbation)
    raw = probe.raw_response
    if probe.task == "direct_probe":
        record = score_direct_probe(parse_dp_response(raw), meta, probe.lang, cfg, probe)
    elif probe.task == "name_cloze":
        record = score_name_cloze(raw, passage, probe.lang, cfg, probe)
    else:
        text = select_text(task, passage, probe.lang)
        _, continuation = split_for_prefix(text)
        record = score_prefix_probe(raw, continuation, probe)

    if record.correct is False:
        record = replace(record, error_class=classify_error(record, raw, meta, passage, roster, cfg))
    return record


def score_many(
    probes: Iterable[ProbeResult],
    passages: dict[str, Passage],
    metas: dict[str, BookMeta],
    roster: CharacterGazetteer,
    cfg: ScoreConfig = ScoreConfig(),
) -> list[ScoreRecord]:
    records = []
    for probe in probes:
        passage = passages[probe.passage_id]
        records.append(score_probe_result(probe, passage, metas[passage.book_id], roster, cfg))
    return records
