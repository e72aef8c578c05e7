"""Regenerate the frozen scoring-regression fixture under tests/data/.

Produces 200 raw probe rows covering every error-taxonomy class plus correct
answers and prefix rows, and the expected ScoreRecord file the acceptance
suite byte-compares against. Rerun only when the scoring contract itself
changes, and review the diff.

Usage: python3 tools/gen_scoring_fixture.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))
sys.path.insert(0, str(ROOT / "src"))

from bookprobe.dataio import write_scores  # noqa: E402
from bookprobe.probe import ProbeResult, split_for_prefix  # noqa: E402
from bookprobe.scoring import score_many  # noqa: E402
from tests.mocklib import BOOK_SPECS, build_mock_library  # noqa: E402

DATA_DIR = ROOT / "tests" / "data"

BROKEN_SAMPLES = [
    '"title": ".k% ハウス absorbing riches て舟へ.", "author": "魚つり人才"',
    "fragment ハウス pieces 舟へ broken 魚つり",
    "@@@@ ];;[ %%%% )(*&^ ::::",
]


def probe_row(p, task, perturbation, raw, endpoint="fixture-model"):
    return ProbeResult(
        passage_id=p.passage_id,
        book_id=p.book_id,
        lang="en",
        task=task,
        perturbation=perturbation,
        endpoint_id=endpoint,
        fingerprint="frozen",
        raw_response=raw,
        status="ok",
        latency_s=0.0,
        attempts=1,
        timestamp=0.0,
    )


def main() -> None:
    metas, gazetteer, passages = build_mock_library()
    by_book: dict[str, list] = {}
    for p in passages:
        by_book.setdefault(p.book_id, []).append(p)
    names_by_book = {book_id: names for book_id, _, _, names in BOOK_SPECS}

    rows: list[ProbeResult] = []

    def take(book_index: int, offset: int):
        book_id = BOOK_SPECS[book_index][0]
        return by_book[book_id][offset % 20]

    # 35 correct direct-probe rows.
    for i in range(35):
        p = take(i % 5, i)
        meta = metas[p.book_id]
        raw = f'"title": "{meta.titles["en"][0]}", "author": "{meta.author}"'
        rows.append(probe_row(p, "direct_probe", "standard", raw))

    # 20 wrong title+author (other_wrong).
    for i in range(20):
        p = take(i % 5, i + 3)
        raw = '"title": "The Violet Abacus", "author": "Nils Graverson"'
        rows.append(probe_row(p, "direct_probe", "standard", raw))

    # 20 correct author, wrong title.
    for i in range(20):
        p = take(i % 5, i + 7)
        meta = metas[p.book_id]
        raw = f'"title": "Return to {meta.titles["en"][0].split()[-1]} Bay", "author": "{meta.author}"'
        rows.append(probe_row(p, "direct_probe", "standard", raw))

    # 15 direct-probe abstentions.
    abstain = ['"title": "Book name: Unknown", "author": "Unknown author"', "unknown", "none", ""]
    for i in range(15):
        p = take(i % 5, i + 11)
        rows.append(probe_row(p, "direct_probe", "masked", abstain[i % len(abstain)]))

    # 35 correct name-cloze rows.
    for i in range(35):
        p = take(i % 5, i + 1)
        rows.append(probe_row(p, "name_cloze", "masked", p.gold_name))

    # 20 same-book-entity errors.
    for i in range(20):
        p = take(i % 5, i + 2)
        roster = names_by_book[p.book_id]
        wrong = next(n for n in roster if n != p.gold_name)
        rows.append(probe_row(p, "name_cloze", "masked", wrong))

    # 8 pronouns, 8 honorifics, 5 mask echoes.
    pronouns = ["He", "She", "They", "It"]
    honorifics = ["Mr.", "Mrs.", "Sir", "Madam"]
    for i in range(8):
        p = take(i % 5, i + 4)
        rows.append(probe_row(p, "name_cloze", "masked", pronouns[i % 4]))
    for i in range(8):
        p = take(i % 5, i + 5)
        rows.append(probe_row(p, "name_cloze", "masked", honorifics[i % 4]))
    for i in range(5):
        p = take(i % 5, i + 6)
        rows.append(probe_row(p, "name_cloze", "masked_shuffled", "[MASK]"))

    # 8 multi-guess rows (candidates outside every roster).
    for i in range(8):
        p = take(i % 5, i + 8)
        raw = "Maybe Wendell. Or possibly Greta. Final answer: Jerome"
        rows.append(probe_row(p, "name_cloze", "masked", raw))

    # 8 broken outputs (5 cloze, 3 direct).
    for i in range(8):
        p = take(i % 5, i + 9)
        task = "name_cloze" if i < 5 else "direct_probe"
        perturbation = "masked" if i < 5 else "standard"
        rows.append(probe_row(p, "name_cloze" if i < 5 else "direct_probe", perturbation,
                              BROKEN_SAMPLES[i % len(BROKEN_SAMPLES)]))

    # 8 perfect prefix continuations and 5 unrelated ones.
    for i in range(8):
        p = take(i % 5, i + 10)
        _, continuation = split_for_prefix(p.texts["en"])
        rows.append(probe_row(p, "prefix_probe", "standard", continuation))
    for i in range(5):
        p = take(i % 5, i + 12)
        rows.append(probe_row(p, "prefix_probe", "standard",
                              "And then nothing more was written that any reader remembers."))

    # 5 lenient-but-not-exact cloze answers (fuzzy >= 0.7 after normalization).
    for i in range(5):
        p = take(i % 5, i + 13)
        rows.append(probe_row(p, "name_cloze", "masked", p.gold_name + "o"))

    assert len(rows) == 200, f"expected 200 rows, built {len(rows)}"

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    probes_path = DATA_DIR / "scoring_fixture_probes.jsonl"
    with open(probes_path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row.__dict__, ensure_ascii=False, sort_keys=True) + "\n")

    passage_index = {p.passage_id: p for p in passages}
    records = score_many(rows, passage_index, metas, gazetteer)
    expected_path = DATA_DIR / "scoring_fixture_expected.jsonl"
    write_scores(records, expected_path)

    classes: dict[str, int] = {}
    for record in records:
        label = record.error_class or ("correct" if record.correct else "metric")
        classes[label] = classes.get(label, 0) + 1
    print(f"wrote {len(rows)} probes -> {probes_path}")
    print(f"wrote {len(records)} expected records -> {expected_path}")
    print("class counts:", json.dumps(classes, sort_keys=True))


if __name__ == "__main__":
    main()
