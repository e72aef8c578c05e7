"""End-to-end probing against an in-process mock endpoint, then scoring and reports.

A "memorizing" endpoint answers from a lookup table; a "guessing" endpoint
answers with unrelated books and roster names. No network, no credentials.
"""

import json
import random
import tempfile
from pathlib import Path

import httpx

from bookprobe.corpus import BookMeta, Character, CharacterGazetteer, Paragraph, build_passages
from bookprobe.probe import EndpointConfig, JsonlResultSink, ProbeTask, load_results, run_suite, split_for_prefix
from bookprobe.report import aggregate, export
from bookprobe.scoring import score_many
from bookprobe.wire import RetryPolicy

BOOKS = [
    ("gullwing", "The Gullwing Almanac", "Petra Ostrander", ["Anselm", "Verity"]),
    ("foundry", "Smoke Over the Foundry", "Elias Thornquist", ["Odalys", "Bram"]),
]
VOCAB = ("harbor lantern ledger market bridge tower cellar orchard meadow coast "
         "storm quiet heavy pale bright narrow crooked distant walked waited "
         "watched carried answered remembered counted followed promised").split()


def build_library():
    rng = random.Random(7)
    metas, rosters, groups = {}, {}, {}
    for book_id, title, author, names in BOOKS:
        metas[book_id] = BookMeta(book_id=book_id, author=author, titles={"en": [title]})
        rosters[book_id] = [Character(n, {"en": [n]}) for n in names]
        paras = []
        for seq in range(6):
            tokens = [rng.choice(VOCAB) for _ in range(48)]
            tokens[9] = names[seq % 2]
            text = " ".join(tokens).capitalize() + "."
            text = text.replace(names[seq % 2].lower(), names[seq % 2])
            paras.append({"en": Paragraph(book_id=book_id, lang="en", seq=seq, text=text)})
        groups[book_id] = paras
    gazetteer = CharacterGazetteer(rosters)
    passages = []
    for book_id, book_groups in groups.items():
        one_name, _, _ = build_passages(book_groups, gazetteer, langs=["en"])
        passages.extend(one_name)
    return metas, gazetteer, passages


def memorizer(passages, metas):
    table = []
    for p in passages:
        meta = metas[p.book_id]
        table.append((p.texts["en"], f'"title": "{meta.titles["en"][0]}", "author": "{meta.author}"'))
        prefix, continuation = split_for_prefix(p.texts["en"])
        table.append((prefix, continuation))
        table.append((p.masked_texts["en"], p.gold_name))
    table.sort(key=lambda kv: -len(kv[0]))

    def handler(request: httpx.Request) -> httpx.Response:
        prompt = json.loads(request.content)["messages"][0]["content"]
        answer = next((a for k, a in table if k in prompt), "no idea")
        return httpx.Response(200, json={"choices": [{"message": {"content": answer}}]})

    return httpx.MockTransport(handler)


def guesser(roster):
    def handler(request: httpx.Request) -> httpx.Response:
        prompt = json.loads(request.content)["messages"][0]["content"]
        if "[MASK]" in prompt:
            answer = roster[hash(prompt) % len(roster)]
        elif "Continue the passage" in prompt:
            answer = "Nothing else is recorded."
        else:
            answer = '"title": "An Unrelated Book", "author": "Nobody Inparticular"'
        return httpx.Response(200, json={"choices": [{"message": {"content": answer}}]})

    return httpx.MockTransport(handler)


metas, gazetteer, passages = build_library()
roster = [n for _, _, _, names in BOOKS for n in names]
print(f"library: {len(passages)} passages from {len(metas)} books")

tasks = [
    ProbeTask("direct_probe", "standard"),
    ProbeTask("direct_probe", "shuffled"),
    ProbeTask("name_cloze", "masked"),
    ProbeTask("prefix_probe", "standard"),
]
transports = {"memorizer": memorizer(passages, metas), "guesser": guesser(roster)}
endpoints = [
    EndpointConfig(base_url="http://memorizer.test", model_name="memorizer",
                   retry=RetryPolicy(max_attempts=2, backoff=(0.0,))),
    EndpointConfig(base_url="http://guesser.test", model_name="guesser",
                   retry=RetryPolicy(max_attempts=2, backoff=(0.0,))),
]

workdir = Path(tempfile.mkdtemp(prefix="bookprobe-demo-"))
sink = JsonlResultSink(workdir / "probes.jsonl")
summary = run_suite(passages, tasks, endpoints, sink,
                    transport_factory=lambda ep: transports[ep.model_name])
sink.close()
print(f"probe run: issued={summary.issued} ok={summary.ok} errors={summary.errors}")

rows = load_results(workdir / "probes.jsonl")
records = score_many(rows, {p.passage_id: p for p in passages}, metas, gazetteer)

table = aggregate(records, ["model", "task", "perturbation"])
print("\nmodel            task          perturbation   n   accuracy  mean ChrF++")
for row in table.rows:
    model, task, perturbation = row.group
    acc = "-" if row.accuracy is None else f"{row.accuracy:.2f}"
    chrf = "-" if row.mean_metric is None else f"{row.mean_metric:.1f}"
    print(f"{model:16} {task:13} {perturbation:13} {row.n:3}   {acc:>8}  {chrf:>10}")

print("\n(the mock memorizer string-matches whole passages, so shuffled rows "
      "score 0 for it; a real model degrades more gracefully)")

out = export(table, workdir / "report.csv")
print(f"\nwrote {out}")
