"""Command-line entry points for the pipeline stages.

Subcommands: align, metrics, perturb, sample, report, serve. Each operates on
the JSONL formats documented in docs/schemas.md; the library API is the
primary interface and these commands are thin wrappers over it.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import dataio
from .align import FilterConfig, align_monotone, apply_filters, build_candidates, similarity_matrix
from .corpus import ingest_book, load_corpus_config
from .metrics import chrf_pp, levenshtein_similarity, smoothed_bleu
from .perturb import derive_seed, protect_placeholders, shuffle_words
from .report import aggregate, export
from .sampler import filter_min_tokens, load_subword_tokenizer, stratified_sample, whitespace_tokenizer


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _cmd_metrics(args: argparse.Namespace) -> int:
    hyp = _read_text(args.hyp) if args.hyp_file else args.hyp
    ref = _read_text(args.ref) if args.ref_file else args.ref
    if args.metric == "chrf":
        value = chrf_pp(hyp, ref)
    elif args.metric == "bleu":
        value = smoothed_bleu(hyp, ref)
    else:
        value = levenshtein_similarity(hyp, ref)
    print(f"{value:.4f}")
    return 0


def _cmd_align(args: argparse.Namespace) -> int:
    metas, _ = load_corpus_config(args.config)
    meta = metas[args.book_id] if args.book_id else next(iter(metas.values()))
    en = ingest_book(_read_text(args.en), meta, "en")
    tgt = ingest_book(_read_text(args.tgt), meta, args.lang)
    pivot = ingest_book(_read_text(args.pivot), meta, "en")
    sim = similarity_matrix(en, pivot)
    pairs = align_monotone(sim, skip_penalty=args.skip_penalty)
    cands = apply_filters(
        build_candidates(en, tgt, pivot, pairs, sim, args.lang),
        FilterConfig(bleu_threshold=args.bleu_threshold, length_ratio=args.length_ratio),
    )
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for cand in cands:
            payload = asdict(cand)
            payload["verdict"] = cand.verdict.value
            out.write(json.dumps(payload, ensure_ascii=False) + "\n")
    finally:
        if args.out:
            out.close()
    kept = sum(1 for c in cands if c.verdict.value == "pending_review")
    print(f"aligned {len(cands)} pairs, {kept} pending review", file=sys.stderr)
    return 0


def _cmd_perturb(args: argparse.Namespace) -> int:
    passages = dataio.read_passages(args.input)
    lang = args.lang
    for p in passages:
        text = p.texts[lang]
        if args.kind in ("mask", "mask+shuffle"):
            if not p.has_character:
                continue
            text = p.masked_texts[lang]
        if args.kind in ("shuffle", "mask+shuffle"):
            text = shuffle_words(text, derive_seed(p.passage_id, lang, args.kind))
        if args.protect:
            text = protect_placeholders(text)
        print(json.dumps({"passage_id": p.passage_id, "text": text}, ensure_ascii=False))
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    passages = dataio.read_passages(args.input)
    tok = load_subword_tokenizer(args.vocab) if args.vocab else whitespace_tokenizer()
    passages = filter_min_tokens(passages, args.lang, args.min_tokens, tok)
    by_book: dict[str, list] = {}
    for p in passages:
        by_book.setdefault(p.book_id, []).append(p)
    sampled = []
    for book_id in sorted(by_book):
        sampled.extend(stratified_sample(by_book[book_id], cap=args.cap, seed=args.seed))
    dataio.write_passages(sampled, args.out)
    print(f"kept {len(sampled)} passages across {len(by_book)} books", file=sys.stderr)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    records = dataio.read_scores(args.scores)
    table = aggregate(records, args.group_by.split(","))
    if args.out:
        export(table, args.out, fmt=args.format)
        print(f"wrote {len(table.rows)} rows to {args.out}", file=sys.stderr)
    else:
        for row in table.rows:
            acc = "" if row.accuracy is None else f"{row.accuracy:.4f}"
            mm = "" if row.mean_metric is None else f"{row.mean_metric:.4f}"
            print("\t".join([*row.group, str(row.n), acc, mm]))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .review import VoteStore, create_app, load_items

    items = load_items(args.items)
    store = VoteStore(args.votes)
    app = create_app(
        items,
        store,
        annotators=args.annotators.split(","),
        required_annotators=args.required,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bookprobe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("metrics", help="score a hypothesis/reference pair")
    msub = m.add_subparsers(dest="metrics_command", required=True)
    ms = msub.add_parser("score")
    ms.add_argument("--metric", choices=["chrf", "bleu", "lev"], required=True)
    ms.add_argument("--hyp", required=True)
    ms.add_argument("--ref", required=True)
    ms.add_argument("--hyp-file", action="store_true", help="treat --hyp as a file path")
    ms.add_argument("--ref-file", action="store_true", help="treat --ref as a file path")
    ms.set_defaults(func=_cmd_metrics)

    a = sub.add_parser("align", help="align an English book to a translation via its pivot")
    a.add_argument("--en", required=True, help="English book text file")
    a.add_argument("--tgt", required=True, help="target-language book text file")
    a.add_argument("--pivot", required=True, help="target book machine-translated to English")
    a.add_argument("--config", required=True, help="corpus config JSON")
    a.add_argument("--lang", required=True, help="target language code")
    a.add_argument("--book-id", default=None)
    a.add_argument("--out", default=None, help="candidate JSONL output (default stdout)")
    a.add_argument("--bleu-threshold", type=float, default=5.0)
    a.add_argument("--length-ratio", type=float, default=3.0)
    a.add_argument("--skip-penalty", type=float, default=1.0)
    a.set_defaults(func=_cmd_align)

    p = sub.add_parser("perturb", help="emit perturbed passage texts")
    p.add_argument("--kind", choices=["mask", "shuffle", "mask+shuffle"], required=True)
    p.add_argument("--in", dest="input", required=True, help="passage JSONL")
    p.add_argument("--lang", default="en")
    p.add_argument("--protect", action="store_true", help="swap [MASK] for the MT placeholder")
    p.set_defaults(func=_cmd_perturb)

    s = sub.add_parser("sample", help="token filter + per-book stratified sampling")
    s.add_argument("--in", dest="input", required=True, help="passage JSONL")
    s.add_argument("--out", required=True)
    s.add_argument("--cap", type=int, default=100)
    s.add_argument("--min-tokens", type=int, default=40)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lang", default="en")
    s.add_argument("--vocab", default=None, help="subword vocab file (whitespace fallback)")
    s.set_defaults(func=_cmd_sample)

    r = sub.add_parser("report", help="aggregate score records")
    r.add_argument("--scores", required=True, help="score JSONL")
    r.add_argument("--group-by", required=True, help="comma-separated dimensions")
    r.add_argument("--out", default=None)
    r.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    r.set_defaults(func=_cmd_report)

    v = sub.add_parser("serve", help="run the alignment review server")
    v.add_argument("--items", required=True, help="review item JSONL")
    v.add_argument("--votes", required=True, help="vote log path")
    v.add_argument("--annotators", required=True, help="comma-separated annotator ids")
    v.add_argument("--required", type=int, default=3)
    v.add_argument("--static-dir", default=None, help="built review UI directory")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8400)
    v.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
