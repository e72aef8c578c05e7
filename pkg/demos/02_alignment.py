"""Monotone paragraph alignment on a noisy synthetic bitext with a deletion.

Shows the similarity matrix, the recovered matching, and the two filters.
"""

import random

from bookprobe.align import FilterConfig, align_monotone, apply_filters, build_candidates, similarity_matrix
from bookprobe.corpus import Paragraph

rng = random.Random(42)
vocab = [f"word{i:03d}" for i in range(400)]

en_paras = [
    Paragraph(book_id="syn", lang="en", seq=i,
              text=" ".join(rng.choice(vocab) for _ in range(30)))
    for i in range(8)
]

# The "translation pivot": every paragraph except #4, with 15% word noise.
pivot_paras = []
for para in en_paras:
    if para.seq == 4:
        continue
    tokens = [rng.choice(vocab) if rng.random() < 0.15 else t for t in para.text.split()]
    pivot_paras.append(
        Paragraph(book_id="syn", lang="en", seq=len(pivot_paras), text=" ".join(tokens))
    )

sim = similarity_matrix(en_paras, pivot_paras)
print("similarity matrix (BLEU, rows=en, cols=pivot):")
for i in range(sim.shape[0]):
    print("  " + " ".join(f"{sim[i, j]:5.1f}" for j in range(sim.shape[1])))

pairs = align_monotone(sim)
print(f"\nmonotone matching: {pairs}")
print("note: English paragraph 4 is unmatched because its translation was deleted")

cands = apply_filters(
    build_candidates(en_paras, pivot_paras, pivot_paras, pairs, sim, "xx"),
    FilterConfig(bleu_threshold=5.0, length_ratio=3.0),
)
for cand in cands:
    print(f"  en {cand.en_seq} -> tgt {cand.tgt_seq}: bleu={cand.bleu:5.1f} verdict={cand.verdict.value}")
