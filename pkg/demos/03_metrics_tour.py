"""The numeric core: normalization, Levenshtein similarity, BLEU, ChrF++."""

from bookprobe.metrics import chrf_pp, levenshtein_similarity, normalize_text, smoothed_bleu

print("normalize_text folds diacritics, lowercases, strips edge punctuation:")
for raw in ["Café", "  Mr. Darcy! ", "Aşk Ve Gurur", "Xứ cát"]:
    print(f"  {raw!r:22} -> {normalize_text(raw)!r}")

print("\nlevenshtein_similarity (1 - edits / longer length):")
for a, b in [("dune", "dune"), ("kitten", "sitting"), ("", "abc")]:
    print(f"  {a!r:10} vs {b!r:10} -> {levenshtein_similarity(a, b):.4f}")

print("\nsmoothed sentence BLEU (add-one smoothing on orders 2..4):")
pairs = [
    ("the cat sat on the mat", "the cat sat on the mat"),
    ("the cat sat", "the cat sat down"),
    ("a b c d", "e f g h"),
]
for hyp, ref in pairs:
    print(f"  hyp={hyp!r:26} ref={ref!r:26} -> {smoothed_bleu(hyp, ref):7.3f}")

print("\nChrF++ (character 1..6-grams + word 1..2-grams, beta=2):")
for hyp, ref in [
    ("the cat sat on the mat", "the cat sat on the mat"),
    ("cat on mat", "the cat sat on the mat"),
    ("", "the cat sat on the mat"),
]:
    print(f"  hyp={hyp!r:26} ref={ref!r:26} -> {chrf_pp(hyp, ref):7.3f}")
