"""Build passages from raw text: ingest, tag names, partition, filter, sample.

Runs offline on an inline miniature book.
"""

from bookprobe.corpus import BookMeta, Character, CharacterGazetteer, build_passages, ingest_book, tag_character_names
from bookprobe.sampler import filter_min_tokens, stratified_sample, whitespace_tokenizer

RAW_EN = """
Mara walked the sea wall before dawn and counted the boats as they slipped out
past the light, and nobody asked her why she kept the tally in an old ledger.

The storm took the northern pier that winter and the town argued about the
cost of rebuilding it until spring made the argument pointless.

When Old Corbin finally sold the chandlery, Mara bought the brass lamp from
the window before the new owner had even finished counting the till.

Rain again. The gutters ran loud all night and the harbor smelled of iron.
"""

RAW_ES = """
Mara recorrió el malecón antes del amanecer y contó los botes que salían más
allá del faro, y nadie le preguntó por qué llevaba la cuenta en un viejo libro.

La tormenta se llevó el muelle norte aquel invierno y el pueblo discutió sobre
el costo de reconstruirlo hasta que la primavera volvió inútil la discusión.

Cuando el viejo Corbin por fin vendió la tienda, Mara compró la lámpara de
latón del escaparate antes de que el nuevo dueño terminara de contar la caja.

Llueve otra vez. Las canaletas sonaron toda la noche y el puerto olía a hierro.
"""

meta = BookMeta(
    book_id="seawall",
    author="N. Example",
    titles={"en": ["The Sea Wall Ledger"], "es": ["El Libro del Malecón"]},
)
gazetteer = CharacterGazetteer(
    {
        "seawall": [
            Character("Mara", {"en": ["Mara"], "es": ["Mara"]}),
            Character("Corbin", {"en": ["Corbin", "Old Corbin"], "es": ["Corbin", "viejo Corbin"]}),
        ]
    }
)

en_paras = ingest_book(RAW_EN, meta, "en")
es_paras = ingest_book(RAW_ES, meta, "es")
print(f"ingested {len(en_paras)} English and {len(es_paras)} Spanish paragraphs")

for p in en_paras:
    tags = tag_character_names(p, gazetteer)
    rendered = ", ".join(f"{name}@{span}" for name, span in tags) or "-"
    print(f"  en paragraph {p.seq}: {rendered}")

groups = [{"en": en, "es": es} for en, es in zip(en_paras, es_paras)]
one_name, no_name, discarded = build_passages(groups, gazetteer)
print(f"\npartition: {len(one_name)} one-name, {len(no_name)} no-name, {len(discarded)} discarded")
for passage in one_name:
    print(f"  {passage.passage_id}: gold={passage.gold_name}")
    print(f"    masked en: {passage.masked_texts['en'][:70]}...")
for group, reason in discarded:
    print(f"  discarded en seq {group['en'].seq}: {reason}")

tok = whitespace_tokenizer()
long_enough = filter_min_tokens(one_name + no_name, "en", 20, tok)
print(f"\n{len(long_enough)} passages have at least 20 English tokens")

sampled = stratified_sample([p for p in long_enough if p.has_character], cap=1, seed=7)
print(f"stratified sample capped at 1: {[p.passage_id for p in sampled]}")
