"""bookprobe: aligned multilingual book-passage corpora and memorization probing.

The library covers the full pipeline: ingesting books, tagging character
names from a gazetteer, aligning translations through an English pivot,
filtering and sampling passages, perturbing and machine-translating them with
quality control, probing chat endpoints on three tasks (direct probing, name
cloze, prefix probing), scoring responses, and aggregating reports. A small
HTTP review server supports human verification of alignments.
"""

from .align import (
    AlignmentCandidate,
    FilterConfig,
    Verdict,
    align_monotone,
    apply_filters,
    build_candidates,
    similarity_matrix,
)
from .corpus import (
    BookMeta,
    Character,
    CharacterGazetteer,
    Paragraph,
    Passage,
    PassagePartition,
    build_passages,
    ingest_book,
    load_corpus_config,
    tag_character_names,
)
from .metrics import (
    MetricConfig,
    chrf_pp,
    levenshtein_similarity,
    normalize_text,
    smoothed_bleu,
)
from .perturb import (
    MASK_TOKEN,
    PLACEHOLDER_TOKEN,
    derive_seed,
    mask_character,
    protect_placeholders,
    restore_placeholders,
    shuffle_words,
)
from .probe import (
    EndpointConfig,
    JsonlResultSink,
    ProbeResult,
    ProbeTask,
    build_prompt,
    load_results,
    prompt_fingerprint,
    run_suite,
)
from .sampler import TokenizerHandle, filter_min_tokens, stratified_sample, whitespace_tokenizer
from .scoring import (
    ScoreConfig,
    ScoreRecord,
    classify_error,
    parse_dp_response,
    score_direct_probe,
    score_many,
    score_name_cloze,
    score_prefix_probe,
    score_probe_result,
)

__version__ = "0.1.0"
