import httpx
import pytest

from bookprobe.corpus import Passage
from bookprobe.errors import TranslationError
from bookprobe.mtclient import (
    MtClient,
    ProviderConfig,
    QcVerdict,
    apply_qc_cascade,
    looks_english,
    qc_translation,
)
from bookprobe.perturb import PLACEHOLDER_TOKEN
from bookprobe.wire import RetryPolicy

NO_SLEEP = lambda _: None  # noqa: E731
FAST_RETRY = RetryPolicy(max_attempts=3, backoff=(0.0,))


class TestQcTranslation:
    def test_placeholder_surplus_flagged(self):
        original = f"see {PLACEHOLDER_TOKEN} now"
        translation = f"{PLACEHOLDER_TOKEN} koro {PLACEHOLDER_TOKEN}"
        verdict = qc_translation(original, translation, "yo")
        assert not verdict.ok and verdict.reasons == {"placeholder_mismatch"}

    def test_placeholder_loss_also_flagged(self):
        verdict = qc_translation(f"{PLACEHOLDER_TOKEN} lo", "lo nikan", "yo")
        assert "placeholder_mismatch" in verdict.reasons

    def test_repeated_window_flagged(self):
        window = " ".join(f"w{i}" for i in range(15))
        # 50 tokens, with one 15-token window occurring three times.
        translation = " ".join([window, window, window, "tail one two three four"])
        assert len(translation.split()) == 50
        verdict = qc_translation("orig", translation, "yo", lang_detect=lambda _: False)
        assert verdict.reasons == {"ngram_repetition"}

    def test_two_repeats_allowed(self):
        window = " ".join(f"t{i}" for i in range(15))
        translation = " ".join([window, window])
        verdict = qc_translation("orig", translation, "yo", lang_detect=lambda _: False)
        assert verdict.ok

    def test_language_mismatch(self):
        english = "the boat was on the water and he saw it from the bridge"
        verdict = qc_translation("orig", english, "yo")
        assert "language_mismatch" in verdict.reasons

    def test_english_target_never_language_flagged(self):
        english = "the boat was on the water and he saw it from the bridge"
        assert qc_translation("orig", english, "en").ok

    def test_clean_translation_ok(self):
        verdict = qc_translation(
            f"see {PLACEHOLDER_TOKEN}", f"wo {PLACEHOLDER_TOKEN} bayi", "yo"
        )
        assert verdict.ok and verdict.reasons == frozenset()

    def test_verdict_invariant(self):
        with pytest.raises(ValueError):
            QcVerdict(ok=True, reasons=frozenset({"ngram_repetition"}))


class TestLooksEnglish:
    def test_english_detected(self):
        assert looks_english("the harbor was quiet and the boats were in for the night")

    def test_non_latin_rejected(self):
        assert not looks_english("Дом стоял на берегу реки много лет")

    def test_latin_low_resource_not_english(self):
        assert not looks_english("mo ri oko nla kan leti odo pelu awon omode")

    def test_empty_rejected(self):
        assert not looks_english("")


def make_client(handler, fallback_handler=None, retry=FAST_RETRY):
    transport = httpx.MockTransport(handler)
    primary = ProviderConfig(name="primary", base_url="http://primary.test")
    fallback = ProviderConfig(name="fallback", base_url="http://fallback.test") if fallback_handler else None
    client = MtClient(primary, fallback=fallback, retry=retry, transport=transport, sleep=NO_SLEEP)
    return client


def routed(primary_handler, fallback_handler):
    def handler(request: httpx.Request) -> httpx.Response:
        if request.url.host == "primary.test":
            return primary_handler(request)
        return fallback_handler(request)

    return handler


def ok_handler(prefix: str):
    def handler(request: httpx.Request) -> httpx.Response:
        import json

        texts = json.loads(request.content)["texts"]
        return httpx.Response(200, json={"translations": [f"{prefix}:{t}" for t in texts]})

    return handler


def fail_handler(status: int = 503):
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(status, json={"error": "down"})

    return handler


class TestTranslateBatch:
    def test_order_preserving(self):
        client = make_client(ok_handler("t"))
        out = client.translate_batch(["a", "b", "c"], "en", "yo")
        assert out == ["t:a", "t:b", "t:c"]

    def test_transient_then_success(self):
        state = {"calls": 0}

        def flaky(request):
            state["calls"] += 1
            if state["calls"] <= 2:
                return httpx.Response(503, json={"error": "busy"})
            return ok_handler("ok")(request)

        client = make_client(flaky)
        assert client.translate_batch(["x"], "en", "st") == ["ok:x"]
        assert state["calls"] == 3
        assert client.audit[-1].status == "ok"
        assert client.audit[-1].attempts == 3

    def test_fallback_with_provenance(self):
        handler = routed(fail_handler(), ok_handler("fb"))
        transport = httpx.MockTransport(handler)
        client = MtClient(
            ProviderConfig(name="primary", base_url="http://primary.test"),
            fallback=ProviderConfig(name="fallback", base_url="http://fallback.test"),
            retry=FAST_RETRY,
            transport=transport,
            sleep=NO_SLEEP,
        )
        out = client.translate_batch(["a", "b"], "en", "mg")
        assert out == ["fb:a", "fb:b"]
        statuses = [(a.provider, a.status) for a in client.audit]
        assert ("primary", "permanent_failure") in statuses
        assert ("fallback", "ok") in statuses

    def test_both_exhausted_raises_with_indices(self):
        handler = routed(fail_handler(), fail_handler())
        transport = httpx.MockTransport(handler)
        client = MtClient(
            ProviderConfig(name="primary", base_url="http://primary.test"),
            fallback=ProviderConfig(name="fallback", base_url="http://fallback.test"),
            retry=FAST_RETRY,
            transport=transport,
            sleep=NO_SLEEP,
        )
        with pytest.raises(TranslationError) as excinfo:
            client.translate_batch(["a", "b", "c"], "en", "ty")
        assert excinfo.value.failing_indices == [0, 1, 2]

    def test_wrong_cardinality_is_failure(self):
        def short(request):
            return httpx.Response(200, json={"translations": ["only one"]})

        client = make_client(short, retry=RetryPolicy(max_attempts=1, backoff=()))
        with pytest.raises(TranslationError):
            client.translate_batch(["a", "b"], "en", "tn")

    def test_empty_batch(self):
        client = make_client(ok_handler("t"))
        assert client.translate_batch([], "en", "yo") == []


def test_qc_cascade_deletes_across_languages():
    def p(pid):
        return Passage(passage_id=pid, book_id="bk", texts={"en": "t", "yo": "y", "mg": "m"})

    passages = [p("keep"), p("drop")]
    verdicts = {
        "keep": QcVerdict(ok=True),
        "drop": QcVerdict(ok=False, reasons=frozenset({"ngram_repetition"})),
    }
    survivors = apply_qc_cascade(passages, verdicts)
    assert [s.passage_id for s in survivors] == ["keep"]
    assert set(survivors[0].texts) == {"en", "yo", "mg"}
