"""Masking, deterministic shuffles, placeholder protection, and MT quality control.

The translation provider here is an in-process stub; no network involved.
"""

import httpx

from bookprobe.mtclient import MtClient, ProviderConfig, qc_translation
from bookprobe.perturb import derive_seed, mask_character, protect_placeholders, restore_placeholders, shuffle_words
from bookprobe.wire import RetryPolicy

text = "Of course if Tom was home he'd put it right in a moment,"
masked = mask_character(text, ["Tom"])
print(f"original: {text}")
print(f"masked:   {masked}")

seed = derive_seed("demo-0001", "en", "shuffled")
print(f"shuffled (seed from passage id): {shuffle_words(text, seed)}")
print(f"same seed, same output:          {shuffle_words(text, seed)}")

protected = protect_placeholders(masked)
print(f"\nprotected for MT: {protected}")
print(f"restored:         {restore_placeholders(protected)}")


def stub_provider(request: httpx.Request) -> httpx.Response:
    import json

    texts = json.loads(request.content)["texts"]
    # Word-reversing "translator" that keeps placeholders intact.
    return httpx.Response(200, json={"translations": [" ".join(t.split()[::-1]) for t in texts]})


client = MtClient(
    ProviderConfig(name="stub", base_url="http://stub.test"),
    retry=RetryPolicy(max_attempts=2, backoff=(0.0,)),
    transport=httpx.MockTransport(stub_provider),
    sleep=lambda _: None,
)
translations = client.translate_batch([protected], "en", "yo")
print(f"\nstub translation: {translations[0][:60]}...")

verdict = qc_translation(protected, translations[0], "yo", lang_detect=lambda _: False)
print(f"QC verdict: ok={verdict.ok} reasons={sorted(verdict.reasons)}")

bad = translations[0] + " @@PLACEHOLDER@@"
verdict = qc_translation(protected, bad, "yo", lang_detect=lambda _: False)
print(f"QC with a duplicated placeholder: ok={verdict.ok} reasons={sorted(verdict.reasons)}")

window = " ".join(f"t{i}" for i in range(15))
degenerate = " ".join([window, window, window])
verdict = qc_translation("x", degenerate, "yo", lang_detect=lambda _: False)
print(f"QC with a looping 15-token window: ok={verdict.ok} reasons={sorted(verdict.reasons)}")
