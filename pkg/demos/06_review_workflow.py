"""Human review round trip: serve items, vote as three annotators, finalize.

Starts the real HTTP server on a local port, drives it with httpx, and shows
the unanimity rule deciding kept / dropped / pending.
"""

import socket
import tempfile
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from bookprobe.review import ReviewItem, VoteStore, create_app

items = [
    ReviewItem(
        item_id=i,
        passage_id=f"demo-{i:03d}",
        book_id="seawall",
        gold_name="Mara",
        texts={"en": f"Paragraph {i} where Mara appears.",
               "es": f"Párrafo {i} donde aparece Mara."},
        highlights={"en": [(18, 22)], "es": [(17, 21)]},
    )
    for i in range(4)
]

workdir = Path(tempfile.mkdtemp(prefix="bookprobe-review-"))
store = VoteStore(workdir / "votes.log")
annotators = ["ann1", "ann2", "ann3"]
app = create_app(items, store, annotators=annotators)

with socket.socket() as sock:
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]

server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)
print(f"review server on http://127.0.0.1:{port}")

with httpx.Client(base_url=f"http://127.0.0.1:{port}") as http:
    batch = http.get("/api/items", params={"annotator": "ann1", "batch": 10}).json()
    print(f"ann1 sees {len(batch)} unvoted items; first item highlights: {batch[0]['highlights']}")

    # Item 0: unanimous accept. Item 1: one reject. Item 2: only two votes.
    script = {
        "ann1": [(0, "accept", []), (1, "accept", []), (2, "accept", []), (3, "reject", ["misaligned"])],
        "ann2": [(0, "accept", []), (1, "accept", []), (2, "accept", [])],
        "ann3": [(0, "accept", []), (1, "reject", ["multiple_names"])],
    }
    for annotator, votes in script.items():
        for item_id, verdict, flags in votes:
            http.post("/api/votes", json={"item_id": item_id, "annotator_id": annotator,
                                          "verdict": verdict, "flags": flags})

    progress = http.get("/api/progress").json()
    print(f"progress: {progress}")

    export = http.get("/api/export").json()
    print(f"finalized under unanimity: {export}")

server.should_exit = True
thread.join(timeout=5)

# The vote log survives restarts; reload it cold and finalize again.
reloaded = VoteStore(workdir / "votes.log")
from bookprobe.review import finalize_unanimous  # noqa: E402

sets = finalize_unanimous(items, reloaded)
print(f"after reload from {workdir / 'votes.log'}: kept={sets.kept} dropped={sets.dropped} pending={sets.pending}")
