import { describe, expect, it } from "vitest";

import { MemoryStore, VoteQueue } from "../src/queue.js";
import type { VoteBody } from "../src/types.js";

function vote(itemId: number, verdict: "accept" | "reject" = "accept"): VoteBody {
  return { item_id: itemId, annotator_id: "ann1", verdict, flags: [] };
}

describe("VoteQueue", () => {
  it("persists through the backing store", () => {
    const store = new MemoryStore();
    const queue = new VoteQueue(store, "k");
    queue.enqueue(vote(1));
    queue.enqueue(vote(2));
    const reloaded = new VoteQueue(store, "k");
    expect(reloaded.pending().map((v) => v.item_id)).toEqual([1, 2]);
  });

  it("keeps only the latest vote per item", () => {
    const queue = new VoteQueue(new MemoryStore(), "k");
    queue.enqueue(vote(1, "accept"));
    queue.enqueue(vote(1, "reject"));
    expect(queue.length).toBe(1);
    expect(queue.pending()[0]?.verdict).toBe("reject");
  });

  it("flushes in order and stops at the first failure", async () => {
    const queue = new VoteQueue(new MemoryStore(), "k");
    queue.enqueue(vote(1));
    queue.enqueue(vote(2));
    queue.enqueue(vote(3));
    const sent: number[] = [];
    const acked = await queue.flush(async (v) => {
      if (v.item_id === 2) throw new Error("boom");
      sent.push(v.item_id);
    });
    expect(acked.map((v) => v.item_id)).toEqual([1]);
    expect(sent).toEqual([1]);
    expect(queue.pending().map((v) => v.item_id)).toEqual([2, 3]);
  });

  it("drains fully on success", async () => {
    const queue = new VoteQueue(new MemoryStore(), "k");
    queue.enqueue(vote(1));
    queue.enqueue(vote(2));
    const acked = await queue.flush(async () => undefined);
    expect(acked).toHaveLength(2);
    expect(queue.length).toBe(0);
  });

  it("survives corrupted storage", () => {
    const store = new MemoryStore();
    store.setItem("k", "{not json");
    const queue = new VoteQueue(store, "k");
    expect(queue.pending()).toEqual([]);
  });
});
