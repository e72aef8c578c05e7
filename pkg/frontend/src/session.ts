/** Annotation session state machine: batches, votes, offline queueing.
 *
 * The view layer renders from this controller and calls back into it; nothing
 * here touches the DOM, so the scripted acceptance flow drives exactly the
 * code paths the browser uses.
 */

import { ApiError, ReviewApi } from "./api.js";
import { MemoryStore, VoteQueue, type StringStore } from "./queue.js";
import type { Flag, ProgressPayload, ReviewItemPayload, Verdict, VoteBody } from "./types.js";

export interface SubmitResult {
  acked: boolean;
  queued: boolean;
}

export interface SessionState {
  current: ReviewItemPayload | null;
  queueLength: number;
  offline: boolean;
  votedCount: number;
  totalItems: number;
  exhausted: boolean;
}

export class AnnotatorSession {
  private batch: ReviewItemPayload[] = [];
  private cursor = 0;
  private queue: VoteQueue;
  private offline = false;
  private votedCount = 0;
  private totalItems = 0;
  /** Flag toggles per item, preserved across navigation until submitted. */
  private pendingFlags = new Map<number, Set<Flag>>();

  constructor(
    private readonly api: ReviewApi,
    readonly annotatorId: string,
    store: StringStore = new MemoryStore(),
    private readonly batchSize = 20,
  ) {
    this.queue = new VoteQueue(store, `bookprobe-votes-${annotatorId}`);
  }

  state(): SessionState {
    return {
      current: this.current(),
      queueLength: this.queue.length,
      offline: this.offline,
      votedCount: this.votedCount,
      totalItems: this.totalItems,
      exhausted: this.batch.length === 0,
    };
  }

  current(): ReviewItemPayload | null {
    return this.batch[this.cursor] ?? null;
  }

  flagsFor(itemId: number): Set<Flag> {
    let flags = this.pendingFlags.get(itemId);
    if (!flags) {
      flags = new Set();
      this.pendingFlags.set(itemId, flags);
    }
    return flags;
  }

  toggleFlag(flag: Flag): Set<Flag> {
    const item = this.current();
    if (!item) return new Set();
    const flags = this.flagsFor(item.item_id);
    if (flags.has(flag)) {
      flags.delete(flag);
    } else {
      flags.add(flag);
    }
    return flags;
  }

  /** Load the next batch of unvoted items; flushes queued votes first. */
  async load(): Promise<void> {
    await this.flushQueue();
    this.batch = await this.api.items(this.annotatorId, this.batchSize);
    this.cursor = 0;
    await this.refreshProgress();
  }

  async refreshProgress(): Promise<ProgressPayload | null> {
    try {
      const progress = await this.api.progress();
      this.totalItems = progress.total_items;
      this.votedCount = progress.annotators[this.annotatorId] ?? 0;
      return progress;
    } catch {
      return null;
    }
  }

  /**
   * Post the verdict for the current item. Advances only after the server
   * acks; a transient failure queues the vote locally and keeps the item on
   * screen with the offline banner up.
   */
  async submit(verdict: Verdict, extraFlags: Flag[] = []): Promise<SubmitResult> {
    const item = this.current();
    if (!item) return { acked: false, queued: false };
    const flags = new Set([...this.flagsFor(item.item_id), ...extraFlags]);
    const vote: VoteBody = {
      item_id: item.item_id,
      annotator_id: this.annotatorId,
      verdict,
      flags: [...flags].sort(),
    };
    try {
      await this.api.submitVote(vote);
    } catch (err) {
      if (err instanceof ApiError && err.transient) {
        this.queue.enqueue(vote);
        this.offline = true;
        return { acked: false, queued: true };
      }
      throw err;
    }
    this.afterAck(vote);
    return { acked: true, queued: false };
  }

  private afterAck(vote: VoteBody): void {
    this.pendingFlags.delete(vote.item_id);
    this.votedCount += 1;
    this.advancePast(vote.item_id);
  }

  private advancePast(itemId: number): void {
    this.batch = this.batch.filter((item) => item.item_id !== itemId);
    if (this.cursor >= this.batch.length) {
      this.cursor = Math.max(0, this.batch.length - 1);
    }
  }

  /** Retry queued votes; on success the current item advances if it was queued. */
  async flushQueue(): Promise<number> {
    if (this.queue.length === 0) return 0;
    const acked = await this.queue.flush((vote) => this.api.submitVote(vote));
    for (const vote of acked) {
      this.afterAck(vote);
    }
    this.offline = this.queue.length > 0;
    if (acked.length > 0) {
      await this.refreshProgress(); // recount server-side
    }
    return acked.length;
  }

  /** Move to the next / previous item without voting; nothing is lost. */
  advance(): void {
    if (this.cursor < this.batch.length - 1) this.cursor += 1;
  }

  back(): void {
    if (this.cursor > 0) this.cursor -= 1;
  }
}

/** Keyboard shortcut map used by the view: returns the action for a key. */
export type KeyAction =
  | { kind: "submit"; verdict: Verdict }
  | { kind: "flag"; flag: Flag }
  | { kind: "nav"; direction: 1 | -1 }
  | null;

export function keyAction(key: string): KeyAction {
  switch (key) {
    case "a":
      return { kind: "submit", verdict: "accept" };
    case "r":
      return { kind: "submit", verdict: "reject" };
    case "m":
      return { kind: "flag", flag: "misaligned" };
    case "n":
      return { kind: "flag", flag: "multiple_names" };
    case "ArrowRight":
      return { kind: "nav", direction: 1 };
    case "ArrowLeft":
      return { kind: "nav", direction: -1 };
    default:
      return null;
  }
}
