/** Local queue for votes that could not reach the server.
 *
 * Backed by a pluggable string store (localStorage in the browser, a Map in
 * tests) so queued votes survive page reloads. The server deduplicates
 * identical resubmissions, so flushing after reconnect is safe.
 */

import type { VoteBody } from "./types.js";

export interface StringStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStore implements StringStore {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}

export class VoteQueue {
  constructor(
    private readonly store: StringStore,
    private readonly key: string,
  ) {}

  private read(): VoteBody[] {
    const raw = this.store.getItem(this.key);
    if (!raw) return [];
    try {
      return JSON.parse(raw) as VoteBody[];
    } catch {
      return [];
    }
  }

  private write(votes: VoteBody[]): void {
    if (votes.length === 0) {
      this.store.removeItem(this.key);
    } else {
      this.store.setItem(this.key, JSON.stringify(votes));
    }
  }

  get length(): number {
    return this.read().length;
  }

  pending(): VoteBody[] {
    return this.read();
  }

  /** Enqueue, replacing any earlier queued vote for the same item. */
  enqueue(vote: VoteBody): void {
    const votes = this.read().filter((queued) => queued.item_id !== vote.item_id);
    votes.push(vote);
    this.write(votes);
  }

  /**
   * Send every queued vote in order via `send`; stops at the first failure so
   * order is preserved. Returns the votes that were acked.
   */
  async flush(send: (vote: VoteBody) => Promise<unknown>): Promise<VoteBody[]> {
    const votes = this.read();
    const acked: VoteBody[] = [];
    for (const vote of votes) {
      try {
        await send(vote);
        acked.push(vote);
      } catch {
        break;
      }
    }
    this.write(votes.slice(acked.length));
    return acked;
  }

  clear(): void {
    this.write([]);
  }
}
