/** Shared shapes for the review server API (see docs/schemas.md in the repo root). */

export type Verdict = "accept" | "reject";
export type Flag = "misaligned" | "multiple_names";

export interface ReviewItemPayload {
  item_id: number;
  passage_id: string;
  book_id: string;
  gold_name: string | null;
  texts: Record<string, string>;
  highlights: Record<string, Array<[number, number]>>;
}

export interface VoteBody {
  item_id: number;
  annotator_id: string;
  verdict: Verdict;
  flags: Flag[];
}

export interface VoteAck {
  ok: boolean;
  item_id: number;
  annotator_id: string;
}

export interface ProgressPayload {
  total_items: number;
  annotators: Record<string, number>;
  items_fully_voted: number;
}

export interface ExportPayload {
  kept: number[];
  dropped: number[];
  pending: number[];
}
