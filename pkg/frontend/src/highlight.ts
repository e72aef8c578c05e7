/** Split passage text into plain/highlighted segments from character spans. */

export interface Segment {
  text: string;
  highlighted: boolean;
}

/**
 * Spans are [start, end) character offsets. Out-of-bound or overlapping spans
 * are clamped and merged so the output always reassembles to exactly the
 * input text.
 */
export function segmentText(text: string, spans: Array<[number, number]>): Segment[] {
  const clamped = spans
    .map(([start, end]): [number, number] => [
      Math.max(0, Math.min(start, text.length)),
      Math.max(0, Math.min(end, text.length)),
    ])
    .filter(([start, end]) => end > start)
    .sort((a, b) => a[0] - b[0]);

  const merged: Array<[number, number]> = [];
  for (const span of clamped) {
    const last = merged[merged.length - 1];
    if (last && span[0] <= last[1]) {
      last[1] = Math.max(last[1], span[1]);
    } else {
      merged.push([span[0], span[1]]);
    }
  }

  const segments: Segment[] = [];
  let cursor = 0;
  for (const [start, end] of merged) {
    if (start > cursor) {
      segments.push({ text: text.slice(cursor, start), highlighted: false });
    }
    segments.push({ text: text.slice(start, end), highlighted: true });
    cursor = end;
  }
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), highlighted: false });
  }
  if (segments.length === 0 && text.length > 0) {
    segments.push({ text, highlighted: false });
  }
  return segments;
}

export function reassemble(segments: Segment[]): string {
  return segments.map((segment) => segment.text).join("");
}
