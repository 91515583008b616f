/**
 * Split a document into render segments for span highlighting.
 *
 * Works purely on the character offsets the service returned, so what the
 * reviewer sees marked is exactly what the evaluation metrics score.
 */

import type { EvidenceSpan } from "./types.js";

export interface Segment {
  text: string;
  marked: boolean;
  emphasized: boolean;
  spanIndex: number | null; // index into the input span list, for navigation
}

export function segmentText(
  text: string,
  spans: EvidenceSpan[],
  emphasizedIndex: number | null = null,
): Segment[] {
  const indexed = spans
    .map((s, i) => ({ ...s, i }))
    .filter((s) => s.start >= 0 && s.end <= text.length && s.start < s.end)
    .sort((a, b) => a.start - b.start || a.end - b.end);

  const segments: Segment[] = [];
  let pos = 0;
  for (const span of indexed) {
    const start = Math.max(span.start, pos);
    if (start >= span.end) continue; // swallowed by an earlier overlapping span
    if (start > pos) {
      segments.push({ text: text.slice(pos, start), marked: false, emphasized: false, spanIndex: null });
    }
    segments.push({
      text: text.slice(start, span.end),
      marked: true,
      emphasized: emphasizedIndex === span.i,
      spanIndex: span.i,
    });
    pos = span.end;
  }
  if (pos < text.length) {
    segments.push({ text: text.slice(pos), marked: false, emphasized: false, spanIndex: null });
  }
  return segments;
}

/** Round-trip guarantee used by tests: segments reassemble the document. */
export function reassemble(segments: Segment[]): string {
  return segments.map((s) => s.text).join("");
}
