import { describe, expect, it } from "vitest";

import { reassemble, segmentText } from "../src/highlight.js";

const TEXT = "Patient has type 2 diabetes with hyperglycemia.";

describe("segmentText", () => {
  it("marks exactly the span characters", () => {
    const segments = segmentText(TEXT, [{ start: 12, end: 46, text: "" }]);
    expect(reassemble(segments)).toBe(TEXT);
    const marked = segments.filter((s) => s.marked);
    expect(marked).toHaveLength(1);
    expect(marked[0]!.text).toBe(TEXT.slice(12, 46));
  });

  it("handles several spans and emphasis", () => {
    const spans = [
      { start: 0, end: 7, text: "" },
      { start: 12, end: 18, text: "" },
    ];
    const segments = segmentText(TEXT, spans, 1);
    expect(reassemble(segments)).toBe(TEXT);
    expect(segments.filter((s) => s.marked)).toHaveLength(2);
    const emphasized = segments.filter((s) => s.emphasized);
    expect(emphasized).toHaveLength(1);
    expect(emphasized[0]!.spanIndex).toBe(1);
    expect(emphasized[0]!.text).toBe(TEXT.slice(12, 18));
  });

  it("ignores out-of-bounds spans and clips overlaps", () => {
    const segments = segmentText(TEXT, [
      { start: -3, end: 4, text: "" },
      { start: 900, end: 950, text: "" },
      { start: 0, end: 7, text: "" },
      { start: 5, end: 11, text: "" }, // overlaps the previous span
    ]);
    expect(reassemble(segments)).toBe(TEXT);
    const marked = segments.filter((s) => s.marked).map((s) => s.text);
    expect(marked.join("")).toBe(TEXT.slice(0, 11));
  });

  it("no spans means one plain segment", () => {
    const segments = segmentText(TEXT, []);
    expect(segments).toHaveLength(1);
    expect(segments[0]!.marked).toBe(false);
  });
});
