import { describe, expect, it } from "vitest";

import {
  applyOptimistic,
  cycleSpan,
  decisionStateOf,
  initState,
  pendingCount,
  reconcile,
  select,
  setFilter,
  visibleSuggestions,
} from "../src/state.js";
import type { EncounterView, Suggestion } from "../src/types.js";

function suggestion(code: string, extra: Partial<Suggestion> = {}): Suggestion {
  return {
    code,
    display_code: code,
    title: `title ${code}`,
    confidence: 1,
    evidence: [{ start: 0, end: 4, text: "text" }],
    decision: null,
    ...extra,
  };
}

function view(suggestions: Suggestion[]): EncounterView {
  return {
    id: "enc-x",
    system_id: "TOY-10",
    text: "text and more text",
    suggestions,
    decisions: [],
  };
}

describe("review state", () => {
  it("initializes with the first suggestion selected", () => {
    const state = initState(view([suggestion("A"), suggestion("B")]));
    expect(state.selectedCode).toBe("A");
    expect(state.filter).toBe("all");
  });

  it("maps projected decisions onto display states", () => {
    expect(decisionStateOf(suggestion("A"))).toBe("pending");
    expect(
      decisionStateOf(
        suggestion("A", {
          decision: { action: "accept", replacement: null, reviewer: "r", seq: 1 },
        }),
      ),
    ).toBe("accepted");
    expect(
      decisionStateOf(
        suggestion("A", {
          decision: { action: "replace", replacement: "B", reviewer: "r", seq: 2 },
        }),
      ),
    ).toBe("replaced");
  });

  it("optimistic decisions are visible and reconcilable", () => {
    let state = initState(view([suggestion("A"), suggestion("B")]));
    state = applyOptimistic(state, "A", "accept");
    expect(decisionStateOf(state.suggestions[0]!)).toBe("accepted");
    expect(state.suggestions[0]!.decision!.seq).toBe(-1);

    state = reconcile(state, {
      A: { action: "reject", replacement: null, reviewer: "srv", seq: 9 },
    });
    expect(decisionStateOf(state.suggestions[0]!)).toBe("rejected");
    expect(state.suggestions[0]!.decision!.seq).toBe(9);
    expect(state.suggestions[1]!.decision).toBeNull();
  });

  it("rollback is the caller keeping the previous state", () => {
    const before = initState(view([suggestion("A")]));
    const after = applyOptimistic(before, "A", "accept");
    expect(decisionStateOf(before.suggestions[0]!)).toBe("pending");
    expect(decisionStateOf(after.suggestions[0]!)).toBe("accepted");
  });

  it("pending filter hides decided suggestions and moves the selection", () => {
    let state = initState(view([suggestion("A"), suggestion("B")]));
    state = reconcile(state, {
      A: { action: "accept", replacement: null, reviewer: "r", seq: 1 },
    });
    state = setFilter(state, "pending");
    expect(visibleSuggestions(state).map((s) => s.code)).toEqual(["B"]);
    expect(state.selectedCode).toBe("B");
    expect(pendingCount(state)).toBe(1);
  });

  it("span cursor cycles through the selection's evidence", () => {
    let state = initState(
      view([
        suggestion("A", {
          evidence: [
            { start: 0, end: 4, text: "text" },
            { start: 9, end: 13, text: "more" },
          ],
        }),
      ]),
    );
    expect(state.spanCursor).toBe(0);
    state = cycleSpan(state);
    expect(state.spanCursor).toBe(1);
    state = cycleSpan(state);
    expect(state.spanCursor).toBe(0);
    state = select(state, "A");
    expect(state.spanCursor).toBe(0);
  });
});
