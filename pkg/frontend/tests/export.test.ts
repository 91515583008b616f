import { describe, expect, it } from "vitest";

import { exportAccepted } from "../src/export.js";
import { initState, reconcile } from "../src/state.js";
import type { EncounterView, Suggestion } from "../src/types.js";

function suggestion(code: string): Suggestion {
  return {
    code,
    display_code: code,
    title: code,
    confidence: 1,
    evidence: [],
    decision: null,
  };
}

const VIEW: EncounterView = {
  id: "enc-x",
  system_id: "TOY-10",
  text: "doc",
  suggestions: [suggestion("A"), suggestion("B"), suggestion("C"), suggestion("D")],
  decisions: [],
};

describe("exportAccepted", () => {
  it("exports exactly the accepted/replaced subset, replacements first-class", () => {
    let state = initState(VIEW);
    state = reconcile(state, {
      A: { action: "accept", replacement: null, reviewer: "r", seq: 1 },
      B: { action: "reject", replacement: null, reviewer: "r", seq: 2 },
      C: { action: "replace", replacement: "Z9", reviewer: "r", seq: 3 },
    });
    const doc = exportAccepted(state);
    expect(doc.encounter_id).toBe("enc-x");
    expect(doc.codes).toEqual([
      { code: "A", source_code: "A", action: "accept" },
      { code: "Z9", source_code: "C", action: "replace" },
    ]);
  });

  it("pending and rejected suggestions never export", () => {
    const state = initState(VIEW);
    expect(exportAccepted(state).codes).toEqual([]);
  });

  it("last decision wins: reject then accept exports the code", () => {
    let state = initState(VIEW);
    state = reconcile(state, {
      A: { action: "reject", replacement: null, reviewer: "r", seq: 1 },
    });
    state = reconcile(state, {
      A: { action: "accept", replacement: null, reviewer: "r", seq: 2 },
    });
    expect(exportAccepted(state).codes).toEqual([
      { code: "A", source_code: "A", action: "accept" },
    ]);
  });
});
