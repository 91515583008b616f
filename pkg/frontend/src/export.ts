/**
 * Final code-set export: exactly the suggestions whose projected decision is
 * accepted or replaced, with replacements exporting the replacement code.
 */

import { decisionStateOf, type ReviewState } from "./state.js";
import type { ExportDocument, ExportedCode } from "./types.js";

export function exportAccepted(state: ReviewState): ExportDocument {
  const codes: ExportedCode[] = [];
  for (const s of state.suggestions) {
    const d = decisionStateOf(s);
    if (d === "accepted") {
      codes.push({ code: s.code, source_code: s.code, action: "accept" });
    } else if (d === "replaced" && s.decision?.replacement) {
      codes.push({
        code: s.decision.replacement,
        source_code: s.code,
        action: "replace",
      });
    }
  }
  return { encounter_id: state.encounterId, codes };
}
