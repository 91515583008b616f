export type DecisionAction = "accept" | "reject" | "replace";
export type DecisionState = "pending" | "accepted" | "rejected" | "replaced";
export type Filter = "all" | "pending";

export interface EvidenceSpan {
  start: number;
  end: number;
  text: string;
}

export interface ProjectedDecision {
  action: DecisionAction;
  replacement: string | null;
  reviewer: string | null;
  seq: number;
}

export interface Suggestion {
  code: string; // canonical identifier, e.g. "E1165"
  display_code: string; // human form, e.g. "E11.65"
  title: string;
  confidence: number;
  evidence: EvidenceSpan[];
  decision: ProjectedDecision | null;
}

export interface EncounterView {
  id: string;
  system_id: string | null;
  text: string;
  suggestions: Suggestion[];
  decisions: unknown[];
}

export interface ExportedCode {
  code: string; // the replacement when the suggestion was replaced
  source_code: string;
  action: DecisionAction;
}

export interface ExportDocument {
  encounter_id: string;
  codes: ExportedCode[];
}
