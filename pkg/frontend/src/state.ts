/**
 * Pure view-state for one encounter under review.
 *
 * The service's append-only log is the system of record; this module only
 * projects it. Decisions are applied optimistically (seq = -1 marks a local
 * guess) and reconciled with the projection the service returns, so the
 * state after every acknowledgment mirrors the log exactly.
 */

import type {
  DecisionAction,
  DecisionState,
  EncounterView,
  Filter,
  ProjectedDecision,
  Suggestion,
} from "./types.js";

export interface ReviewState {
  encounterId: string;
  text: string;
  suggestions: Suggestion[];
  selectedCode: string | null;
  spanCursor: number; // which evidence span of the selection is emphasized
  filter: Filter;
}

export function initState(view: EncounterView): ReviewState {
  const first = view.suggestions[0];
  return {
    encounterId: view.id,
    text: view.text,
    suggestions: view.suggestions.map((s) => ({ ...s })),
    selectedCode: first ? first.code : null,
    spanCursor: 0,
    filter: "all",
  };
}

export function decisionStateOf(s: Suggestion): DecisionState {
  if (!s.decision) return "pending";
  switch (s.decision.action) {
    case "accept":
      return "accepted";
    case "reject":
      return "rejected";
    case "replace":
      return "replaced";
  }
}

export function visibleSuggestions(state: ReviewState): Suggestion[] {
  if (state.filter === "all") return state.suggestions;
  return state.suggestions.filter((s) => decisionStateOf(s) === "pending");
}

export function selectedSuggestion(state: ReviewState): Suggestion | null {
  return state.suggestions.find((s) => s.code === state.selectedCode) ?? null;
}

export function select(state: ReviewState, code: string | null): ReviewState {
  return { ...state, selectedCode: code, spanCursor: 0 };
}

export function setFilter(state: ReviewState, filter: Filter): ReviewState {
  const next = { ...state, filter };
  const visible = visibleSuggestions(next);
  if (!visible.some((s) => s.code === next.selectedCode)) {
    next.selectedCode = visible[0]?.code ?? null;
    next.spanCursor = 0;
  }
  return next;
}

/** Advance the emphasized evidence span of the selection (wraps around). */
export function cycleSpan(state: ReviewState): ReviewState {
  const sel = selectedSuggestion(state);
  if (!sel || sel.evidence.length === 0) return state;
  return { ...state, spanCursor: (state.spanCursor + 1) % sel.evidence.length };
}

function withDecision(
  state: ReviewState,
  code: string,
  decision: ProjectedDecision | null,
): ReviewState {
  return {
    ...state,
    suggestions: state.suggestions.map((s) =>
      s.code === code ? { ...s, decision } : s,
    ),
  };
}

/** Optimistic local decision; reconcile or roll back once the service answers. */
export function applyOptimistic(
  state: ReviewState,
  code: string,
  action: DecisionAction,
  replacement: string | null = null,
  reviewer = "local",
): ReviewState {
  return withDecision(state, code, { action, replacement, reviewer, seq: -1 });
}

/** Adopt the service's projected decision map (last writer wins per code). */
export function reconcile(
  state: ReviewState,
  projected: Record<string, ProjectedDecision>,
): ReviewState {
  return {
    ...state,
    suggestions: state.suggestions.map((s) => ({
      ...s,
      decision: projected[s.code] ?? null,
    })),
  };
}

export function pendingCount(state: ReviewState): number {
  return state.suggestions.filter((s) => decisionStateOf(s) === "pending").length;
}
