/**
 * Review workbench: document pane with evidence highlights on the left,
 * suggestion cards on the right. Keyboard: a accept, r reject, x replace,
 * n next evidence span, j/k move selection.
 */

import { ApiError, ServiceClient } from "./api.js";
import { exportAccepted } from "./export.js";
import { segmentText } from "./highlight.js";
import {
  applyOptimistic,
  cycleSpan,
  decisionStateOf,
  initState,
  reconcile,
  select,
  selectedSuggestion,
  setFilter,
  visibleSuggestions,
  type ReviewState,
} from "./state.js";
import type { DecisionAction, Suggestion } from "./types.js";

const client = new ServiceClient("");
let state: ReviewState | null = null;
let hoveredCode: string | null = null;

const app = document.getElementById("app") as HTMLElement;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function banner(kind: "error" | "info", message: string): HTMLElement {
  const node = el("div", `banner ${kind}`, message);
  return node;
}

let inlineError: string | null = null;

function render(): void {
  app.replaceChildren();
  if (!state) return;

  const header = el("header");
  const title = el("h1", undefined, `Encounter ${state.encounterId}`);
  header.appendChild(title);

  const controls = el("div", "controls");
  const filterBtn = el(
    "button",
    "filter",
    state.filter === "all" ? "Show pending only" : "Show all",
  );
  filterBtn.onclick = () => {
    if (!state) return;
    state = setFilter(state, state.filter === "all" ? "pending" : "all");
    render();
  };
  const exportBtn = el("button", "export", "Export accepted codes");
  exportBtn.onclick = downloadExport;
  controls.append(filterBtn, exportBtn);
  header.appendChild(controls);
  app.appendChild(header);

  if (inlineError) {
    app.appendChild(banner("error", inlineError));
  }

  const layout = el("div", "layout");
  layout.appendChild(renderDocument());
  layout.appendChild(renderSuggestions());
  app.appendChild(layout);
}

function highlightTarget(): Suggestion | null {
  if (!state) return null;
  if (hoveredCode) {
    return state.suggestions.find((s) => s.code === hoveredCode) ?? null;
  }
  return selectedSuggestion(state);
}

function renderDocument(): HTMLElement {
  const pane = el("div", "document");
  if (!state) return pane;
  const target = highlightTarget();
  const spans = target ? target.evidence : [];
  const emphasized =
    target && target.code === state.selectedCode ? state.spanCursor : null;
  const pre = el("pre");
  for (const seg of segmentText(state.text, spans, emphasized)) {
    if (seg.marked) {
      const mark = el("mark", seg.emphasized ? "emphasized" : undefined, seg.text);
      mark.id = seg.emphasized ? "emphasized-span" : "";
      if (seg.spanIndex !== null) mark.dataset.spanIndex = String(seg.spanIndex);
      pre.appendChild(mark);
    } else {
      pre.appendChild(document.createTextNode(seg.text));
    }
  }
  pane.appendChild(pre);
  return pane;
}

function renderSuggestions(): HTMLElement {
  const pane = el("div", "suggestions");
  if (!state) return pane;
  const visible = visibleSuggestions(state);
  if (state.suggestions.length === 0) {
    pane.appendChild(banner("info", "No code suggestions for this encounter."));
    return pane;
  }
  if (visible.length === 0) {
    pane.appendChild(banner("info", "Nothing pending: every suggestion is decided."));
  }
  for (const s of visible) {
    pane.appendChild(renderCard(s));
  }
  const legend = el(
    "p",
    "legend",
    "Keys: a accept · r reject · x replace · n next span · j/k move",
  );
  pane.appendChild(legend);
  return pane;
}

function renderCard(s: Suggestion): HTMLElement {
  if (!state) throw new Error("no state");
  const decision = decisionStateOf(s);
  const card = el("div", `card ${decision}${s.code === state.selectedCode ? " selected" : ""}`);
  card.onmouseenter = () => {
    hoveredCode = s.code;
    render();
  };
  card.onmouseleave = () => {
    hoveredCode = null;
    render();
  };
  card.onclick = () => {
    if (!state) return;
    state = state.selectedCode === s.code ? cycleSpan(state) : select(state, s.code);
    render();
    scrollToEmphasized();
  };

  const head = el("div", "card-head");
  head.appendChild(el("span", "code", s.display_code));
  head.appendChild(el("span", "confidence", s.confidence.toFixed(2)));
  head.appendChild(el("span", `badge ${decision}`, decision));
  card.appendChild(head);
  card.appendChild(el("div", "title", s.title));
  if (decision === "replaced" && s.decision?.replacement) {
    card.appendChild(el("div", "replacement", `→ ${s.decision.replacement}`));
  }
  card.appendChild(
    el("div", "spans", `${s.evidence.length} evidence span(s)`),
  );
  return card;
}

function scrollToEmphasized(): void {
  document.getElementById("emphasized-span")?.scrollIntoView({
    block: "center",
    behavior: "smooth",
  });
}

function downloadExport(): void {
  if (!state) return;
  const doc = exportAccepted(state);
  const blob = new Blob([JSON.stringify(doc, null, 2)], {
    type: "application/json",
  });
  const a = el("a");
  a.href = URL.createObjectURL(blob);
  a.download = `${state.encounterId}-codes.json`;
  a.click();
  URL.revokeObjectURL(a.href);
}

async function decide(action: DecisionAction): Promise<void> {
  if (!state) return;
  const current = selectedSuggestion(state);
  if (!current) return;

  let replacement: string | null = null;
  if (action === "replace") {
    replacement = window.prompt("Replacement code (e.g. E11.9):");
    if (!replacement) return;
    try {
      const system = currentSystem();
      await client.codeDetail(system, replacement);
    } catch (err) {
      inlineError = err instanceof ApiError
        ? `Replacement rejected: ${err.message}`
        : String(err);
      render();
      return;
    }
  }

  const before = state;
  state = applyOptimistic(state, current.code, action, replacement);
  inlineError = null;
  render();
  try {
    const resp = await client.decide(
      state.encounterId,
      current.code,
      action,
      replacement,
    );
    state = reconcile(state, resp.projected);
  } catch (err) {
    state = before; // roll the optimistic update back
    inlineError = err instanceof ApiError ? err.message : String(err);
  }
  render();
}

function currentSystem(): string {
  return systemId ?? "TOY-10";
}

let systemId: string | null = null;

function moveSelection(delta: number): void {
  if (!state) return;
  const visible = visibleSuggestions(state);
  if (visible.length === 0) return;
  const idx = visible.findIndex((s) => s.code === state?.selectedCode);
  const next = visible[(idx + delta + visible.length) % visible.length];
  if (next) {
    state = select(state, next.code);
    render();
    scrollToEmphasized();
  }
}

document.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLInputElement) return;
  switch (event.key) {
    case "a":
      void decide("accept");
      break;
    case "r":
      void decide("reject");
      break;
    case "x":
      void decide("replace");
      break;
    case "n":
      if (state) {
        state = cycleSpan(state);
        render();
        scrollToEmphasized();
      }
      break;
    case "j":
      moveSelection(1);
      break;
    case "k":
      moveSelection(-1);
      break;
  }
});

async function loadEncounter(id: string): Promise<void> {
  try {
    const view = await client.getEncounter(id);
    systemId = view.system_id;
    state = initState(view);
    inlineError = null;
    render();
  } catch (err) {
    app.replaceChildren(
      banner(
        "error",
        err instanceof ApiError && err.status === 404
          ? `Encounter "${id}" is not ingested on the service.`
          : `Failed to load encounter: ${String(err)}`,
      ),
    );
  }
}

async function boot(): Promise<void> {
  const fromHash = window.location.hash.replace(/^#/, "");
  if (fromHash) {
    await loadEncounter(fromHash);
    return;
  }
  try {
    const { encounters } = await client.listEncounters();
    const first = encounters[0];
    if (first) {
      window.location.hash = first;
      await loadEncounter(first);
    } else {
      app.replaceChildren(banner("info", "No encounters ingested yet."));
    }
  } catch (err) {
    app.replaceChildren(banner("error", `Service unreachable: ${String(err)}`));
  }
}

window.addEventListener("hashchange", () => {
  const id = window.location.hash.replace(/^#/, "");
  if (id) void loadEncounter(id);
});

void boot();
