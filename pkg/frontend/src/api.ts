/** Thin client over the coding service's review endpoints. */

import type { DecisionAction, EncounterView, ProjectedDecision } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export interface DecisionResponse {
  encounter_id: string;
  decisions: unknown[];
  projected: Record<string, ProjectedDecision>;
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  const body = await resp.text();
  if (!resp.ok) {
    let message = `HTTP ${resp.status}`;
    try {
      const doc = JSON.parse(body) as { error?: string };
      if (doc.error) message = doc.error;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(resp.status, message);
  }
  return JSON.parse(body) as T;
}

export class ServiceClient {
  constructor(private base: string = "") {}

  listEncounters(): Promise<{ encounters: string[] }> {
    return request(`${this.base}/v1/review`);
  }

  getEncounter(id: string): Promise<EncounterView> {
    return request(`${this.base}/v1/review/${encodeURIComponent(id)}`);
  }

  decide(
    encounterId: string,
    code: string,
    action: DecisionAction,
    replacement: string | null = null,
    reviewer = "workbench",
  ): Promise<DecisionResponse> {
    return request(
      `${this.base}/v1/review/${encodeURIComponent(encounterId)}/decision`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ code, action, replacement, reviewer }),
      },
    );
  }

  codeDetail(system: string, code: string): Promise<{ code: string; title: string; billable: boolean }> {
    return request(
      `${this.base}/v1/ontology/${encodeURIComponent(system)}/code/${encodeURIComponent(code)}`,
    );
  }
}
