// Typed client for the backend HTTP API.  The shapes below mirror the
// wire format exactly; the fixture tests pin them against captured
// responses so a backend change shows up as a failing test here.

export interface ConfigOut {
  profiles: string[];
  poll_ms: number;
  version: string;
}

export interface RankTransition {
  before: string;
  after: string;
}

export interface BeliefView {
  formula: string;
  rank: string; // server-formatted, exactly 3 decimals — never reformat
  protected: boolean;
  in_cut: boolean;
  last_change: RankTransition | null;
}

export interface BeliefsOut {
  beliefs: BeliefView[];
  incons: string;
  cut_size: number;
  mode: string;
}

export interface QueueDoc {
  id: string;
  keywords: string[];
}

export interface QueueOut {
  documents: QueueDoc[];
}

export interface ReportChange {
  sentence: string;
  before: number;
  after: number;
}

export interface AdjustmentReport {
  operation: string;
  target: string;
  rank: number;
  changes: ReportChange[];
  notes: string[];
}

export interface FeedbackOut {
  doc: string;
  reports: AdjustmentReport[];
  incons: string;
}

export interface VerdictOut {
  relevant: boolean;
  degree: string;
  premises: string[];
  incons: string;
  cut_size: number;
}

export interface HistoryOut {
  reports: AdjustmentReport[];
}

export type Judgment = "R" | "N";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (body.detail !== undefined) return JSON.stringify(body.detail);
  } catch {
    /* non-JSON error body */
  }
  return response.statusText || "request failed";
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly token?: string,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const headers: Record<string, string> = {
      ...(init?.body ? { "Content-Type": "application/json" } : {}),
      ...(this.token ? { Authorization: `Bearer ${this.token}` } : {}),
    };
    let response: Response;
    try {
      response = await fetch(this.base + path, { ...init, headers });
    } catch (err) {
      throw new ApiError(0, err instanceof Error ? err.message : String(err));
    }
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return (await response.json()) as T;
  }

  config(): Promise<ConfigOut> {
    return this.request("/config");
  }

  beliefs(profile: string): Promise<BeliefsOut> {
    return this.request(`/profiles/${encodeURIComponent(profile)}/beliefs`);
  }

  queue(profile: string): Promise<QueueOut> {
    return this.request(`/profiles/${encodeURIComponent(profile)}/queue`);
  }

  history(profile: string): Promise<HistoryOut> {
    return this.request(`/profiles/${encodeURIComponent(profile)}/history`);
  }

  feedback(
    profile: string,
    docId: string,
    judgment: Judgment,
  ): Promise<FeedbackOut> {
    return this.request(
      `/profiles/${encodeURIComponent(profile)}/feedback`,
      {
        method: "POST",
        body: JSON.stringify({ doc_id: docId, judgment }),
      },
    );
  }

  filter(profile: string, keywords: string[]): Promise<VerdictOut> {
    return this.request(`/profiles/${encodeURIComponent(profile)}/filter`, {
      method: "POST",
      body: JSON.stringify({ keywords }),
    });
  }
}
