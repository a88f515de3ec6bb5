/**
 * Thin client for the session service. Paths and body shapes mirror the
 * server routes one to one; nothing is reshaped beyond JSON parsing.
 * `fetchFn` and `sleep` are injectable so tests can run without a
 * network or a clock.
 */

import type {
  AdjustmentDoc,
  AdjustmentView,
  ControlPanelView,
  FocusView,
  GlobalView,
  RunDoc,
  SessionConfigDoc,
  TreeDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly kind: string;

  constructor(status: number, kind: string, detail: string) {
    super(detail);
    this.name = "ApiError";
    this.status = status;
    this.kind = kind;
  }
}

export interface ClientOptions {
  baseUrl?: string;
  token?: string | null;
  fetchFn?: typeof fetch;
  sleep?: (ms: number) => Promise<void>;
}

export interface DatasetSummary {
  datasetId: string;
  companies: number;
  timestamps: number;
  features: string[];
}

export interface SessionCreated {
  sessionId: string;
  tree: TreeDoc;
}

export interface StagedList {
  nodeId: string;
  staged: Required<AdjustmentDoc>[];
}

export interface AppliedResult {
  nodeId: string;
  tree: TreeDoc;
}

export const RUN_POLL_MS = 1000;

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  private readonly baseUrl: string;
  private readonly token: string | null;
  private readonly fetchFn: typeof fetch;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(opts: ClientOptions = {}) {
    this.baseUrl = (opts.baseUrl ?? "").replace(/\/$/, "");
    this.token = opts.token ?? null;
    this.fetchFn = opts.fetchFn ?? fetch;
    this.sleep = opts.sleep ?? defaultSleep;
  }

  private async go<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { Accept: "application/json" };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let kind = "HttpError";
      let detail = `${response.status} ${response.statusText}`;
      try {
        const doc = await response.json();
        if (doc && typeof doc === "object") {
          kind = (doc as { error?: string }).error ?? kind;
          detail = (doc as { detail?: string }).detail ?? detail;
        }
      } catch {
        // non-JSON error body, keep the status line
      }
      throw new ApiError(response.status, kind, detail);
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.go("GET", "/health");
  }

  createDataset(
    payload: { doc: unknown } | { companies: string; edges: string; knowledge?: string },
  ): Promise<DatasetSummary> {
    return this.go("POST", "/datasets", payload);
  }

  createSession(datasetId: string, config: Partial<SessionConfigDoc> = {}): Promise<SessionCreated> {
    return this.go("POST", "/sessions", { datasetId, config });
  }

  importSession(log: string): Promise<SessionCreated> {
    return this.go("POST", "/sessions/import", { log });
  }

  run(
    sessionId: string,
    opts: { fromNode?: string; turns?: number; wait?: boolean } = {},
  ): Promise<RunDoc> {
    return this.go("POST", `/sessions/${sessionId}/run`, opts);
  }

  runState(sessionId: string, runId: string): Promise<RunDoc> {
    return this.go("GET", `/sessions/${sessionId}/runs/${runId}`);
  }

  /** poll a background run once a second until it settles */
  async pollRun(
    sessionId: string,
    runId: string,
    onTick?: (run: RunDoc) => void,
  ): Promise<RunDoc> {
    for (;;) {
      const run = await this.runState(sessionId, runId);
      onTick?.(run);
      if (run.status !== "running") return run;
      await this.sleep(RUN_POLL_MS);
    }
  }

  tree(sessionId: string): Promise<TreeDoc> {
    return this.go("GET", `/sessions/${sessionId}/tree`);
  }

  private view<T>(
    sessionId: string,
    nodeId: string,
    kind: string,
    params: Record<string, string> = {},
  ): Promise<T> {
    const query = new URLSearchParams(params).toString();
    const suffix = query ? `?${query}` : "";
    return this.go("GET", `/sessions/${sessionId}/nodes/${nodeId}/view/${kind}${suffix}`);
  }

  globalView(sessionId: string, nodeId: string): Promise<GlobalView> {
    return this.view(sessionId, nodeId, "global");
  }

  focusView(
    sessionId: string,
    nodeId: string,
    focus: readonly string[],
    range: { from?: number; to?: number } = {},
  ): Promise<FocusView> {
    const params: Record<string, string> = { focus: focus.join(",") };
    if (range.from !== undefined) params.from = String(range.from);
    if (range.to !== undefined) params.to = String(range.to);
    return this.view(sessionId, nodeId, "focus", params);
  }

  adjustmentView(sessionId: string, nodeId: string, company: string): Promise<AdjustmentView> {
    return this.view(sessionId, nodeId, "adjustment", { company });
  }

  controlPanelView(sessionId: string, nodeId: string, company?: string): Promise<ControlPanelView> {
    return this.view(sessionId, nodeId, "controlpanel", company ? { company } : {});
  }

  stageAdjustment(sessionId: string, nodeId: string, doc: AdjustmentDoc): Promise<StagedList> {
    return this.go("POST", `/sessions/${sessionId}/nodes/${nodeId}/adjustments`, doc);
  }

  stagedAdjustments(sessionId: string, nodeId: string): Promise<StagedList> {
    return this.go("GET", `/sessions/${sessionId}/nodes/${nodeId}/adjustments`);
  }

  applyAdjustments(sessionId: string, nodeId: string): Promise<AppliedResult> {
    return this.go("POST", `/sessions/${sessionId}/nodes/${nodeId}/adjustments:apply`);
  }

  resetAdjustments(sessionId: string, nodeId: string): Promise<StagedList> {
    return this.go("POST", `/sessions/${sessionId}/nodes/${nodeId}/adjustments:reset`);
  }

  putKnowledge(sessionId: string, scope: string, text: string): Promise<{ scope: string }> {
    return this.go("PUT", `/sessions/${sessionId}/knowledge`, { scope, text });
  }

  async exportLog(sessionId: string): Promise<string> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/export`, {
      method: "GET",
      headers,
    });
    if (!response.ok) {
      throw new ApiError(response.status, "HttpError", `${response.status} ${response.statusText}`);
    }
    return response.text();
  }
}
