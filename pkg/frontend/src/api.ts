/**
 * Typed client for the dialogweave HTTP service.
 *
 * The service is stateless: session state travels inside the snapshot, so
 * the client can replay, fork, and probe freely.  A 409 from /session/step
 * surfaces as a Rejection carrying the structured reason; other non-2xx
 * statuses throw ApiError with the response detail.
 */

export interface ExprTree {
  kind: "empty" | "atom" | "node" | "union";
  name?: string;
  arrows?: number;
  mnemonic?: string;
  children?: ExprTree[];
  left?: ExprTree;
  right?: ExprTree;
}

export interface ParseResult {
  expr: string;
  tree: ExprTree;
}

export interface FrontierState {
  stack: string[];
  current: string;
  pending: string[];
}

export interface Snapshot {
  spec: string;
  transcript: string[];
  frontier: FrontierState[];
  complete: boolean;
  candidates: string[];
}

export interface ValidationViolation {
  rule: string;
  path: number[];
  message: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly violations: ValidationViolation[] = [],
  ) {
    super(message);
  }
}

export class Rejection extends Error {
  constructor(
    readonly reason: string,
    readonly utterance: string,
    readonly candidates: string[],
  ) {
    super(reason);
  }
}

export interface ApiClient {
  parse(expr: string): Promise<ParseResult>;
  sessionInit(spec: string): Promise<Snapshot>;
  sessionStep(snapshot: Snapshot, utterance: string): Promise<Snapshot>;
  sessionCandidates(snapshot: Snapshot): Promise<{ utterances: string[]; complete: boolean }>;
}

type Fetch = typeof fetch;

export class HttpApiClient implements ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: Fetch = fetch.bind(globalThis),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    const payload = await response.json().catch(() => ({}));
    if (response.ok) {
      return payload as T;
    }
    const detail = (payload as { detail?: unknown }).detail;
    if (response.status === 409 && detail && typeof detail === "object") {
      const d = detail as { reason?: string; utterance?: string; candidates?: string[] };
      throw new Rejection(d.reason ?? "rejected", d.utterance ?? "", d.candidates ?? []);
    }
    if (detail && typeof detail === "object" && "violations" in (detail as object)) {
      const v = (detail as { violations: ValidationViolation[] }).violations;
      const text = v.map((x) => `${x.rule} at ${x.path.join(".") || "root"}: ${x.message}`);
      throw new ApiError(response.status, text.join("\n"), v);
    }
    throw new ApiError(response.status, typeof detail === "string" ? detail : response.statusText);
  }

  parse(expr: string): Promise<ParseResult> {
    return this.post("/parse", { expr });
  }

  sessionInit(spec: string): Promise<Snapshot> {
    return this.post("/session/init", { spec });
  }

  sessionStep(snapshot: Snapshot, utterance: string): Promise<Snapshot> {
    return this.post("/session/step", { snapshot, utterance });
  }

  sessionCandidates(snapshot: Snapshot): Promise<{ utterances: string[]; complete: boolean }> {
    return this.post("/session/candidates", { snapshot });
  }
}
