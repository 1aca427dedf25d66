/**
 * Typed client for the block-assembly JSON service.
 *
 * Every joinability verdict in the editor comes from this API: the UI never
 * decides locally whether two joints fit. Mutating calls carry the session
 * revision; a concurrent change elsewhere surfaces as a `StaleRevisionError`
 * so the caller can refetch instead of clobbering state.
 */

export type Gender = "male" | "female";

/** One joint of a block, as listed by the service. */
export interface JointInfo {
  ref: string; // "3.male", "3.arg0", ...
  gender: Gender;
  type: string; // printed type, variables normalized ("List a")
}

export interface InstanceInfo {
  id: number;
  cons: string;
  annotation: string | null;
}

export interface JoinPair {
  male: string;
  female: string;
}

/** Full logical state of a session. */
export interface SessionState {
  sessionId: string;
  configId: string;
  revision: number;
  terms: string[];
  instances: InstanceInfo[];
  joins: JoinPair[];
  jointTypes: Record<string, string>;
}

export interface BlockAdded {
  instanceId: number;
  revision: number;
  joints: JointInfo[];
}

export interface JoinOutcome {
  joined: boolean;
  delta: Record<string, string>; // joint ref -> re-typed printed type
  revision: number;
}

export interface DetachOutcome {
  removed: boolean;
  delta: Record<string, string>;
  revision: number;
}

export interface LogEntry {
  op: "block" | "join" | "unjoin";
  consName?: string;
  male?: string;
  female?: string;
}

export interface SessionLog {
  sessionId: string;
  revision: number;
  commands: LogEntry[];
}

/** Fraction strings like "-43/100" or "1"; kept as strings on the wire. */
export type Frac = string;
export type JsonPoint = [Frac, Frac];
export type JsonRing = JsonPoint[];

export interface FormDoc {
  rigid: JsonRing[];
  polySurface: JsonRing[] | null;
  argTransform: Frac[] | null;
}

export interface PlacementDoc {
  position: [Frac, Frac, Frac];
  orientation: [number, number, number, number];
}

export interface PrismDoc {
  crossSection: JsonRing[];
  zLow: Frac;
  zHigh: Frac;
}

export interface ConfigDoc {
  adtdSet: string[];
  allowFlexible: boolean;
  alignmentSquare: { outerSide: Frac; frameThickness: Frac };
  vJointSize: Frac;
  typeConsMapping: Record<string, FormDoc>;
  blockMapping: Record<string, PrismDoc[]>;
  argLocationMapping: Record<string, PlacementDoc[]>;
  resultLocationMapping: Record<string, PlacementDoc | null>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
    message?: string,
  ) {
    super(message ?? `service error ${status}: ${JSON.stringify(detail)}`);
    this.name = "ApiError";
  }
}

/** The session changed under us; refetch state and retry the interaction. */
export class StaleRevisionError extends ApiError {
  constructor(
    status: number,
    detail: unknown,
    readonly serverRevision: number,
  ) {
    super(status, detail, `stale revision; server is at ${serverRevision}`);
    this.name = "StaleRevisionError";
  }
}

export type FetchLike = (
  input: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}>;

function isStaleDetail(detail: unknown): detail is { error: string; revision: number } {
  return (
    typeof detail === "object" &&
    detail !== null &&
    (detail as { error?: unknown }).error === "stale revision" &&
    typeof (detail as { revision?: unknown }).revision === "number"
  );
}

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? (globalThis.fetch as unknown as FetchLike);
    if (!this.fetchImpl) {
      throw new Error("no fetch implementation available");
    }
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.ok) {
      return (await response.json()) as T;
    }
    let detail: unknown;
    try {
      const parsed = (await response.json()) as { detail?: unknown };
      detail = parsed.detail ?? parsed;
    } catch {
      detail = undefined;
    }
    if (response.status === 409 && isStaleDetail(detail)) {
      throw new StaleRevisionError(response.status, detail, detail.revision);
    }
    throw new ApiError(response.status, detail);
  }

  // -- configs ---------------------------------------------------------------

  listConfigs(): Promise<{ configs: string[] }> {
    return this.request("GET", "/configs");
  }

  getConfig(configId: string): Promise<{ configId: string; config: ConfigDoc }> {
    return this.request("GET", `/configs/${encodeURIComponent(configId)}`);
  }

  uploadConfig(config: ConfigDoc): Promise<{ configId: string }> {
    return this.request("POST", "/configs", { config });
  }

  // -- sessions ----------------------------------------------------------------

  createSession(configId: string): Promise<{ sessionId: string; revision: number }> {
    return this.request("POST", "/sessions", { configId });
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/state`);
  }

  getLog(sessionId: string): Promise<SessionLog> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/log`);
  }

  // -- editing -----------------------------------------------------------------

  addBlock(sessionId: string, consName: string): Promise<BlockAdded> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/blocks`, {
      consName,
    });
  }

  /**
   * Ask the service whether the male joint may enter the female joint, and
   * join them if so. `joined: false` is a normal verdict (the blocks do not
   * fit), not an error; nothing changes server-side in that case.
   */
  tryJoin(
    sessionId: string,
    male: string,
    female: string,
    revision: number,
  ): Promise<JoinOutcome> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/joins`, {
      male,
      female,
      revision,
    });
  }

  detach(sessionId: string, maleRef: string, revision: number): Promise<DetachOutcome> {
    const path =
      `/sessions/${encodeURIComponent(sessionId)}/joins/` +
      `${encodeURIComponent(maleRef)}?revision=${revision}`;
    return this.request("DELETE", path);
  }

  async renderSvg(sessionId: string): Promise<string> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/render.svg`,
      { method: "GET" },
    );
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return response.text();
  }
}
