// Typed client for the gridspeak HTTP service. Every shape here mirrors a
// server payload verbatim; the UI never derives world facts on its own.

export type Heading = "N" | "E" | "S" | "W";
export type Degree = "strict" | "proximate" | "near";
export type RegionKind = "corner" | "side" | "middle";
export type AlertSeverity = "info" | "warning" | "error";

export interface TypeRow {
  name: string;
  parent?: string;
}

export interface LocationRow {
  id: string;
  startX: number;
  endX: number;
  startZ: number;
  endZ: number;
  gWidth?: number;
  gLength?: number;
}

export interface ObjectRow {
  id: string;
  type: string;
  properties: Record<string, string>;
  bboxMin: [number, number, number];
  bboxMax: [number, number, number];
  location: string;
  front?: [number, number];
  owner?: string;
  carriedBy?: string | null;
  consumed?: boolean;
  effectiveBboxMin?: [number, number, number];
  effectiveBboxMax?: [number, number, number];
}

export interface PoseRow {
  cell: [number, number];
  heading: Heading;
}

export interface AgentRow {
  id: string;
  role: string;
  cell: [number, number];
  heading: Heading;
  inventory?: string[];
  entryPoses?: Record<string, PoseRow>;
  history?: { verb: string; object: string; tick: number }[];
}

export interface WorldDocument {
  closeToRadius?: number;
  types: TypeRow[];
  locations: LocationRow[];
  objects: ObjectRow[];
  agents: AgentRow[];
}

export interface WorldResponse {
  tick: number;
  world: WorldDocument;
}

export interface RegionRow {
  kind: RegionKind;
  instance: string;
  degree: Degree;
  cells: [number, number][];
}

export interface RegionsResponse {
  location: string;
  gWidth: number;
  gLength: number;
  regions: RegionRow[];
}

export interface AlertRow {
  severity: AlertSeverity;
  code: string;
  message: string;
}

export interface RegionGoalPayload {
  location: string;
  kind: string;
  instance: string;
  degree: string | null;
}

export interface PathPayload {
  kind: string;
  reference: string;
  waypoints: [number, number][];
  seed: number;
}

export interface ResolutionPayload {
  kind: "objects" | "cells" | "path" | "none";
  objects: string[];
  cells: [number, number][];
  path: PathPayload | null;
  regionGoal: RegionGoalPayload | null;
  destination: string | null;
  warnings: AlertRow[];
}

export interface InstructionResponse {
  tick: number;
  resolution: ResolutionPayload;
}

export interface ParseErrorPayload {
  error: "parse";
  message: string;
  tokenIndex: number;
  charStart: number;
  expected: string;
}

export type TraceEventKind =
  | "instruction"
  | "resolve"
  | "move"
  | "act"
  | "place"
  | "warning"
  | "complete";

export interface TraceEventPayload {
  tick: number;
  agent: string;
  kind: TraceEventKind;
  [key: string]: unknown;
}

export interface PoseFrame {
  kind: "tick";
  tick: number;
  agents: { id: string; cell: [number, number]; heading: Heading }[];
}

export type StreamMessage = TraceEventPayload | PoseFrame;

export function isPoseFrame(message: StreamMessage): message is PoseFrame {
  return message.kind === "tick";
}

export interface TraceResponse {
  tick: number;
  events: TraceEventPayload[];
}

export type SubmitResult =
  | { kind: "resolved"; tick: number; resolution: ResolutionPayload }
  | { kind: "parse-error"; error: ParseErrorPayload };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw new ApiError(response.status, `${response.status} ${await response.text()}`);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  async getWorld(): Promise<WorldResponse> {
    return asJson(await fetch(`${this.baseUrl}/world`));
  }

  async getRegions(locationId: string): Promise<RegionsResponse> {
    return asJson(await fetch(`${this.baseUrl}/regions/${encodeURIComponent(locationId)}`));
  }

  async getTrace(since = -1): Promise<TraceResponse> {
    return asJson(await fetch(`${this.baseUrl}/trace?since=${since}`));
  }

  async submit(agentId: string, text: string): Promise<SubmitResult> {
    const response = await fetch(
      `${this.baseUrl}/agents/${encodeURIComponent(agentId)}/instruction`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text }),
      },
    );
    if (response.status === 422) {
      const body = (await response.json()) as { detail: ParseErrorPayload };
      return { kind: "parse-error", error: body.detail };
    }
    const body = await asJson<InstructionResponse>(response);
    return { kind: "resolved", tick: body.tick, resolution: body.resolution };
  }

  /**
   * Read the server-sent event stream. Yields messages in arrival order and
   * returns when the server closes the stream (idle, or `maxTicks` reached).
   */
  async *streamEvents(options: { maxTicks?: number; signal?: AbortSignal } = {}): AsyncGenerator<StreamMessage> {
    const query = options.maxTicks === undefined ? "" : `?max_ticks=${options.maxTicks}`;
    const response = await fetch(`${this.baseUrl}/events${query}`, { signal: options.signal });
    if (!response.ok || response.body === null) {
      throw new ApiError(response.status, `event stream failed: ${response.status}`);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) {
          break;
        }
        buffer += decoder.decode(value, { stream: true });
        let cut;
        while ((cut = buffer.indexOf("\n\n")) >= 0) {
          const frame = buffer.slice(0, cut);
          buffer = buffer.slice(cut + 2);
          for (const line of frame.split("\n")) {
            if (line.startsWith("data: ")) {
              yield JSON.parse(line.slice("data: ".length)) as StreamMessage;
            }
          }
        }
      }
    } finally {
      reader.releaseLock();
    }
  }
}
