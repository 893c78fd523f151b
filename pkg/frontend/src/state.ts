// View model for the console. Everything here is either a server payload
// stored verbatim or a local UI selection; no grounding or region math
// happens client-side.

import type {
  AlertRow,
  ParseErrorPayload,
  PoseRow,
  RegionKind,
  RegionsResponse,
  StreamMessage,
  SubmitResult,
  WorldDocument,
  WorldResponse,
} from "./api.js";
import { isPoseFrame } from "./api.js";

/** One row of the persistent warning log, copied verbatim from a payload. */
export interface WarningRow extends AlertRow {
  agent: string;
  tick: number;
}

export interface InlineParseError {
  text: string;
  payload: ParseErrorPayload;
}

export class AppState {
  tick = 0;
  snapshot: WorldDocument | null = null;
  /** Region payloads by location id, exactly as the server sent them. */
  overlays = new Map<string, RegionsResponse>();
  /** Which region kind to shade, or null for a plain grid. */
  overlayKind: RegionKind | null = null;
  selectedAgent: string | null = null;
  /** Append-only; rows are service warnings in arrival order, nothing else. */
  warningLog: WarningRow[] = [];
  /** Ids highlighted after the latest resolution. */
  highlights = new Set<string>();
  /** Goal cells highlighted after the latest resolution. */
  cellHighlights: [number, number][] = [];
  /** Latest pose per agent from the event stream (fallback: snapshot pose). */
  livePoses = new Map<string, PoseRow>();
  banner: string | null = null;
  parseError: InlineParseError | null = null;

  applyWorld(response: WorldResponse): void {
    this.snapshot = response.world;
    this.tick = response.tick;
    this.banner = null;
    const ids = response.world.agents.map((a) => a.id);
    if (this.selectedAgent === null || !ids.includes(this.selectedAgent)) {
      this.selectedAgent = ids[0] ?? null;
    }
  }

  applyRegions(response: RegionsResponse): void {
    this.overlays.set(response.location, response);
  }

  setOverlayKind(kind: RegionKind | null): void {
    this.overlayKind = kind;
  }

  selectAgent(agentId: string): void {
    this.selectedAgent = agentId;
  }

  /**
   * Record the outcome of POSTing an instruction. Highlights come from the
   * response; its warnings are not pushed here because the service echoes
   * every resolution alert into the trace, so the event stream delivers the
   * same rows — one channel keeps the log an exact mirror with no duplicates.
   */
  applySubmit(result: SubmitResult): void {
    if (result.kind === "parse-error") {
      return; // caller pairs this with applyParseError for the typed text
    }
    this.parseError = null;
    this.highlights = new Set(result.resolution.objects);
    this.cellHighlights = result.resolution.cells.map(([x, z]) => [x, z]);
  }

  applyParseError(text: string, payload: ParseErrorPayload): void {
    this.parseError = { text, payload };
  }

  /** Apply one event-stream message; messages must arrive in stream order. */
  applyStream(message: StreamMessage): void {
    if (isPoseFrame(message)) {
      this.tick = message.tick;
      for (const agent of message.agents) {
        this.livePoses.set(agent.id, { cell: agent.cell, heading: agent.heading });
      }
      return;
    }
    if (message.kind === "warning") {
      this.warningLog.push({
        agent: message.agent,
        tick: message.tick,
        severity: message["severity"] as WarningRow["severity"],
        code: message["code"] as string,
        message: message["message"] as string,
      });
    }
  }

  /** A fetch failed: keep the last good snapshot and show a banner. */
  fetchFailed(what: string, error: unknown): void {
    this.banner = `${what} failed: ${error instanceof Error ? error.message : String(error)}`;
  }

  /** Current pose for an agent: live stream frame if seen, else snapshot. */
  poseOf(agentId: string): PoseRow | null {
    const live = this.livePoses.get(agentId);
    if (live) {
      return live;
    }
    const row = this.snapshot?.agents.find((a) => a.id === agentId);
    return row ? { cell: row.cell, heading: row.heading } : null;
  }
}
