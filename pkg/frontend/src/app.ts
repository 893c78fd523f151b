// Application shell: owns the state, the API client, and the chrome, and
// keeps the painted scene in sync with server payloads.

import { ApiClient, isPoseFrame } from "./api.js";
import type { RegionKind, StreamMessage } from "./api.js";
import {
  mountChrome,
  paintBanner,
  paintGrid,
  paintParseError,
  paintTick,
  paintWarnings,
  syncAgentOptions,
  type Chrome,
} from "./dom.js";
import { buildScene } from "./scene.js";
import { AppState } from "./state.js";

const STREAM_RETRY_MS = 500;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export class App {
  readonly api: ApiClient;
  readonly state = new AppState();
  readonly chrome: Chrome;
  /** Resolves when the most recent form submission has been handled. */
  pending: Promise<void> | null = null;
  /** Stream messages consumed so far; reconnects replay from the start. */
  private streamCursor = 0;

  constructor(root: HTMLElement, baseUrl: string) {
    this.api = new ApiClient(baseUrl);
    this.chrome = mountChrome(root);
    this.chrome.form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.pending = this.submitText(this.chrome.input.value);
    });
    this.chrome.agentSelect.addEventListener("change", () => {
      this.state.selectAgent(this.chrome.agentSelect.value);
      this.paint();
    });
    this.chrome.overlaySelect.addEventListener("change", () => {
      const value = this.chrome.overlaySelect.value;
      this.state.setOverlayKind(value === "off" ? null : (value as RegionKind));
      this.paint();
    });
  }

  paint(): void {
    const scene = buildScene(this.state);
    paintGrid(this.chrome.grid, scene);
    paintWarnings(this.chrome.warningLog, this.state.warningLog);
    paintParseError(this.chrome.parseError, this.state.parseError);
    paintBanner(this.chrome.banner, this.state.banner);
    paintTick(this.chrome.tickLabel, this.state.tick);
    syncAgentOptions(this.chrome.agentSelect, this.state);
  }

  async loadWorld(): Promise<void> {
    try {
      this.state.applyWorld(await this.api.getWorld());
    } catch (error) {
      this.state.fetchFailed("loading world", error);
    }
  }

  async loadRegions(): Promise<void> {
    for (const location of this.state.snapshot?.locations ?? []) {
      try {
        this.state.applyRegions(await this.api.getRegions(location.id));
      } catch (error) {
        this.state.fetchFailed(`loading regions for ${location.id}`, error);
      }
    }
  }

  /** Initial load: snapshot, then one regions payload per location. */
  async start(): Promise<void> {
    await this.loadWorld();
    await this.loadRegions();
    this.paint();
  }

  async submitText(text: string): Promise<void> {
    const agentId = this.state.selectedAgent;
    if (agentId === null || text.trim() === "") {
      return;
    }
    try {
      const result = await this.api.submit(agentId, text);
      if (result.kind === "parse-error") {
        this.state.applyParseError(text, result.error);
      } else {
        this.state.applySubmit(result);
      }
    } catch (error) {
      this.state.fetchFailed("submitting instruction", error);
    }
    this.paint();
  }

  /**
   * Follow one event stream until the server closes it (simulation idle or
   * `maxTicks` frames). Messages are applied in arrival order; acts and
   * placements trigger a snapshot refetch so object states stay server-owned.
   * The stream is an append-only log replayed from the start on every
   * connection, so messages before `streamCursor` are skipped as already seen.
   */
  async followStream(options: { maxTicks?: number; signal?: AbortSignal } = {}): Promise<void> {
    let index = 0;
    for await (const message of this.api.streamEvents(options)) {
      index += 1;
      if (index <= this.streamCursor) {
        continue;
      }
      this.streamCursor = index;
      this.state.applyStream(message);
      if (this.shouldRefreshSnapshot(message)) {
        await this.loadWorld();
      }
      this.paint();
    }
  }

  private shouldRefreshSnapshot(message: StreamMessage): boolean {
    return !isPoseFrame(message) && ["act", "place", "complete"].includes(message.kind);
  }

  /** Browser loop: load, then keep re-opening the stream as runs come and go. */
  async run(): Promise<void> {
    await this.start();
    for (;;) {
      try {
        await this.followStream();
      } catch (error) {
        this.state.fetchFailed("event stream", error);
        this.paint();
      }
      await sleep(STREAM_RETRY_MS);
    }
  }
}
