// DOM painting. The chrome (controls, panels) is mounted once; the grid,
// warning log, banner, and parse-error panes are repainted from the scene
// and state after every change.

import type { RegionKind } from "./api.js";
import type { Scene } from "./scene.js";
import type { AppState, InlineParseError, WarningRow } from "./state.js";

const HEADING_ARROWS: Record<string, string> = { N: "↑", E: "→", S: "↓", W: "←" };
const OVERLAY_CHOICES: (RegionKind | "off")[] = ["off", "corner", "side", "middle"];

export interface Chrome {
  banner: HTMLElement;
  agentSelect: HTMLSelectElement;
  overlaySelect: HTMLSelectElement;
  tickLabel: HTMLElement;
  form: HTMLFormElement;
  input: HTMLInputElement;
  parseError: HTMLElement;
  grid: HTMLElement;
  warningLog: HTMLOListElement;
}

export function mountChrome(root: HTMLElement): Chrome {
  root.innerHTML = `
    <div class="console">
      <div id="banner" class="banner" hidden></div>
      <header class="controls">
        <label>agent
          <select id="agent-select"></select>
        </label>
        <label>overlay
          <select id="overlay-select"></select>
        </label>
        <span id="tick-label" class="tick">tick 0</span>
      </header>
      <form id="instruction-form" autocomplete="off">
        <input id="instruction-input" type="text"
               placeholder="Eat a couple of yellow bananas" />
        <button type="submit">send</button>
      </form>
      <pre id="parse-error" class="parse-error" hidden></pre>
      <div class="grid-wrap"><div id="grid" class="grid"></div></div>
      <h2 class="log-title">warnings</h2>
      <ol id="warning-log" class="warning-log"></ol>
    </div>`;
  const byId = <T extends HTMLElement>(id: string): T => {
    const el = root.querySelector<T>(`#${id}`);
    if (el === null) {
      throw new Error(`chrome element #${id} missing`);
    }
    return el;
  };
  const overlaySelect = byId<HTMLSelectElement>("overlay-select");
  for (const choice of OVERLAY_CHOICES) {
    const option = document.createElement("option");
    option.value = choice;
    option.textContent = choice;
    overlaySelect.append(option);
  }
  return {
    banner: byId("banner"),
    agentSelect: byId<HTMLSelectElement>("agent-select"),
    overlaySelect,
    tickLabel: byId("tick-label"),
    form: byId<HTMLFormElement>("instruction-form"),
    input: byId<HTMLInputElement>("instruction-input"),
    parseError: byId("parse-error"),
    grid: byId("grid"),
    warningLog: byId<HTMLOListElement>("warning-log"),
  };
}

export function paintGrid(grid: HTMLElement, scene: Scene): void {
  grid.innerHTML = "";
  grid.style.setProperty("--grid-width", String(scene.width));
  if (scene.width === 0 || scene.height === 0) {
    return;
  }

  const roomOf = new Map<string, Scene["rooms"][number]>();
  const cells = new Map<string, HTMLElement>();
  for (let z = 0; z < scene.height; z += 1) {
    for (let x = 0; x < scene.width; x += 1) {
      const cell = document.createElement("div");
      cell.className = "cell";
      cell.dataset["x"] = String(x);
      cell.dataset["z"] = String(z);
      const room = scene.rooms.find(
        (r) => x >= r.startX && x < r.endX && z >= r.startZ && z < r.endZ,
      );
      if (room) {
        cell.classList.add("in-room");
        cell.dataset["room"] = room.id;
        roomOf.set(`${x},${z}`, room);
        if (x === room.startX) cell.classList.add("edge-w");
        if (x === room.endX - 1) cell.classList.add("edge-e");
        if (z === room.startZ) cell.classList.add("edge-n");
        if (z === room.endZ - 1) cell.classList.add("edge-s");
      }
      cells.set(`${x},${z}`, cell);
      grid.append(cell);
    }
  }

  for (const ov of scene.overlay) {
    const cell = cells.get(`${ov.x},${ov.z}`);
    if (!cell) {
      continue;
    }
    cell.classList.add("overlaid", `ov-${ov.degree}`);
    cell.dataset["ovLocation"] = ov.location;
    cell.dataset["ovKind"] = ov.kind;
    cell.dataset["ovInstance"] = ov.instance;
    cell.dataset["ovDegree"] = ov.degree;
    cell.style.setProperty("--overlay-shade", String(ov.shade));
  }

  for (const [x, z] of scene.cellHighlights) {
    cells.get(`${x},${z}`)?.classList.add("goal");
  }

  for (const obj of scene.objects) {
    const cell = cells.get(`${obj.x},${obj.z}`);
    if (!cell) {
      continue;
    }
    const marker = document.createElement("span");
    marker.className = "object";
    marker.dataset["id"] = obj.id;
    marker.title = `${obj.id} (${obj.type})`;
    marker.style.backgroundColor = obj.color;
    if (obj.highlighted) {
      marker.classList.add("highlighted");
    }
    if (obj.carried) {
      marker.classList.add("carried");
    }
    cell.append(marker);
  }

  for (const agent of scene.agents) {
    const cell = cells.get(`${agent.x},${agent.z}`);
    if (!cell) {
      continue;
    }
    const marker = document.createElement("span");
    marker.className = "agent";
    marker.dataset["id"] = agent.id;
    marker.title = agent.id;
    marker.textContent = HEADING_ARROWS[agent.heading] ?? "?";
    if (agent.selected) {
      marker.classList.add("selected");
    }
    cell.append(marker);
  }
}

export function paintWarnings(list: HTMLOListElement, rows: WarningRow[]): void {
  list.innerHTML = "";
  for (const row of rows) {
    const item = document.createElement("li");
    item.className = `alert sev-${row.severity}`;
    item.dataset["severity"] = row.severity;
    item.dataset["code"] = row.code;
    item.dataset["agent"] = row.agent;
    item.dataset["tick"] = String(row.tick);
    item.textContent = `[${row.severity}] ${row.code}: ${row.message}`;
    list.append(item);
  }
}

export function paintParseError(pane: HTMLElement, error: InlineParseError | null): void {
  if (error === null) {
    pane.hidden = true;
    pane.textContent = "";
    return;
  }
  const caretLine = `${" ".repeat(error.payload.charStart)}^ ${error.payload.message}`;
  pane.hidden = false;
  pane.textContent = `${error.text}\n${caretLine}`;
  pane.dataset["tokenIndex"] = String(error.payload.tokenIndex);
  pane.dataset["charStart"] = String(error.payload.charStart);
}

export function paintBanner(banner: HTMLElement, message: string | null): void {
  banner.hidden = message === null;
  banner.textContent = message ?? "";
}

export function paintTick(label: HTMLElement, tick: number): void {
  label.textContent = `tick ${tick}`;
}

export function syncAgentOptions(select: HTMLSelectElement, state: AppState): void {
  const ids = state.snapshot?.agents.map((a) => a.id) ?? [];
  const existing = Array.from(select.options).map((o) => o.value);
  if (existing.join("\n") !== ids.join("\n")) {
    select.innerHTML = "";
    for (const id of ids) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = id;
      select.append(option);
    }
  }
  if (state.selectedAgent !== null) {
    select.value = state.selectedAgent;
  }
}
