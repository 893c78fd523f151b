// @vitest-environment jsdom
// DOM painting against recorded payloads: overlays land on exactly the
// payload cells, warnings render verbatim, and parse errors show a caret.

import { beforeEach, describe, expect, it } from "vitest";

import type {
  ParseErrorPayload,
  RegionsResponse,
  StreamMessage,
  WorldResponse,
} from "../src/api.js";
import { App } from "../src/app.js";
import { loadFixture } from "./server.js";

const singleWorld = loadFixture<WorldResponse>("single-world.json");
const singleRegions = loadFixture<Record<string, RegionsResponse>>("single-regions.json");
const stream = loadFixture<StreamMessage[]>("stream.json");
const parseError = loadFixture<{ detail: ParseErrorPayload }>("parse-error.json");

// The base URL is never contacted: these tests drive state with fixtures.
function mountedApp(): App {
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  return new App(root, "http://fixtures.invalid");
}

let app: App;

beforeEach(() => {
  app = mountedApp();
  app.state.applyWorld(structuredClone(singleWorld));
  app.state.applyRegions(structuredClone(singleRegions["Office 0"]!));
});

describe("grid painting", () => {
  it("draws one cell per coordinate with room edges marked", () => {
    app.paint();
    const cells = document.querySelectorAll(".cell");
    expect(cells).toHaveLength(16 * 10); // two rooms: 6x10 + 10x10
    expect(document.querySelectorAll(".cell.in-room")).toHaveLength(16 * 10);
    const nw = document.querySelector('.cell[data-x="0"][data-z="0"]')!;
    expect(nw.classList.contains("edge-n")).toBe(true);
    expect(nw.classList.contains("edge-w")).toBe(true);
    expect(nw.getAttribute("data-room")).toBe("Office 0");
  });

  it("shades exactly the payload's corner cells, keyed by instance and degree", () => {
    app.state.setOverlayKind("corner");
    app.paint();

    const rendered = new Map<string, Set<string>>();
    for (const cell of document.querySelectorAll<HTMLElement>(".cell.overlaid")) {
      const key = `${cell.dataset["ovInstance"]}|${cell.dataset["ovDegree"]}`;
      const set = rendered.get(key) ?? new Set();
      set.add(`${cell.dataset["x"]},${cell.dataset["z"]}`);
      rendered.set(key, set);
    }

    const payload = new Map<string, Set<string>>();
    for (const row of singleRegions["Office 0"]!.regions) {
      if (row.kind !== "corner") {
        continue;
      }
      payload.set(
        `${row.instance}|${row.degree}`,
        new Set(row.cells.map(([x, z]) => `${x},${z}`)),
      );
    }

    expect(rendered).toEqual(payload);
    expect(document.querySelectorAll(".cell.overlaid")).toHaveLength(24);
  });

  it("uses three distinct shades with strict darkest", () => {
    app.state.setOverlayKind("corner");
    app.paint();
    const shadeOf = (degree: string): number => {
      const cell = document.querySelector<HTMLElement>(`.cell[data-ov-degree="${degree}"]`)!;
      return Number(cell.style.getPropertyValue("--overlay-shade"));
    };
    expect(shadeOf("strict")).toBeGreaterThan(shadeOf("proximate"));
    expect(shadeOf("proximate")).toBeGreaterThan(shadeOf("near"));
  });

  it("clears the overlay when toggled off", () => {
    app.state.setOverlayKind("corner");
    app.paint();
    app.state.setOverlayKind(null);
    app.paint();
    expect(document.querySelectorAll(".cell.overlaid")).toHaveLength(0);
  });

  it("paints an empty world without crashing", () => {
    const bare = mountedApp();
    bare.state.applyWorld({ tick: 0, world: { types: [], locations: [], objects: [], agents: [] } });
    bare.paint();
    expect(document.querySelectorAll(".cell")).toHaveLength(0);
  });

  it("draws agents with a heading arrow at their live pose", () => {
    for (const message of stream) {
      app.state.applyStream(message);
    }
    app.paint();
    const marker = document.querySelector<HTMLElement>('.agent[data-id="worker"]')!;
    const cell = marker.closest<HTMLElement>(".cell")!;
    expect([cell.dataset["x"], cell.dataset["z"]]).toEqual(["2", "1"]);
    expect(marker.textContent).toBe("↓"); // heading S
  });
});

describe("warning log panel", () => {
  it("renders stream warnings verbatim with severity classes", () => {
    for (const message of stream) {
      app.state.applyStream(message);
    }
    app.paint();
    const rows = document.querySelectorAll<HTMLElement>("#warning-log .alert");
    expect(rows).toHaveLength(1);
    const row = rows[0]!;
    expect(row.textContent).toBe(
      "[warning] QUANT_SHORTFALL: requested 4 (a few) but only 3 available",
    );
    expect(row.classList.contains("sev-warning")).toBe(true);
    expect(row.dataset["code"]).toBe("QUANT_SHORTFALL");
    expect(row.dataset["agent"]).toBe("worker");
  });

  it("orders rows by arrival, oldest first", () => {
    app.state.applyStream({
      tick: 0,
      agent: "worker",
      kind: "warning",
      severity: "info",
      code: "DEGRADED_DEGREE",
      message: "strict corner blocked; using proximate",
    });
    app.state.applyStream({
      tick: 2,
      agent: "worker",
      kind: "warning",
      severity: "error",
      code: "REGION_UNREACHABLE",
      message: "no reachable corner cell",
    });
    app.paint();
    const codes = [...document.querySelectorAll<HTMLElement>("#warning-log .alert")].map(
      (row) => row.dataset["code"],
    );
    expect(codes).toEqual(["DEGRADED_DEGREE", "REGION_UNREACHABLE"]);
  });
});

describe("parse error pane", () => {
  it("shows the typed text with a caret at the failing character", () => {
    app.state.applyParseError("Blorp the banana", parseError.detail);
    app.paint();
    const pane = document.querySelector<HTMLElement>("#parse-error")!;
    expect(pane.hidden).toBe(false);
    const [textLine, caretLine] = pane.textContent!.split("\n");
    expect(textLine).toBe("Blorp the banana");
    expect(caretLine!.indexOf("^")).toBe(parseError.detail.charStart);
    expect(caretLine).toContain(parseError.detail.message);
    expect(pane.dataset["tokenIndex"]).toBe("0");
  });

  it("hides again once a submission resolves", () => {
    app.state.applyParseError("Blorp the banana", parseError.detail);
    app.paint();
    app.state.applySubmit({
      kind: "resolved",
      tick: 0,
      resolution: {
        kind: "objects",
        objects: [],
        cells: [],
        path: null,
        regionGoal: null,
        destination: null,
        warnings: [],
      },
    });
    app.paint();
    expect(document.querySelector<HTMLElement>("#parse-error")!.hidden).toBe(true);
  });
});

describe("chrome", () => {
  it("shows a banner on fetch failure and keeps painting the last snapshot", () => {
    app.state.fetchFailed("loading world", new Error("boom"));
    app.paint();
    const banner = document.querySelector<HTMLElement>("#banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toBe("loading world failed: boom");
    expect(document.querySelectorAll(".cell").length).toBeGreaterThan(0);
  });

  it("lists agents in the selector and tracks the selection", () => {
    app.paint();
    const select = document.querySelector<HTMLSelectElement>("#agent-select")!;
    expect([...select.options].map((o) => o.value)).toEqual(["worker"]);
    expect(select.value).toBe("worker");
  });

  it("changing the overlay selector repaints that kind", () => {
    app.paint();
    const select = document.querySelector<HTMLSelectElement>("#overlay-select")!;
    select.value = "corner";
    select.dispatchEvent(new Event("change"));
    expect(document.querySelectorAll(".cell.overlaid")).toHaveLength(24);
    select.value = "off";
    select.dispatchEvent(new Event("change"));
    expect(document.querySelectorAll(".cell.overlaid")).toHaveLength(0);
  });
});
