// Scene projection: overlays are verbatim copies of /regions payloads,
// shaded in three fixed steps, and the projection never invents cells.

import { describe, expect, it } from "vitest";

import type { RegionsResponse, WorldResponse } from "../src/api.js";
import { buildScene, DEGREE_SHADE } from "../src/scene.js";
import { AppState } from "../src/state.js";
import { loadFixture } from "./server.js";

const singleWorld = loadFixture<WorldResponse>("single-world.json");
const singleRegions = loadFixture<Record<string, RegionsResponse>>("single-regions.json");

function officeState(): AppState {
  const state = new AppState();
  state.applyWorld(structuredClone(singleWorld));
  state.applyRegions(structuredClone(singleRegions["Office 0"]!));
  return state;
}

describe("corner overlay on the 6x10 office", () => {
  it("shades 24 cells, six per corner, in exactly three opacity steps", () => {
    const state = officeState();
    state.setOverlayKind("corner");
    const scene = buildScene(state);

    expect(scene.overlay).toHaveLength(24);
    const byInstance = new Map<string, number>();
    for (const cell of scene.overlay) {
      byInstance.set(cell.instance, (byInstance.get(cell.instance) ?? 0) + 1);
    }
    expect(new Map([...byInstance].sort())).toEqual(
      new Map([
        ["NE", 6],
        ["NW", 6],
        ["SE", 6],
        ["SW", 6],
      ]),
    );

    const shades = new Set(scene.overlay.map((cell) => cell.shade));
    expect(shades.size).toBe(3);
    expect(Math.max(...shades)).toBe(DEGREE_SHADE.strict);
    expect(Math.min(...shades)).toBe(DEGREE_SHADE.near);
  });

  it("copies every payload row's cells exactly, with no recomputation", () => {
    const state = officeState();
    state.setOverlayKind("corner");
    const scene = buildScene(state);

    const rendered = new Map<string, string[]>();
    for (const cell of scene.overlay) {
      const key = `${cell.instance}|${cell.degree}`;
      const list = rendered.get(key) ?? [];
      list.push(`${cell.x},${cell.z}`);
      rendered.set(key, list);
    }
    for (const row of singleRegions["Office 0"]!.regions) {
      if (row.kind !== "corner") {
        continue;
      }
      const expected = row.cells.map(([x, z]) => `${x},${z}`).sort();
      expect(rendered.get(`${row.instance}|${row.degree}`)?.sort()).toEqual(expected);
    }
  });

  it("strict cells are darker than proximate, proximate darker than near", () => {
    expect(DEGREE_SHADE.strict).toBeGreaterThan(DEGREE_SHADE.proximate);
    expect(DEGREE_SHADE.proximate).toBeGreaterThan(DEGREE_SHADE.near);
  });
});

describe("overlay toggle", () => {
  it("renders no overlay cells when toggled off", () => {
    const state = officeState();
    state.setOverlayKind(null);
    expect(buildScene(state).overlay).toHaveLength(0);
  });

  it("only renders cells of the chosen kind", () => {
    const state = officeState();
    state.setOverlayKind("middle");
    const scene = buildScene(state);
    const payloadMiddle = singleRegions["Office 0"]!.regions.filter((r) => r.kind === "middle");
    const expected = payloadMiddle.reduce((n, row) => n + row.cells.length, 0);
    expect(scene.overlay).toHaveLength(expected);
    expect(scene.overlay.every((cell) => cell.kind === "middle")).toBe(true);
  });
});

describe("world projection", () => {
  it("renders an empty world as an empty grid without crashing", () => {
    const state = new AppState();
    state.applyWorld({ tick: 0, world: { types: [], locations: [], objects: [], agents: [] } });
    const scene = buildScene(state);
    expect(scene.width).toBe(0);
    expect(scene.height).toBe(0);
    expect(scene.rooms).toHaveLength(0);
    expect(scene.overlay).toHaveLength(0);
  });

  it("renders nothing at all before the first snapshot arrives", () => {
    const scene = buildScene(new AppState());
    expect(scene.width).toBe(0);
    expect(scene.objects).toHaveLength(0);
  });

  it("skips consumed objects and marks carried ones", () => {
    const doctored = structuredClone(singleWorld);
    const g0 = doctored.world.objects.find((o) => o.id === "banana-g0")!;
    const g1 = doctored.world.objects.find((o) => o.id === "banana-g1")!;
    g0.consumed = true;
    g1.carriedBy = "worker";
    const state = new AppState();
    state.applyWorld(doctored);
    const scene = buildScene(state);
    const ids = scene.objects.map((o) => o.id);
    expect(ids).not.toContain("banana-g0");
    expect(scene.objects.find((o) => o.id === "banana-g1")?.carried).toBe(true);
    expect(scene.objects.find((o) => o.id === "banana-g2")?.carried).toBe(false);
  });

  it("positions agents from live poses once a tick frame arrived", () => {
    const state = new AppState();
    state.applyWorld(structuredClone(singleWorld));
    const before = buildScene(state).agents.find((a) => a.id === "worker")!;
    expect([before.x, before.z]).toEqual([7, 0]);

    state.applyStream({
      kind: "tick",
      tick: 3,
      agents: [{ id: "worker", cell: [5, 2], heading: "W" }],
    });
    const after = buildScene(state).agents.find((a) => a.id === "worker")!;
    expect([after.x, after.z]).toEqual([5, 2]);
    expect(after.heading).toBe("W");
  });

  it("highlights resolved targets and goal cells", () => {
    const state = officeState();
    state.applySubmit({
      kind: "resolved",
      tick: 0,
      resolution: {
        kind: "objects",
        objects: ["banana-g0"],
        cells: [[2, 2]],
        path: null,
        regionGoal: null,
        destination: null,
        warnings: [],
      },
    });
    const scene = buildScene(state);
    expect(scene.objects.find((o) => o.id === "banana-g0")?.highlighted).toBe(true);
    expect(scene.objects.find((o) => o.id === "banana-g1")?.highlighted).toBe(false);
    expect(scene.cellHighlights).toEqual([[2, 2]]);
  });
});
