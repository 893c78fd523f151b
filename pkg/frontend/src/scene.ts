// Pure projection of the view model into a drawable scene. Overlay cells are
// copied exactly from the stored /regions payloads — the client never
// recomputes region membership.

import type { Degree, RegionKind } from "./api.js";
import type { AppState } from "./state.js";

/** Three fixed opacity steps, darkest (strict) to brightest (near). */
export const DEGREE_SHADE: Record<Degree, number> = {
  strict: 0.85,
  proximate: 0.55,
  near: 0.25,
};

export interface SceneRoom {
  id: string;
  startX: number;
  endX: number;
  startZ: number;
  endZ: number;
}

export interface SceneOverlayCell {
  x: number;
  z: number;
  location: string;
  kind: RegionKind;
  instance: string;
  degree: Degree;
  shade: number;
}

export interface SceneObject {
  id: string;
  type: string;
  x: number;
  z: number;
  color: string;
  highlighted: boolean;
  carried: boolean;
}

export interface SceneAgent {
  id: string;
  x: number;
  z: number;
  heading: string;
  selected: boolean;
}

export interface Scene {
  width: number;
  height: number;
  tick: number;
  rooms: SceneRoom[];
  overlay: SceneOverlayCell[];
  objects: SceneObject[];
  agents: SceneAgent[];
  cellHighlights: [number, number][];
}

function objectCell(bboxMin: readonly number[], bboxMax: readonly number[]): [number, number] {
  const cx = ((bboxMin[0] ?? 0) + (bboxMax[0] ?? 0)) / 2;
  const cz = ((bboxMin[2] ?? 0) + (bboxMax[2] ?? 0)) / 2;
  return [Math.floor(cx), Math.floor(cz)];
}

export function buildScene(state: AppState): Scene {
  const doc = state.snapshot;
  if (doc === null) {
    return {
      width: 0,
      height: 0,
      tick: state.tick,
      rooms: [],
      overlay: [],
      objects: [],
      agents: [],
      cellHighlights: [],
    };
  }

  const rooms: SceneRoom[] = doc.locations.map((loc) => ({
    id: loc.id,
    startX: loc.startX,
    endX: loc.endX,
    startZ: loc.startZ,
    endZ: loc.endZ,
  }));
  const width = Math.max(0, ...rooms.map((r) => r.endX));
  const height = Math.max(0, ...rooms.map((r) => r.endZ));

  const overlay: SceneOverlayCell[] = [];
  if (state.overlayKind !== null) {
    for (const payload of state.overlays.values()) {
      for (const row of payload.regions) {
        if (row.kind !== state.overlayKind) {
          continue;
        }
        for (const [x, z] of row.cells) {
          overlay.push({
            x,
            z,
            location: payload.location,
            kind: row.kind,
            instance: row.instance,
            degree: row.degree,
            shade: DEGREE_SHADE[row.degree],
          });
        }
      }
    }
  }

  const objects: SceneObject[] = [];
  for (const obj of doc.objects) {
    if (obj.consumed) {
      continue;
    }
    const lo = obj.effectiveBboxMin ?? obj.bboxMin;
    const hi = obj.effectiveBboxMax ?? obj.bboxMax;
    const [x, z] = objectCell(lo, hi);
    objects.push({
      id: obj.id,
      type: obj.type,
      x,
      z,
      color: obj.properties["color"] ?? "gray",
      highlighted: state.highlights.has(obj.id),
      carried: obj.carriedBy != null,
    });
  }

  const agents: SceneAgent[] = doc.agents.map((agent) => {
    const pose = state.poseOf(agent.id) ?? { cell: agent.cell, heading: agent.heading };
    return {
      id: agent.id,
      x: pose.cell[0],
      z: pose.cell[1],
      heading: pose.heading,
      selected: agent.id === state.selectedAgent,
    };
  });

  return {
    width,
    height,
    tick: state.tick,
    rooms,
    overlay,
    objects,
    agents,
    cellHighlights: state.cellHighlights.map(([x, z]) => [x, z]),
  };
}
