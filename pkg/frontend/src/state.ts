/** Client-side session picture: the last snapshot plus consecutive diffs.
 *
 * The store holds no derived geometry; it mirrors what the server said.
 * A rev gap flips `desynced` and the network layer reconnects, which
 * always starts over from a fresh snapshot.
 */

import type {
  ArcWire,
  GhostWire,
  SceneWire,
  SelectionWire,
  ServerMsg,
  StatusLine,
} from "./protocol.js";
import { parseStatusLine } from "./protocol.js";

export interface ClientState {
  rev: number;
  synced: boolean; // a snapshot has been applied on this connection
  desynced: boolean; // a rev gap was detected; reconnect required
  scene: SceneWire | null;
  ghosts: GhostWire[];
  selection: SelectionWire;
  arcs: ArcWire[];
  instructions: string[]; // encoded lines of the latest committed batch
  statuses: Map<number, StatusLine>; // latest executor status per seq
  mode: string;
}

export function initialState(): ClientState {
  return {
    rev: 0,
    synced: false,
    desynced: false,
    scene: null,
    ghosts: [],
    selection: { ids: [], boundary: [], mode: "empty" },
    arcs: [],
    instructions: [],
    statuses: new Map(),
    mode: "idle",
  };
}

export function applyMessage(state: ClientState, msg: ServerMsg): ClientState {
  if (msg.type === "snapshot") {
    return {
      ...state,
      rev: msg.rev,
      synced: true,
      desynced: false,
      scene: msg.scene,
      ghosts: msg.ghosts,
      selection: msg.selection,
      arcs: msg.arcs,
      mode: msg.mode,
    };
  }
  if (!state.synced) {
    // everything before the first snapshot is unusable
    return { ...state, desynced: true };
  }
  if (msg.rev !== state.rev + 1) {
    return { ...state, desynced: true };
  }
  const next: ClientState = { ...state, rev: msg.rev };
  switch (msg.type) {
    case "diff": {
      next.ghosts = msg.ghosts;
      if (msg.objects.length > 0 && next.scene) {
        const byId = new Map(msg.objects.map((o) => [o.id, o]));
        next.scene = {
          ...next.scene,
          objects: next.scene.objects.map((obj) => {
            const update = byId.get(obj.id);
            if (!update) return obj;
            const merged = { ...obj, pose: update.pose };
            if (update.fill_level != null && merged.fillable) {
              merged.fillable = { ...merged.fillable, fill_level: update.fill_level };
            }
            if (update.height_factor != null && merged.compressible) {
              merged.compressible = {
                ...merged.compressible,
                current_factor: update.height_factor,
              };
            }
            return merged;
          }),
        };
      }
      break;
    }
    case "selection":
      next.selection = { ids: msg.ids, boundary: msg.boundary, mode: msg.mode };
      break;
    case "arc":
      next.arcs = msg.arcs;
      break;
    case "instructions":
      next.instructions = msg.lines;
      next.statuses = new Map(); // a new batch resets executor progress
      break;
    case "status": {
      const status = parseStatusLine(msg.line);
      if (status) {
        next.statuses = new Map(next.statuses);
        next.statuses.set(status.seq, status);
      }
      break;
    }
  }
  return next;
}

/** True while any committed instruction has not reached done/failed. */
export function executionActive(state: ClientState): boolean {
  if (state.instructions.length === 0) return false;
  if (state.statuses.size < state.instructions.length) return true;
  for (const status of state.statuses.values()) {
    if (status.state !== "done" && status.state !== "failed") return true;
  }
  return false;
}

export function grabbedGhosts(state: ClientState): GhostWire[] {
  return state.ghosts.filter((g) => g.phase === "grabbed");
}
