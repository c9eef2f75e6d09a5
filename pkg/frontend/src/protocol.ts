/** Wire types for the live session transport.
 *
 * The client sends controller events (identical to trace lines) and
 * receives typed server frames, each carrying a monotonically increasing
 * rev. Parsing is defensive: an unrecognized frame is reported, not thrown.
 */

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number]; // w, x, y, z

export interface PoseWire {
  position: Vec3;
  orientation: Quat;
}

export type MenuAction = "set_default" | "begin_fill" | "end_fill" | "commit";

export interface ControllerEventWire {
  t: number;
  kind: "pose_update" | "trigger_down" | "trigger_up" | "menu";
  pose?: PoseWire;
  action?: MenuAction;
}

export interface SceneObjectWire {
  id: string;
  label: string;
  pose: PoseWire;
  half_extents: Vec3;
  default_pose: PoseWire;
  graspable: boolean;
  fillable?: { fill_level: number; capacity_height: number };
  compressible?: { min_height_factor: number; current_factor: number };
}

export interface SceneAnchorWire {
  id: string;
  label: string;
  pose: PoseWire;
  half_extents: Vec3;
  walkable_top: boolean;
}

export interface SceneWire {
  version: number;
  gravity_up: Vec3;
  anchors: SceneAnchorWire[];
  objects: SceneObjectWire[];
}

export interface GhostWire {
  object_id: string;
  pose: PoseWire;
  phase: "aligned" | "grabbed" | "placed";
  group_id: number;
  fill_level?: number | null;
  height_factor?: number | null;
}

export interface ObjectStateWire {
  id: string;
  pose: PoseWire;
  fill_level?: number | null;
  height_factor?: number | null;
}

export interface SelectionWire {
  ids: string[];
  boundary: Vec3[];
  mode: string;
}

export interface ArcWire {
  object_id: string;
  points: Vec3[];
}

export interface SnapshotMsg {
  type: "snapshot";
  rev: number;
  scene: SceneWire;
  ghosts: GhostWire[];
  selection: SelectionWire;
  arcs: ArcWire[];
  mode: string;
}

export interface DiffMsg {
  type: "diff";
  rev: number;
  objects: ObjectStateWire[];
  ghosts: GhostWire[];
}

export interface SelectionMsg extends SelectionWire {
  type: "selection";
  rev: number;
}

export interface ArcMsg {
  type: "arc";
  rev: number;
  arcs: ArcWire[];
}

export interface InstructionsMsg {
  type: "instructions";
  rev: number;
  lines: string[];
}

export interface StatusMsg {
  type: "status";
  rev: number;
  line: string;
}

export type ServerMsg =
  | SnapshotMsg
  | DiffMsg
  | SelectionMsg
  | ArcMsg
  | InstructionsMsg
  | StatusMsg;

const SERVER_TYPES = new Set([
  "snapshot",
  "diff",
  "selection",
  "arc",
  "instructions",
  "status",
]);

export function parseServerMsg(text: string): ServerMsg | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as { type?: unknown; rev?: unknown };
  if (typeof msg.type !== "string" || !SERVER_TYPES.has(msg.type)) return null;
  if (typeof msg.rev !== "number") return null;
  return raw as ServerMsg;
}

/** Decoded executor status line (the server relays canonical wire lines). */
export interface StatusLine {
  seq: number;
  state: "accepted" | "in_progress" | "done" | "failed";
  progress?: number;
  reason?: string;
}

export function parseStatusLine(line: string): StatusLine | null {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return null;
  }
  const msg = raw as { v?: unknown; type?: unknown; seq?: unknown; state?: unknown };
  if (msg.v !== 1 || msg.type !== "status") return null;
  if (typeof msg.seq !== "number" || typeof msg.state !== "string") return null;
  return raw as StatusLine;
}

/** Decoded instruction line, for display in the panel. */
export interface InstructionLine {
  seq: number;
  kind: string;
  object_id: string;
  target_pose?: PoseWire;
  target_level?: number;
  target_factor?: number;
}

export function parseInstructionLine(line: string): InstructionLine | null {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return null;
  }
  const msg = raw as { v?: unknown; type?: unknown; seq?: unknown };
  if (msg.v !== 1 || msg.type !== "instruction" || typeof msg.seq !== "number") {
    return null;
  }
  return raw as InstructionLine;
}

export function encodeEvent(event: ControllerEventWire): string {
  return JSON.stringify(event);
}
