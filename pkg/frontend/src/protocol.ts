// Wire protocol types and action-string helpers, mirroring the server's
// documented schema.  Action strings: m0..m5 (E,W,NE,NW,SE,SW), s<uid>
// shoot, g<uid> guide shoot, x stop, e empty.  Availability masks are 14
// booleans over [move x6, shoot x3, guide x3, stop, empty].

export type Side = "red" | "blue";
export type Winner = "red" | "blue" | "draw" | "none";

export interface UnitSnapshot {
  uid: number;
  color: Side;
  slot: number;
  type: string;
  row: number;
  col: number;
  blood: number;
  blood_max: number;
  alive: boolean;
  moving: boolean;
}

export interface RenderState {
  tick: number;
  rows: number;
  cols: number;
  special: [number, number][];
  side: string;
  units: UnitSnapshot[];
  terminated: boolean;
  winner: Winner;
}

// events are compact arrays: ["shoot"|"guide", shooter, target, hit, damage],
// ["death", uid], ["move", uid, row, col], ["end", winner]
export type GameEvent = [string, ...(number | boolean | string)[]];

export interface AgentPayload {
  vector: number[];
  mask: boolean[];
}

export interface ObservationPayload {
  side: Side;
  agents: Record<string, AgentPayload>;
  decidable: number[];
  render_state: RenderState;
}

export interface StepResultPayload {
  reward_red: number;
  reward_blue: number;
  events: GameEvent[];
  render_state: RenderState;
}

export interface EpisodeEndPayload {
  winner: Winner;
  ticks: number;
  final_bloods: number[];
  render_state: RenderState;
}

export interface Envelope {
  kind: string;
  session: string | null;
  tick: number | null;
  payload: Record<string, unknown>;
}

export const TEAM_SIZE = 3;
export const MOVE_DIRECTIONS = ["E", "W", "NE", "NW", "SE", "SW"] as const;
export const SHOOT_BASE = 6;
export const GUIDE_BASE = 9;
export const STOP_INDEX = 12;
export const EMPTY_INDEX = 13;

export const STOP_ACTION = "x";
export const EMPTY_ACTION = "e";

export function moveAction(dir: number): string {
  return `m${dir}`;
}

export function shootAction(targetUid: number): string {
  return `s${targetUid}`;
}

export function guideAction(targetUid: number): string {
  return `g${targetUid}`;
}

export function enemyBaseUid(side: Side): number {
  return side === "red" ? TEAM_SIZE : 0;
}

const UNIT_GLYPHS: Record<string, string> = { tank: "T", chariot: "C", infantry: "I" };

export function unitGlyph(type: string): string {
  return UNIT_GLYPHS[type] ?? "?";
}

export function describeEvent(event: GameEvent): string {
  const [kind, ...rest] = event;
  switch (kind) {
    case "shoot": {
      const [shooter, target, hit, damage] = rest as [number, number, boolean, number];
      return hit
        ? `unit ${shooter} hit unit ${target} for ${Number(damage).toFixed(1)}`
        : `unit ${shooter} missed unit ${target}`;
    }
    case "guide": {
      const [shooter, target, hit, damage] = rest as [number, number, boolean, number];
      return hit
        ? `guided shot: unit ${shooter} hit unit ${target} for ${Number(damage).toFixed(1)}`
        : `guided shot: unit ${shooter} missed unit ${target}`;
    }
    case "death":
      return `unit ${rest[0]} destroyed`;
    case "move":
      return `unit ${rest[0]} arrived at (${rest[1]},${rest[2]})`;
    case "end":
      return rest[0] === "draw" ? "episode over: draw" : `episode over: ${rest[0]} wins`;
    default:
      return `${kind} ${rest.join(" ")}`;
  }
}
