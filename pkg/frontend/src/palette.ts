// Action palette for one agent, derived from its availability mask.
// Masked-out actions are simply not emitted, so the UI never offers a
// control that the engine would reject.

import { stepInDirection, type Cell } from "./hexmath.js";
import {
  EMPTY_ACTION,
  EMPTY_INDEX,
  GUIDE_BASE,
  MOVE_DIRECTIONS,
  SHOOT_BASE,
  STOP_ACTION,
  STOP_INDEX,
  TEAM_SIZE,
  enemyBaseUid,
  guideAction,
  moveAction,
  shootAction,
  type Side,
} from "./protocol.js";

export interface PaletteEntry {
  action: string;
  kind: "move" | "shoot" | "guide" | "stop" | "empty";
  label: string;
  dir?: number;
  targetCell?: Cell;
  targetUid?: number;
}

export function paletteFor(mask: boolean[], side: Side, pos: Cell): PaletteEntry[] {
  const entries: PaletteEntry[] = [];
  const base = enemyBaseUid(side);
  for (let dir = 0; dir < 6; dir++) {
    if (mask[dir]) {
      entries.push({
        action: moveAction(dir),
        kind: "move",
        label: `Move ${MOVE_DIRECTIONS[dir]}`,
        dir,
        targetCell: stepInDirection(pos, dir),
      });
    }
  }
  for (let slot = 0; slot < TEAM_SIZE; slot++) {
    if (mask[SHOOT_BASE + slot]) {
      entries.push({
        action: shootAction(base + slot),
        kind: "shoot",
        label: `Shoot enemy ${slot}`,
        targetUid: base + slot,
      });
    }
  }
  for (let slot = 0; slot < TEAM_SIZE; slot++) {
    if (mask[GUIDE_BASE + slot]) {
      entries.push({
        action: guideAction(base + slot),
        kind: "guide",
        label: `Guide shoot enemy ${slot}`,
        targetUid: base + slot,
      });
    }
  }
  if (mask[STOP_INDEX]) {
    entries.push({ action: STOP_ACTION, kind: "stop", label: "Stop" });
  }
  if (mask[EMPTY_INDEX]) {
    entries.push({ action: EMPTY_ACTION, kind: "empty", label: "Wait" });
  }
  return entries;
}
