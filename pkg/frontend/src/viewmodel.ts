// The board view model is built from exactly one render_state payload and
// nothing else.  No caching, no merging across ticks: if the server's fog
// omitted an enemy this tick, that enemy does not exist in the model, so
// the renderer cannot leak it.  (Replay mode gets omniscience by asking
// the server for side=all frames, not by remembering old payloads.)

import type { RenderState, Side, UnitSnapshot, Winner } from "./protocol.js";

export interface BoardViewModel {
  rows: number;
  cols: number;
  tick: number;
  side: string;
  special: Set<string>;
  units: UnitSnapshot[];
  byCell: Map<string, UnitSnapshot>;
  byUid: Map<number, UnitSnapshot>;
  terminated: boolean;
  winner: Winner;
}

export function cellKey(row: number, col: number): string {
  return `${row},${col}`;
}

export function buildBoard(rs: RenderState): BoardViewModel {
  const special = new Set<string>();
  for (const [row, col] of rs.special) {
    special.add(cellKey(row, col));
  }
  const units = rs.units.map((u) => ({ ...u }));
  const byCell = new Map<string, UnitSnapshot>();
  const byUid = new Map<number, UnitSnapshot>();
  for (const unit of units) {
    byUid.set(unit.uid, unit);
    if (unit.alive) {
      byCell.set(cellKey(unit.row, unit.col), unit);
    }
  }
  return {
    rows: rs.rows,
    cols: rs.cols,
    tick: rs.tick,
    side: rs.side,
    special,
    units,
    byCell,
    byUid,
    terminated: rs.terminated,
    winner: rs.winner,
  };
}

export function visibleEnemies(vm: BoardViewModel, mySide: Side): UnitSnapshot[] {
  return vm.units.filter((u) => u.color !== mySide);
}

export function ownUnits(vm: BoardViewModel, mySide: Side): UnitSnapshot[] {
  return vm.units.filter((u) => u.color === mySide);
}
