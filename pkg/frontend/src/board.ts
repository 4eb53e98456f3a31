// Canvas renderer.  Draws exactly what the BoardViewModel contains; all
// geometry comes from (rows, cols) and the hex size.

import { boardPixelSize, cellCenter, hexCorners, type Cell } from "./hexmath.js";
import { unitGlyph } from "./protocol.js";
import { cellKey, type BoardViewModel } from "./viewmodel.js";

export interface BoardStyle {
  size: number;
  selectedUid?: number | null;
  highlightCells?: Cell[];
  targetUids?: number[];
}

const COLORS = {
  board: "#1c2128",
  cell: "#2d333b",
  special: "#1a3d2e",
  grid: "#444c56",
  red: "#e5534b",
  blue: "#539bf5",
  dead: "#5a5a5a",
  highlight: "rgba(255, 255, 160, 0.35)",
  selection: "#ffd33d",
  bloodBack: "#30363d",
  bloodFill: "#57ab5a",
};

export function canvasSizeFor(rows: number, cols: number, size: number): Cell {
  const p = boardPixelSize(rows, cols, size);
  return { row: Math.ceil(p.y), col: Math.ceil(p.x) };
}

export function drawBoard(
  ctx: CanvasRenderingContext2D, vm: BoardViewModel, style: BoardStyle,
): void {
  const { size } = style;
  const pixel = boardPixelSize(vm.rows, vm.cols, size);
  ctx.fillStyle = COLORS.board;
  ctx.fillRect(0, 0, pixel.x, pixel.y);

  const highlights = new Set((style.highlightCells ?? []).map((c) => cellKey(c.row, c.col)));
  for (let row = 0; row < vm.rows; row++) {
    for (let col = 0; col < vm.cols; col++) {
      const key = cellKey(row, col);
      tracePath(ctx, { row, col }, size);
      ctx.fillStyle = vm.special.has(key) ? COLORS.special : COLORS.cell;
      ctx.fill();
      if (highlights.has(key)) {
        ctx.fillStyle = COLORS.highlight;
        ctx.fill();
      }
      ctx.strokeStyle = COLORS.grid;
      ctx.lineWidth = 1;
      ctx.stroke();
    }
  }

  const targets = new Set(style.targetUids ?? []);
  for (const unit of vm.units) {
    const center = cellCenter({ row: unit.row, col: unit.col }, size);
    const radius = size * 0.62;
    ctx.beginPath();
    ctx.arc(center.x, center.y, radius, 0, Math.PI * 2);
    ctx.fillStyle = unit.alive ? COLORS[unit.color] : COLORS.dead;
    ctx.fill();
    if (unit.uid === style.selectedUid) {
      ctx.lineWidth = 3;
      ctx.strokeStyle = COLORS.selection;
      ctx.stroke();
    }
    if (targets.has(unit.uid)) {
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#ff8800";
      ctx.setLineDash([4, 3]);
      ctx.stroke();
      ctx.setLineDash([]);
    }
    ctx.fillStyle = "#ffffff";
    ctx.font = `bold ${Math.round(size * 0.8)}px sans-serif`;
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(unit.alive ? unitGlyph(unit.type) : "+", center.x, center.y);
    if (unit.alive) {
      const barWidth = size * 1.2;
      const barHeight = Math.max(3, size * 0.14);
      const x0 = center.x - barWidth / 2;
      const y0 = center.y - radius - barHeight - 2;
      ctx.fillStyle = COLORS.bloodBack;
      ctx.fillRect(x0, y0, barWidth, barHeight);
      ctx.fillStyle = COLORS.bloodFill;
      ctx.fillRect(x0, y0, barWidth * (unit.blood / unit.blood_max), barHeight);
    }
  }
}

function tracePath(ctx: CanvasRenderingContext2D, cell: Cell, size: number): void {
  const corners = hexCorners(cell, size);
  ctx.beginPath();
  const first = corners[0]!;
  ctx.moveTo(first.x, first.y);
  for (const corner of corners.slice(1)) {
    ctx.lineTo(corner.x, corner.y);
  }
  ctx.closePath();
}
