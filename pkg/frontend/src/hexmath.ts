// Pointy-top hex geometry for the even-r offset board used by the engine:
// even rows are shoved half a cell to the right, direction indices are
// 0=E 1=W 2=NE 3=NW 4=SE 5=SW.  All pixel math derives from (rows, cols)
// and the hex size only.

export interface Cell {
  row: number;
  col: number;
}

export interface Pixel {
  x: number;
  y: number;
}

export const SQRT3 = Math.sqrt(3);

const EVEN_ROW_DELTAS: ReadonlyArray<readonly [number, number]> = [
  [0, 1], [0, -1], [-1, 1], [-1, 0], [1, 1], [1, 0],
];
const ODD_ROW_DELTAS: ReadonlyArray<readonly [number, number]> = [
  [0, 1], [0, -1], [-1, 0], [-1, -1], [1, 0], [1, -1],
];

export function stepInDirection(cell: Cell, dir: number): Cell {
  const deltas = (cell.row & 1) === 0 ? EVEN_ROW_DELTAS : ODD_ROW_DELTAS;
  const d = deltas[dir];
  if (!d) throw new Error(`direction ${dir} out of range`);
  return { row: cell.row + d[0], col: cell.col + d[1] };
}

export function hexDistance(a: Cell, b: Cell): number {
  const ax = a.col - ((a.row + (a.row & 1)) >> 1);
  const bx = b.col - ((b.row + (b.row & 1)) >> 1);
  const dx = bx - ax;
  const dz = b.row - a.row;
  const dy = -dx - dz;
  return Math.max(Math.abs(dx), Math.abs(dy), Math.abs(dz));
}

export function cellCenter(cell: Cell, size: number): Pixel {
  const shift = (cell.row & 1) === 0 ? 1.0 : 0.5;
  return {
    x: size * SQRT3 * (cell.col + shift),
    y: size * (1.5 * cell.row + 1),
  };
}

export function boardPixelSize(rows: number, cols: number, size: number): Pixel {
  return {
    x: size * SQRT3 * (cols + 1),
    y: size * (1.5 * (rows - 1) + 2),
  };
}

export function hexCorners(cell: Cell, size: number): Pixel[] {
  const c = cellCenter(cell, size);
  const corners: Pixel[] = [];
  for (let i = 0; i < 6; i++) {
    const angle = (Math.PI / 180) * (60 * i + 30);
    corners.push({ x: c.x + size * Math.cos(angle), y: c.y + size * Math.sin(angle) });
  }
  return corners;
}

export function pixelToCell(
  p: Pixel, size: number, rows: number, cols: number,
): Cell | null {
  const approxRow = Math.round((p.y / size - 1) / 1.5);
  let best: Cell | null = null;
  let bestDist = Infinity;
  for (let row = approxRow - 1; row <= approxRow + 1; row++) {
    if (row < 0 || row >= rows) continue;
    const shift = (row & 1) === 0 ? 1.0 : 0.5;
    const approxCol = Math.round(p.x / (size * SQRT3) - shift);
    for (let col = approxCol - 1; col <= approxCol + 1; col++) {
      if (col < 0 || col >= cols) continue;
      const center = cellCenter({ row, col }, size);
      const d = Math.hypot(center.x - p.x, center.y - p.y);
      if (d < bestDist) {
        bestDist = d;
        best = { row, col };
      }
    }
  }
  return best !== null && bestDist <= size ? best : null;
}
