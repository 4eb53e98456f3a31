// Geometry parity with the engine's documented even-r contract.

import { describe, expect, it } from "vitest";
import {
  boardPixelSize,
  cellCenter,
  hexDistance,
  pixelToCell,
  stepInDirection,
} from "../src/hexmath.js";

describe("stepInDirection", () => {
  it("matches the even-r contract on an even row", () => {
    const from = { row: 2, col: 2 };
    expect([0, 1, 2, 3, 4, 5].map((d) => stepInDirection(from, d))).toEqual([
      { row: 2, col: 3 }, { row: 2, col: 1 }, { row: 1, col: 3 },
      { row: 1, col: 2 }, { row: 3, col: 3 }, { row: 3, col: 2 },
    ]);
  });

  it("matches the even-r contract on an odd row", () => {
    const from = { row: 1, col: 2 };
    expect([0, 1, 2, 3, 4, 5].map((d) => stepInDirection(from, d))).toEqual([
      { row: 1, col: 3 }, { row: 1, col: 1 }, { row: 0, col: 2 },
      { row: 0, col: 1 }, { row: 2, col: 2 }, { row: 2, col: 1 },
    ]);
  });

  it("each step changes hex distance by exactly one", () => {
    const origin = { row: 6, col: 6 };
    for (let d = 0; d < 6; d++) {
      expect(hexDistance(origin, stepInDirection(origin, d))).toBe(1);
    }
  });
});

describe("hexDistance", () => {
  it("is zero only at identity and counts straight rows", () => {
    expect(hexDistance({ row: 3, col: 4 }, { row: 3, col: 4 })).toBe(0);
    expect(hexDistance({ row: 0, col: 0 }, { row: 0, col: 5 })).toBe(5);
  });

  it("agrees with breadth-first search on a 7x7 board", () => {
    const rows = 7, cols = 7;
    const start = { row: 0, col: 0 };
    const dist = new Map<string, number>([["0,0", 0]]);
    const queue = [start];
    while (queue.length) {
      const cur = queue.shift()!;
      for (let d = 0; d < 6; d++) {
        const next = stepInDirection(cur, d);
        if (next.row < 0 || next.row >= rows || next.col < 0 || next.col >= cols) continue;
        const key = `${next.row},${next.col}`;
        if (!dist.has(key)) {
          dist.set(key, dist.get(`${cur.row},${cur.col}`)! + 1);
          queue.push(next);
        }
      }
    }
    for (const [key, d] of dist) {
      const [row, col] = key.split(",").map(Number);
      expect(hexDistance(start, { row: row!, col: col! })).toBe(d);
    }
  });
});

describe("pixel mapping", () => {
  it("round-trips every cell center of a 13x23 board", () => {
    const size = 16;
    for (let row = 0; row < 13; row++) {
      for (let col = 0; col < 23; col++) {
        expect(pixelToCell(cellCenter({ row, col }, size), size, 13, 23)).toEqual({ row, col });
      }
    }
  });

  it("keeps every cell inside the reported board size", () => {
    const size = 16;
    const bounds = boardPixelSize(13, 23, size);
    for (let row = 0; row < 13; row++) {
      for (let col = 0; col < 23; col++) {
        const c = cellCenter({ row, col }, size);
        expect(c.x).toBeGreaterThan(0);
        expect(c.y).toBeGreaterThan(0);
        expect(c.x).toBeLessThan(bounds.x);
        expect(c.y).toBeLessThan(bounds.y);
      }
    }
  });

  it("misses outside the board", () => {
    expect(pixelToCell({ x: -50, y: -50 }, 16, 13, 23)).toBeNull();
  });
});
