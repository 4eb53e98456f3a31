"""Hex map geometry: coordinates, adjacency, distance, paths, map files.

Coordinate contract
-------------------
Cells are addressed as ``(row, col)`` in even-r horizontal offset
coordinates: pointy-top hexes, rows staggered, even rows shoved half a
cell to the right.  The six neighbor directions are numbered

    0=E  1=W  2=NE  3=NW  4=SE  5=SW

and this order is load-bearing: it is the Move action encoding and every
deterministic tie-break walks directions in this order.

Distance is the cube-coordinate hex metric, which equals shortest-path
length on the neighbor graph of a full rectangular board.

Map file format
---------------
Line-oriented text: a header line ``rows cols`` followed by ``rows``
lines of ``cols`` space-separated cell codes.  Code 0 is normal terrain,
code 1 is special (hidden) terrain that halves the distance at which an
occupant can be observed.  Terrain never blocks movement or shooting.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import InvalidCoordinateError, MapFormatError

DIRECTION_NAMES = ("E", "W", "NE", "NW", "SE", "SW")
N_DIRECTIONS = 6

# (drow, dcol) per direction, indexed by row parity (even rows shifted right).
_EVEN_ROW_DELTAS = ((0, 1), (0, -1), (-1, 1), (-1, 0), (1, 1), (1, 0))
_ODD_ROW_DELTAS = ((0, 1), (0, -1), (-1, 0), (-1, -1), (1, 0), (1, -1))

NORMAL = 0
SPECIAL = 1


class HexCoord(NamedTuple):
    row: int
    col: int


def offset_to_cube(row: int, col: int) -> tuple[int, int, int]:
    """Convert even-r offset coordinates to cube (x, y, z)."""
    x = col - ((row + (row & 1)) >> 1)
    z = row
    return x, -x - z, z


def hex_distance(a: HexCoord, b: HexCoord) -> int:
    """Length of the shortest neighbor chain between two cells."""
    ax = a[1] - ((a[0] + (a[0] & 1)) >> 1)
    bx = b[1] - ((b[0] + (b[0] & 1)) >> 1)
    dx = bx - ax
    dz = b[0] - a[0]
    dy = -dx - dz
    return max(abs(dx), abs(dy), abs(dz))


def step_in_direction(c: HexCoord, direction: int) -> HexCoord:
    """The (possibly out-of-bounds) cell one step from c in a direction."""
    dr, dc = (_EVEN_ROW_DELTAS if (c[0] & 1) == 0 else _ODD_ROW_DELTAS)[direction]
    return HexCoord(c[0] + dr, c[1] + dc)


class GameMap:
    """A bounded hex board with per-cell terrain codes (row-major)."""

    __slots__ = ("rows", "cols", "terrain")

    def __init__(self, rows: int, cols: int, terrain: list[int] | None = None):
        if rows < 1 or cols < 1:
            raise MapFormatError(f"map dimensions must be positive, got {rows}x{cols}")
        if terrain is None:
            terrain = [NORMAL] * (rows * cols)
        if len(terrain) != rows * cols:
            raise MapFormatError(
                f"terrain has {len(terrain)} cells, expected {rows * cols}"
            )
        for i, code in enumerate(terrain):
            if code not in (NORMAL, SPECIAL):
                raise MapFormatError(
                    f"illegal cell code {code} at row {i // cols} col {i % cols}"
                )
        self.rows = rows
        self.cols = cols
        self.terrain = list(terrain)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GameMap)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.terrain == other.terrain
        )

    def __repr__(self) -> str:
        n_special = sum(self.terrain)
        return f"GameMap({self.rows}x{self.cols}, {n_special} special cells)"

    def in_bounds(self, c: HexCoord) -> bool:
        return 0 <= c[0] < self.rows and 0 <= c[1] < self.cols

    def require_in_bounds(self, c: HexCoord) -> None:
        if not self.in_bounds(c):
            raise InvalidCoordinateError(
                f"({c[0]},{c[1]}) outside {self.rows}x{self.cols} map"
            )

    def linear_index(self, c: HexCoord) -> int:
        return c[0] * self.cols + c[1]

    def is_special(self, c: HexCoord) -> bool:
        return self.terrain[c[0] * self.cols + c[1]] == SPECIAL

    def special_cells(self) -> list[HexCoord]:
        cols = self.cols
        return [
            HexCoord(i // cols, i % cols)
            for i, code in enumerate(self.terrain)
            if code == SPECIAL
        ]

    def center(self) -> HexCoord:
        return HexCoord(self.rows // 2, self.cols // 2)

    def mirrored(self) -> "GameMap":
        """The board reflected across its horizontal center line.

        Row-flip is the one mirror that is a true hex-lattice isometry for
        a staggered-row rectangle (when the row count is odd), so all
        bundled boards are built symmetric under it.
        """
        flipped = []
        for r in range(self.rows - 1, -1, -1):
            flipped.extend(self.terrain[r * self.cols:(r + 1) * self.cols])
        return GameMap(self.rows, self.cols, flipped)

    def mirror_coord(self, c: HexCoord) -> HexCoord:
        return HexCoord(self.rows - 1 - c[0], c[1])

    def is_mirror_symmetric(self) -> bool:
        return self.terrain == self.mirrored().terrain

    def distance(self, a: HexCoord, b: HexCoord) -> int:
        """hex_distance with bounds checking against this map."""
        self.require_in_bounds(a)
        self.require_in_bounds(b)
        return hex_distance(a, b)


def neighbors(c: HexCoord, game_map: GameMap) -> list[HexCoord]:
    """In-bounds neighbors of c, in direction order 0..5."""
    game_map.require_in_bounds(c)
    out = []
    for d in range(N_DIRECTIONS):
        n = step_in_direction(c, d)
        if game_map.in_bounds(n):
            out.append(n)
    return out


def first_step_toward(a: HexCoord, b: HexCoord, game_map: GameMap) -> int | None:
    """Direction index of the first step of shortest_path(a, b), or None at a == b.

    Lowest direction index among the in-bounds distance-reducing steps;
    this is exactly the lexicographic-minimal shortest path's first move.
    """
    if a == b:
        return None
    target = hex_distance(a, b) - 1
    for d in range(N_DIRECTIONS):
        n = step_in_direction(a, d)
        if game_map.in_bounds(n) and hex_distance(n, b) == target:
            return d
    return None


def shortest_path(a: HexCoord, b: HexCoord, game_map: GameMap) -> list[HexCoord]:
    """A minimal-length path a -> b, both endpoints included.

    Among equal-length paths the one whose direction-index sequence is
    lexicographically smallest is returned.  On a full rectangular board
    a greedy distance-reducing walk realizes it; a BFS fallback covers
    any position the greedy rule cannot advance from.
    """
    game_map.require_in_bounds(a)
    game_map.require_in_bounds(b)
    path = [a]
    cur = a
    while cur != b:
        d = first_step_toward(cur, b, game_map)
        if d is None:
            return _bfs_path(a, b, game_map)
        cur = step_in_direction(cur, d)
        path.append(cur)
    return path


def _bfs_path(a: HexCoord, b: HexCoord, game_map: GameMap) -> list[HexCoord]:
    # Expanding in direction order makes the first discovery of each cell
    # the lexicographically smallest shortest path to it.
    parent: dict[HexCoord, HexCoord] = {a: a}
    frontier = [a]
    while frontier:
        nxt = []
        for cur in frontier:
            for d in range(N_DIRECTIONS):
                n = step_in_direction(cur, d)
                if game_map.in_bounds(n) and n not in parent:
                    parent[n] = cur
                    if n == b:
                        path = [b]
                        while path[-1] != a:
                            path.append(parent[path[-1]])
                        path.reverse()
                        return path
                    nxt.append(n)
        frontier = nxt
    raise InvalidCoordinateError(f"no path from {a} to {b}")  # unreachable on a rectangle


def load_map(document: str | bytes) -> GameMap:
    """Parse the text map format; errors name the offending line/cell."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    lines = [ln for ln in document.splitlines() if ln.strip() != ""]
    if not lines:
        raise MapFormatError("empty map document")
    header = lines[0].split()
    if len(header) != 2:
        raise MapFormatError(f"line 1: header must read 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise MapFormatError(f"line 1: non-integer dimensions {lines[0]!r}") from None
    if rows < 1 or cols < 1:
        raise MapFormatError(f"line 1: dimensions must be positive, got {rows} {cols}")
    if len(lines) - 1 != rows:
        raise MapFormatError(f"expected {rows} terrain lines, found {len(lines) - 1}")
    terrain: list[int] = []
    for r in range(rows):
        tokens = lines[1 + r].split()
        if len(tokens) != cols:
            raise MapFormatError(
                f"line {r + 2}: expected {cols} cells, found {len(tokens)}"
            )
        for c, tok in enumerate(tokens):
            try:
                code = int(tok)
            except ValueError:
                raise MapFormatError(
                    f"line {r + 2}: non-integer cell {tok!r} at row {r} col {c}"
                ) from None
            if code not in (NORMAL, SPECIAL):
                raise MapFormatError(
                    f"line {r + 2}: illegal cell code {code} at row {r} col {c}"
                )
            terrain.append(code)
    return GameMap(rows, cols, terrain)


def save_map(game_map: GameMap) -> str:
    """Serialize to the text map format; load_map(save_map(m)) == m."""
    out = [f"{game_map.rows} {game_map.cols}"]
    for r in range(game_map.rows):
        row = game_map.terrain[r * game_map.cols:(r + 1) * game_map.cols]
        out.append(" ".join(str(v) for v in row))
    return "\n".join(out) + "\n"
