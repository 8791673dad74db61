#!/usr/bin/env python3
"""Writes the 45x85 benchmark fabric.

Layout:
  * streets on rows 2, 6, ..., 42: junctions on even columns joined by
    one-cell horizontal channels;
  * columns 0, 4, ..., 84 carry three-cell vertical channels between
    consecutive streets;
  * columns 2, 6, ..., 82 have a trap directly above and below each street
    junction;
  * rows 0 and 44 are empty.
"""
import sys

ROWS, COLS = 45, 85
STREETS = range(2, ROWS - 2, 4)


def build():
    g = [["."] * COLS for _ in range(ROWS)]
    for r in STREETS:
        for c in range(COLS):
            g[r][c] = "J" if c % 2 == 0 else "C"
        for c in range(2, COLS, 4):
            g[r - 1][c] = "T"
            g[r + 1][c] = "T"
    for r in STREETS:
        if r + 4 > STREETS[-1]:
            break
        for c in range(0, COLS, 4):
            for dr in (1, 2, 3):
                g[r + dr][c] = "C"
    return "".join("".join(row) + "\n" for row in g)


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "assets/fabrics/grid45x85.fab"
    with open(out, "w") as f:
        f.write(build())
