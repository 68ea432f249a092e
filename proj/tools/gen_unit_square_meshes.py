#!/usr/bin/env python3
"""Generate unstructured unit-square meshes at area budgets 0.01/(2^l)^2.

Writes unit_square_l<l>.node / .ele in Triangle's text format.
Requires the `triangle` Python package.
"""
import argparse
import pathlib

import numpy as np
import triangle


def write(base: pathlib.Path, mesh: dict) -> None:
    verts = mesh["vertices"]
    tris = mesh["triangles"]
    with open(base.with_suffix(".node"), "w") as f:
        f.write(f"{len(verts)} 2 0 0\n")
        for i, (x, y) in enumerate(verts):
            f.write(f"{i} {float(x)!r} {float(y)!r}\n")
    with open(base.with_suffix(".ele"), "w") as f:
        f.write(f"{len(tris)} 3 0\n")
        for i, (a, b, c) in enumerate(tris):
            f.write(f"{i} {int(a)} {int(b)} {int(c)}\n")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/meshes")
    ap.add_argument("--levels", type=int, default=4)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    square = {
        "vertices": np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
        "segments": np.array([[0, 1], [1, 2], [2, 3], [3, 0]]),
    }
    for level in range(args.levels):
        budget = 0.01 / (2**level) ** 2
        mesh = triangle.triangulate(square, "pqa" + repr(budget))
        write(out / f"unit_square_l{level}", mesh)
        print(f"level {level}: {len(mesh['vertices'])} vertices, {len(mesh['triangles'])} triangles")


if __name__ == "__main__":
    main()
