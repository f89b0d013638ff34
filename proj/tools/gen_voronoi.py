#!/usr/bin/env python3
"""Clipped Voronoi meshes of the unit cube in the poly-text format.

Each cell is the cube cut by the bisector half-spaces of its seed; optional
Lloyd steps move the seeds toward a centroidal tessellation.  Used to
produce the sample meshes under data/meshes.
"""

import argparse
import sys

import numpy as np
from scipy.spatial import cKDTree

EPS = 1e-12


def cube_faces():
    c = np.array([[x, y, z] for z in (0, 1) for y in (0, 1) for x in (0, 1)], dtype=float)
    loops = [
        [0, 4, 6, 2], [1, 3, 7, 5],  # x = 0, x = 1
        [0, 1, 5, 4], [2, 6, 7, 3],  # y = 0, y = 1
        [0, 2, 3, 1], [4, 5, 7, 6],  # z = 0, z = 1
    ]
    return [c[l] for l in loops]


def clip(faces, normal, offset):
    """Keeps {x : normal . x <= offset}; faces are outward CCW loops."""
    out, cut = [], []
    for poly in faces:
        d = poly @ normal - offset
        if np.all(d <= EPS):
            out.append(poly)
            continue
        if np.all(d >= -EPS):
            cut.extend(p for p, di in zip(poly, d) if abs(di) <= EPS)
            continue
        kept = []
        n = len(poly)
        for i in range(n):
            p, q = poly[i], poly[(i + 1) % n]
            dp, dq = d[i], d[(i + 1) % n]
            if dp <= EPS:
                kept.append(p)
                if abs(dp) <= EPS:
                    cut.append(p)
            if (dp < -EPS and dq > EPS) or (dp > EPS and dq < -EPS):
                x = p + (q - p) * (dp / (dp - dq))
                kept.append(x)
                cut.append(x)
        if len(kept) >= 3:
            out.append(np.array(kept))
    if len(cut) >= 3:
        pts = unique_points(np.array(cut))
        if len(pts) >= 3:
            out.append(order_loop(pts, normal))
    return out


def unique_points(pts, tol=1e-10):
    keep = []
    for p in pts:
        if all(np.linalg.norm(p - q) > tol for q in keep):
            keep.append(p)
    return np.array(keep)


def order_loop(pts, normal):
    c = pts.mean(axis=0)
    a = np.eye(3)[np.argmin(np.abs(normal))]
    t1 = np.cross(normal, a)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(normal, t1)
    ang = np.arctan2((pts - c) @ t2, (pts - c) @ t1)
    return pts[np.argsort(ang)]


def voronoi_cells(seeds):
    tree = cKDTree(seeds)
    k = min(len(seeds), 60)
    cells = []
    for i, s in enumerate(seeds):
        faces = cube_faces()
        dist, nbrs = tree.query(s, k=k)
        for d, j in zip(np.atleast_1d(dist), np.atleast_1d(nbrs)):
            if j == i:
                continue
            # Security radius: farther seeds cannot cut the current cell.
            if d > 2.0 * max(np.linalg.norm(f - s, axis=1).max() for f in faces):
                break
            n = seeds[j] - s
            faces = clip(faces, n / np.linalg.norm(n), (seeds[j] + s) @ n / 2 / np.linalg.norm(n))
        cells.append(faces)
    return cells


def centroid(faces):
    apex = np.mean([p for f in faces for p in f], axis=0)
    vol, mom = 0.0, np.zeros(3)
    for f in faces:
        for i in range(1, len(f) - 1):
            a, b, c = f[0], f[i], f[i + 1]
            v = np.dot(a - apex, np.cross(b - apex, c - apex)) / 6.0
            vol += v
            mom += v * (apex + a + b + c) / 4.0
    return mom / vol


def to_mesh(cells, weld=1e-9):
    pts = np.array([p for cell in cells for f in cell for p in f])
    tree = cKDTree(pts)
    rep = np.arange(len(pts))
    for a, b in sorted(tree.query_pairs(weld)):
        rep[b] = rep[a]
    rep = rep[rep]
    ids = {}
    verts = []
    for r in rep:
        if r not in ids:
            ids[r] = len(verts)
            verts.append(pts[r])

    faces, face_key, cell_codes = [], {}, []
    cursor = 0
    for cell in cells:
        codes = []
        for f in cell:
            loop = [ids[rep[cursor + m]] for m in range(len(f))]
            cursor += len(f)
            loop = [v for k, v in enumerate(loop) if v != loop[k - 1]]
            if len(loop) < 3:
                continue
            key = tuple(sorted(loop))
            if key in face_key:
                fid = face_key[key]
                codes.append(-(fid + 1))
            else:
                face_key[key] = len(faces)
                faces.append(loop)
                codes.append(len(faces))
        cell_codes.append(codes)
    return np.array(verts), faces, cell_codes


def write_poly(path, verts, faces, cells):
    with open(path, "w") as out:
        out.write(f"vertices {len(verts)}\n")
        for p in verts:
            out.write(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        out.write(f"faces {len(faces)}\n")
        for f in faces:
            out.write(f"{len(f)} " + " ".join(map(str, f)) + "\n")
        out.write(f"cells {len(cells)}\n")
        for c in cells:
            out.write(f"{len(c)} " + " ".join(map(str, c)) + "\n")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("cells", type=int)
    ap.add_argument("output")
    ap.add_argument("--lloyd", type=int, default=0, help="Lloyd iterations")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    seeds = rng.uniform(0.05, 0.95, size=(args.cells, 3))
    for _ in range(args.lloyd):
        seeds = np.array([centroid(c) for c in voronoi_cells(seeds)])
    verts, faces, cells = to_mesh(voronoi_cells(seeds))
    write_poly(args.output, verts, faces, cells)
    print(f"{args.output}: {len(cells)} cells, {len(faces)} faces, {len(verts)} vertices", file=sys.stderr)


if __name__ == "__main__":
    main()
