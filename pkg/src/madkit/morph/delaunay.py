"""Delaunay triangulation by incremental insertion with edge legalization.

Each point is located in the current triangulation, the containing
triangle is split (1-to-3, or 2-to-4 for a point landing on an edge) and
the surrounding edges are flipped until the local circumcircle test
passes. The mesh starts from a large enclosing triangle whose vertices
are removed at the end; a final repair pass re-checks every interior
edge of the real triangulation. Points exactly on a circumcircle (within
tolerance) count as outside, so triangles created earlier, i.e. from
lower vertex indices, are kept; this is the documented cocircular tie
rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.errors import MadkitError

# Tolerances for the geometric predicates, relative to the coordinate
# magnitude: the incircle determinant is homogeneous of degree 4, the
# area determinant of degree 2.
INCIRCLE_RTOL = 1e-9
AREA_RTOL = 1e-12


@dataclass(frozen=True)
class TriangleMesh:
    """Vertices plus CCW-oriented vertex-index triples, canonically sorted."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MadkitError("triangle index out of range")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    def __len__(self):
        return len(self.triangles)

    def triangle_points(self, i: int) -> np.ndarray:
        return self.vertices[self.triangles[i]]


def _area2(a, b, c):
    # Twice the signed area; positive for counter-clockwise order.
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _incircle(a, b, c, d) -> bool:
    """True if d lies strictly inside the circumcircle of triangle abc.

    The tie band is INCIRCLE_RTOL relative to the sum of the absolute
    determinant terms, which stays correctly scaled even when one vertex
    (an enclosing-triangle corner) is far from the others.
    """
    if _area2(a, b, c) < 0:
        b, c = c, b
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    perm = (alift * (abs(bdx * cdy) + abs(cdx * bdy))
            + blift * (abs(cdx * ady) + abs(adx * cdy))
            + clift * (abs(adx * bdy) + abs(bdx * ady)))
    return det > INCIRCLE_RTOL * perm


class _Mesh:
    """Mutable triangle soup with an edge adjacency map."""

    def __init__(self, pts: np.ndarray):
        self.pts = pts
        self.tris: list[tuple[int, int, int] | None] = []
        self.edges: dict[tuple[int, int], set[int]] = {}

    def add(self, i: int, j: int, k: int) -> int:
        idx = len(self.tris)
        self.tris.append((i, j, k))
        for e in ((i, j), (j, k), (k, i)):
            self.edges.setdefault(_key(e), set()).add(idx)
        return idx

    def remove(self, idx: int) -> None:
        tri = self.tris[idx]
        self.tris[idx] = None
        i, j, k = tri
        for e in ((i, j), (j, k), (k, i)):
            users = self.edges.get(_key(e))
            users.discard(idx)
            if not users:
                del self.edges[_key(e)]

    def neighbor(self, idx: int, u: int, v: int) -> int | None:
        users = self.edges.get(_key((u, v)), ())
        for other in users:
            if other != idx:
                return other
        return None

    def opposite(self, idx: int, u: int, v: int) -> int:
        tri = self.tris[idx]
        for vert in tri:
            if vert != u and vert != v:
                return vert
        raise MadkitError("degenerate adjacency")


def _key(edge):
    u, v = edge
    return (u, v) if u < v else (v, u)


def delaunay(points) -> TriangleMesh:
    """Triangulate ``points``; raises on <3 points, duplicates or collinear input."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise MadkitError(f"points must have shape (n, 2), got {pts.shape}")
    n = len(pts)
    if n < 3:
        raise MadkitError(f"need at least 3 points, got {n}")
    uniq = {(float(x), float(y)) for x, y in pts}
    if len(uniq) != n:
        raise MadkitError("duplicate points are not allowed")

    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    extent = float(max(hi[0] - lo[0], hi[1] - lo[1], 1.0))
    if not _any_noncollinear(pts, extent):
        raise MadkitError("all points are collinear")

    cx, cy = (lo + hi) / 2.0
    big = 4096.0 * extent
    sup = np.array([(cx - 2.0 * big, cy - big),
                    (cx + 2.0 * big, cy - big),
                    (cx, cy + 2.0 * big)])
    all_pts = np.vstack([pts, sup])

    mesh = _Mesh(all_pts)
    mesh.add(n, n + 1, n + 2)
    for p_idx in range(n):
        _insert(mesh, p_idx, extent)

    tris = [t for t in mesh.tris if t is not None and max(t) < n]
    tris = _lawson_repair([list(t) for t in tris], pts)

    scale = float(max(np.abs(pts).max(), 1.0))
    area_tol = AREA_RTOL * scale * scale
    kept = [tuple(t) for t in tris
            if abs(_area2(pts[t[0]], pts[t[1]], pts[t[2]])) > area_tol]
    return TriangleMesh(pts, _canonical(kept, pts))


def _insert(mesh: _Mesh, p_idx: int, extent: float) -> None:
    pts = mesh.pts
    p = pts[p_idx]
    t_idx, on_edge = _locate(mesh, p, extent)
    if t_idx is None:
        raise MadkitError("point location failed; input may be degenerate")
    i, j, k = mesh.tris[t_idx]

    pending: list[tuple[int, int, int]] = []  # (triangle idx, edge u, edge v)
    if on_edge is None:
        mesh.remove(t_idx)
        for u, v in ((i, j), (j, k), (k, i)):
            new = mesh.add(p_idx, u, v)
            pending.append((new, u, v))
    else:
        u, v = on_edge
        w = mesh.opposite(t_idx, u, v)
        other = mesh.neighbor(t_idx, u, v)
        mesh.remove(t_idx)
        for a, b in ((u, w), (w, v)):
            new = mesh.add(p_idx, a, b)
            pending.append((new, a, b))
        if other is not None:
            x = mesh.opposite(other, u, v)
            mesh.remove(other)
            for a, b in ((u, x), (x, v)):
                new = mesh.add(p_idx, a, b)
                pending.append((new, a, b))

    # legalize: flip any edge opposite the new point that fails the
    # circumcircle test, then recheck the two exposed edges
    guard = 0
    limit = 16 * (len(mesh.tris) + 8) ** 2
    while pending:
        guard += 1
        if guard > limit:
            break
        t_idx, u, v = pending.pop()
        if mesh.tris[t_idx] is None:
            continue
        other = mesh.neighbor(t_idx, u, v)
        if other is None:
            continue
        w = mesh.opposite(other, u, v)
        if _incircle(pts[p_idx], pts[u], pts[v], pts[w]):
            mesh.remove(t_idx)
            mesh.remove(other)
            n1 = mesh.add(p_idx, u, w)
            n2 = mesh.add(p_idx, w, v)
            pending.append((n1, u, w))
            pending.append((n2, w, v))


def _locate(mesh: _Mesh, p: np.ndarray, extent: float):
    """First triangle containing p; returns (index, on_edge_or_None).

    The on-edge tolerance is scaled by the coordinates of the edge being
    tested (not the whole triangle), so triangles reaching out to the
    far enclosing vertices still resolve locations near the data.
    """
    pts = mesh.pts
    alive = np.array([i for i, t in enumerate(mesh.tris) if t is not None])
    tri = np.array([mesh.tris[i] for i in alive], dtype=np.int64)
    a = pts[tri[:, 0]]
    b = pts[tri[:, 1]]
    c = pts[tri[:, 2]]
    area = ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
            - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    swap = area < 0
    tri = tri.copy()
    tri[swap, 1], tri[swap, 2] = tri[swap, 2], tri[swap, 1]
    b, c = pts[tri[:, 1]], pts[tri[:, 2]]

    p_mag = max(abs(p[0]), abs(p[1]), 1.0)

    def edge_test(u, v):
        d = ((v[:, 0] - u[:, 0]) * (p[1] - u[:, 1])
             - (v[:, 1] - u[:, 1]) * (p[0] - u[:, 0]))
        s = np.maximum.reduce([np.abs(u).max(axis=1), np.abs(v).max(axis=1),
                               np.full(len(u), p_mag)])
        return d, AREA_RTOL * s * s

    d1, t1 = edge_test(a, b)
    d2, t2 = edge_test(b, c)
    d3, t3 = edge_test(c, a)
    inside = (d1 >= -t1) & (d2 >= -t2) & (d3 >= -t3)
    hits = np.flatnonzero(inside)
    if not len(hits):
        return None, None
    row = int(hits[0])
    idx = int(alive[row])
    i, j, k = (int(v) for v in tri[row])
    if d1[row] <= t1[row]:
        return idx, (i, j)
    if d2[row] <= t2[row]:
        return idx, (j, k)
    if d3[row] <= t3[row]:
        return idx, (k, i)
    return idx, None


def _any_noncollinear(pts, extent):
    a, b = pts[0], pts[1]
    tol = AREA_RTOL * extent * extent
    for c in pts[2:]:
        if abs(_area2(a, b, c)) > tol:
            return True
    return False


def _canonical(tris, pts) -> np.ndarray:
    out = []
    for i, j, k in tris:
        if _area2(pts[i], pts[j], pts[k]) < 0:
            j, k = k, j
        m = min(i, j, k)  # rotate smallest index first, orientation kept
        if m == j:
            i, j, k = j, k, i
        elif m == k:
            i, j, k = k, i, j
        out.append((i, j, k))
    out.sort()
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def _lawson_repair(tris: list[list[int]], pts: np.ndarray) -> list[list[int]]:
    """Flip interior edges until every pair satisfies the incircle test."""
    max_flips = 8 * max(len(tris), 1) ** 2
    flips = 0
    while flips <= max_flips:
        edge_map: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for t_idx, (i, j, k) in enumerate(tris):
            for e, opp in (((i, j), k), ((j, k), i), ((k, i), j)):
                edge_map.setdefault(_key(e), []).append((t_idx, opp))
        flipped = False
        for (u, v), users in sorted(edge_map.items()):
            if len(users) != 2:
                continue
            (t1, c1), (t2, c2) = users
            if _incircle(pts[u], pts[v], pts[c1], pts[c2]):
                s = max(abs(pts[u][0]), abs(pts[u][1]), abs(pts[v][0]),
                        abs(pts[v][1]), abs(pts[c1][0]), abs(pts[c1][1]),
                        abs(pts[c2][0]), abs(pts[c2][1]), 1.0)
                area_tol = AREA_RTOL * s * s
                # only flip strictly convex quads
                if (abs(_area2(pts[u], pts[c2], pts[c1])) <= area_tol
                        or abs(_area2(pts[v], pts[c1], pts[c2])) <= area_tol):
                    continue
                tris[t1][:] = [u, c2, c1]
                tris[t2][:] = [v, c1, c2]
                flipped = True
                flips += 1
                break
        if not flipped:
            return tris
    return tris
