"""Nodes, faces and structural validation of generating networks.

Faces are enumerated on the network together with its mirror image across
the axis.  That closes every region touching the axis without inventing
axis edges, and connectivity of a face in the doubled picture is exactly
connectivity of the revolved region in R^n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .profile import GeneratingNetwork, Label, MeridianEdge, edge_integrals

NODE_RTOL = 1e-9


@dataclass
class Node:
    x: float
    y: float
    on_axis: bool
    incident: list = field(default_factory=list)  # (edge index, leaves forward?)

    @property
    def degree(self) -> int:
        return len(self.incident)


@dataclass
class NodeTable:
    nodes: list[Node]
    start: list[int]  # node id of each edge's p
    end: list[int]    # node id of each edge's q
    tol: float


def _scale(edges) -> float:
    pts = [c for e in edges for c in (*e.p, *e.q)]
    return max(1.0, max((abs(c) for c in pts), default=1.0))


def _merge_points(pts: np.ndarray, tol: float) -> np.ndarray:
    """Cluster ids for points closer than ``tol`` (transitively)."""
    parent = np.arange(len(pts))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in cKDTree(pts).query_pairs(tol):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(len(pts))])
    _, ids = np.unique(roots, return_inverse=True)
    return ids


def node_table(net_or_edges) -> NodeTable:
    edges = net_or_edges.edges if isinstance(net_or_edges, GeneratingNetwork) else net_or_edges
    tol = NODE_RTOL * _scale(edges)
    if not edges:
        return NodeTable([], [], [], tol)
    pts = np.array([pt for e in edges for pt in (e.p, e.q)])
    ids = _merge_points(pts, tol)
    count = int(ids.max()) + 1
    sums = np.zeros((count, 2))
    np.add.at(sums, ids, pts)
    freq = np.bincount(ids, minlength=count)
    centers = sums / freq[:, None]
    nodes = [Node(float(cx), float(cy), abs(cy) <= tol) for cx, cy in centers]
    start, end = [], []
    for i in range(len(edges)):
        a, b = int(ids[2 * i]), int(ids[2 * i + 1])
        start.append(a)
        end.append(b)
        nodes[a].incident.append((i, True))
        nodes[b].incident.append((i, False))
    return NodeTable(nodes, start, end, tol)


def _mirror_y(e: MeridianEdge) -> MeridianEdge:
    m = MeridianEdge((e.p[0], -e.p[1]), (e.q[0], -e.q[1]), -e.curvature,
                     e.right, e.left, e.major)
    m.__dict__["_param"] = (-e.start_angle, e.length)
    return m


@dataclass
class Face:
    cycles: list[int]
    labels: set
    area: float
    bounded: bool


def _point_in_polygon(pt, poly: np.ndarray) -> bool:
    x, y = pt
    xs, ys = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(xs, -1), np.roll(ys, -1)
    crosses = (ys > y) != (yn > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = xs + (y - ys) * (xn - xs) / (yn - ys)
    return bool(np.count_nonzero(crosses & (x < xint)) % 2)


def faces(edges) -> list[Face]:
    """Faces of the (already doubled) planar network ``edges``."""
    table = node_table(edges)
    nh = 2 * len(edges)
    origin = [0] * nh
    angle = [0.0] * nh
    curv = [0.0] * nh
    for i, e in enumerate(edges):
        origin[2 * i] = table.start[i]
        origin[2 * i + 1] = table.end[i]
        angle[2 * i] = e.start_angle % (2 * math.pi)
        angle[2 * i + 1] = (e.end_angle + math.pi) % (2 * math.pi)
        curv[2 * i] = e.curvature
        curv[2 * i + 1] = -e.curvature
    rings: dict[int, list[int]] = {}
    for h in range(nh):
        rings.setdefault(origin[h], []).append(h)
    position = {}
    for v, hs in rings.items():
        hs.sort(key=lambda h: (round(angle[h], 12), curv[h]))
        for k, h in enumerate(hs):
            position[h] = k

    def nxt(h):
        twin = h ^ 1
        ring = rings[origin[twin]]
        return ring[(position[twin] - 1) % len(ring)]

    shoelace = edge_integrals(list(edges),
                              lambda x, y, phi: 0.5 * (x * np.sin(phi) - y * np.cos(phi)))
    seen = [False] * nh
    cycles, areas = [], []
    for h0 in range(nh):
        if seen[h0]:
            continue
        cyc, h = [], h0
        while not seen[h]:
            seen[h] = True
            cyc.append(h)
            h = nxt(h)
        cycles.append(cyc)
        areas.append(sum(shoelace[h >> 1] * (1 if h % 2 == 0 else -1) for h in cyc))

    def left_label(h):
        e = edges[h >> 1]
        return e.left if h % 2 == 0 else e.right

    def polygon(cyc):
        pts = []
        for h in cyc:
            e = edges[h >> 1]
            s = _polyline_of(e)
            pts.append(s if h % 2 == 0 else s[::-1])
        return np.vstack(pts)

    scale = _scale(edges)
    positive = [i for i, a in enumerate(areas) if a > 1e-14 * scale ** 2]
    polys = {i: polygon(cycles[i]) for i in positive}
    result = {i: Face([i], {left_label(h) for h in cycles[i]}, areas[i], True) for i in positive}
    outer = Face([], set(), 0.0, False)
    for i, a in enumerate(areas):
        if i in result:
            continue
        e = edges[cycles[i][0] >> 1]
        probe = tuple(np.asarray(e.point(0.5 * e.length), dtype=float))
        # cycles sharing an edge lie on the far side of this boundary
        mine = {h >> 1 for h in cycles[i]}
        hosts = [j for j in positive if not mine & {h >> 1 for h in cycles[j]}
                 and _point_in_polygon(probe, polys[j])]
        host = result[min(hosts, key=lambda j: areas[j])] if hosts else outer
        host.cycles.append(i)
        host.labels |= {left_label(h) for h in cycles[i]}
    return list(result.values()) + [outer]


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str = ""


def _polyline_of(e: MeridianEdge) -> np.ndarray:
    if e.curvature == 0.0:
        return np.array([e.p, e.q])
    return e.sample(int(np.ceil(abs(e.sweep) / (math.pi / 32))) + 2)


def _min_y(e: MeridianEdge) -> float:
    """Lowest point of the edge (endpoints, or the bottom of its circle)."""
    low = min(e.p[1], e.q[1])
    k = e.curvature
    if k == 0.0:
        return low
    # the bottom of the circle is where the tangent points along +x (k > 0) or -x
    target = 0.0 if k > 0 else math.pi
    a, b = sorted((e.start_angle, e.end_angle))
    m = math.ceil((a - target) / (2 * math.pi))
    if target + 2 * math.pi * m <= b:
        phi = e.start_angle
        cy = e.p[1] + math.cos(phi) / k
        low = min(low, cy - 1.0 / abs(k))
    return low


def validate(net: GeneratingNetwork) -> list[Violation]:
    """Structural problems of ``net``; empty when it is a valid competitor."""
    out: list[Violation] = []
    if not net.edges:
        return [Violation("EMPTY", "network has no edges")]
    table = node_table(net)
    tol = table.tol
    usable = []
    for i, e in enumerate(net.edges):
        ok = True
        if e.left is e.right:
            out.append(Violation("SAME_LABEL", f"edge {i} has {e.left.value} on both sides"))
            ok = False
        if not e.consistent:
            out.append(Violation("ARC_INCONSISTENT", f"edge {i}: chord longer than diameter"))
            ok = False
            continue
        if _min_y(e) < -tol:
            out.append(Violation("BELOW_AXIS", f"edge {i} dips below the axis"))
            ok = False
        if max(abs(e.p[1]), abs(e.q[1])) <= tol and e.curvature == 0.0:
            out.append(Violation("ON_AXIS", f"edge {i} lies along the axis"))
            ok = False
        if ok:
            usable.append(e)
    for node in table.nodes:
        if node.on_axis:
            continue
        if node.degree == 1:
            out.append(Violation("DANGLING", f"free endpoint at ({node.x:.6g}, {node.y:.6g})"))
        elif node.degree >= 4:
            out.append(Violation("FOUR_JUNCTION",
                                 f"{node.degree} edges meet at ({node.x:.6g}, {node.y:.6g})"))
    if out:
        return out

    doubled = list(usable) + [_mirror_y(e) for e in usable]
    fs = faces(doubled)
    ext_faces = 0
    for f in fs:
        if len(f.labels) > 1:
            out.append(Violation("LABEL_INCONSISTENT",
                                 "face carries labels " + ",".join(sorted(l.value for l in f.labels))))
        if not f.bounded and f.labels and f.labels != {Label.EXT}:
            out.append(Violation("UNBOUNDED_NOT_EXT", "the unbounded face is not exterior"))
        if Label.EXT in f.labels:
            ext_faces += 1
    if ext_faces > 1:
        out.append(Violation("EXT_DISCONNECTED", f"exterior splits into {ext_faces} components"))
    return out
