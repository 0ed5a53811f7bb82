"""Competitor double bubbles as planar generating networks.

A network lives in the closed upper half of the meridian plane: ``x`` is
the axial coordinate and ``y >= 0`` the distance from the axis.  Each edge
is a circular arc or a segment carrying the labels of the regions on its
left and right (relative to its p -> q direction).  Revolving the network
about the axis gives the competitor surface in R^n.

Signed curvature is positive when the edge turns left.  A segment is the
``curvature == 0`` case of an arc; nothing downstream treats it specially.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DomainError, StructuralError
from .quadrature import gl_rule
from .spherical import check_dimension, unit_ball_volume

# Gauss-Legendre order and maximal sweep per panel for edge integrals.
EDGE_GL_ORDER = 16
EDGE_MAX_PANEL_SWEEP = math.pi / 8


class Label(str, enum.Enum):
    B1 = "B1"
    B2 = "B2"
    EXT = "EXT"


class WeightClass(str, enum.Enum):
    STRICT = "STRICT"
    INTERFACE_DOMINANT = "INTERFACE_DOMINANT"
    NESTED_1 = "NESTED_1"
    NESTED_2 = "NESTED_2"
    BOUNDARY = "BOUNDARY"


@dataclass(frozen=True)
class WeightTriple:
    w0: float  # interface B1|B2
    w1: float  # exterior of bubble 1
    w2: float  # exterior of bubble 2

    def __post_init__(self):
        ws = (self.w0, self.w1, self.w2)
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise DomainError(f"weights must be finite and nonnegative, got {ws}")
        if all(w == 0 for w in ws):
            raise DomainError("weights must not all be zero")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w0, self.w1, self.w2)

    def scaled(self, c: float) -> "WeightTriple":
        return WeightTriple(c * self.w0, c * self.w1, c * self.w2)

    def swapped(self) -> "WeightTriple":
        return WeightTriple(self.w0, self.w2, self.w1)

    def for_pair(self, a: Label, b: Label) -> float:
        return self.as_tuple()[PIECE_INDEX[piece_of(a, b)]]


_WEIGHT_EQ_RTOL = 1e-12


def _weight_margins(w: WeightTriple) -> dict[str, float]:
    """Slack of each triangle inequality; negative means violated."""
    w0, w1, w2 = w.as_tuple()
    return {
        "INTERFACE": w1 + w2 - w0,
        "NESTED_1": w2 + w0 - w1,
        "NESTED_2": w1 + w0 - w2,
    }


def binding_inequality(w: WeightTriple) -> str | None:
    """Name of the triangle inequality that fails or holds with equality.

    ``INTERFACE`` means w0 >= w1 + w2; ``NESTED_i`` means w_i >= w_j + w0.
    Returns None for strict weights.  When several hold with equality the
    interface case wins, then bubble 1.
    """
    scale = max(w.as_tuple())
    for name, slack in _weight_margins(w).items():
        if slack <= _WEIGHT_EQ_RTOL * scale:
            return name
    return None


def classify_weights(w: WeightTriple) -> WeightClass:
    scale = max(w.as_tuple())
    name = binding_inequality(w)
    if name is None:
        return WeightClass.STRICT
    if abs(_weight_margins(w)[name]) <= _WEIGHT_EQ_RTOL * scale:
        return WeightClass.BOUNDARY
    return {
        "INTERFACE": WeightClass.INTERFACE_DOMINANT,
        "NESTED_1": WeightClass.NESTED_1,
        "NESTED_2": WeightClass.NESTED_2,
    }[name]


def piece_of(a: Label, b: Label) -> str:
    pair = {Label(a), Label(b)}
    if pair == {Label.B1, Label.EXT}:
        return "ext1"
    if pair == {Label.B2, Label.EXT}:
        return "ext2"
    if pair == {Label.B1, Label.B2}:
        return "int"
    raise DomainError(f"no surface piece separates {a} from {b}")


PIECE_INDEX = {"int": 0, "ext1": 1, "ext2": 2}


def _sinc(z):
    return np.sinc(np.asarray(z) / np.pi)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2 * math.pi)
    if a <= -math.pi:
        a += 2 * math.pi
    elif a > math.pi:
        a -= 2 * math.pi
    return a


def chord_param(p, q, k: float, major: bool = False) -> tuple[float, float]:
    """(start tangent angle, arc length) of the arc of curvature ``k`` from
    p to q; ``major`` selects the arc sweeping more than pi."""
    d = math.hypot(q[0] - p[0], q[1] - p[1])
    gamma = math.atan2(q[1] - p[1], q[0] - p[0])
    if k == 0.0:
        return gamma, d
    z = min(0.5 * d * abs(k), 1.0)
    half = math.asin(z)
    if major:
        half = math.pi - half
        length = 2.0 * half / abs(k)
    else:
        length = d * (half / z if z > 1e-8 else 1.0 + z * z / 6.0)
    return gamma - math.copysign(half, k), length


@dataclass(frozen=True)
class MeridianEdge:
    p: tuple[float, float]
    q: tuple[float, float]
    curvature: float
    left: Label
    right: Label
    major: bool = False  # arc sweeps more than pi

    def __post_init__(self):
        object.__setattr__(self, "p", (float(self.p[0]), float(self.p[1])))
        object.__setattr__(self, "q", (float(self.q[0]), float(self.q[1])))
        object.__setattr__(self, "curvature", float(self.curvature))
        object.__setattr__(self, "left", Label(self.left))
        object.__setattr__(self, "right", Label(self.right))

    @property
    def kind(self) -> str:
        return "SEGMENT" if self.curvature == 0.0 else "ARC"

    @classmethod
    def from_start(cls, p, phi: float, kappa: float, length: float,
                   left, right) -> "MeridianEdge":
        """Edge leaving ``p`` with tangent angle ``phi``, curvature ``kappa``."""
        half = 0.5 * kappa * length
        c = length * float(_sinc(half))
        q = (p[0] + c * math.cos(phi + half), p[1] + c * math.sin(phi + half))
        edge = cls(p, q, kappa, left, right, major=abs(kappa * length) > math.pi)
        # keep the exact parametrisation rather than re-deriving it from the chord
        edge.__dict__["_param"] = (float(phi), float(length))
        return edge

    @property
    def chord(self) -> float:
        return math.hypot(self.q[0] - self.p[0], self.q[1] - self.p[1])

    @property
    def consistent(self) -> bool:
        """The chord fits on a circle of the given curvature."""
        return self.chord * abs(self.curvature) <= 2.0 * (1 + 1e-9)

    @cached_property
    def _param(self) -> tuple[float, float]:
        return chord_param(self.p, self.q, self.curvature, self.major)

    @property
    def start_angle(self) -> float:
        return self._param[0]

    @property
    def length(self) -> float:
        return self._param[1]

    @property
    def sweep(self) -> float:
        return self.curvature * self.length

    @property
    def end_angle(self) -> float:
        return self.start_angle + self.sweep

    def point(self, s):
        """Points at arc length ``s`` from p (vectorised)."""
        s = np.asarray(s, dtype=float)
        phi, _ = self._param
        half = 0.5 * self.curvature * s
        c = s * _sinc(half)
        return (self.p[0] + c * np.cos(phi + half),
                self.p[1] + c * np.sin(phi + half))

    def tangent_angle(self, s):
        return self.start_angle + self.curvature * np.asarray(s, dtype=float)

    def sample(self, m: int = 65) -> np.ndarray:
        x, y = self.point(np.linspace(0.0, self.length, m))
        return np.column_stack([x, y])

    def reversed(self) -> "MeridianEdge":
        e = MeridianEdge(self.q, self.p, -self.curvature, self.right, self.left, self.major)
        phi, length = self._param
        e.__dict__["_param"] = (phi + self.sweep + math.pi, length)
        return e

    def scaled(self, lam: float) -> "MeridianEdge":
        e = MeridianEdge((lam * self.p[0], lam * self.p[1]), (lam * self.q[0], lam * self.q[1]),
                         self.curvature / lam, self.left, self.right, self.major)
        phi, length = self._param
        e.__dict__["_param"] = (phi, lam * length)
        return e

    def translated(self, dx: float) -> "MeridianEdge":
        e = MeridianEdge((self.p[0] + dx, self.p[1]), (self.q[0] + dx, self.q[1]),
                         self.curvature, self.left, self.right, self.major)
        e.__dict__["_param"] = self._param
        return e

    def axis_mirrored(self) -> "MeridianEdge":
        """Reflection x -> -x (orientation reverses, so labels swap sides)."""
        e = MeridianEdge((-self.p[0], self.p[1]), (-self.q[0], self.q[1]),
                         -self.curvature, self.right, self.left, self.major)
        phi, length = self._param
        e.__dict__["_param"] = (math.pi - phi, length)
        return e

    def relabeled(self, mapping: dict) -> "MeridianEdge":
        e = MeridianEdge(self.p, self.q, self.curvature,
                         mapping.get(self.left, self.left),
                         mapping.get(self.right, self.right), self.major)
        e.__dict__["_param"] = self._param
        return e

    @property
    def piece(self) -> str:
        return piece_of(self.left, self.right)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "p": list(self.p),
            "q": list(self.q),
            "curvature": self.curvature,
            "left": self.left.value,
            "right": self.right.value,
        }
        if self.major:
            d["major"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MeridianEdge":
        kind = d.get("kind", "ARC")
        k = float(d.get("curvature", 0.0))
        if kind == "SEGMENT" and k != 0.0:
            raise DomainError("SEGMENT edge with nonzero curvature")
        if kind not in ("ARC", "SEGMENT"):
            raise DomainError(f"unknown edge kind {kind!r}")
        return cls(tuple(d["p"]), tuple(d["q"]), k, d["left"], d["right"],
                   bool(d.get("major", False)))


def edge_integrals(edges, integrand) -> np.ndarray:
    """Integrate ``integrand(x, y, phi)`` d(arc length) along every edge.

    Composite Gauss-Legendre with panels no wider than
    ``EDGE_MAX_PANEL_SWEEP`` in turning angle; integrands here are
    trigonometric polynomials along arcs, so this is exact to roundoff.
    """
    if not edges:
        return np.zeros(0)
    phi0 = np.array([e.start_angle for e in edges])
    kap = np.array([e.curvature for e in edges])
    length = np.array([e.length for e in edges])
    px = np.array([e.p[0] for e in edges])
    py = np.array([e.p[1] for e in edges])
    panels = np.maximum(1, np.ceil(np.abs(kap * length) / EDGE_MAX_PANEL_SWEEP)).astype(int)
    owner = np.repeat(np.arange(len(edges)), panels)
    first = np.cumsum(panels) - panels
    k = np.arange(owner.size) - first[owner]
    h = length[owner] / panels[owner]
    xg, wg = gl_rule(EDGE_GL_ORDER)
    s = (k[:, None] + 0.5 * (1.0 + xg[None, :])) * h[:, None]
    kk = kap[owner][:, None]
    ph = phi0[owner][:, None]
    half = 0.5 * kk * s
    c = s * _sinc(half)
    x = px[owner][:, None] + c * np.cos(ph + half)
    y = py[owner][:, None] + c * np.sin(ph + half)
    vals = integrand(x, y, ph + kk * s)
    per_panel = 0.5 * h * (vals @ wg)
    return np.bincount(owner, weights=per_panel, minlength=len(edges))


@dataclass(frozen=True)
class GeneratingNetwork:
    dimension: int
    edges: tuple[MeridianEdge, ...]
    weights: WeightTriple | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        check_dimension(self.dimension)
        object.__setattr__(self, "edges", tuple(self.edges))

    # --- measures -----------------------------------------------------
    @cached_property
    def _volume_terms(self) -> np.ndarray:
        n = self.dimension
        return edge_integrals(self.edges, lambda x, y, phi: y ** (n - 1) * np.cos(phi))

    @cached_property
    def edge_areas(self) -> np.ndarray:
        """Unweighted (n-1)-area generated by each edge."""
        n = self.dimension
        c = (n - 1) * unit_ball_volume(n - 1)
        return c * edge_integrals(self.edges, lambda x, y, phi: y ** (n - 2))

    def volume(self, label) -> float:
        label = Label(label)
        if label is Label.EXT:
            raise DomainError("the exterior region is unbounded")
        total = 0.0
        for e, t in zip(self.edges, self._volume_terms):
            if e.left is label:
                total += t
            if e.right is label:
                total -= t
        return -unit_ball_volume(self.dimension - 1) * total

    def volumes(self) -> tuple[float, float]:
        return self.volume(Label.B1), self.volume(Label.B2)

    def piece_areas(self) -> dict[str, float]:
        out = {"ext1": 0.0, "ext2": 0.0, "int": 0.0}
        for e, a in zip(self.edges, self.edge_areas):
            out[e.piece] += float(a)
        return out

    # --- transforms ---------------------------------------------------
    def scaled(self, lam: float) -> "GeneratingNetwork":
        return GeneratingNetwork(self.dimension, [e.scaled(lam) for e in self.edges],
                                 self.weights, dict(self.meta))

    def with_weights(self, w: WeightTriple | None) -> "GeneratingNetwork":
        return GeneratingNetwork(self.dimension, self.edges, w, dict(self.meta))

    def axis_mirrored(self) -> "GeneratingNetwork":
        return GeneratingNetwork(self.dimension, [e.axis_mirrored() for e in self.edges],
                                 self.weights, dict(self.meta))

    def swapped_labels(self) -> "GeneratingNetwork":
        """Exchange B1 and B2 (weights swap w1 <-> w2 accordingly)."""
        m = {Label.B1: Label.B2, Label.B2: Label.B1}
        w = self.weights.swapped() if self.weights else None
        return GeneratingNetwork(self.dimension, [e.relabeled(m) for e in self.edges],
                                 w, dict(self.meta))

    # --- serialisation --------------------------------------------------
    def to_dict(self) -> dict:
        d = {"dimension": self.dimension}
        if self.weights is not None:
            d["weights"] = list(self.weights.as_tuple())
        d["edges"] = [e.to_dict() for e in self.edges]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratingNetwork":
        if not isinstance(d, dict):
            raise DomainError("network file must hold a JSON object")
        try:
            w = d.get("weights")
            weights = WeightTriple(*map(float, w)) if w is not None else None
            edges = [MeridianEdge.from_dict(e) for e in d["edges"]]
            return cls(int(d["dimension"]), edges, weights)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed network: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def load(cls, path) -> "GeneratingNetwork":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed network file: {exc}") from exc
        return cls.from_dict(data)


def volume(net: GeneratingNetwork, label) -> float:
    return net.volume(label)


def weighted_area(net: GeneratingNetwork, w: WeightTriple | None = None) -> dict[str, float]:
    """Per-piece unweighted areas and the weighted total ``Q``."""
    w = w or net.weights
    if w is None:
        raise DomainError("weights required")
    a = net.piece_areas()
    return {
        "A_ext1": a["ext1"],
        "A_ext2": a["ext2"],
        "A_int": a["int"],
        "Q": w.w1 * a["ext1"] + w.w2 * a["ext2"] + w.w0 * a["int"],
    }


def junction_residual(net: GeneratingNetwork, w: WeightTriple | None = None) -> list[float]:
    """|sum of weighted unit tangents| at every degree-3 node off the axis."""
    from .topology import node_table

    w = w or net.weights
    if w is None:
        raise DomainError("weights required")
    table = node_table(net)
    out = []
    for node in table.nodes:
        if node.on_axis or node.degree < 3:
            continue
        if node.degree != 3:
            raise StructuralError(
                f"junction at ({node.x:.6g}, {node.y:.6g}) has degree {node.degree}; "
                "only triple junctions are allowed")
        vec = np.zeros(2)
        for edge_index, forward in node.incident:
            e = net.edges[edge_index]
            ang = e.start_angle if forward else e.end_angle + math.pi
            vec += w.for_pair(e.left, e.right) * np.array([math.cos(ang), math.sin(ang)])
        out.append(float(np.hypot(*vec)))
    return out


def arc_to_axis(x: float, y: float, delta: float, left, right) -> MeridianEdge:
    """Arc from (x, y) to the axis, meeting it at a right angle.

    ``delta`` in (-pi, pi) is the turn of the start tangent away from
    straight down (counterclockwise positive).  The arc lies on the circle
    centred on the axis at x - y*cot(delta); it is the segment straight
    down when delta = 0.
    """
    if not -math.pi < delta < math.pi:
        raise DomainError(f"delta must lie in (-pi, pi), got {delta!r}")
    if y <= 0:
        raise DomainError("arc must start above the axis")
    kappa = -math.sin(delta) / y
    length = y if delta == 0.0 else y * delta / math.sin(delta)
    q = (x + y * math.tan(0.5 * delta), 0.0)
    e = MeridianEdge((x, y), q, kappa, left, right, False)
    e.__dict__["_param"] = (delta - 0.5 * math.pi, length)
    return e


def semicircle(center: float, r: float, inside, outside) -> MeridianEdge:
    """Upper half of the circle of radius r centred on the axis, traversed
    clockwise from its left pole so the enclosed region is on its right."""
    e = MeridianEdge((center - r, 0.0), (center + r, 0.0), -1.0 / r, outside, inside, False)
    e.__dict__["_param"] = (0.5 * math.pi, math.pi * r)
    return e
