"""Planar bisection, quartering and angular stretching.

A region is a list of counterclockwise loops of arcs and segments.  Areas
of clipped pieces use Green's theorem about a point on the clipping line,
so the closing chords along the line contribute nothing and never need to
be built.

The certificate pipeline: cut the region in half by area with a line,
keep the half with the shorter boundary, cut that half in half with the
perpendicular line, keep the shorter quarter, stretch its polar angle
about the corner by 2 and reflect.  The result encloses the same area
with at most the same perimeter, and strictly less unless the quarter's
boundary is a circular arc about the corner.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .profile import _sinc, chord_param, edge_integrals

SAMPLE_SWEEP = math.pi / 8


@dataclass(frozen=True)
class PlanarArc:
    """Arc leaving ``p`` with tangent angle ``phi``; segment when kappa = 0."""

    p: tuple[float, float]
    phi: float
    curvature: float
    length: float

    @classmethod
    def through(cls, p, q, curvature: float = 0.0, major: bool = False) -> "PlanarArc":
        phi, length = chord_param(p, q, curvature, major)
        return cls((float(p[0]), float(p[1])), phi, float(curvature), length)

    @property
    def start_angle(self) -> float:
        return self.phi

    @property
    def end_angle(self) -> float:
        return self.phi + self.curvature * self.length

    def point(self, s):
        s = np.asarray(s, dtype=float)
        half = 0.5 * self.curvature * s
        c = s * _sinc(half)
        return self.p[0] + c * np.cos(self.phi + half), self.p[1] + c * np.sin(self.phi + half)

    @property
    def q(self) -> tuple[float, float]:
        x, y = self.point(self.length)
        return float(x), float(y)

    def tangent_angle(self, s):
        return self.phi + self.curvature * np.asarray(s, dtype=float)

    def sub(self, s0: float, s1: float) -> "PlanarArc":
        x, y = self.point(s0)
        return PlanarArc((float(x), float(y)), float(self.tangent_angle(s0)), self.curvature, s1 - s0)

    def sample(self, m: int | None = None) -> np.ndarray:
        if m is None:
            m = 2 if self.curvature == 0 else int(np.ceil(abs(self.curvature * self.length) / (math.pi / 64))) + 2
        x, y = self.point(np.linspace(0.0, self.length, m))
        return np.column_stack([x, y])

    def to_dict(self) -> dict:
        d = {"kind": "SEGMENT" if self.curvature == 0 else "ARC",
             "p": list(self.p), "q": list(self.q), "curvature": self.curvature}
        if abs(self.curvature * self.length) > math.pi:
            d["major"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PlanarArc":
        try:
            k = float(d.get("curvature", 0.0))
            if d.get("kind", "ARC") == "SEGMENT" and k != 0:
                raise DomainError("SEGMENT with nonzero curvature")
            return cls.through(tuple(map(float, d["p"])), tuple(map(float, d["q"])), k,
                               bool(d.get("major", False)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed edge: {exc}") from exc


def _green(edges, origin=(0.0, 0.0)) -> float:
    """Signed area swept about ``origin``: half the integral of x dy - y dx."""
    if not edges:
        return 0.0
    ox, oy = origin
    vals = edge_integrals(list(edges), lambda x, y, phi: 0.5 * ((x - ox) * np.sin(phi)
                                                                - (y - oy) * np.cos(phi)))
    return float(np.sum(vals))


def _length(edges) -> float:
    return float(sum(e.length for e in edges))


@dataclass(frozen=True)
class PlanarRegion:
    loops: tuple[tuple[PlanarArc, ...], ...]

    def __post_init__(self):
        loops = tuple(tuple(l) for l in self.loops)
        object.__setattr__(self, "loops", loops)
        if not loops or any(not l for l in loops):
            raise DomainError("region needs at least one nonempty loop")
        for k, loop in enumerate(loops):
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if math.dist(a.q, b.p) > 1e-9 * max(1.0, abs(a.q[0]), abs(a.q[1])):
                    raise DomainError(f"loop {k} is not closed")
        if self.area <= 0:
            raise DomainError("region must have positive area (counterclockwise loops)")

    @property
    def edges(self) -> list[PlanarArc]:
        return [e for loop in self.loops for e in loop]

    @property
    def area(self) -> float:
        return _green(self.edges)

    @property
    def perimeter(self) -> float:
        return _length(self.edges)

    @property
    def centroid(self) -> tuple[float, float]:
        a = self.area
        mx = edge_integrals(self.edges, lambda x, y, phi: 0.5 * x * x * np.sin(phi)).sum()
        my = edge_integrals(self.edges, lambda x, y, phi: -0.5 * y * y * np.cos(phi)).sum()
        return float(mx / a), float(my / a)

    def to_dict(self) -> dict:
        return {"loops": [[e.to_dict() for e in loop] for loop in self.loops]}

    @classmethod
    def from_dict(cls, d: dict) -> "PlanarRegion":
        try:
            loops = d["loops"]
        except (KeyError, TypeError) as exc:
            raise DomainError("region file needs a 'loops' list") from exc
        return cls([[PlanarArc.from_dict(e) for e in loop] for loop in loops])

    @classmethod
    def load(cls, path) -> "PlanarRegion":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed region file: {exc}") from exc


# --- builders -------------------------------------------------------------------
def disk(center=(0.0, 0.0), r: float = 1.0) -> PlanarRegion:
    cx, cy = center
    a = PlanarArc((cx + r, cy), 0.5 * math.pi, 1.0 / r, math.pi * r)
    b = PlanarArc((cx - r, cy), -0.5 * math.pi, 1.0 / r, math.pi * r)
    return PlanarRegion([[a, b]])


def polygon(points) -> PlanarRegion:
    pts = [tuple(map(float, p)) for p in points]
    return PlanarRegion([[PlanarArc.through(p, q) for p, q in zip(pts, pts[1:] + pts[:1])]])


def ellipse(a: float = 2.0, b: float = 1.0, center=(0.0, 0.0), segments: int = 4096) -> PlanarRegion:
    """Inscribed polygon of the ellipse with semi-axes a, b."""
    t = np.linspace(0.0, 2 * math.pi, segments, endpoint=False)
    return polygon(np.column_stack([center[0] + a * np.cos(t), center[1] + b * np.sin(t)]))


def union(*regions: PlanarRegion) -> PlanarRegion:
    return PlanarRegion([loop for r in regions for loop in r.loops])


# --- clipping -------------------------------------------------------------------
@dataclass(frozen=True)
class BisectionLine:
    """The line {x : normal . x = offset}."""

    normal: tuple[float, float]
    offset: float

    @property
    def point(self) -> tuple[float, float]:
        return (self.offset * self.normal[0], self.offset * self.normal[1])

    def to_dict(self) -> dict:
        return {"normal": list(self.normal), "offset": self.offset}


class EdgeSet:
    """Segments as arrays plus a short list of true arcs, for fast clipping."""

    def __init__(self, segs: np.ndarray, arcs: list[PlanarArc]):
        self.segs = segs.reshape(-1, 2, 2)
        self.arcs = arcs

    @classmethod
    def of(cls, edges) -> "EdgeSet":
        segs = [(e.p, e.q) for e in edges if e.curvature == 0.0]
        arcs = [e for e in edges if e.curvature != 0.0]
        return cls(np.array(segs, dtype=float).reshape(-1, 2, 2), arcs)

    def edges(self) -> list[PlanarArc]:
        return [PlanarArc.through(tuple(p), tuple(q)) for p, q in self.segs] + list(self.arcs)

    def length(self) -> float:
        seg = float(np.sum(np.hypot(*(self.segs[:, 1] - self.segs[:, 0]).T))) if len(self.segs) else 0.0
        return seg + _length(self.arcs)

    def green(self, origin) -> float:
        o = np.asarray(origin, dtype=float)
        total = _green(self.arcs, origin)
        if len(self.segs):
            p = self.segs[:, 0] - o
            q = self.segs[:, 1] - o
            total += 0.5 * float(np.sum(p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]))
        return total

    def clip(self, v, c: float, keep_below: bool = True) -> "EdgeSet":
        sign = 1.0 if keep_below else -1.0
        segs = self.segs
        if len(segs):
            d0 = sign * (segs[:, 0] @ np.asarray(v) - c)
            d1 = sign * (segs[:, 1] @ np.asarray(v) - c)
            with np.errstate(invalid="ignore", divide="ignore"):
                t = d0 / (d0 - d1)
                cut = segs[:, 0] + t[:, None] * (segs[:, 1] - segs[:, 0])
            inside = (d0 <= 0) & (d1 <= 0)
            enter = (d0 > 0) & (d1 < 0)
            leave = (d0 < 0) & (d1 > 0)
            kept = np.concatenate([
                segs[inside & ~((d0 == 0) & (d1 == 0))],
                np.stack([cut[enter], segs[enter, 1]], axis=1),
                np.stack([segs[leave, 0], cut[leave]], axis=1),
            ])
        else:
            kept = segs
        arcs = []
        for e in self.arcs:
            cuts = [0.0] + _arc_crossings(e, v, c) + [e.length]
            for s0, s1 in zip(cuts, cuts[1:]):
                if s1 - s0 <= 0:
                    continue
                x, y = e.point(0.5 * (s0 + s1))
                if sign * (v[0] * x + v[1] * y - c) < 0:
                    arcs.append(e if (s0 == 0.0 and s1 == e.length) else e.sub(s0, s1))
        return EdgeSet(kept, arcs)

    def projection_range(self, v) -> tuple[float, float]:
        vals = [self.segs.reshape(-1, 2) @ np.asarray(v)]
        for e in self.arcs:
            vals.append(np.array(_arc_extent(e, v)))
        vals = np.concatenate(vals)
        return float(vals.min()), float(vals.max())


def _arc_extent(e: PlanarArc, v) -> tuple[float, float]:
    """Exact range of v.x over the arc: endpoints plus interior extremes."""
    p, q = np.asarray(e.p) @ np.asarray(v), np.asarray(e.q) @ np.asarray(v)
    lo, hi = min(p, q), max(p, q)
    k = e.curvature
    if k == 0:
        return lo, hi
    r = 1.0 / abs(k)
    cx = e.p[0] - math.sin(e.phi) / k
    cy = e.p[1] + math.cos(e.phi) / k
    mid = v[0] * cx + v[1] * cy
    # tangent angle t is extremal where the tangent is perpendicular to v
    alpha = math.atan2(v[1], v[0])
    a, b = sorted((e.phi, e.phi + k * e.length))
    for target in (alpha + 0.5 * math.pi, alpha - 0.5 * math.pi):
        j = math.ceil((a - target) / (2 * math.pi))
        if target + 2 * math.pi * j <= b:
            # the point with this tangent lies at centre + r*(sin t, -cos t)*sign(k)
            t = target
            val = mid + math.copysign(r, k) * (v[0] * math.sin(t) - v[1] * math.cos(t))
            lo, hi = min(lo, val), max(hi, val)
    return lo, hi


def _arc_crossings(e: PlanarArc, v, c: float) -> list[float]:
    """Sorted arc-length positions in (0, L) where e meets v.x = c."""
    k = e.curvature
    r = 1.0 / abs(k)
    # centre, and the angle of the radius vector as a function of s
    cx = e.p[0] - math.sin(e.phi) / k
    cy = e.p[1] + math.cos(e.phi) / k
    alpha = math.atan2(v[1], v[0])
    psi0 = e.phi - math.copysign(0.5 * math.pi, k) - alpha
    q = (c - (v[0] * cx + v[1] * cy)) / r
    if abs(q) > 1:
        return []
    a = math.acos(q)
    lo, hi = sorted((psi0, psi0 + k * e.length))
    out = []
    for base in (a, -a):
        m = math.ceil((lo - base) / (2 * math.pi))
        while base + 2 * math.pi * m <= hi:
            s = (base + 2 * math.pi * m - psi0) / k
            if 0.0 < s < e.length:
                out.append(s)
            m += 1
    return sorted(set(out))


def clip(edges, v, c: float, keep_below: bool = True) -> list[PlanarArc]:
    """Pieces of ``edges`` on the side v.x <= c (or >= c)."""
    return EdgeSet.of(edges).clip(v, c, keep_below).edges()


def _on_line(edges, v, c: float, tol: float) -> float:
    """Length of boundary lying on the line v.x = c."""
    total = 0.0
    for e in edges:
        if e.curvature != 0.0:
            continue
        d0 = v[0] * e.p[0] + v[1] * e.p[1] - c
        d1 = v[0] * e.q[0] + v[1] * e.q[1] - c
        if abs(d0) <= tol and abs(d1) <= tol:
            total += e.length
    return total


def _line_meet(v, c, u, d) -> tuple[float, float]:
    det = v[0] * u[1] - v[1] * u[0]
    return ((c * u[1] - d * v[1]) / det, (v[0] * d - u[0] * c) / det)


def _area_below(es: EdgeSet, v, c: float, constraint=None) -> float:
    """Area of region ∩ {v.x <= c} (∩ the constraint half-plane), taken
    about a point on the cutting line(s)."""
    if constraint is None:
        return es.clip(v, c, True).green((c * v[0], c * v[1]))
    u, d, _ = constraint
    return es.clip(v, c, True).green(_line_meet(v, c, u, d))


def _half_line(es: EdgeSet, v, constraint=None, reference: float = 0.0,
               tol: float = 1e-14) -> float:
    """Offset c of the area-halving line normal to v nearest ``reference``.

    ``es`` must already be clipped to ``constraint`` when one is given.
    """
    lo, hi = es.projection_range(v)
    span = hi - lo
    lo -= 1e-9 * span + 1e-12
    hi += 1e-9 * span + 1e-12
    half = 0.5 * _area_below(es, v, hi, constraint)
    slack = 1e-12 * half
    xtol = tol * max(1.0, span)

    def g(c):
        return _area_below(es, v, c, constraint) - half

    c0 = brentq(g, lo, hi, xtol=xtol, rtol=1e-15)
    ref = min(max(reference, lo), hi)
    if ref > c0:
        if g(ref) <= slack:
            return ref
        return brentq(lambda c: g(c) - slack, c0, ref, xtol=xtol, rtol=1e-15)
    if ref < c0:
        if g(ref) >= -slack:
            return ref
        return brentq(lambda c: g(c) + slack, ref, c0, xtol=xtol, rtol=1e-15)
    return c0


def _unit(direction) -> tuple[float, float]:
    v = np.asarray(direction, dtype=float)
    nrm = float(np.hypot(*v))
    if not nrm > 0:
        raise DomainError("direction must be nonzero")
    return float(v[0] / nrm), float(v[1] / nrm)


def bisect_single(region: PlanarRegion, direction, reference=None) -> BisectionLine:
    """Line normal to ``direction`` halving the area of ``region``.

    When a whole interval of offsets halves the area (a gap between
    components), the one closest to ``reference`` (default: the centroid)
    is returned.
    """
    v = _unit(direction)
    ref = region.centroid if reference is None else reference
    c = _half_line(EdgeSet.of(region.edges), v, reference=v[0] * ref[0] + v[1] * ref[1])
    return BisectionLine(v, c)


def _imbalance(r1: PlanarRegion, r2: PlanarRegion, angle: float, refs) -> float:
    v = (math.cos(angle), math.sin(angle))
    line = bisect_single(r1, v, refs[0])
    return _area_below(EdgeSet.of(r2.edges), v, line.offset) - 0.5 * r2.area


def bisect_double(r1: PlanarRegion, r2: PlanarRegion, samples: int = 720,
                  xtol: float = 1e-10) -> BisectionLine:
    """A line halving both regions (the discrete ham sandwich cut)."""
    refs = (r1.centroid,)
    angles = np.linspace(0.0, math.pi, samples + 1)
    vals = [_imbalance(r1, r2, a, refs) for a in angles]
    scale = r2.area
    root = None
    for k, val in enumerate(vals):
        if abs(val) <= 1e-13 * scale:
            root = float(angles[k])
            break
        if k and vals[k - 1] * val < 0:
            root = brentq(lambda a: _imbalance(r1, r2, a, refs), angles[k - 1], angles[k],
                          xtol=xtol, rtol=1e-15)
            break
    if root is None:
        raise DomainError("no sign change of the imbalance (degenerate regions)")
    return bisect_single(r1, (math.cos(root), math.sin(root)), refs[0])


# --- angular stretch --------------------------------------------------------------
@dataclass(frozen=True)
class StretchResult:
    length_before: float
    length_after: float
    area_before: float
    area_after: float
    image: np.ndarray = field(repr=False, compare=False)

    @property
    def length_factor(self) -> float:
        return self.length_after / self.length_before

    @property
    def area_factor(self) -> float:
        return self.area_after / self.area_before if self.area_before else math.nan


def _stretched_length(edges, origin, k: float) -> float:
    ox, oy = origin

    def speed(x, y, phi):
        px, py = x - ox, y - oy
        r = np.hypot(px, py)
        dot = px * np.cos(phi) + py * np.sin(phi)
        crs = px * np.sin(phi) - py * np.cos(phi)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.sqrt(dot ** 2 + k * k * crs ** 2) / r
        return np.where(r > 0, out, 1.0)

    return float(np.sum(edge_integrals(list(edges), speed)))


def _stretched_area(edges, origin, k: float) -> float:
    # d(k theta) = k d(theta), so the swept area scales pointwise by k
    ox, oy = origin
    vals = edge_integrals(list(edges), lambda x, y, phi: 0.5 * k * ((x - ox) * np.sin(phi)
                                                                    - (y - oy) * np.cos(phi)))
    return float(np.sum(vals))


def angular_stretch(edges, k: float = 2.0, origin=(0.0, 0.0), start: float = 0.0,
                    samples: int = 64) -> StretchResult:
    """Apply (r, theta) -> (r, start + k (theta - start)) about ``origin``.

    The input must lie in the sector [start, start + pi/k].  ``area`` is the
    area swept by the curve about the origin (the enclosed area when the
    curve closes up through the origin along the sector's rays).
    """
    if isinstance(edges, PlanarRegion):
        edges = edges.edges
    edges = list(edges)
    if k < 1:
        raise DomainError("stretch factor must be at least 1")
    ox, oy = origin
    pts = np.vstack([e.sample(samples) for e in edges]) - np.array([ox, oy])
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.mod(np.arctan2(pts[:, 1], pts[:, 0]) - start + 1e-12, 2 * math.pi) - 1e-12
    width = math.pi / k
    if np.any((r > 1e-12) & ((theta < -1e-9) | (theta > width + 1e-9))):
        raise DomainError(f"curve leaves the sector of width pi/{k:g}; the image would overlap")
    new_t = start + k * np.clip(theta, 0.0, width)
    image = np.column_stack([ox + r * np.cos(new_t), oy + r * np.sin(new_t)])
    return StretchResult(_length(edges), _stretched_length(edges, origin, k),
                         _green(edges, origin), _stretched_area(edges, origin, k), image)


# --- certificate --------------------------------------------------------------------
@dataclass
class SymmetrizationCertificate:
    area_before: float
    area_after: float
    perimeter_before: float
    perimeter_after: float
    strict: bool
    first_line: BisectionLine
    second_line: BisectionLine
    degenerate: bool
    quarter_perimeter: float

    def to_dict(self) -> dict:
        return {"area_before": self.area_before, "area_after": self.area_after,
                "perimeter_before": self.perimeter_before,
                "perimeter_after_pipeline": self.perimeter_after, "strict": self.strict,
                "first_line": self.first_line.to_dict(),
                "second_line": self.second_line.to_dict(),
                "boundary_on_bisector": self.degenerate,
                "quarter_perimeter": self.quarter_perimeter}


def symmetrize_certificate(region: PlanarRegion, direction=(0.0, 1.0),
                           rtol: float = 1e-9) -> SymmetrizationCertificate:
    edges = region.edges
    es = EdgeSet.of(edges)
    area, perim = region.area, region.perimeter
    scale = math.sqrt(area)
    v1 = _unit(direction)
    line1 = bisect_single(region, v1)
    halves = [(es.clip(v1, line1.offset, b), b) for b in (True, False)]
    half, below1 = min(halves, key=lambda hb: hb[0].length())

    v2 = (-v1[1], v1[0])
    cen = region.centroid
    c2 = _half_line(half, v2, (v1, line1.offset, below1),
                    reference=v2[0] * cen[0] + v2[1] * cen[1])
    line2 = BisectionLine(v2, c2)
    quarters = [(half.clip(v2, c2, b), b) for b in (True, False)]
    quarter, below2 = min(quarters, key=lambda qb: qb[0].length())
    quarter = quarter.edges()

    corner = _line_meet(v2, c2, v1, line1.offset)
    # rays from the corner bounding the quarter
    d1 = np.array(v2) * (-1.0 if below2 else 1.0)
    d2 = np.array(v1) * (-1.0 if below1 else 1.0)
    e1, e2 = (d1, d2) if d1[0] * d2[1] - d1[1] * d2[0] > 0 else (d2, d1)
    start = math.atan2(e1[1], e1[0])
    st = angular_stretch(quarter, 2.0, corner, start)
    area_after = 2.0 * st.area_after
    perim_after = 2.0 * st.length_after
    tol = 1e-9 * scale
    degenerate = (_on_line(edges, v1, line1.offset, tol) > 0
                  or _on_line(edges, v2, c2, tol) > 0)
    return SymmetrizationCertificate(area, area_after, perim, perim_after,
                                     perim_after < perim * (1 - rtol), line1, line2,
                                     degenerate, _length(quarter))
