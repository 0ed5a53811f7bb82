"""Gauss images of revolved exteriors: sleeves, cuffs, antennae, and the
coverage audit built on them.

The outward unit normal of a revolved meridian edge at a point with
meridian normal (n_x, n_y) sweeps the latitude at polar angle
arccos(n_x) of the unit (n-1)-sphere.  A sleeve is the polar-angle zone
swept by one smooth exterior component; at a triple junction the two
exterior normals jump, and consecutive sleeves overlap in a cuff.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .instance import ProblemInstance
from .profile import GeneratingNetwork, Label, MeridianEdge, WeightTriple, junction_residual
from .spherical import (_check_angle, check_dimension, latitude_measure,
                        unit_ball_volume, zone_area_exact)
from .standard import StandardBubbleGeometry, construct, measured
from .topology import node_table, validate

BALANCE_TOL = 1e-8
VERTICAL_TOL = 1e-12


# --- latitude measure and cuff-area quotients ----------------------------------
def f(n: int, t, exponent: int | None = None):
    """Measure of the latitude (n-2)-sphere at polar angle t."""
    check_dimension(n)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 0) or np.any(ts > math.pi):
        raise DomainError("polar angle must lie in [0, pi]")
    out = latitude_measure(n, ts, exponent)
    return float(out[0]) if np.ndim(t) == 0 else out


def h(n: int, t: float, beta: float, exponent: int | None = None) -> float:
    """Area of the zone [t, t + beta] per unit of its lower boundary f(t)."""
    _check_angle(t, "t")
    if beta <= 0 or t + beta > math.pi + 1e-14:
        raise DomainError(f"need beta > 0 and t + beta <= pi, got t={t!r}, beta={beta!r}")
    base = f(n, t, exponent)
    if base == 0.0:
        raise DomainError("f(t) vanishes at the poles")
    return zone_area_exact(n, t, min(t + beta, math.pi), exponent) / base


def cap_perimeter_for_area(n: int, area: float) -> float:
    """Boundary measure of the spherical cap with the given area."""
    total = n * unit_ball_volume(n)
    if not 0 < area < total:
        raise DomainError(f"area must lie in (0, {total!r}), got {area!r}")
    theta = brentq(lambda th: zone_area_exact(n, 0.0, th) - area, 0.0, math.pi,
                   xtol=1e-15, rtol=1e-15, maxiter=200)
    return f(n, theta)


# --- sleeves, cuffs, antennae ---------------------------------------------------
class Pointing(str, enum.Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    VERTICAL = "VERTICAL"


@dataclass(frozen=True)
class Sleeve:
    t_start: float
    t_end: float
    edges: tuple[int, ...]
    piece: str
    is_end_sleeve: bool

    def area(self, n: int) -> float:
        return zone_area_exact(n, self.t_start, self.t_end)


@dataclass(frozen=True)
class Cuff:
    t: float            # lower angle after reflection, t <= pi - t - beta
    beta: float
    inner_perimeter: float
    lo: float           # raw polar interval of the overlap
    hi: float
    junction: int
    sleeves: tuple[int, int]

    def area(self, n: int) -> float:
        return cuff_area(n, self)


@dataclass(frozen=True)
class Antenna:
    junction: int
    point: tuple[float, float]
    direction: tuple[float, float]
    steepness: float
    pointing: Pointing

    def points(self, side: Pointing) -> bool:
        return self.pointing is Pointing.VERTICAL or self.pointing is side


@dataclass
class SleeveDecomposition:
    dimension: int
    sleeves: list[Sleeve]
    cuffs: list[Cuff]
    antennae: list[Antenna]

    def sleeve_area(self) -> float:
        return sum(s.area(self.dimension) for s in self.sleeves)

    def cuff_area(self) -> float:
        return sum(c.area(self.dimension) for c in self.cuffs)

    def coverage(self) -> float:
        return self.sleeve_area() - self.cuff_area()

    def cuffs_of(self, sleeve: int) -> list[Cuff]:
        return [c for c in self.cuffs if sleeve in c.sleeves]

    def to_dict(self) -> dict:
        return {
            "sleeves": [asdict(s) for s in self.sleeves],
            "cuffs": [asdict(c) for c in self.cuffs],
            "antennae": [{**asdict(a), "pointing": a.pointing.value} for a in self.antennae],
        }


def cuff_area(n: int, cuff: Cuff) -> float:
    return zone_area_exact(n, cuff.t, min(cuff.t + cuff.beta, math.pi))


def _normal_sign(e: MeridianEdge) -> float:
    """+1 if the exterior lies on the left of e, -1 if on the right."""
    if e.left is Label.EXT:
        return 1.0
    if e.right is Label.EXT:
        return -1.0
    raise DomainError("edge does not bound the exterior")


def _normal_angle(e: MeridianEdge, s: float) -> float:
    return float(e.tangent_angle(s)) + math.copysign(0.5 * math.pi, _normal_sign(e))


def _polar(angle: float) -> float:
    return abs(math.remainder(angle, 2 * math.pi))


def _polar_range(a: float, b: float) -> tuple[float, float]:
    """Range of arccos(cos x) for x between a and b."""
    a, b = min(a, b), max(a, b)
    vals = [_polar(a), _polar(b)]
    if math.floor(b / (2 * math.pi)) > math.floor(a / (2 * math.pi)) or a % (2 * math.pi) == 0:
        vals.append(0.0)
    if math.floor((b - math.pi) / (2 * math.pi)) > math.floor((a - math.pi) / (2 * math.pi)):
        vals.append(math.pi)
    return min(vals), max(vals)


def _check_balance(net: GeneratingNetwork, w: WeightTriple) -> None:
    res = junction_residual(net, w)
    scale = max(w.as_tuple())
    if any(r > BALANCE_TOL * scale for r in res):
        raise DomainError(f"junctions out of force balance (max residual {max(res):.3g})")


def sleeves_and_cuffs(net: GeneratingNetwork, w: WeightTriple | None = None,
                      check_balance: bool = True) -> SleeveDecomposition:
    w = w or net.weights
    if w is None:
        raise DomainError("weights required")
    if check_balance:
        _check_balance(net, w)
    table = node_table(net)
    ext = [i for i, e in enumerate(net.edges) if Label.EXT in (e.left, e.right)]
    # merge exterior edges meeting at degree-2 nodes into smooth components
    parent = {i: i for i in ext}

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for node in table.nodes:
        if node.on_axis or node.degree != 2:
            continue
        (i, _), (j, _) = node.incident
        if i in parent and j in parent:
            parent[max(find(i), find(j))] = min(find(i), find(j))
    groups: dict[int, list[int]] = {}
    for i in ext:
        groups.setdefault(find(i), []).append(i)

    sleeves, owner = [], {}
    for members in groups.values():
        lo, hi = math.pi, 0.0
        for i in members:
            e = net.edges[i]
            a, b = _polar_range(_normal_angle(e, 0.0), _normal_angle(e, e.length))
            lo, hi = min(lo, a), max(hi, b)
            owner[i] = len(sleeves)
        end = lo <= 1e-12 or hi >= math.pi - 1e-12
        sleeves.append(Sleeve(lo, hi, tuple(members), net.edges[members[0]].piece, end))

    cuffs, antennae = [], []
    for k, node in enumerate(table.nodes):
        if node.on_axis or node.degree != 3:
            continue
        outer = [(i, fwd) for i, fwd in node.incident if i in parent]
        if len(outer) != 2:
            continue
        polar, tangents = [], []
        for i, fwd in outer:
            e = net.edges[i]
            s = 0.0 if fwd else e.length
            polar.append(_polar(_normal_angle(e, s)))
            ang = e.start_angle if fwd else e.end_angle + math.pi
            tangents.append(np.array([math.cos(ang), math.sin(ang)]))
        lo, hi = sorted(polar)
        beta = hi - lo
        t = min(lo, math.pi - hi)
        cuffs.append(Cuff(t, beta, f(net.dimension, t), lo, hi, k,
                          (owner[outer[0][0]], owner[outer[1][0]])))
        d = tangents[0] + tangents[1]
        d = d / np.hypot(*d)
        side = (Pointing.VERTICAL if abs(d[0]) <= VERTICAL_TOL
                else Pointing.LEFT if d[0] < 0 else Pointing.RIGHT)
        antennae.append(Antenna(k, (node.x, node.y), (float(d[0]), float(d[1])),
                                math.acos(max(-1.0, min(1.0, float(d[0])))), side))
    return SleeveDecomposition(net.dimension, sleeves, cuffs, antennae)


# --- overlap excess ------------------------------------------------------------
def _standard_cuff(M: StandardBubbleGeometry) -> Cuff:
    dec = sleeves_and_cuffs(M.network(), M.weights)
    if len(dec.cuffs) != 1:
        raise DomainError("the matched standard bubble has no single cuff (degenerate weights)")
    return dec.cuffs[0]


def _higher(c: Cuff, ref: Cuff) -> bool:
    return c.t >= ref.t - 1e-12


def overlap_excess(net: GeneratingNetwork, w: WeightTriple | None,
                   M: StandardBubbleGeometry) -> dict:
    """Cuff area of the witnessing double-cuffed sleeve against the
    standard bubble's single cuff K_M."""
    w = w or net.weights
    n = net.dimension
    dec = sleeves_and_cuffs(net, w)
    km = _standard_cuff(M)
    km_area = cuff_area(n, km)
    out = {"competitor_cuff_areas": [cuff_area(n, c) for c in dec.cuffs],
           "standard_cuff_area": km_area, "excess": None, "case": None,
           "route": None, "witness_sleeve": None, "status": "NOT_APPLICABLE",
           "violated": []}
    if len(dec.cuffs) < 2:
        out["violated"].append("fewer than two cuffs")
        return out

    comp = _piece_areas(net)
    ref = measured(M)
    out["violated"] = [k for k in ("A_ext1", "A_ext2", "A_int") if not comp[k] < ref[k]]
    out["status"] = "APPLICABLE" if not out["violated"] else "NOT_APPLICABLE"

    left = all(a.points(Pointing.LEFT) for a in dec.antennae)
    right = all(a.points(Pointing.RIGHT) for a in dec.antennae)
    out["case"] = "SAME_SIDE" if (left or right) else "BOTH_WAYS"
    double = [k for k in range(len(dec.sleeves)) if len(dec.cuffs_of(k)) >= 2]
    if not double:
        raise DomainError("two or more cuffs but no double-cuffed sleeve")
    ant = {a.junction: a for a in dec.antennae}
    if out["case"] == "SAME_SIDE":
        ends = [k for k, s in enumerate(dec.sleeves) if s.is_end_sleeve]
        big = max(ends, key=lambda k: dec.sleeves[k].area(n)) if ends else None

        def adjacency(k):
            return any(big in c.sleeves for c in dec.cuffs_of(k)) if big is not None else False

        witness = sorted(double, key=lambda k: (not adjacency(k), k))[0]
    else:
        def mixed(k):
            sides = {ant[c.junction].pointing for c in dec.cuffs_of(k)}
            return Pointing.VERTICAL in sides or sides == {Pointing.LEFT, Pointing.RIGHT}

        witness = sorted(double, key=lambda k: (not mixed(k), k))[0]
    cuffs = dec.cuffs_of(witness)
    total = sum(cuff_area(n, c) for c in cuffs)
    if any(_higher(c, km) for c in cuffs):
        out["route"] = "HIGHER_CUFF"
    else:
        out["route"] = "PERIMETER"
        out["inner_perimeter_sum"] = sum(c.inner_perimeter for c in cuffs)
        out["cap_perimeter_bound"] = cap_perimeter_for_area(n, km_area)
    out["witness_sleeve"] = witness
    out["witness_cuff_area"] = total
    out["excess"] = total - km_area
    return out


# --- curvature along revolved edges -----------------------------------------------
def _nodes(e: MeridianEdge, m: int = 64):
    s = (np.arange(m) + 0.5) * e.length / m
    x, y = e.point(s)
    return s, np.asarray(x, float), np.asarray(y, float), np.asarray(e.tangent_angle(s), float)


def edge_curvatures(e: MeridianEdge, n: int, m: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """(mean curvature H, Gauss-Kronecker K) at interior sample points of
    an exterior edge, with respect to the outward normal."""
    sgn = _normal_sign(e)
    _, _, y, phi = _nodes(e, m)
    ny = sgn * np.cos(phi)
    km = -e.curvature * sgn
    lat = ny / y
    return km + (n - 2) * lat, km * lat ** (n - 2)


def _piece_areas(net: GeneratingNetwork) -> dict:
    a = net.piece_areas()
    return {"A_ext1": a["ext1"], "A_ext2": a["ext2"], "A_int": a["int"]}


def _edge_integral(e: MeridianEdge, n: int, density) -> float:
    """(n-1) a_{n-1} * integral of density(y, phi) y^(n-2) ds, Gauss-Legendre."""
    from .profile import edge_integrals

    c = (n - 1) * unit_ball_volume(n - 1)
    return c * float(edge_integrals([e], lambda x, y, phi: density(y, phi) * y ** (n - 2))[0])


def _piece_curvature_integrals(net: GeneratingNetwork, piece: str) -> dict:
    n = net.dimension
    kk, amgm, hmax, spread = 0.0, 0.0, 0.0, 0.0
    for e in net.edges:
        if e.piece != piece:
            continue
        sgn = _normal_sign(e)
        km = -e.curvature * sgn

        def absK(y, phi, km=km, sgn=sgn):
            return np.abs(km * (sgn * np.cos(phi) / y) ** (n - 2))

        def bound(y, phi, km=km, sgn=sgn):
            return (np.abs(km + (n - 2) * sgn * np.cos(phi) / y) / (n - 1)) ** (n - 1)

        kk += _edge_integral(e, n, absK)
        amgm += _edge_integral(e, n, bound)
        H, _ = edge_curvatures(e, n)
        hmax = max(hmax, float(np.max(np.abs(H))))
        spread = max(spread, float(np.ptp(H)))
    return {"gauss_kronecker_integral": kk, "amgm_bound": amgm, "H": hmax, "H_spread": spread}


# --- calibration audit --------------------------------------------------------------
@dataclass
class AuditReport:
    verdict: str
    mu: float
    mu0: float
    forced: bool
    area_ratios: dict
    curvature_ratios: dict
    gauss_image_areas: dict
    standard_gauss_areas: dict
    curvature_integrals: dict
    total_overlap: float
    standard_overlap: float
    coverage: float
    coverage_bound: float
    coverage_deficit: float
    sphere_area: float
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio(a: float, b: float) -> float:
    if b == 0.0:
        return 1.0 if a == 0.0 else math.inf
    return a / b


def calibration_audit(net: GeneratingNetwork, alpha: ProblemInstance,
                      assume_mu0: float | None = None, tol: float = 1e-9) -> AuditReport:
    """Run the covering argument on ``net``.

    Premises: every exterior piece has area and mean curvature at most mu0
    times the standard piece, with mu0 <= 1.  They then cap each piece's
    Gauss image by mu0^n times the standard one, so the sleeves minus the
    competitor's cuff overlaps cover at most
    ``sum mu0^n G_M,i - overlap_C``.  A positive deficit against the full
    sphere area is a contradiction: a compact exterior must cover the sphere.
    ``assume_mu0`` forces the premises with the given mu0.
    """
    from .unification import relative_area

    problems = validate(net)
    if problems:
        raise DomainError("invalid network: " + ", ".join(v.code for v in problems))
    w = alpha.weights
    M = construct(alpha)
    rep = relative_area(net, alpha)
    dec = sleeves_and_cuffs(net, w)
    mnet = M.network()
    mdec = sleeves_and_cuffs(mnet, w)
    ref = measured(M)
    comp = _piece_areas(net)
    n = alpha.n
    sphere = n * unit_ball_volume(n)

    area_ratios = {k: _ratio(comp[k], ref[k]) for k in ("A_ext1", "A_ext2", "A_int")}
    curv, curv_ratios, gauss, g_ref = {}, {}, {}, {}
    for piece, hk in (("ext1", "H_ext1"), ("ext2", "H_ext2")):
        curv[piece] = _piece_curvature_integrals(net, piece)
        curv_ratios[piece] = _ratio(curv[piece]["H"], ref[hk])
        gauss[piece] = sum(s.area(n) for s in dec.sleeves if s.piece == piece)
        g_ref[piece] = sum(s.area(n) for s in mdec.sleeves if s.piece == piece)
    overlap = dec.cuff_area()
    k_m = mdec.cuff_area()

    notes = []
    exterior = [area_ratios["A_ext1"], area_ratios["A_ext2"], *curv_ratios.values()]
    if assume_mu0 is not None:
        if not 0 < assume_mu0 <= 1:
            raise DomainError("assume_mu0 must lie in (0, 1]")
        mu0, forced, premises = float(assume_mu0), True, True
        notes.append(f"premises forced with mu0 = {mu0!r}")
    else:
        mu0, forced = max(exterior), False
        premises = mu0 <= 1 + tol
    bound = sum(mu0 ** n * g for g in g_ref.values()) - overlap
    deficit = sphere - bound
    standard = abs(rep.mu - 1) <= tol and len(dec.cuffs) == len(mdec.cuffs)
    if premises and deficit > tol * sphere:
        verdict = "CONTRADICTION"
    elif standard:
        verdict = "CONSISTENT"
    elif not premises:
        verdict = "PREMISES_FAIL"
        notes.append("exterior ratios exceed 1: " + ", ".join(f"{r:.6g}" for r in exterior))
    else:
        verdict = "INCONCLUSIVE"
    for piece, c in curv.items():
        if c["H_spread"] > BALANCE_TOL * max(1.0, c["H"]):
            notes.append(f"mean curvature of {piece} varies by {c['H_spread']:.3g}")
    return AuditReport(verdict, rep.mu, mu0, forced, area_ratios, curv_ratios, gauss, g_ref,
                       curv, overlap, k_m, dec.coverage(), bound, deficit, sphere, notes)


# --- monotonicity grids -----------------------------------------------------------
GRID_COLUMNS = ("n", "beta", "t", "h", "cuff_area", "inner_perimeter")


def monotonicity_grid(n: int, beta: float, samples: int = 1000,
                      exponent: int | None = None) -> dict:
    """h, cuff area and inner perimeter on an open grid of cuff heights.

    ``t`` runs over (0, pi - beta) for h, and over (0, (pi - beta)/2) for
    the cuff area, which increases until the cuff is symmetric about the
    equator.
    """
    check_dimension(n)
    t = np.linspace(0.0, math.pi - beta, samples + 2)[1:-1]
    hv = np.array([h(n, x, beta, exponent) for x in t])
    ts = np.linspace(0.0, 0.5 * (math.pi - beta), samples + 2)[1:-1]
    area = np.array([zone_area_exact(n, x, x + beta, exponent) for x in ts])
    per = np.array([h(n, x, beta, exponent) for x in ts])
    return {"t": t, "h": hv, "t_sym": ts, "cuff_area": area,
            "inner_perimeter": f(n, ts, exponent), "area_per_perimeter": per}


def grid_rows(n: int, beta: float, samples: int = 1000, exponent: int | None = None):
    g = monotonicity_grid(n, beta, samples, exponent)
    for k in range(samples):
        yield {"n": n, "beta": beta, "t": g["t_sym"][k], "h": g["area_per_perimeter"][k],
               "cuff_area": g["cuff_area"][k], "inner_perimeter": g["inner_perimeter"][k]}


def monotonicity_checks(n: int, beta: float, samples: int = 1000, exponent: int | None = None,
                        margin: float = 1e-12) -> dict[str, bool]:
    """Strict monotonicity with ``margin`` between adjacent grid samples."""
    g = monotonicity_grid(n, beta, samples, exponent)
    return {"h_decreasing": bool(np.all(np.diff(g["h"]) < -margin)),
            "cuff_area_increasing": bool(np.all(np.diff(g["cuff_area"]) > margin)),
            "ratio_decreasing": bool(np.all(np.diff(g["area_per_perimeter"]) < -margin))}
