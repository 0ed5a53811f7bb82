"""Standard weighted double bubbles, including the degenerate regimes.

Strict weights are built in a normalised frame where the junction
(n-2)-sphere has radius 1 and meets the meridian plane at (0, 1).  Each of
the three caps is the arc from the junction to the axis whose start
tangent is turned by ``delta`` from straight down.  Its sphere has radius
1/|sin delta|, its centre sits at -cot(delta), and the cap's angular radius
is |delta|; the conormal is the unit vector at angle delta - pi/2.

Bubble 1 is on the left (negative x), bubble 2 on the right.  With the
interface pointing straight down the canonical deltas are

    delta0 = 0,  delta1 = -theta1,  delta2 = theta2

where theta1, theta2 are the angles the interface conormal makes with the
exterior conormals of bubbles 1 and 2.  A common rotation ``psi`` is then
added to all three; it ranges over (theta1 - pi, pi - theta2), along which
V1/V2 falls strictly from +inf to 0.  The reported signed curvature of
cap i is ``kappa_i = sin(delta_i) / rho`` (the cosine of its conormal
angle), and sum_i w_i kappa_i = 0 is the axial component of the conormal
balance.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalFailure
from .instance import ProblemInstance
from .profile import (GeneratingNetwork, Label, WeightClass, WeightTriple,
                      arc_to_axis, binding_inequality, classify_weights, semicircle)
from .quadrature import integrate
from .spherical import ball_radius, sphere_area, unit_ball_volume


class DegenerateKind(str, enum.Enum):
    NONE = "NONE"
    DISJOINT = "DISJOINT"
    NESTED = "NESTED"
    SINGLE = "SINGLE"


def _angle_from_cos(c: float) -> float:
    return math.acos(min(1.0, max(-1.0, c)))


def wedge_angles(w: WeightTriple) -> tuple[float, float, float]:
    """(theta1, theta2, theta_ext): angles between conormal pairs (0,1),
    (0,2) and (1,2), from the law of cosines on the weight triangle."""
    w0, w1, w2 = w.as_tuple()
    t1 = _angle_from_cos((w2 * w2 - w0 * w0 - w1 * w1) / (2 * w0 * w1))
    t2 = _angle_from_cos((w1 * w1 - w0 * w0 - w2 * w2) / (2 * w0 * w2))
    return t1, t2, 2 * math.pi - t1 - t2


def junction_angles(w: WeightTriple) -> tuple[float, float, float]:
    """Canonical conormal directions (phi0, phi1, phi2) with phi0 = -pi/2."""
    if classify_weights(w) is not WeightClass.STRICT:
        raise DomainError(
            f"weights {w.as_tuple()} are not strict; use construct_degenerate")
    t1, t2, _ = wedge_angles(w)
    return -0.5 * math.pi, 1.5 * math.pi - t1, -0.5 * math.pi + t2


def conormal(delta: float) -> np.ndarray:
    return np.array([math.sin(delta), -math.cos(delta)])


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class StandardBubbleGeometry:
    n: int
    weights: WeightTriple
    volumes: tuple[float, float]
    kind: DegenerateKind
    # strict case (normalised frame quantities scaled by rho)
    psi: float = float("nan")
    deltas: tuple[float, float, float] = (float("nan"),) * 3
    rho: float = float("nan")
    # degenerate case: sphere radii; inner_label for NESTED, label for SINGLE
    radii: tuple[float, ...] = ()
    inner: Label | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    # --- strict-case derived quantities ---------------------------------
    @property
    def conormal_angles(self) -> tuple[float, float, float]:
        return tuple(d - 0.5 * math.pi for d in self.deltas)

    @property
    def signed_curvatures(self) -> tuple[float, float, float]:
        if self.kind is not DegenerateKind.NONE:
            raise DomainError("signed curvatures are defined for three-cap bubbles")
        return tuple(math.sin(d) / self.rho for d in self.deltas)

    @property
    def cap_radii(self) -> tuple[float, float, float]:
        return tuple(math.inf if k == 0 else 1.0 / abs(k) for k in self.signed_curvatures)

    @property
    def centers(self) -> tuple[float, float, float]:
        """Axial coordinates of the three sphere centres (inf when flat)."""
        return tuple(math.inf if d == 0 else -self.rho * math.cos(d) / math.sin(d)
                     for d in self.deltas)

    @property
    def center_distance(self) -> float:
        if self.kind is DegenerateKind.NONE:
            c = self.centers
            return abs(c[2] - c[1])
        return float("nan")

    def conormal_residual(self) -> float:
        w = self.weights.as_tuple()
        v = sum(wi * conormal(d) for wi, d in zip(w, self.deltas))
        return float(np.hypot(*v))

    def curvature_residual(self) -> float:
        w = self.weights.as_tuple()
        return abs(sum(wi * k for wi, k in zip(w, self.signed_curvatures)))

    # --- export ---------------------------------------------------------
    def network(self) -> GeneratingNetwork:
        n, w = self.n, self.weights
        if self.kind is DegenerateKind.NONE:
            d0, d1, d2 = self.deltas
            r = self.rho
            edges = [
                arc_to_axis(0.0, r, d1, Label.B1, Label.EXT),
                arc_to_axis(0.0, r, d0, Label.B2, Label.B1),
                arc_to_axis(0.0, r, d2, Label.EXT, Label.B2),
            ]
        elif self.kind is DegenerateKind.SINGLE:
            edges = [semicircle(0.0, self.radii[0], self.inner, Label.EXT)]
        elif self.kind is DegenerateKind.DISJOINT:
            r1, r2 = self.radii
            gap = 0.25 * (r1 + r2)
            edges = [semicircle(-r1 - 0.5 * gap, r1, Label.B1, Label.EXT),
                     semicircle(r2 + 0.5 * gap, r2, Label.B2, Label.EXT)]
        else:
            r_in, r_out = self.radii
            outer = Label.B2 if self.inner is Label.B1 else Label.B1
            edges = [semicircle(0.0, r_in, self.inner, outer),
                     semicircle(0.0, r_out, outer, Label.EXT)]
        return GeneratingNetwork(n, edges, w, {"source": "standard", "kind": self.kind.value})


# --- closed-form measures of the three-cap bubble ----------------------
def _sin_power_0(k: int, theta: float) -> float:
    return integrate(lambda t: np.sin(t) ** k, 0.0, theta, atol=0.0, rtol=1e-15)


def _cap_measures(n: int, rho: float, delta: float) -> tuple[float, float]:
    """(area, volume) of the cap through the junction circle of radius rho
    with turn ``delta``; the volume is the solid between the cap and the
    junction hyperplane x = 0."""
    a = abs(delta)
    if a == 0.0:
        return unit_ball_volume(n - 1) * rho ** (n - 1), 0.0
    r = rho / math.sin(a)
    area = (n - 1) * unit_ball_volume(n - 1) * r ** (n - 1) * _sin_power_0(n - 2, a)
    vol = unit_ball_volume(n - 1) * r ** n * _sin_power_0(n, a)
    return area, vol


def _strict_measures(g: StandardBubbleGeometry) -> dict:
    n = g.n
    d0, d1, d2 = g.deltas
    (a0, v0), (a1, v1), (a2, v2) = (_cap_measures(n, g.rho, d) for d in g.deltas)
    s = math.copysign(1.0, d0) if d0 != 0 else 0.0
    k0, k1, k2 = g.signed_curvatures
    return {
        "A_ext1": a1, "A_ext2": a2, "A_int": a0,
        "V1": v1 + s * v0, "V2": v2 - s * v0,
        "H_ext1": (n - 1) * abs(k1), "H_ext2": (n - 1) * abs(k2), "H_int": (n - 1) * abs(k0),
        "H_int_signed": (n - 1) * k0,
    }


def _sphere_measures(g: StandardBubbleGeometry) -> dict:
    n = g.n
    out = {"A_ext1": 0.0, "A_ext2": 0.0, "A_int": 0.0, "H_ext1": 0.0, "H_ext2": 0.0,
           "H_int": 0.0, "H_int_signed": 0.0}
    v1, v2 = g.volumes
    out["V1"], out["V2"] = v1, v2
    key = {Label.B1: "ext1", Label.B2: "ext2"}
    if g.kind is DegenerateKind.SINGLE:
        r = g.radii[0]
        out["A_" + key[g.inner]] = sphere_area(n, r)
        out["H_" + key[g.inner]] = (n - 1) / r
    elif g.kind is DegenerateKind.DISJOINT:
        for lab, r in zip((Label.B1, Label.B2), g.radii):
            out["A_" + key[lab]] = sphere_area(n, r)
            out["H_" + key[lab]] = (n - 1) / r
    else:
        r_in, r_out = g.radii
        outer = Label.B2 if g.inner is Label.B1 else Label.B1
        out["A_int"] = sphere_area(n, r_in)
        out["H_int"] = (n - 1) / r_in
        out["H_int_signed"] = (n - 1) / r_in * (1 if g.inner is Label.B1 else -1)
        out["A_" + key[outer]] = sphere_area(n, r_out)
        out["H_" + key[outer]] = (n - 1) / r_out
    return out


def measured(g: StandardBubbleGeometry) -> dict:
    """Per-piece areas, volumes, weighted total Q and mean curvatures
    (sum of principal curvatures, (n-1)/R on a sphere of radius R)."""
    out = _strict_measures(g) if g.kind is DegenerateKind.NONE else _sphere_measures(g)
    w = g.weights
    out["Q"] = w.w1 * out["A_ext1"] + w.w2 * out["A_ext2"] + w.w0 * out["A_int"]
    return out


# --- construction ---------------------------------------------------------
def _frame_volumes(n: int, w: WeightTriple, psi: float) -> tuple[float, float]:
    t1, t2, _ = wedge_angles(w)
    edges = [arc_to_axis(0.0, 1.0, psi - t1, Label.B1, Label.EXT),
             arc_to_axis(0.0, 1.0, psi, Label.B2, Label.B1),
             arc_to_axis(0.0, 1.0, psi + t2, Label.EXT, Label.B2)]
    return GeneratingNetwork(n, edges).volumes()


def psi_interval(w: WeightTriple) -> tuple[float, float]:
    t1, t2, _ = wedge_angles(w)
    return t1 - math.pi, math.pi - t2


def log_volume_ratio(n: int, w: WeightTriple, psi: float) -> float:
    v1, v2 = _frame_volumes(n, w, psi)
    return _log(v1) - _log(v2)


def solve_ratio(target, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of a decreasing ``target`` on the open interval (lo, hi).

    Bisection until the residual or the bracket is exhausted, then one
    Newton step if it improves the residual.
    """
    a, b = lo, hi
    best, best_val = None, math.inf
    for _ in range(200):
        mid = 0.5 * (a + b)
        if not a < mid < b:
            break
        g = target(mid)
        if abs(g) < best_val:
            best, best_val = mid, abs(g)
        if g == 0.0:
            return mid
        if g > 0:
            a = mid
        else:
            b = mid
        if abs(g) < 1e-3 * tol and b - a < 1e-15 * max(1.0, abs(mid)):
            break
    if best is None or not math.isfinite(best_val):
        raise NumericalFailure("ratio bracket failed")
    step = max(1e-7 * (hi - lo), 1e-9)
    lo_s, hi_s = max(best - step, 0.5 * (lo + best)), min(best + step, 0.5 * (hi + best))
    slope = (target(hi_s) - target(lo_s)) / (hi_s - lo_s)
    if slope < 0 and math.isfinite(slope):
        cand = best - target(best) / slope
        if lo < cand < hi:
            gc = abs(target(cand))
            if gc < best_val:
                best, best_val = cand, gc
    if best_val > tol:
        raise NumericalFailure(f"ratio root residual {best_val:.3g} exceeds {tol:.1g}")
    return best


def construct_strict(alpha: ProblemInstance, tol: float = 1e-12) -> StandardBubbleGeometry:
    n, w = alpha.n, alpha.weights
    if classify_weights(w) is not WeightClass.STRICT or alpha.v1 == 0 or alpha.v2 == 0:
        raise DomainError("strict construction needs strict weights and positive volumes")
    t1, t2, _ = wedge_angles(w)
    if alpha.v1 == alpha.v2 and w.w1 == w.w2:
        psi = 0.0
    else:
        goal = math.log(alpha.v1) - math.log(alpha.v2)
        lo, hi = psi_interval(w)
        psi = solve_ratio(lambda p: log_volume_ratio(n, w, p) - goal, lo, hi, tol)
    v1, _ = _frame_volumes(n, w, psi)
    lam = (alpha.v1 / v1) ** (1.0 / n)
    return StandardBubbleGeometry(n, w, alpha.volumes, DegenerateKind.NONE, psi=psi,
                                  deltas=(psi, psi - t1, psi + t2), rho=lam)


def degenerate_kind(alpha: ProblemInstance) -> DegenerateKind:
    if alpha.v1 == 0 or alpha.v2 == 0:
        return DegenerateKind.SINGLE
    name = binding_inequality(alpha.weights)
    if name is None:
        return DegenerateKind.NONE
    return DegenerateKind.DISJOINT if name == "INTERFACE" else DegenerateKind.NESTED


def construct_degenerate(alpha: ProblemInstance, kind: DegenerateKind | None = None
                         ) -> StandardBubbleGeometry:
    """Round-sphere optima: disjoint, nested or single.

    Nested bubbles put the bubble with the dominant exterior weight inside;
    the outer sphere encloses V1 + V2.
    """
    actual = degenerate_kind(alpha)
    if actual is DegenerateKind.NONE:
        raise DomainError("instance is not degenerate; use construct")
    if kind is not None and DegenerateKind(kind) is not actual:
        raise DomainError(f"requested {DegenerateKind(kind).value} but instance is {actual.value}")
    n, w = alpha.n, alpha.weights
    v1, v2 = alpha.volumes
    if actual is DegenerateKind.SINGLE:
        lab = Label.B1 if v1 > 0 else Label.B2
        return StandardBubbleGeometry(n, w, alpha.volumes, actual,
                                      radii=(ball_radius(n, v1 + v2),), inner=lab)
    if actual is DegenerateKind.DISJOINT:
        return StandardBubbleGeometry(n, w, alpha.volumes, actual,
                                      radii=(ball_radius(n, v1), ball_radius(n, v2)))
    inner = Label.B1 if binding_inequality(w) == "NESTED_1" else Label.B2
    v_in = v1 if inner is Label.B1 else v2
    return StandardBubbleGeometry(n, w, alpha.volumes, actual,
                                  radii=(ball_radius(n, v_in), ball_radius(n, v1 + v2)),
                                  inner=inner)


def construct(alpha: ProblemInstance, tol: float = 1e-12) -> StandardBubbleGeometry:
    """The standard weighted double bubble for ``alpha``."""
    if degenerate_kind(alpha) is DegenerateKind.NONE:
        return construct_strict(alpha, tol)
    return construct_degenerate(alpha)


def ratio_profile(n: int, w: WeightTriple, num: int = 201, margin: float = 1e-3):
    """(psi grid, log V1/V2) across the admissible interval."""
    lo, hi = psi_interval(w)
    pad = margin * (hi - lo)
    grid = np.linspace(lo + pad, hi - pad, num)
    return grid, np.array([log_volume_ratio(n, w, p) for p in grid])


def _shape_quantities(g: StandardBubbleGeometry) -> dict:
    k0, k1, k2 = g.signed_curvatures
    r1, r2 = 1 / abs(k1), 1 / abs(k2)
    return {"kappa0": k0, "R1": r1, "R2": r2, "center_distance": g.center_distance}


def sensitivity(alpha: ProblemInstance, h: float = 1e-4) -> dict:
    """Central-difference quotients of (kappa0, R1, R2, centre distance)
    with respect to V1, V2, w0, w1, w2.

    The interface is reported through its curvature kappa0 = 1/R0 because
    R0 is infinite whenever the interface is flat.
    """
    if degenerate_kind(alpha) is not DegenerateKind.NONE:
        raise DomainError("sensitivity needs a strict interior instance")
    out = {}
    for var in ("v1", "v2", "w0", "w1", "w2"):
        base = getattr(alpha, var) if var.startswith("v") else getattr(alpha.weights, var)
        try:
            plus = alpha.replace(**{var: base + h})
            minus = alpha.replace(**{var: base - h})
        except DomainError as exc:
            raise DomainError(f"perturbing {var} leaves the domain: {exc}") from exc
        if any(degenerate_kind(a) is not DegenerateKind.NONE for a in (plus, minus)):
            raise DomainError(f"perturbing {var} by {h} leaves the strict region")
        qp = _shape_quantities(construct_strict(plus))
        qm = _shape_quantities(construct_strict(minus))
        out[var] = {k: (qp[k] - qm[k]) / (2 * h) for k in qp}
    return out
