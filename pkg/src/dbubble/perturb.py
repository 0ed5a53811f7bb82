"""Volume-preserving competitor families around a standard bubble.

RADIAL_BUMP
    Smooth normal displacement of one edge by ``eps`` times the bubble
    scale, with a second bump on the same edge whose amplitude is solved so
    both adjacent volumes are restored exactly.  Bumped stretches are
    polylines; the rest of the edge keeps its exact arcs.
JUNCTION_SLIDE
    The junction circle radius becomes rho * (1 + eps) with the interface
    direction kept; each exterior cap is re-solved through the new
    junction for its bubble's volume.
EXTRA_SLEEVE
    Bubble 2's exterior cap is cut near the axis and a small balanced
    second component of bubble 1 is attached there, giving a chain
    B1 | B2 | B1 with two triple junctions and a double-cuffed middle
    sleeve.  Rotation and dilation restore the volumes.

Each family returns a list of networks (both signs of the perturbation
where that makes sense); an empty list means the family does not apply.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericalFailure
from .instance import ProblemInstance
from .quadrature import gl_rule
from .profile import (EDGE_GL_ORDER, GeneratingNetwork, Label, MeridianEdge, arc_to_axis,
                      edge_integrals, wrap_angle)
from .standard import (DegenerateKind, StandardBubbleGeometry, construct,
                       degenerate_kind, psi_interval, wedge_angles)

FAMILIES = ("RADIAL_BUMP", "JUNCTION_SLIDE", "EXTRA_SLEEVE")
BUMP_SEGMENTS = 600
BUMP_CENTER, COUNTER_CENTER, BUMP_HALF_WIDTH = 0.35, 0.70, 0.12


def _bump(u):
    """C-infinity bump supported on (-1, 1) with peak 1 at 0."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def _sub_arc(e: MeridianEdge, s0: float, s1: float) -> MeridianEdge:
    x, y = e.point(s0)
    return MeridianEdge.from_start((float(x), float(y)), float(e.tangent_angle(s0)),
                                   e.curvature, s1 - s0, e.left, e.right)


def _displaced_points(e: MeridianEdge, s0: float, s1: float, amp: float, center: float,
                      half: float) -> tuple[np.ndarray, np.ndarray]:
    """Vertices along e on [s0, s1], pushed ``amp * bump`` along the left normal."""
    s = np.linspace(s0, s1, BUMP_SEGMENTS + 1)
    x, y = e.point(s)
    phi = e.tangent_angle(s)
    d = amp * _bump((s - center) / half)
    return x - d * np.sin(phi), y + d * np.cos(phi)


def _polyline(px, py, left, right) -> list[MeridianEdge]:
    return [MeridianEdge((px[k], py[k]), (px[k + 1], py[k + 1]), 0.0, left, right)
            for k in range(len(px) - 1)]


def _polyline_flux(px, py, n: int) -> float:
    """Sum over segments of the integral of y^(n-1) dx (exact: GL on a polynomial)."""
    xg, wg = gl_rule(EDGE_GL_ORDER)
    t = 0.5 * (1.0 + xg)
    y = py[:-1, None] + (py[1:] - py[:-1])[:, None] * t[None, :]
    return float(0.5 * np.sum((px[1:] - px[:-1]) * ((y ** (n - 1)) @ wg)))


def _bump_windows(e: MeridianEdge):
    L = e.length
    c1, c2, hw = BUMP_CENTER * L, COUNTER_CENTER * L, BUMP_HALF_WIDTH * L
    return [0.0, c1 - hw, c1 + hw, c2 - hw, c2 + hw, L], c1, c2, hw


def bumped_edge(e: MeridianEdge, amp1: float, amp2: float) -> list[MeridianEdge]:
    """Replace ``e`` by an exact-arc / polyline chain carrying two bumps."""
    cuts, c1, c2, hw = _bump_windows(e)
    out = [_sub_arc(e, cuts[0], cuts[1])]
    out += _polyline(*_displaced_points(e, cuts[1], cuts[2], amp1, c1, hw), e.left, e.right)
    out.append(_sub_arc(e, cuts[2], cuts[3]))
    out += _polyline(*_displaced_points(e, cuts[3], cuts[4], amp2, c2, hw), e.left, e.right)
    out.append(_sub_arc(e, cuts[4], cuts[5]))
    return out


def _window_flux(e: MeridianEdge, k: int, amp: float, n: int) -> float:
    cuts, c1, c2, hw = _bump_windows(e)
    lo, hi, c = (cuts[1], cuts[2], c1) if k == 0 else (cuts[3], cuts[4], c2)
    return _polyline_flux(*_displaced_points(e, lo, hi, amp, c, hw), n)


def radial_bump(net: GeneratingNetwork, index: int, eps: float,
                scale: float) -> GeneratingNetwork:
    """Bump edge ``index`` toward its left side by eps*scale.

    The bump goes in whichever window moves less volume per unit
    amplitude; the counter-bump in the other window restores the volumes
    on both sides of the edge.
    """
    e = net.edges[index]
    amp = eps * scale
    if amp == 0.0:
        return net
    n = net.dimension
    cuts, _, _, hw = _bump_windows(e)
    # only the two bump windows change, so compare their fluxes with the exact arc's
    windows = [_sub_arc(e, cuts[1], cuts[2]), _sub_arc(e, cuts[3], cuts[4])]
    ref = float(np.sum(edge_integrals(windows, lambda x, y, phi: y ** (n - 1) * np.cos(phi))))
    moved = [abs(_window_flux(e, k, amp, n) - _window_flux(e, k, 0.0, n)) for k in (0, 1)]
    main = 0 if moved[0] <= moved[1] else 1
    first = _window_flux(e, main, amp, n)

    def gap(counter):
        return first + _window_flux(e, 1 - main, counter, n) - ref

    width = 2.0 * abs(amp)
    while gap(-width) * gap(width) > 0:
        width *= 2.0
        if width > 0.5 * hw:
            raise NumericalFailure("counter-bump bracket failed")
    counter = brentq(gap, -width, width, xtol=1e-15 * scale, rtol=1e-15, maxiter=200)
    amps = (amp, counter) if main == 0 else (counter, amp)
    rest = [f for k, f in enumerate(net.edges) if k != index]
    return GeneratingNetwork(n, rest + bumped_edge(e, *amps), net.weights,
                             {"family": "RADIAL_BUMP", "epsilon": eps})


def _bubble_scale(g: StandardBubbleGeometry) -> float:
    if g.kind is DegenerateKind.NONE:
        return g.rho
    return max(g.radii)


def radial_bump_family(alpha: ProblemInstance, eps: float) -> list[GeneratingNetwork]:
    g = construct(alpha)
    net = g.network()
    if eps == 0.0:
        return [net]
    if g.kind is DegenerateKind.NONE:
        targets = range(len(net.edges))
    else:
        # outermost sphere only
        targets = [int(np.argmax([e.length for e in net.edges]))]
    scale = _bubble_scale(g)
    return [radial_bump(net, k, s * eps, scale) for k in targets for s in (1.0, -1.0)]


def _solve_delta(target: float, lo: float, hi: float, vol) -> float:
    pad = 1e-12
    a, b = lo + pad, hi - pad
    fa, fb = vol(a) - target, vol(b) - target
    if fa * fb > 0:
        raise NumericalFailure("junction slide cannot reach the target volume")
    return brentq(lambda d: vol(d) - target, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)


def junction_slide(g: StandardBubbleGeometry, eps: float) -> GeneratingNetwork:
    n = g.n
    rho = g.rho * (1.0 + eps)
    d0 = g.deltas[0]
    v1t, v2t = g.volumes
    inter = arc_to_axis(0.0, rho, d0, Label.B2, Label.B1)

    def v1(d1):
        e = arc_to_axis(0.0, rho, d1, Label.B1, Label.EXT)
        return GeneratingNetwork(n, [e, inter]).volume(Label.B1)

    def v2(d2):
        e = arc_to_axis(0.0, rho, d2, Label.EXT, Label.B2)
        return GeneratingNetwork(n, [inter, e]).volume(Label.B2)

    d1 = _solve_delta(v1t, -math.pi, d0, v1)
    d2 = _solve_delta(v2t, d0, math.pi, v2)
    edges = [arc_to_axis(0.0, rho, d1, Label.B1, Label.EXT), inter,
             arc_to_axis(0.0, rho, d2, Label.EXT, Label.B2)]
    return GeneratingNetwork(n, edges, g.weights, {"family": "JUNCTION_SLIDE", "epsilon": eps})


def junction_slide_family(alpha: ProblemInstance, eps: float) -> list[GeneratingNetwork]:
    g = construct(alpha)
    if g.kind is not DegenerateKind.NONE:
        return []
    if eps == 0.0:
        return [g.network()]
    return [junction_slide(g, s * eps) for s in (1.0, -1.0)]


# --- extra sleeve chain -----------------------------------------------------
def chain_edges(n: int, w, psi: float, eps: float, rho: float = 1.0) -> list[MeridianEdge]:
    """B1 | B2 | B1 chain in the junction frame (junction at (0, rho)).

    The second junction sits on bubble 2's exterior cap at turning angle
    ``eps`` before that cap reaches the axis; it is balanced for the same
    weights, with the new component of bubble 1 on its right.
    """
    t1, t2, _ = wedge_angles(w)
    d1, d0, d2 = psi - t1, psi, psi + t2
    ext2 = arc_to_axis(0.0, rho, d2, Label.EXT, Label.B2)
    if not 0.0 < eps < abs(d2):
        raise DomainError(f"cut angle {eps} must lie in (0, {abs(d2):.6g})")
    radius = 1.0 / abs(ext2.curvature)
    s_cut = ext2.length - radius * eps
    upper = MeridianEdge.from_start(ext2.p, ext2.start_angle, ext2.curvature, s_cut,
                                    Label.EXT, Label.B2)
    jx, jy = upper.q
    back = wrap_angle(upper.end_angle + math.pi)   # conormal of the cut cap at J2
    da = wrap_angle(back + 0.5 * math.pi)
    d_int2 = da + t2
    d_cap = da + t1 + t2
    if not (-math.pi < d_int2 < math.pi and -math.pi < d_cap < math.pi):
        raise DomainError("second junction cannot be balanced at this cut")
    return [
        arc_to_axis(0.0, rho, d1, Label.B1, Label.EXT),
        arc_to_axis(0.0, rho, d0, Label.B2, Label.B1),
        upper,
        arc_to_axis(jx, jy, d_int2, Label.B1, Label.B2),
        arc_to_axis(jx, jy, d_cap, Label.EXT, Label.B1),
    ]


def _chain_volumes(n, w, psi, eps):
    return GeneratingNetwork(n, chain_edges(n, w, psi, eps)).volumes()


def extra_sleeve(alpha: ProblemInstance, eps: float) -> GeneratingNetwork:
    """Balanced chain competitor with the volumes of ``alpha``."""
    n, w = alpha.n, alpha.weights
    if degenerate_kind(alpha) is not DegenerateKind.NONE:
        raise DomainError("extra sleeve needs a strict instance")
    lo, hi = psi_interval(w)
    goal = math.log(alpha.v1) - math.log(alpha.v2)

    def g(psi):
        try:
            v1, v2 = _chain_volumes(n, w, psi, eps)
        except DomainError:
            return math.nan
        if v1 <= 0 or v2 <= 0:
            return math.nan
        return math.log(v1) - math.log(v2) - goal

    grid = np.linspace(lo, hi, 401)[1:-1]
    vals = np.array([g(p) for p in grid])
    ok = np.isfinite(vals)
    bracket = None
    for k in range(len(grid) - 1):
        if ok[k] and ok[k + 1] and vals[k] * vals[k + 1] <= 0:
            bracket = (grid[k], grid[k + 1])
            break
    if bracket is None:
        raise NumericalFailure("no volume-ratio bracket for the extra sleeve")
    psi = brentq(g, *bracket, xtol=1e-15, rtol=1e-15, maxiter=200)
    v1, _ = _chain_volumes(n, w, psi, eps)
    lam = (alpha.v1 / v1) ** (1.0 / n)
    net = GeneratingNetwork(n, chain_edges(n, w, psi, eps), w,
                            {"family": "EXTRA_SLEEVE", "epsilon": eps, "psi": psi})
    return net.scaled(lam)


def extra_sleeve_family(alpha: ProblemInstance, eps: float) -> list[GeneratingNetwork]:
    if degenerate_kind(alpha) is not DegenerateKind.NONE:
        return []
    if eps == 0.0:
        return [construct(alpha).network()]
    return [extra_sleeve(alpha, eps)]


def competitors(alpha: ProblemInstance, family: str, eps: float) -> list[GeneratingNetwork]:
    family = family.upper()
    if family == "RADIAL_BUMP":
        return radial_bump_family(alpha, eps)
    if family == "JUNCTION_SLIDE":
        return junction_slide_family(alpha, eps)
    if family == "EXTRA_SLEEVE":
        return extra_sleeve_family(alpha, eps)
    raise DomainError(f"unknown perturbation family {family!r}; expected one of {FAMILIES}")
