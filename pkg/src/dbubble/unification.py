"""Relative area of competitors and the first-variation identities of the
standard bubble.

Every competitor is scored against the standard bubble with the same
volumes and weights: ``mu = Q(S) / Q(M)``.  Scaling the volumes or the
weights does not change ``mu``, so instances can be normalised to
max volume 1 and max weight 1.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import ClassMismatch, DomainError, NumericalFailure, StructuralError
from .instance import ProblemInstance
from .profile import GeneratingNetwork, WeightClass, classify_weights, weighted_area
from .standard import DegenerateKind, construct, degenerate_kind, measured
from .topology import validate

CLASS_RTOL = 1e-6


def normalize(alpha: ProblemInstance) -> tuple[ProblemInstance, float, float]:
    """Canonical representative with max volume 1 and max weight 1.

    Returns ``(alpha', dilation, weight_scale)``; a competitor for ``alpha``
    dilated by ``dilation`` competes in ``alpha'``.
    """
    vmax = max(alpha.volumes)
    wmax = max(alpha.weights.as_tuple())
    lam = (1.0 / vmax) ** (1.0 / alpha.n)
    c = 1.0 / wmax
    out = ProblemInstance(alpha.v1 / vmax, alpha.v2 / vmax, alpha.weights.scaled(c), alpha.n)
    return out, lam, c


@dataclass(frozen=True)
class RelativeAreaReport:
    Q_S: float
    Q_M: float
    mu: float
    per_piece: dict
    volumes: tuple[float, float]
    instance: ProblemInstance = field(compare=False)

    def to_dict(self) -> dict:
        return {
            "instance": self.instance.as_row(),
            "volumes": list(self.volumes),
            "Q_S": self.Q_S,
            "Q_M": self.Q_M,
            "mu": self.mu,
            "per_piece": self.per_piece,
        }


def check_class(net: GeneratingNetwork, alpha: ProblemInstance,
                rtol: float = CLASS_RTOL) -> tuple[float, float]:
    """Measured volumes of ``net``; raises ClassMismatch outside tolerance."""
    got = net.volumes()
    scale = max(alpha.volumes)
    if any(abs(g - v) > rtol * scale for g, v in zip(got, alpha.volumes)):
        raise ClassMismatch(tuple(float(g) for g in got), alpha.volumes)
    return float(got[0]), float(got[1])


def relative_area(net: GeneratingNetwork, alpha: ProblemInstance,
                  rtol: float = CLASS_RTOL) -> RelativeAreaReport:
    if net.dimension != alpha.n:
        raise DomainError(f"network dimension {net.dimension} differs from instance n={alpha.n}")
    problems = validate(net)
    if problems:
        raise StructuralError("invalid competitor: " + "; ".join(
            f"{v.code} ({v.detail})" for v in problems))
    vols = check_class(net, alpha, rtol)
    comp = weighted_area(net, alpha.weights)
    ref = measured(construct(alpha))
    per_piece = {k: {"competitor": comp[k], "standard": ref[k]}
                 for k in ("A_ext1", "A_ext2", "A_int")}
    return RelativeAreaReport(comp["Q"], ref["Q"], comp["Q"] / ref["Q"], per_piece, vols, alpha)


def _require_strict(alpha: ProblemInstance) -> None:
    if degenerate_kind(alpha) is not DegenerateKind.NONE:
        raise DomainError("first variations need a strict instance with positive volumes")


def _central(fn, x0: float, h: float) -> float:
    return (fn(x0 + h) - fn(x0 - h)) / (2 * h)


_PIECE_OF_WEIGHT = {0: "A_int", 1: "A_ext1", 2: "A_ext2"}


def first_variation_weight(alpha: ProblemInstance, i: int, h: float = 1e-4
                           ) -> tuple[float, float]:
    """(central difference of Q(M) in w_i, area of the matching piece of M)."""
    if i not in (0, 1, 2):
        raise DomainError(f"weight index must be 0, 1 or 2, got {i!r}")
    _require_strict(alpha)
    name = f"w{i}"
    w0 = getattr(alpha.weights, name)

    def q(w):
        a = alpha.replace(**{name: w})
        if classify_weights(a.weights) is not WeightClass.STRICT:
            raise DomainError(f"step {h} in {name} leaves the strict region")
        return measured(construct(a))["Q"]

    return _central(q, w0, h), measured(construct(alpha))[_PIECE_OF_WEIGHT[i]]


def pressures(alpha: ProblemInstance) -> dict:
    """Lagrange multipliers of the standard bubble.

    ``p_i = w_i * H_i`` with the exterior mean curvature signed positive
    when the cap bulges outward; ``interface`` is ``w0 * (n-1) * kappa0``,
    positive when bubble 1 bulges into bubble 2.
    """
    g = construct(alpha)
    n, w = alpha.n, alpha.weights
    if g.kind is DegenerateKind.NONE:
        k0, k1, k2 = g.signed_curvatures
        return {"p1": -w.w1 * (n - 1) * k1, "p2": w.w2 * (n - 1) * k2,
                "interface": w.w0 * (n - 1) * k0}
    if g.kind is DegenerateKind.SINGLE:
        p = (w.w1 if g.inner.value == "B1" else w.w2) * (n - 1) / g.radii[0]
        return {"p1": p if g.inner.value == "B1" else math.nan,
                "p2": p if g.inner.value == "B2" else math.nan, "interface": math.nan}
    raise DomainError("pressures are reported for strict and single-sphere instances")


def first_variation_volume(alpha: ProblemInstance, i: int, h: float = 1e-4) -> dict:
    """Central difference of Q(M) in V_i against the pressure p_i."""
    if i not in (1, 2):
        raise DomainError(f"volume index must be 1 or 2, got {i!r}")
    kind = degenerate_kind(alpha)
    name = f"v{i}"
    v0 = getattr(alpha, name)
    if kind is DegenerateKind.SINGLE:
        if v0 == 0:
            raise DomainError(f"V{i} = 0 sits on the boundary; no central difference")
        if v0 - h <= 0:
            raise DomainError("step larger than the volume")
    else:
        _require_strict(alpha)
        if v0 - h <= 0:
            raise DomainError("step larger than the volume")

    def q(v):
        return measured(construct(alpha.replace(**{name: v})))["Q"]

    p = pressures(alpha)
    return {"dQ_dV": _central(q, v0, h), "pressure": p[f"p{i}"],
            "p1_minus_p2": p["p1"] - p["p2"], "interface_term": p["interface"]}


# --- sweeps ---------------------------------------------------------------
SWEEP_COLUMNS = ("n", "V1", "V2", "w0", "w1", "w2", "family", "epsilon", "mu_min", "status")


@dataclass(frozen=True)
class SweepGrid:
    n: int = 3
    v2: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    w0: tuple = (0.2, 0.4, 0.6, 0.8, 1.0)
    w2: tuple = (0.2, 0.4, 0.6, 0.8, 1.0)
    epsilons: tuple = (0.0, 0.01, 0.03, 0.05)
    families: tuple = ("RADIAL_BUMP", "JUNCTION_SLIDE", "EXTRA_SLEEVE")

    def instances(self):
        """Normalised slice: V1 = w1 = 1."""
        for v2, w0, w2 in itertools.product(self.v2, self.w0, self.w2):
            yield ProblemInstance.of(self.n, 1.0, v2, w0, 1.0, w2)


def sweep_cell(alpha: ProblemInstance, family: str, eps: float,
               rtol: float = CLASS_RTOL) -> dict:
    from .perturb import competitors

    row = {**alpha.as_row(), "family": family, "epsilon": eps}
    try:
        nets = competitors(alpha, family, eps)
        if not nets:
            row.update(mu_min=math.nan, status="n/a")
            return row
        mus = [relative_area(net, alpha, rtol).mu for net in nets]
        row.update(mu_min=min(mus), status="ok")
    except (DomainError, StructuralError, NumericalFailure, ClassMismatch) as exc:
        row.update(mu_min=math.nan, status=f"error: {type(exc).__name__}: {exc}")
    return row


def sweep_cells(grid: SweepGrid):
    for alpha in grid.instances():
        for family in grid.families:
            for eps in grid.epsilons:
                yield alpha, family, eps


def sweep(grid: SweepGrid | None = None, rtol: float = CLASS_RTOL, jobs: int = 1) -> list[dict]:
    """min mu per (instance, family, epsilon) cell, in grid order."""
    grid = grid or SweepGrid()
    cells = list(sweep_cells(grid))
    if jobs <= 1:
        return [sweep_cell(a, f, e, rtol) for a, f, e in cells]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(jobs) as pool:
        return list(pool.map(sweep_cell, *zip(*cells), [rtol] * len(cells), chunksize=4))
