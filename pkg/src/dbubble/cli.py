"""Command-line entry point: ``dbubble <command> ...``.

Exit codes: 0 success, 2 input error, 3 class mismatch, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import ClassMismatch, DomainError, NumericalFailure, StructuralError
from .gauss import (GRID_COLUMNS, calibration_audit, grid_rows, monotonicity_checks,
                    overlap_excess, sleeves_and_cuffs)
from .instance import ProblemInstance
from .perturb import FAMILIES, competitors
from .profile import GeneratingNetwork
from .standard import DegenerateKind, construct, measured
from .symmetrization import PlanarRegion, symmetrize_certificate
from .unification import SWEEP_COLUMNS, relative_area, sweep

EXIT_OK, EXIT_INPUT, EXIT_CLASS, EXIT_NUMERIC = 0, 2, 3, 4
GRID_BETAS = (math.pi / 6, math.pi / 4, math.pi / 3)


def _clean(x):
    """JSON-safe copy: numpy scalars to floats, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if hasattr(x, "value") and hasattr(x, "name"):
        return x.value
    return x


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _instance(args) -> ProblemInstance:
    return ProblemInstance.of(args.n, args.v1, args.v2, args.w0, args.w1, args.w2)


def _geometry_dict(g) -> dict:
    d = {"kind": g.kind, "volumes": g.volumes, "weights": g.weights.as_tuple()}
    if g.kind is DegenerateKind.NONE:
        d.update(psi=g.psi, deltas=g.deltas, rho=g.rho, conormal_angles=g.conormal_angles,
                 signed_curvatures=g.signed_curvatures, cap_radii=g.cap_radii,
                 centers=g.centers, center_distance=g.center_distance,
                 conormal_residual=g.conormal_residual(),
                 curvature_residual=g.curvature_residual())
    else:
        d.update(radii=g.radii, inner=g.inner)
    return d


def _table(rows) -> str:
    width = max(len(k) for k, _ in rows)
    out = []
    for k, v in rows:
        if isinstance(v, float):
            v = f"{v:.12g}"
        elif isinstance(v, (tuple, list)):
            v = ", ".join(f"{x:.12g}" if isinstance(x, float) else str(x) for x in v)
        out.append(f"{k:<{width}}  {v}")
    return "\n".join(out) + "\n"


# --- commands -------------------------------------------------------------------
def cmd_standard(args) -> int:
    cfg = _config(args)
    alpha = _instance(args)
    g = construct(alpha, tol=cfg.root_tol)
    m = measured(g)
    net = g.network()
    doc = {"config": cfg.as_dict(), "instance": alpha.as_row(), **net.to_dict(),
           "geometry": _geometry_dict(g), "measured": m}
    if args.out:
        _emit(_dumps(doc), args.out)
    geo = _geometry_dict(g)
    rows = [("kind", g.kind.value)]
    rows += [(k, geo[k]) for k in ("rho", "cap_radii", "signed_curvatures", "centers")
             if k in geo]
    rows += [(k, geo[k]) for k in ("radii", "inner") if k in geo and geo[k] is not None]
    rows += [(k, m[k]) for k in ("A_ext1", "A_ext2", "A_int", "V1", "V2", "Q")]
    if g.kind is DegenerateKind.NONE:
        rows += [("conormal_residual", g.conormal_residual()),
                 ("curvature_residual", g.curvature_residual())]
    sys.stdout.write(_table([(k, v.value if hasattr(v, "value") else v) for k, v in rows]))
    return EXIT_OK


def cmd_relarea(args) -> int:
    cfg = _config(args)
    alpha = _instance(args)
    net = GeneratingNetwork.load(args.network)
    rep = relative_area(net, alpha, rtol=cfg.class_rtol)
    if args.out:
        _emit(_dumps({"config": cfg.as_dict(), **rep.to_dict()}), args.out)
    sys.stdout.write(f"mu = {rep.mu:#.12g}\n")
    return EXIT_OK


def _csv(columns, rows, cfg: RunConfig) -> str:
    buf = io.StringIO()
    buf.write("\n".join(cfg.header_lines()) + "\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                    for k, v in r.items()})
    return buf.getvalue()


def cmd_sweep(args) -> int:
    cfg = _config(args)
    if args.output:
        cfg = cfg.replace(output=args.output)
    rows = sweep(cfg.grid, rtol=cfg.class_rtol, jobs=args.jobs)
    _emit(_csv(SWEEP_COLUMNS, rows, cfg), cfg.output or None)
    mus = [r["mu_min"] for r in rows if r["status"] == "ok"]
    errors = sum(r["status"].startswith("error") for r in rows)
    best = min(mus) if mus else math.nan
    sys.stderr.write(f"cells={len(rows)} ok={len(mus)} errors={errors} "
                     f"global_min_mu={best:#.12g}\n")
    return EXIT_OK


def cmd_gauss(args) -> int:
    cfg = _config(args)
    alpha = _instance(args)
    net = GeneratingNetwork.load(args.network)
    audit = calibration_audit(net, alpha, assume_mu0=args.assume_mu0, tol=cfg.audit_tol)
    dec = sleeves_and_cuffs(net, alpha.weights)
    doc = {"config": cfg.as_dict(), "instance": alpha.as_row(), "audit": audit.to_dict(),
           "decomposition": dec.to_dict()}
    if dec.cuffs and len(dec.cuffs) > 1:
        doc["overlap_excess"] = overlap_excess(net, alpha.weights, construct(alpha))
    _emit(_dumps(doc), args.out)
    if args.grid:
        rows, failures = [], 0
        for beta in GRID_BETAS:
            rows.extend(grid_rows(alpha.n, beta, cfg.gauss_samples))
            for exponent in (alpha.n - 2, alpha.n - 1):
                failures += not all(monotonicity_checks(alpha.n, beta, cfg.gauss_samples,
                                                        exponent).values())
        Path(args.grid).write_text(_csv(GRID_COLUMNS, rows, cfg))
        sys.stderr.write(f"monotonicity grids failing: {failures}\n")
    sys.stderr.write(f"verdict={audit.verdict}\n")
    return EXIT_OK


def cmd_competitor(args) -> int:
    cfg = _config(args)
    alpha = _instance(args)
    nets = competitors(alpha, args.family, args.eps)
    if not nets:
        raise DomainError(f"{args.family} does not apply to this instance at eps={args.eps}")
    if not 0 <= args.index < len(nets):
        raise DomainError(f"index must be below {len(nets)}")
    doc = {"config": cfg.as_dict(), "instance": alpha.as_row(), "family": args.family,
           "epsilon": args.eps, **nets[args.index].to_dict()}
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_symmetrize(args) -> int:
    cfg = _config(args)
    region = PlanarRegion.load(args.region)
    cert = symmetrize_certificate(region)
    _emit(_dumps({"config": cfg.as_dict(), **cert.to_dict()}), args.out)
    return EXIT_OK


# --- parser -------------------------------------------------------------------------
def _add_instance(p):
    p.add_argument("--n", type=int, required=True)
    for name in ("v1", "v2", "w0", "w1", "w2"):
        p.add_argument(f"--{name}", type=float, required=True)


def _add_common(p):
    p.add_argument("--config", help="flat key=value run configuration")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbubble", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("standard", help="construct the standard bubble")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--out", help="write geometry + network JSON here")
    p.set_defaults(func=cmd_standard)

    p = sub.add_parser("relarea", help="relative area of a competitor network")
    p.add_argument("network")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(func=cmd_relarea)

    p = sub.add_parser("sweep", help="perturbation sweep over a grid")
    _add_common(p)
    p.add_argument("--output", help="CSV path (overrides the config)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gauss", help="calibration audit and monotonicity grids")
    p.add_argument("network")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--assume-mu0", type=float, default=None)
    p.add_argument("--out")
    p.add_argument("--grid", help="write the monotonicity CSV here")
    p.set_defaults(func=cmd_gauss)

    p = sub.add_parser("competitor", help="export a perturbed competitor network")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_competitor)

    p = sub.add_parser("symmetrize", help="symmetrization certificate of a planar region")
    p.add_argument("region")
    _add_common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_symmetrize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ClassMismatch as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CLASS
    except NumericalFailure as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except (DomainError, StructuralError, OSError, KeyError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
