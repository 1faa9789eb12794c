"""``potts-stable`` command line.

Every command prints one JSON report (``schema_version``, ``kind`` and the
command's fields) to stdout or to ``--report``.  Labels in reports and
files are 1-indexed.  Exit status: 0 on success, 1 on a runtime error,
2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import bound_report
from .core import InstanceTooLarge, ObjectiveVector, brute_force_map, energy
from .expansion import alpha_expansion_search
from .io import (FormatError, dump_report, format_labeling, read_instance, read_labeling,
                 write_instance)
from .locallp import INTEGRAL, build_local_lp, solve_local_lp
from .lp import LpSizeError, solve, write_mps
from .noise import NoiseError, NoiseSpec, sample_noisy, validate_apmap, validate_dswhp
from .repair import solve_repair
from .stability import check_expansion_stability
from .stereo import PGMError, StereoConfig, load_stereo_instance

LABEL_SOURCES = ("brute", "lp", "expansion")


class CliError(RuntimeError):
    pass


def data_path(name: str) -> Path:
    return Path(str(resources.files("potts_stable") / "data" / name))


def _crop(text: str):
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("crop must be x,y,w,h integers") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("crop must be x,y,w,h")
    return vals


def _floats(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or min(vals) <= 0:
        raise argparse.ArgumentTypeError("psi values must be positive")
    return vals


def _labels(x) -> list[int]:
    return (np.asarray(x) + 1).tolist()


def resolve_labeling(inst, source: str, seed: int = 0) -> tuple[np.ndarray, dict]:
    """Labeling from a file path or one of :data:`LABEL_SOURCES`.

    ``lp`` requires an integral local-LP optimum (which is then a certified
    MAP); ``expansion`` runs alpha-expansion from a seeded random start and
    is not certified.
    """
    if source == "brute":
        try:
            x, e = brute_force_map(inst)
        except InstanceTooLarge as exc:
            raise CliError(f"{exc}; pass --xbar lp, expansion or a labeling file") from None
        return x, {"source": "brute", "certified_map": True}
    if source == "lp":
        sol = solve_local_lp(inst)
        if sol.provenance != INTEGRAL:
            raise CliError("local LP optimum is fractional; it does not give a MAP labeling")
        return sol.labeling, {"source": "lp", "certified_map": True}
    if source == "expansion":
        rng = np.random.default_rng(seed)
        x = alpha_expansion_search(inst, rng.integers(0, inst.k, size=inst.n))
        return x, {"source": "expansion", "certified_map": False}
    return read_labeling(source, inst.n, inst.k), {"source": str(source), "certified_map": False}


# ---------------------------------------------------------------------------
# commands

def cmd_solve(args) -> dict:
    inst = read_instance(args.file)
    if args.method == "brute":
        x, e = brute_force_map(inst)
    else:
        rng = np.random.default_rng(args.seed)
        x = alpha_expansion_search(inst, rng.integers(0, inst.k, size=inst.n))
        e = energy(inst, x)
    return {"method": args.method, "n": inst.n, "k": inst.k, "m": inst.m,
            "labels": _labels(x), "energy": float(e)}


def cmd_lp(args) -> dict:
    inst = read_instance(args.file)
    lp = build_local_lp(inst)
    if args.dump:
        write_mps(lp, args.dump)
    sol = solve(lp, method=args.method)
    out = {"method": args.method, "status": sol.status, "objective": sol.objective,
           "variables": lp.n_vars, "rows": lp.n_rows, "nonzeros": lp.nnz,
           "checks": sol.checks}
    if sol.optimal:
        fs = solve_local_lp(inst, method=args.method)
        out["provenance"] = fs.provenance
        out["labels"] = None if fs.labeling is None else _labels(fs.labeling)
        out["node_marginals"] = fs.node
    return out


def cmd_check(args) -> dict:
    inst = read_instance(args.file)
    x, meta = resolve_labeling(inst, args.xbar, args.seed)
    rep = check_expansion_stability(inst, x, args.psi)
    out = rep.to_dict()
    out.update({"labels": _labels(x), "labeling": meta, "energy": energy(inst, x)})
    return out


def cmd_repair(args) -> dict:
    inst = read_instance(args.file)
    x, meta = resolve_labeling(inst, args.target, args.seed)
    if args.psi_grid:
        if args.out:
            raise CliError("--out cannot be combined with --psi-grid")
        sweep = [dict(solve_repair(inst, x, psi, method=args.method).to_dict(), psi=psi)
                 for psi in args.psi_grid]
        return {"grid": sweep, "target": _labels(x), "labeling": meta}
    res = solve_repair(inst, x, args.psi, method=args.method)
    out = res.to_dict()
    out.update({"psi": args.psi, "target": _labels(x), "labeling": meta})
    if args.out:
        write_instance(args.out, res.instance,
                       comment=f"repaired, psi={args.psi!r}, target={format_labeling(x).strip()}")
        out["output_file"] = str(args.out)
    return out


def _align_weights(observed, stable) -> np.ndarray:
    """Stable weights on the observed edge list; edges a repair removed get 0."""
    index = {(min(u, v), max(u, v)): e for e, (u, v) in enumerate(observed.edges.tolist())}
    w = np.zeros(observed.m)
    for (u, v), wt in zip(stable.edges.tolist(), stable.weights):
        e = index.get((min(u, v), max(u, v)))
        if e is None:
            raise CliError(f"stable instance has edge ({u + 1}, {v + 1}) not present in the observed one")
        w[e] += wt
    return w


def cmd_bounds(args) -> dict:
    observed = read_instance(args.observed)
    stable = read_instance(args.stable)
    if observed.n != stable.n or observed.k != stable.k:
        raise CliError("observed and stable instances must share nodes and labels")
    stable_theta = ObjectiveVector(stable.costs, _align_weights(observed, stable))
    xhat = solve_local_lp(observed, method=args.method)
    xmap, meta = resolve_labeling(observed, args.xbar, args.seed)
    rep = bound_report(observed, stable_theta, xmap, xhat, args.psi,
                       method=args.method)
    check = check_expansion_stability(stable, xmap, args.psi)
    out = rep.to_dict()
    out.update({"xhat_provenance": xhat.provenance, "labeling": meta,
                "stable_verdict": check.verdict, "stable_margin": check.margin,
                "ordering_holds": rep.ordering_holds()})
    if args.reference:
        out["reference"] = reference_values(args.reference)
    return out


def reference_values(name: str) -> dict:
    table = json.loads(data_path("reference_fullscale.json").read_text())
    found = {}
    for key in ("table_psi1", "table_psi4"):
        t = table[key]
        if name in t:
            found[key] = dict(zip(t["columns"], t[name]))
    if not found:
        raise CliError(f"no reference values for {name!r}")
    return {"status": table["status"], "instance": name, **found}


def cmd_stereo_build(args) -> dict:
    left = args.left or (data_path("synthetic_left.pgm") if args.synthetic else None)
    right = args.right or (data_path("synthetic_right.pgm") if args.synthetic else None)
    if left is None or right is None:
        raise CliError("give --left and --right, or --synthetic for the bundled pair")
    cfg = StereoConfig(str(left), str(right), args.k, args.P, args.T, args.s, args.crop, args.cap)
    inst = load_stereo_instance(cfg)
    if args.out:
        write_instance(args.out, inst, comment=f"stereo k={cfg.k} P={cfg.P} T={cfg.T} s={cfg.s} "
                                               f"crop={cfg.crop}")
    return {"n": inst.n, "m": inst.m, "k": inst.k, "crop": cfg.crop,
            "P": cfg.P, "T": cfg.T, "s": cfg.s, "cap": cfg.cap,
            "left": Path(left).name, "right": Path(right).name,
            "output_file": None if args.out is None else str(args.out)}


def _noise_spec(args) -> NoiseSpec:
    if args.spec:
        d = json.loads(Path(args.spec).read_text())
        d.setdefault("seed", args.seed)
        return NoiseSpec.from_dict(d)
    return NoiseSpec(sigma=args.sigma, gamma=args.gamma, rho=args.rho, eta=args.eta,
                     seed=args.seed)


def cmd_noise(args) -> dict:
    latent = read_instance(args.file)
    spec = _noise_spec(args)
    out = {"mode": args.mode, "spec": spec.to_dict()}
    if args.mode == "sample":
        s = sample_noisy(latent, spec)
        if args.out:
            write_instance(args.out, s.instance, comment=f"noisy sample seed={spec.seed}")
            out["output_file"] = str(args.out)
        out.update({"nodes_active": int(s.node_active.sum()),
                    "edges_active": int(s.edge_active.sum()),
                    "max_edge_mean_bias": float(np.abs(s.edge_mean_bias).max(initial=0.0)),
                    "min_weight": float(s.instance.weights.min(initial=np.inf))
                    if latent.m else None})
    elif args.mode == "validate-dswhp":
        out.update(validate_dswhp(latent, spec, args.trials, args.c))
    else:
        if args.psi is None:
            raise CliError("validate-apmap needs --psi")
        xbar = None if args.xbar == "brute" else resolve_labeling(latent, args.xbar, args.seed)[0]
        out.update(validate_apmap(latent, spec, args.psi, args.trials, args.c, xbar))
    return out


COMMANDS = {
    "solve": cmd_solve, "lp": cmd_lp, "check": cmd_check, "repair": cmd_repair,
    "bounds": cmd_bounds, "stereo-build": cmd_stereo_build, "noise": cmd_noise,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--format", choices=["json"], default="json")
    common.add_argument("--report", type=Path, help="write the JSON report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="add wall-clock timings to the report")

    p = argparse.ArgumentParser(prog="potts-stable", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="MAP labeling")
    s.add_argument("file")
    s.add_argument("--method", choices=["brute", "expansion"], default="brute")

    s = sub.add_parser("lp", parents=[common], help="local LP relaxation")
    s.add_argument("file")
    s.add_argument("--method", choices=["highs", "simplex"], default="highs")
    s.add_argument("--dump", type=Path, help="write the LP in fixed MPS format")

    s = sub.add_parser("check", parents=[common], help="(2,1,psi)-expansion stability")
    s.add_argument("file")
    s.add_argument("--psi", type=float, default=0.0)
    s.add_argument("--xbar", default="brute", help="labeling file or brute|lp|expansion")

    s = sub.add_parser("repair", parents=[common], help="nearest stable instance")
    s.add_argument("file")
    s.add_argument("--psi", type=float, default=1.0)
    s.add_argument("--target", default="brute", help="labeling file or brute|lp|expansion")
    s.add_argument("--method", choices=["highs", "simplex"], default="highs")
    s.add_argument("--out", type=Path, help="write the repaired instance")
    s.add_argument("--psi-grid", type=_floats, help="comma-separated psi values to sweep, e.g. 1,2,4")

    s = sub.add_parser("bounds", parents=[common], help="recovery bounds against a stable instance")
    s.add_argument("observed")
    s.add_argument("stable")
    s.add_argument("--psi", type=float, default=1.0)
    s.add_argument("--xbar", default="lp",
                   help="observed MAP: labeling file or brute|lp|expansion")
    s.add_argument("--method", choices=["highs", "simplex"], default="highs")
    s.add_argument("--reference", choices=["tsukuba", "venus", "cones"],
                   help="echo published full-scale values (reference only, not reproduced)")

    s = sub.add_parser("stereo-build", parents=[common], help="stereo instance from PGM images")
    s.add_argument("--left", type=Path)
    s.add_argument("--right", type=Path)
    s.add_argument("--synthetic", action="store_true", help="use the bundled synthetic pair")
    s.add_argument("--k", type=int, default=5)
    s.add_argument("--P", type=float, default=2.0)
    s.add_argument("--T", type=float, default=50.0)
    s.add_argument("--s", type=float, default=4.0)
    s.add_argument("--cap", type=float)
    s.add_argument("--crop", type=_crop, help="x,y,w,h")
    s.add_argument("--out", type=Path)

    s = sub.add_parser("noise", parents=[common], help="noisy samples and Monte Carlo checks")
    s.add_argument("file")
    s.add_argument("--mode", choices=["sample", "validate-dswhp", "validate-apmap"],
                   default="sample")
    s.add_argument("--spec", type=Path, help="NoiseSpec JSON (overrides the scalar flags)")
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--gamma", type=float, default=0.0)
    s.add_argument("--rho", type=float, default=1.0)
    s.add_argument("--eta", type=float, default=1.0)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--c", type=float, default=1.0, help="universal constant in the bounds")
    s.add_argument("--psi", type=float)
    s.add_argument("--xbar", default="brute", help="latent MAP: labeling file or brute|lp|expansion")
    s.add_argument("--out", type=Path)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except (CliError, FormatError, PGMError, NoiseError, InstanceTooLarge, LpSizeError,
            OSError, ValueError, RuntimeError) as exc:
        print(f"potts-stable {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if args.timings:
        report["timings"] = {"seconds": time.perf_counter() - t0}
    text = dump_report(report, args.command)
    if args.report:
        args.report.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
