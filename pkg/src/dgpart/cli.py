"""Batch command line: run configured solves, eigenvalue computations, presets.

    dgpart solve --config run.cfg [--seed 3 | --seeds 10] [--out DIR]
                 [--allow-nonconverged] [--jobs N]
    dgpart eigen --shape disk --n 1024 --tol 1e-5 [--tau0 0.25] [--dim 2]
    dgpart presets list | run NAME [--out DIR] [--jobs N] | show NAME

Exit status: 0 on success, 1 when any run failed to converge (suppressed by
--allow-nonconverged) or on I/O errors, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import presets as presets_mod
from . import reference
from .config import ConfigError, RunManifest, build_manifest, load_manifest
from .report import emit_eigen_outputs, emit_outputs, write_summary_json
from .seeding import voronoi_init
from .solver import SolverConfig, eigen_solve, solve

__all__ = ["main", "run_manifest"]


def _manifest_info(m: RunManifest) -> dict:
    return {
        "experiment": m.experiment,
        "mode": m.mode,
        "dim": m.dim,
        "n": m.n,
        "shape": m.shape,
        "shape_params": m.shape_params,
        "k": m.k,
        "variant": m.solver.variant,
        "adaptive": m.solver.adaptive,
        "adaptive_stop": m.solver.adaptive_stop,
        "tau0": m.solver.tau0,
        "tau_min": m.solver.tau_min,
        "metric": m.metric,
    }


def _run_one_seed(manifest: RunManifest, seed: int) -> dict:
    """Solve one seed of a partition manifest and write its output directory."""
    mask = manifest.mask()
    cfg = replace(manifest.solver, rng_seed=seed)
    u0 = voronoi_init(manifest.k, mask, seed, metric=manifest.metric)
    result = solve(cfg, mask, u0)
    outdir = manifest.out / f"seed_{seed}"
    emit_outputs(result, _manifest_info(manifest), seed, outdir)
    rec = result.trace.records[-1]
    return {
        "seed": seed,
        "converged": result.converged,
        "reason": result.reason,
        "final_energy": rec.energy,
        "trace_min_energy": result.trace.min_energy(),
        "iterations": len(result.trace),
        "tau_final": result.tau_final,
        "dir": str(outdir),
    }


def run_manifest(manifest: RunManifest, jobs: int = 1) -> dict:
    """Execute a manifest (all seeds) and write the aggregate summary.

    Returns the aggregate summary dict; caller decides how to treat
    non-convergence.
    """
    manifest.out.mkdir(parents=True, exist_ok=True)

    if manifest.mode == "table1":
        rows = reference.table1_sweep(manifest.n)
        path = manifest.out / "table1.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "energy", "analytic"])
            for tau, energy, analytic in rows:
                w.writerow([repr(tau), repr(energy), repr(analytic)])
        summary = {
            **_manifest_info(manifest),
            "rows": [[t, e, a] for t, e, a in rows],
            "converged": True,
        }
        write_summary_json(summary, manifest.out / "summary.json")
        return summary

    if manifest.mode == "eigen":
        mask = manifest.mask()
        result = eigen_solve(mask, manifest.solver)
        emit_eigen_outputs(result, _manifest_info(manifest), manifest.out)
        return {
            **_manifest_info(manifest),
            "eigenvalue": result.eigenvalue,
            "tau_final": result.tau_final,
            "converged": result.converged,
        }

    per_seed: list[dict]
    if jobs > 1 and len(manifest.seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_seed = list(pool.map(_run_one_seed, [manifest] * len(manifest.seeds), manifest.seeds))
    else:
        per_seed = [_run_one_seed(manifest, s) for s in manifest.seeds]

    finals = [r["final_energy"] for r in per_seed]
    best = min(per_seed, key=lambda r: r["final_energy"])
    summary = {
        **_manifest_info(manifest),
        "seeds": list(manifest.seeds),
        "per_seed": per_seed,
        "best_seed": best["seed"],
        "best_final_energy": best["final_energy"],
        "best_trace_min_energy": min(r["trace_min_energy"] for r in per_seed),
        "mean_final_energy": sum(finals) / len(finals),
        "all_converged": all(r["converged"] for r in per_seed),
        "converged": all(r["converged"] for r in per_seed),
    }
    write_summary_json(summary, manifest.out / "summary.json")
    return summary


def _cmd_solve(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.config)
    if args.seed is not None and args.seeds is not None:
        print("error: give only one of --seed / --seeds", file=sys.stderr)
        return 2
    if args.seed is not None:
        manifest = replace(manifest, seeds=(args.seed,))
    elif args.seeds is not None:
        manifest = replace(manifest, seeds=tuple(range(args.seeds)))
    if args.out is not None:
        manifest = replace(manifest, out=Path(args.out))

    summary = run_manifest(manifest, jobs=args.jobs)
    _print_summary(manifest, summary)
    if not summary.get("converged", True) and not args.allow_nonconverged:
        print("error: at least one run did not converge (use --allow-nonconverged to accept)",
              file=sys.stderr)
        return 1
    return 0


def _print_summary(manifest: RunManifest, summary: dict) -> None:
    if manifest.mode == "eigen":
        print(f"{manifest.experiment}: eigenvalue = {summary['eigenvalue']:.6f} "
              f"(tau_final = {summary['tau_final']:.3e})")
    elif manifest.mode == "table1":
        for tau, energy, analytic in summary["rows"]:
            print(f"tau = {tau:.6e}: energy = {energy:.6f} (analytic {analytic:.6f})")
    else:
        print(f"{manifest.experiment}: best final energy = {summary['best_final_energy']:.6f} "
              f"over {len(summary['seeds'])} seed(s); mean = {summary['mean_final_energy']:.6f}")
        for r in summary["per_seed"]:
            flag = "" if r["converged"] else f"  [NOT CONVERGED: {r['reason']}]"
            print(f"  seed {r['seed']:>3}: final {r['final_energy']:.6f} "
                  f"(trace min {r['trace_min_energy']:.6f}, {r['iterations']} iters){flag}")
    print(f"outputs in {manifest.out}")


def _cmd_eigen(args: argparse.Namespace) -> int:
    raw = {
        "experiment": f"eigen-{args.shape}-n{args.n}",
        "mode": "eigen",
        "dim": args.dim,
        "n": args.n,
        "shape": args.shape,
        "tol": args.tol,
        "tau0": args.tau0,
        "out": args.out or f"results/eigen-{args.shape}-n{args.n}",
    }
    manifest = build_manifest(raw, source="<eigen args>")
    summary = run_manifest(manifest)
    _print_summary(manifest, summary)
    return 0 if summary["converged"] else 1


def _cmd_presets(args: argparse.Namespace) -> int:
    if args.action == "list":
        for name in presets_mod.preset_names():
            print(f"{name:32s} {presets_mod.preset_description(name)}")
        return 0
    if args.action == "show":
        cfg = presets_mod.preset_config(args.name)
        for key, value in cfg.items():
            print(f"{key} = {value}")
        return 0
    # run
    manifest = presets_mod.preset_manifest(args.name)
    if args.out is not None:
        manifest = replace(manifest, out=Path(args.out))
    summary = run_manifest(manifest, jobs=args.jobs)
    _print_summary(manifest, summary)
    if not summary.get("converged", True) and not args.allow_nonconverged:
        print("error: at least one run did not converge (use --allow-nonconverged to accept)",
              file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dgpart",
                                     description="Dirichlet k-partitions by diffusion-generated thresholding")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a configured partition/eigen experiment")
    p.add_argument("--config", required=True, help="flat key=value configuration file")
    p.add_argument("--seed", type=int, default=None, help="run a single seed")
    p.add_argument("--seeds", type=int, default=None, help="run seeds 0..N-1")
    p.add_argument("--out", default=None, help="output directory override")
    p.add_argument("--allow-nonconverged", action="store_true",
                   help="exit 0 even if a run hits an iteration or reseed cap")
    p.add_argument("--jobs", type=int, default=1, help="parallel seed runs (default 1)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("eigen", help="first eigenvalue of a fixed domain")
    p.add_argument("--shape", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--tau0", type=float, default=0.1)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eigen)

    p = sub.add_parser("presets", help="list or run bundled experiment presets")
    p.add_argument("action", choices=["list", "run", "show"])
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--allow-nonconverged", action="store_true")
    p.set_defaults(func=_cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "presets" and args.action in ("run", "show") and not args.name:
        parser.error("presets run/show needs a preset name")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
