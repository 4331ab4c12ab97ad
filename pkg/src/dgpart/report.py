"""Run outputs: label images, raw volumes, CSV traces, JSON summaries, figures.

2D label fields are written as binary PGM (P5, maxval 255) with distinct gray
levels per region and 255 for nodes outside the domain; image rows run from
y = +pi (top) down, columns from x = -pi (left).  3D label fields are written
as raw 8-bit volumes with a JSON sidecar describing the layout.  Figures are
rendered with the matplotlib Agg backend next to the delimited outputs.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .partition import Partition
from .solver import EigenResult, EnergyTrace, SolveResult

__all__ = [
    "write_pgm",
    "write_raw_volume",
    "write_trace_csv",
    "write_summary_json",
    "render_partition_figure",
    "render_trace_figure",
    "emit_outputs",
    "emit_eigen_outputs",
]

OUTSIDE_GRAY = 255


def _label_grays(k: int) -> np.ndarray:
    """Distinct gray levels for labels 0..k-1, all below OUTSIDE_GRAY."""
    if k == 1:
        return np.array([0], dtype=np.uint8)
    return np.floor(np.arange(k) * 254.0 / (k - 1)).astype(np.uint8)


def _labels_to_gray_image(partition: Partition) -> np.ndarray:
    """uint8 image: rows top-to-bottom = y descending, columns = x ascending."""
    grays = _label_grays(partition.k)
    lut = np.concatenate([grays, np.array([OUTSIDE_GRAY], dtype=np.uint8)])
    img = lut[partition.labels]  # OUTSIDE == -1 indexes the last entry
    return img.T[::-1, :]


def write_pgm(partition: Partition, path: Path) -> None:
    """Binary PGM (P5, maxval 255) of a 2D label field."""
    if partition.spec.dim != 2:
        raise ValueError("PGM output is for 2D partitions; use write_raw_volume in 3D")
    img = _labels_to_gray_image(partition)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
        fh.write(img.tobytes())


def write_raw_volume(partition: Partition, raw_path: Path, meta_path: Path) -> None:
    """Row-major uint8 labels (OUTSIDE -> 255) plus a JSON layout descriptor."""
    if partition.k > 255:
        raise ValueError("8-bit label volume supports at most 255 regions")
    vol = partition.labels.astype(np.int16)
    vol = np.where(vol < 0, 255, vol).astype(np.uint8)
    with open(raw_path, "wb") as fh:
        fh.write(np.ascontiguousarray(vol).tobytes())
    meta = {
        "dtype": "uint8",
        "shape": list(partition.spec.shape),
        "order": "C",
        "axes": ["x1", "x2", "x3"][: partition.spec.dim],
        "outside_value": 255,
        "byte_order": "not applicable (single byte)",
        "k": partition.k,
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_trace_csv(trace: EnergyTrace, path: Path) -> None:
    """One row per outer iteration: iter,tau,energy,changed_cells,wall_ms."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "tau", "energy", "changed_cells", "wall_ms"])
        for r in trace.records:
            w.writerow([r.iteration, repr(r.tau), repr(r.energy), r.changed_cells, f"{r.wall_ms:.3f}"])


def write_eval_trace_csv(trace: EnergyTrace, path: Path) -> None:
    """Companion trace of energies re-evaluated at the fixed tau_eval."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "tau", "energy_eval"])
        for r in trace.records:
            if r.energy_eval is not None:
                w.writerow([r.iteration, repr(r.tau), repr(r.energy_eval)])


def write_summary_json(summary: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_summary(result: SolveResult, manifest_info: dict, seed: int) -> dict:
    """Summary dict for one solve; wall-clock fields are not byte-stable."""
    rec = result.trace.records[-1]
    return {
        **manifest_info,
        "seed": seed,
        "converged": result.converged,
        "reason": result.reason,
        "iterations": len(result.trace),
        "tau_final": result.tau_final,
        "tau_schedule": [t for t, _ in result.trace.segment_ends()],
        "final_energy": rec.energy,
        "per_region": list(rec.per_region),
        "trace_min_energy": result.trace.min_energy(),
        "segment_end_energies": [[t, e] for t, e in result.trace.segment_ends()],
        "region_cells": result.partition.region_counts().tolist(),
        "changed_cells_final": rec.changed_cells,
        "wall_ms_total": sum(r.wall_ms for r in result.trace.records),
    }


def render_partition_figure(partition: Partition, path: Path, title: str | None = None) -> None:
    """Color rendering of the label field (mid-plane slices in 3D)."""
    k = partition.k
    cmap = plt.get_cmap("tab20", max(k, 2))
    masked = np.ma.masked_less(partition.labels, 0)
    if partition.spec.dim == 2:
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.imshow(
            masked.T[::-1, :],
            cmap=cmap,
            vmin=0,
            vmax=max(k - 1, 1),
            extent=(-np.pi, np.pi, -np.pi, np.pi),
            interpolation="nearest",
        )
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    else:
        n = partition.spec.n
        fig, axes = plt.subplots(1, 3, figsize=(12, 4))
        cuts = [masked[n // 2, :, :], masked[:, n // 2, :], masked[:, :, n // 2]]
        names = ["x1 = 0 plane", "x2 = 0 plane", "x3 = 0 plane"]
        for ax, cut, name in zip(axes, cuts, names):
            ax.imshow(cut.T[::-1, :], cmap=cmap, vmin=0, vmax=max(k - 1, 1),
                      extent=(-np.pi, np.pi, -np.pi, np.pi), interpolation="nearest")
            ax.set_title(name, fontsize=9)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_trace_figure(trace: EnergyTrace, path: Path, title: str | None = None) -> None:
    """Energy vs. iteration, with tau-halving events marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    it = np.array([r.iteration for r in trace.records])
    ax.plot(it, trace.energies(), lw=1.2, label="energy at working tau")
    ev = trace.eval_energies()
    if np.any(np.isfinite(ev)):
        ax.plot(it, ev, lw=1.0, ls="--", label="energy at fixed eval tau")
        ax.legend(fontsize=8)
    taus = trace.taus()
    for j in range(1, len(taus)):
        if taus[j] != taus[j - 1]:
            ax.axvline(it[j], color="gray", lw=0.6, alpha=0.6)
    ax.set_xlabel("outer iteration")
    ax.set_ylabel("energy")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_eigen_figure(result: EigenResult, path: Path, title: str | None = None) -> None:
    """Eigenfunction heat map (2D) or mid-slice (3D) with the value in the title."""
    u = result.eigenfunction.values
    fig, ax = plt.subplots(figsize=(5, 4))
    img = u if result.eigenfunction.spec.dim == 2 else u[u.shape[0] // 2]
    im = ax.imshow(img.T[::-1, :], cmap="viridis", extent=(-np.pi, np.pi, -np.pi, np.pi))
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_title(title or f"lambda = {result.eigenvalue:.4f}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def emit_outputs(result: SolveResult, manifest_info: dict, seed: int, outdir: Path) -> list[Path]:
    """Write the full output set for one converged (or flagged) run."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if result.partition.spec.dim == 2:
        p = outdir / "labels.pgm"
        write_pgm(result.partition, p)
        written.append(p)
    else:
        p = outdir / "labels.raw"
        m = outdir / "labels.meta.json"
        write_raw_volume(result.partition, p, m)
        written.extend([p, m])

    p = outdir / "trace.csv"
    write_trace_csv(result.trace, p)
    written.append(p)
    if any(r.energy_eval is not None for r in result.trace.records):
        p = outdir / "trace_eval.csv"
        write_eval_trace_csv(result.trace, p)
        written.append(p)

    p = outdir / "summary.json"
    write_summary_json(run_summary(result, manifest_info, seed), p)
    written.append(p)

    p = outdir / "partition.png"
    render_partition_figure(result.partition, p, title=manifest_info.get("experiment"))
    written.append(p)
    p = outdir / "energy.png"
    render_trace_figure(result.trace, p, title=manifest_info.get("experiment"))
    written.append(p)
    return written


def emit_eigen_outputs(result: EigenResult, info: dict, outdir: Path) -> list[Path]:
    """Write eigen-run outputs: JSON summary, per-level CSV, figure."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    p = outdir / "eigen.json"
    write_summary_json(
        {
            **info,
            "eigenvalue": result.eigenvalue,
            "converged": result.converged,
            "tau_final": result.tau_final,
            "levels": [[t, lam, m] for t, lam, m in result.levels],
        },
        p,
    )
    written.append(p)

    p = outdir / "eigen_levels.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "lambda", "inner_iterations"])
        for t, lam, m in result.levels:
            w.writerow([repr(t), repr(lam), m])
    written.append(p)

    p = outdir / "eigenfunction.png"
    render_eigen_figure(result, p)
    written.append(p)
    return written
