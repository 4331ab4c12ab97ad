"""Preset run configurations for the bundled experiment families.

Each preset is a flat config mapping (the same schema as a config file) so any
of them can be exported to disk, edited, and re-run.  Partition galleries use
the adaptive schedule with the phi-frozen stop; the 3D galleries run at the
fixed tau = pi/16.
"""

from __future__ import annotations

import math

from .config import RunManifest, build_manifest

__all__ = ["preset_names", "preset_config", "preset_manifest", "preset_description"]

_PRESETS: dict[str, tuple[str, dict]] = {}


def _add(name: str, description: str, **cfg) -> None:
    _PRESETS[name] = (description, {"experiment": name, **cfg})


def _fmt_tol(tol: float) -> str:
    return f"{tol:.0e}".replace("e-0", "e-")


# --- accuracy tables -------------------------------------------------------

_add("table1", "relaxed eigenvalue of the unit square eigenfunction over a tau sweep",
     mode="table1", n=512, out="results/table1")

for n in (64, 128, 256, 512, 1024):
    for tol in (1e-3, 1e-4, 1e-5, 1e-6, 1e-7):
        _add(f"table2-n{n}-tol{_fmt_tol(tol)}",
             f"square eigenvalue at n={n}, tol={tol:g}",
             mode="eigen", dim=2, n=n, shape="square", tol=tol, tau0=0.1,
             out=f"results/table2/n{n}-tol{_fmt_tol(tol)}")

for shape in ("rotated_square", "rectangle", "equilateral_triangle", "disk", "three_quarter_disk"):
    for tol in (1e-3, 1e-4, 1e-5, 1e-6, 1e-7):
        _add(f"table3-{shape}-tol{_fmt_tol(tol)}",
             f"{shape} eigenvalue at n=1024, tol={tol:g}",
             mode="eigen", dim=2, n=1024, shape=shape, tol=tol, tau0=0.1,
             out=f"results/table3/{shape}-tol{_fmt_tol(tol)}")

# --- energy decay and adaptive-schedule traces -----------------------------

for variant in ("alg1", "alg2"):
    _add(f"fig4-energy-decay-{variant}",
         f"3-partition energy decay on the torus, fixed tau = 1/4, {variant}",
         mode="partition", dim=2, n=256, shape="torus", k=3, variant=variant,
         adaptive=False, tau0=0.25, seed=1, out=f"results/fig4-{variant}")

for variant in ("alg1", "alg2"):
    _add(f"fig5-adaptive-trace-{variant}",
         "adaptive 3-partition with energies re-evaluated at fixed tau = 1e-4",
         mode="partition", dim=2, n=256, shape="torus", k=3, variant=variant,
         adaptive=True, adaptive_stop="phi_frozen", tau0=0.25, tau_min=1e-4,
         tau_eval=1e-4, seed=1, out=f"results/fig5-{variant}")

_add("fig6-adaptive", "adaptive tau 1/4..1/64 (all levels), to compare with the fixed run",
     mode="partition", dim=2, n=256, shape="torus", k=3, adaptive=True,
     adaptive_stop="tau_floor", tau0=0.25, tau_min=1.0 / 64.0, seed=2,
     out="results/fig6-adaptive")
_add("fig6-fixed", "fixed tau = 1/64 from the same seed as fig6-adaptive",
     mode="partition", dim=2, n=256, shape="torus", k=3, adaptive=False,
     tau0=1.0 / 64.0, seed=2, out="results/fig6-fixed")

# --- 2D galleries ----------------------------------------------------------

for k in (4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 15, 16, 18, 20, 23, 24, 25, 28, 30, 36):
    _add(f"torus-k{k}", f"{k}-partition of the periodic square, best of 10 seeds",
         mode="partition", dim=2, n=256, shape="torus", k=k, adaptive=True,
         adaptive_stop="phi_frozen", level_tol=1.0 / 128.0, tau0=0.25,
         tau_min=1.0 / 128.0, seeds=10, out=f"results/torus/k{k}")

for k in (2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 15, 21, 28, 36, 45):
    _add(f"triangle-k{k}", f"{k}-partition of the equilateral triangle, best of 10 seeds",
         mode="partition", dim=2, n=512, shape="equilateral_triangle", k=k,
         adaptive=True, adaptive_stop="phi_frozen", tau0=0.25, tau_min=1.0 / 128.0,
         seeds=10, out=f"results/triangle/k{k}")

for shape in ("square", "pentagon", "hexagon", "disk", "three_fold_star", "five_fold_star"):
    for k in range(2, 11):
        _add(f"{shape}-k{k}", f"{k}-partition of the {shape}, best of 10 seeds",
             mode="partition", dim=2, n=512, shape=shape, k=k, adaptive=True,
             adaptive_stop="phi_frozen", tau0=0.25, tau_min=1.0 / 128.0, seeds=10,
             out=f"results/{shape}/k{k}")

# --- 3D galleries (fixed tau = pi/16) --------------------------------------

for k in (4, 8, 16):
    _add(f"torus3d-k{k}", f"{k}-partition of the periodic cube at fixed tau = pi/16",
         mode="partition", dim=3, n=128, shape="torus", k=k, adaptive=False,
         tau0=math.pi / 16.0, seeds=3, out=f"results/torus3d/k{k}")

for k in (3, 4, 5, 6, 8, 9, 14):
    _add(f"cube-k{k}", f"{k}-partition of the cube at fixed tau = pi/16",
         mode="partition", dim=3, n=128, shape="cube", k=k, adaptive=False,
         tau0=math.pi / 16.0, seeds=3, out=f"results/cube/k{k}")

for k in (3, 4, 6, 12, 13, 15):
    _add(f"ball-k{k}", f"{k}-partition of the ball at fixed tau = pi/16",
         mode="partition", dim=3, n=128, shape="ball", k=k, adaptive=False,
         tau0=math.pi / 16.0, seeds=3, out=f"results/ball/k{k}")

for k in (2, 4, 10, 20):
    _add(f"tetrahedron-k{k}", f"{k}-partition of the tetrahedron at fixed tau = pi/16",
         mode="partition", dim=3, n=128, shape="tetrahedron", k=k, adaptive=False,
         tau0=math.pi / 16.0, seeds=3, out=f"results/tetrahedron/k{k}")

# --- small smoke preset ----------------------------------------------------

_add("smoke-torus-k2", "tiny 2-partition for a quick end-to-end check",
     mode="partition", dim=2, n=32, shape="torus", k=2, adaptive=False,
     tau0=0.25, seed=0, out="results/smoke-torus-k2")


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def preset_description(name: str) -> str:
    if name not in _PRESETS:
        raise KeyError(f"unknown preset '{name}'")
    return _PRESETS[name][0]


def preset_config(name: str) -> dict:
    """The flat config mapping of a preset (copy; edit freely)."""
    if name not in _PRESETS:
        raise KeyError(f"unknown preset '{name}'")
    return dict(_PRESETS[name][1])


def preset_manifest(name: str) -> RunManifest:
    return build_manifest(preset_config(name), source=f"preset:{name}")
