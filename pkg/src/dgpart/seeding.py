"""Random Voronoi initialization of the candidate fields.

Seeds are drawn uniformly (without replacement) among in-domain grid nodes
using numpy's seeded PCG64 generator, so a run is reproducible from its integer
seed alone.  Every in-domain node is assigned to its nearest seed -- wrap-around
distance on the torus, plain Euclidean inside masked domains -- and each
component starts as the L2-normalized indicator of one Voronoi cell.
"""

from __future__ import annotations

import numpy as np

from .domains import DomainMask
from .partition import MultiField

__all__ = ["voronoi_init", "voronoi_init_from_points", "voronoi_labels"]

_MAX_RESEED_TRIES = 100


def _node_coords(mask: DomainMask, flat_indices: np.ndarray) -> np.ndarray:
    """(m, dim) coordinates of grid nodes given flat C-order indices."""
    spec = mask.spec
    multi = np.unravel_index(flat_indices, spec.shape)
    x = spec.axis_coords()
    return np.stack([x[m] for m in multi], axis=1)


def voronoi_labels(points: np.ndarray, mask: DomainMask, metric: str = "periodic") -> np.ndarray:
    """Label every in-domain node by its nearest seed point (ties: lowest index).

    Returns an int array of the grid shape with -1 outside the mask.
    """
    if metric not in ("periodic", "euclidean"):
        raise ValueError(f"metric must be 'periodic' or 'euclidean', got {metric!r}")
    points = np.asarray(points, dtype=np.float64)
    spec = mask.spec
    if points.ndim != 2 or points.shape[1] != spec.dim:
        raise ValueError(f"seed points must have shape (k, {spec.dim})")
    inside_flat = np.flatnonzero(mask.indicator.values.ravel() == 1.0)
    coords = _node_coords(mask, inside_flat)

    best_d = np.full(len(inside_flat), np.inf)
    best_i = np.zeros(len(inside_flat), dtype=np.int32)
    for i, p in enumerate(points):
        delta = np.abs(coords - p[None, :])
        if metric == "periodic":
            delta = np.minimum(delta, 2.0 * np.pi - delta)
        d2 = np.sum(delta * delta, axis=1)
        better = d2 < best_d  # strict: ties stay with the lower index
        best_d[better] = d2[better]
        best_i[better] = i

    labels = np.full(spec.size, -1, dtype=np.int32)
    labels[inside_flat] = best_i
    return labels.reshape(spec.shape)


def _fields_from_labels(mask: DomainMask, labels: np.ndarray, k: int) -> MultiField:
    vol = mask.spec.cell_volume
    data = np.empty((k,) + mask.spec.shape)
    for ell in range(k):
        ind = (labels == ell).astype(np.float64)
        data[ell] = ind / np.sqrt(vol * ind.sum())
    return MultiField(mask.spec, data)


def voronoi_init(k: int, mask: DomainMask, rng_seed: int, metric: str = "periodic") -> MultiField:
    """Draw k seeds inside the mask and return normalized Voronoi-cell indicators.

    An empty Voronoi cell triggers a redraw of the offending seed (at most
    100 tries); with seeds at distinct grid nodes each cell contains at least
    its own seed node, so redraws do not occur in practice.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    inside_flat = np.flatnonzero(mask.indicator.values.ravel() == 1.0)
    if k > len(inside_flat):
        raise ValueError(f"k={k} exceeds the {len(inside_flat)} in-domain grid nodes")
    rng = np.random.default_rng(rng_seed)
    chosen = rng.choice(inside_flat, size=k, replace=False)
    for _ in range(_MAX_RESEED_TRIES):
        points = _node_coords(mask, chosen)
        labels = voronoi_labels(points, mask, metric)
        counts = np.bincount(labels[labels >= 0], minlength=k)
        empty = np.flatnonzero(counts == 0)
        if len(empty) == 0:
            return _fields_from_labels(mask, labels, k)
        for ell in empty:  # redraw only the offending seeds
            chosen[ell] = rng.choice(inside_flat)
    raise RuntimeError("could not find a seeding without empty Voronoi cells")


def voronoi_init_from_points(points: np.ndarray, mask: DomainMask, metric: str = "periodic") -> MultiField:
    """Deterministic variant of voronoi_init for caller-supplied seed points."""
    points = np.asarray(points, dtype=np.float64)
    labels = voronoi_labels(points, mask, metric)
    counts = np.bincount(labels[labels >= 0], minlength=len(points))
    if np.any(counts == 0):
        raise ValueError(f"seed points {np.flatnonzero(counts == 0).tolist()} own no grid nodes")
    return _fields_from_labels(mask, labels, len(points))
