"""Catalog of domain masks: indicator of the physical domain inside the box.

Dirichlet problems on a shape are posed by zeroing fields outside the shape's
indicator each iteration, so the only geometry ever needed is a point-in-shape
test at the grid nodes.  Nodes on the shape boundary count as inside (closed
domains); every 2D shape keeps a margin of at least pi/4 to the box boundary so
that diffused fields wrap around the torus negligibly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import ScalarField, GridSpec, integrate

__all__ = ["DomainMask", "make_mask", "restrict", "shape_names", "shape_dim"]


@dataclass(frozen=True)
class DomainMask:
    """Binary indicator of the domain, with the shape's name and parameters."""

    spec: GridSpec
    indicator: ScalarField
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        vals = self.indicator.values
        if not np.all((vals == 0.0) | (vals == 1.0)):
            raise ValueError("mask indicator must be 0/1 valued")
        if not vals.any():
            raise ValueError(f"mask '{self.name}' selects no grid nodes")

    @property
    def inside(self) -> np.ndarray:
        """Boolean inside-array (read-only view of the indicator)."""
        return self.indicator.values == 1.0

    @property
    def n_inside(self) -> int:
        return int(np.count_nonzero(self.indicator.values))

    @property
    def is_full(self) -> bool:
        return self.n_inside == self.spec.size

    def volume(self) -> float:
        return integrate(self.indicator)


def restrict(f: ScalarField, mask: DomainMask) -> ScalarField:
    """Pointwise product f * indicator (zero outside the domain)."""
    if f.spec != mask.spec:
        raise ValueError("grid mismatch between field and mask")
    return ScalarField(f.spec, f.values * mask.indicator.values)


# ---------------------------------------------------------------------------
# shape builders: each returns a boolean inside-array on the grid nodes
# ---------------------------------------------------------------------------

def _require_positive(params: dict, *names: str) -> None:
    for name in names:
        if params[name] <= 0:
            raise ValueError(f"shape parameter '{name}' must be positive, got {params[name]}")


def _regular_polygon_vertices(sides: int, circumradius: float, phase: float = np.pi / 2) -> np.ndarray:
    """Vertices of a regular polygon, first vertex at angle ``phase`` (+y axis)."""
    ang = phase + 2.0 * np.pi * np.arange(sides) / sides
    return np.stack([circumradius * np.cos(ang), circumradius * np.sin(ang)], axis=1)


def _star_vertices(points: int, outer: float, inner: float) -> np.ndarray:
    """Alternating outer/inner vertices of a star polygon, outer vertex on +y."""
    ang = np.pi / 2 + np.pi * np.arange(2 * points) / points
    rad = np.where(np.arange(2 * points) % 2 == 0, outer, inner)
    return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)


def _convex_polygon_inside(X: np.ndarray, Y: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Closed convex polygon (CCW vertices): all edge cross products >= 0."""
    inside = np.ones_like(X, dtype=bool)
    m = len(verts)
    for a in range(m):
        x1, y1 = verts[a]
        x2, y2 = verts[(a + 1) % m]
        inside &= (x2 - x1) * (Y - y1) - (y2 - y1) * (X - x1) >= 0
    return inside


def _polygon_inside_evenodd(X: np.ndarray, Y: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """General polygon membership by ray crossing (handles star polygons)."""
    inside = np.zeros_like(X, dtype=bool)
    m = len(verts)
    for a in range(m):
        x1, y1 = verts[a]
        x2, y2 = verts[(a + 1) % m]
        straddles = (y1 > Y) != (y2 > Y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = x1 + (Y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= straddles & (X < xcross)
    return inside


def _torus(spec, params):
    return np.ones(spec.shape, dtype=bool)


def _square(spec, params):
    _require_positive(params, "side")
    half = params["side"] / 2.0
    X, Y = spec.meshgrid()
    return (np.abs(X) <= half) & (np.abs(Y) <= half)


def _rotated_square(spec, params):
    _require_positive(params, "side")
    # side s rotated 45 degrees: |x| + |y| <= s/sqrt(2)
    lim = params["side"] / np.sqrt(2.0)
    X, Y = spec.meshgrid()
    return np.abs(X) + np.abs(Y) <= lim


def _rectangle(spec, params):
    _require_positive(params, "width", "height")
    X, Y = spec.meshgrid()
    return (np.abs(X) <= params["width"] / 2.0) & (np.abs(Y) <= params["height"] / 2.0)


def _equilateral_triangle(spec, params):
    _require_positive(params, "side")
    circum = params["side"] / np.sqrt(3.0)
    X, Y = spec.meshgrid()
    return _convex_polygon_inside(X, Y, _regular_polygon_vertices(3, circum))


def _disk(spec, params):
    _require_positive(params, "radius")
    X, Y = spec.meshgrid()
    return X * X + Y * Y <= params["radius"] ** 2


def _three_quarter_disk(spec, params):
    _require_positive(params, "radius")
    X, Y = spec.meshgrid()
    in_disk = X * X + Y * Y <= params["radius"] ** 2
    return in_disk & ~((X > 0) & (Y > 0))


def _pentagon(spec, params):
    _require_positive(params, "circumradius")
    X, Y = spec.meshgrid()
    return _convex_polygon_inside(X, Y, _regular_polygon_vertices(5, params["circumradius"]))


def _hexagon(spec, params):
    _require_positive(params, "circumradius")
    X, Y = spec.meshgrid()
    return _convex_polygon_inside(X, Y, _regular_polygon_vertices(6, params["circumradius"]))


def _three_fold_star(spec, params):
    _require_positive(params, "outer_radius", "inner_radius")
    X, Y = spec.meshgrid()
    return _polygon_inside_evenodd(X, Y, _star_vertices(3, params["outer_radius"], params["inner_radius"]))


def _five_fold_star(spec, params):
    _require_positive(params, "outer_radius", "inner_radius")
    X, Y = spec.meshgrid()
    return _polygon_inside_evenodd(X, Y, _star_vertices(5, params["outer_radius"], params["inner_radius"]))


def _cube(spec, params):
    _require_positive(params, "side")
    half = params["side"] / 2.0
    X, Y, Z = spec.meshgrid()
    return (np.abs(X) <= half) & (np.abs(Y) <= half) & (np.abs(Z) <= half)


def _ball(spec, params):
    _require_positive(params, "radius")
    X, Y, Z = spec.meshgrid()
    return X * X + Y * Y + Z * Z <= params["radius"] ** 2


def _tetrahedron(spec, params):
    _require_positive(params, "circumradius")
    rho = params["circumradius"]
    # regular tetrahedron centered at the origin, one vertex on +z
    verts = rho * np.array(
        [
            [0.0, 0.0, 1.0],
            [2.0 * np.sqrt(2.0) / 3.0 * np.cos(np.pi / 2), 2.0 * np.sqrt(2.0) / 3.0 * np.sin(np.pi / 2), -1.0 / 3.0],
            [2.0 * np.sqrt(2.0) / 3.0 * np.cos(np.pi / 2 + 2 * np.pi / 3), 2.0 * np.sqrt(2.0) / 3.0 * np.sin(np.pi / 2 + 2 * np.pi / 3), -1.0 / 3.0],
            [2.0 * np.sqrt(2.0) / 3.0 * np.cos(np.pi / 2 + 4 * np.pi / 3), 2.0 * np.sqrt(2.0) / 3.0 * np.sin(np.pi / 2 + 4 * np.pi / 3), -1.0 / 3.0],
        ]
    )
    X, Y, Z = spec.meshgrid()
    pts = (X, Y, Z)
    inside = np.ones(spec.shape, dtype=bool)
    for face in ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)):
        a, b, c = verts[face[0]], verts[face[1]], verts[face[2]]
        nrm = np.cross(b - a, c - a)
        opposite = verts[[i for i in range(4) if i not in face][0]]
        if np.dot(nrm, opposite - a) < 0:
            nrm = -nrm
        val = sum(nrm[k] * (pts[k] - a[k]) for k in range(3))
        inside &= val >= 0
    return inside


_BUILDERS: dict[str, tuple[int, dict, Callable]] = {
    # name: (dim, default params, builder)
    "torus": (0, {}, _torus),  # dim 0: valid in both 2D and 3D
    "square": (2, {"side": np.pi}, _square),
    "rotated_square": (2, {"side": np.pi}, _rotated_square),
    "rectangle": (2, {"width": np.pi, "height": np.pi / 2}, _rectangle),
    "equilateral_triangle": (2, {"side": np.pi}, _equilateral_triangle),
    "disk": (2, {"radius": np.pi / 2}, _disk),
    "three_quarter_disk": (2, {"radius": np.pi / 2}, _three_quarter_disk),
    "pentagon": (2, {"circumradius": np.pi / 2}, _pentagon),
    "hexagon": (2, {"circumradius": np.pi / 2}, _hexagon),
    "three_fold_star": (2, {"outer_radius": np.pi / 2, "inner_radius": np.pi / 4}, _three_fold_star),
    "five_fold_star": (2, {"outer_radius": np.pi / 2, "inner_radius": np.pi / 4}, _five_fold_star),
    "cube": (3, {"side": np.pi}, _cube),
    "ball": (3, {"radius": np.pi / 2}, _ball),
    "tetrahedron": (3, {"circumradius": 3 * np.pi / 4}, _tetrahedron),
}


def shape_names() -> list[str]:
    return sorted(_BUILDERS)


def shape_dim(name: str) -> int:
    """Required grid dimension for a shape; 0 means any."""
    if name not in _BUILDERS:
        raise ValueError(f"unknown shape '{name}'; known: {', '.join(shape_names())}")
    return _BUILDERS[name][0]


def default_params(name: str) -> dict:
    if name not in _BUILDERS:
        raise ValueError(f"unknown shape '{name}'; known: {', '.join(shape_names())}")
    return dict(_BUILDERS[name][1])


def make_mask(spec: GridSpec, shape: str, params: dict | None = None) -> DomainMask:
    """Build the indicator mask of a named shape on ``spec``.

    ``params`` overrides the shape's default dimensions (see ``default_params``).
    Grid nodes on the shape boundary count as inside.
    """
    if shape not in _BUILDERS:
        raise ValueError(f"unknown shape '{shape}'; known: {', '.join(shape_names())}")
    dim, defaults, builder = _BUILDERS[shape]
    if dim not in (0, spec.dim):
        raise ValueError(f"shape '{shape}' needs a {dim}D grid, got {spec.dim}D")
    merged = dict(defaults)
    if params:
        unknown = set(params) - set(defaults)
        if unknown:
            raise ValueError(f"shape '{shape}' has no parameters {sorted(unknown)}; accepts {sorted(defaults)}")
        merged.update({k: float(v) for k, v in params.items()})
    inside = builder(spec, merged)
    return DomainMask(spec, ScalarField(spec, inside.astype(np.float64)), shape, merged)
