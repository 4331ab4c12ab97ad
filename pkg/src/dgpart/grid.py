"""Uniform periodic grid on the box [-pi, pi]^d: scalar fields, quadrature, norms.

The grid samples fields at the n^d points x_i = -pi + i*h per axis (h = 2*pi/n,
i = 0..n-1); the point at -pi is identified with +pi by periodicity.  Arrays are
C-ordered with axis 0 = x1, axis 1 = x2 (and axis 2 = x3 in 3D).  Integrals are
uniform Riemann sums with weight h^d, which are exact for trigonometric
polynomials below the Nyquist band and first-order accurate at indicator
discontinuities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["GridSpec", "ScalarField", "integrate", "l2_norm", "inner"]

HALF_WIDTH = np.pi


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the uniform periodic grid on [-pi, pi]^dim."""

    dim: int
    n: int

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.n < 4 or not _is_power_of_two(self.n):
            raise ValueError(f"n must be a power of two >= 4, got {self.n}")

    @property
    def h(self) -> float:
        """Grid spacing 2*pi/n."""
        return 2.0 * HALF_WIDTH / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    def axis_coords(self) -> np.ndarray:
        """Sample coordinates along one axis: -pi + i*h, i = 0..n-1."""
        return -HALF_WIDTH + np.arange(self.n) * self.h

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays (X1, X2[, X3]) of shape ``self.shape``."""
        x = self.axis_coords()
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))


@dataclass(frozen=True)
class ScalarField:
    """Real values sampled on a GridSpec; immutable once constructed."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.size != self.spec.size:
            raise ValueError(
                f"field has {v.size} values, grid needs {self.spec.size}"
            )
        v = np.ascontiguousarray(v.reshape(self.spec.shape))
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        if v.flags.writeable:
            v = v.copy()
            v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, spec: GridSpec, fn) -> "ScalarField":
        """Sample ``fn(X1, X2[, X3])`` on the grid."""
        return cls(spec, fn(*spec.meshgrid()))

    @classmethod
    def constant(cls, spec: GridSpec, value: float) -> "ScalarField":
        return cls(spec, np.full(spec.shape, float(value)))


def integrate(f: ScalarField) -> float:
    """Riemann-sum integral over the box: h^dim * sum of values."""
    return f.spec.cell_volume * float(np.sum(f.values))


def l2_norm(f: ScalarField) -> float:
    """Discrete L2 norm sqrt(h^dim * sum f^2)."""
    return float(np.sqrt(f.spec.cell_volume * np.sum(f.values * f.values)))


def inner(f: ScalarField, g: ScalarField) -> float:
    """Discrete L2 inner product; grids must match."""
    if f.spec != g.spec:
        raise ValueError("grid mismatch in inner product")
    return f.spec.cell_volume * float(np.sum(f.values * g.values))
