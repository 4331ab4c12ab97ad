"""Relaxed partition energy, pointwise thresholding, and the norm projection.

The relaxed energy of a labeled partition (phi_1..phi_k) and candidate fields
(u_1..u_k), at diffusion time tau, is

    E = sum_l [ 1/tau - (1/tau) * integral( phi_l * |heat(u_l)|^2 ) ],

which is linear in phi and concave in u.  Minimizing over phi for fixed u is a
per-node argmax of |heat(u_l)|^2 (ties to the smallest index); minimizing the
linearization over the unit ball replaces u_l by the normalized
heat(phi_l * heat(u_l)).  Alternating the two never increases E.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import DomainMask
from .grid import GridSpec, ScalarField
from .spectral import HeatOperator

__all__ = [
    "OUTSIDE",
    "MultiField",
    "Partition",
    "EnergyValue",
    "EmptyRegionError",
    "relaxed_energy",
    "threshold_phi",
    "project_u",
]

OUTSIDE = -1

# Regions whose projected field has L2 norm below this are treated as vanished.
EMPTY_NORM_FLOOR = 1e-14


class EmptyRegionError(RuntimeError):
    """A region's projected field vanished; carries the offending indices."""

    def __init__(self, regions: list[int]):
        self.regions = list(regions)
        super().__init__(f"projection produced empty region(s) {self.regions}")


@dataclass(frozen=True)
class MultiField:
    """k scalar fields on a shared grid, stacked as one (k, n, ..) array.

    Fields produced by the update operations carry unit L2 norm; intermediate
    holders (e.g. diffused fields) need not.
    """

    spec: GridSpec
    data: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != self.spec.dim + 1 or d.shape[1:] != self.spec.shape:
            raise ValueError(f"expected shape (k, {', '.join(map(str, self.spec.shape))}), got {d.shape}")
        if d.shape[0] < 1:
            raise ValueError("need at least one component")
        if not np.all(np.isfinite(d)):
            raise ValueError("components contain non-finite values")
        if d.flags.writeable:
            d = np.ascontiguousarray(d)
            d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @property
    def k(self) -> int:
        return self.data.shape[0]

    def component(self, ell: int) -> ScalarField:
        return ScalarField(self.spec, self.data[ell])

    @classmethod
    def from_fields(cls, fields: list[ScalarField]) -> "MultiField":
        if not fields:
            raise ValueError("need at least one component")
        spec = fields[0].spec
        return cls(spec, np.stack([f.values for f in fields]))

    def norms(self) -> np.ndarray:
        """Discrete L2 norm of each component."""
        vol = self.spec.cell_volume
        return np.sqrt(vol * np.sum(self.data**2, axis=tuple(range(1, self.data.ndim))))


@dataclass(frozen=True)
class Partition:
    """Per-node region label in {0..k-1}, or OUTSIDE beyond the domain mask."""

    spec: GridSpec
    k: int
    labels: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        lab = np.asarray(self.labels)
        if lab.shape != self.spec.shape:
            raise ValueError(f"labels shape {lab.shape} != grid shape {self.spec.shape}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if lab.dtype != np.int32:
            lab = lab.astype(np.int32)
        if lab.min() < OUTSIDE or lab.max() >= self.k:
            raise ValueError(f"labels must lie in [{OUTSIDE}, {self.k - 1}]")
        if lab.flags.writeable:
            lab = np.ascontiguousarray(lab)
            lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    def indicator(self, ell: int) -> ScalarField:
        """Materialize the 0/1 indicator of region ``ell``."""
        if not 0 <= ell < self.k:
            raise ValueError(f"region index {ell} out of range for k={self.k}")
        return ScalarField(self.spec, (self.labels == ell).astype(np.float64))

    def region_counts(self) -> np.ndarray:
        """Number of nodes per region (length k)."""
        inside = self.labels >= 0
        return np.bincount(self.labels[inside], minlength=self.k)

    def changed_cells(self, other: "Partition") -> int:
        """Number of nodes whose label differs from ``other``."""
        return int(np.count_nonzero(self.labels != other.labels))


@dataclass(frozen=True)
class EnergyValue:
    """Total relaxed energy and its per-region decomposition."""

    total: float
    per_region: tuple[float, ...]

    @classmethod
    def from_regions(cls, per_region) -> "EnergyValue":
        per = tuple(float(v) for v in per_region)
        return cls(float(sum(per)), per)


def _region_overlaps(labels: np.ndarray, diffused: np.ndarray, k: int, vol: float) -> np.ndarray:
    """integral(phi_l * |diffused_l|^2) for each region, in one gathered bincount."""
    flat = labels.ravel()
    idx = np.flatnonzero(flat >= 0)
    lab = flat[idx]
    owned = diffused.reshape(k, -1)[lab, idx]
    return np.bincount(lab, weights=owned * owned, minlength=k) * vol


def relaxed_energy(
    phi: Partition,
    u: MultiField,
    tau: float,
    op: HeatOperator | None = None,
    diffused: np.ndarray | None = None,
) -> EnergyValue:
    """Evaluate the relaxed energy E(phi, u) at diffusion time tau.

    ``diffused`` may hold precomputed heat(u) component arrays so callers that
    already diffused this iterate do not pay for a second transform.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if phi.spec != u.spec:
        raise ValueError("grid mismatch between partition and fields")
    if phi.k != u.k:
        raise ValueError(f"partition has k={phi.k}, fields have k={u.k}")
    if diffused is None:
        if op is None:
            op = HeatOperator(u.spec, tau)
        elif op.spec != u.spec or op.tau != tau:
            raise ValueError("heat operator does not match grid/tau")
        diffused = np.stack([op.apply(u.data[ell]) for ell in range(u.k)])
    overlaps = _region_overlaps(phi.labels, diffused, phi.k, phi.spec.cell_volume)
    return EnergyValue.from_regions((1.0 - overlaps) / tau)


def threshold_phi(u_star: MultiField, mask: DomainMask) -> Partition:
    """Label each in-domain node by the component with largest |u_star|^2.

    ``u_star`` is the already-diffused field; exact ties go to the smallest
    component index.  Nodes outside the mask get OUTSIDE.
    """
    if u_star.spec != mask.spec:
        raise ValueError("grid mismatch between fields and mask")
    winner = np.argmax(u_star.data**2, axis=0).astype(np.int32)
    labels = np.where(mask.inside, winner, np.int32(OUTSIDE))
    return Partition(u_star.spec, u_star.k, labels)


def _project_components(
    labels: np.ndarray,
    diffused: np.ndarray,
    op: HeatOperator,
    vol: float,
) -> tuple[np.ndarray, list[int]]:
    """Core of the u-update from precomputed heat(u): returns (new data, empty regions)."""
    k = diffused.shape[0]
    out = np.empty_like(diffused)
    empty: list[int] = []
    for ell in range(k):
        masked = np.where(labels == ell, diffused[ell], 0.0)
        w = op.apply(masked)
        nrm = np.sqrt(vol * np.sum(w * w))
        if nrm < EMPTY_NORM_FLOOR:
            empty.append(ell)
            out[ell] = 0.0
        else:
            out[ell] = w / nrm
    return out, empty


def project_u(
    phi: Partition,
    u: MultiField,
    tau: float,
    op: HeatOperator | None = None,
) -> MultiField:
    """Replace each component by the normalized heat(phi_l * heat(u_l)).

    Raises EmptyRegionError (with the region indices) if any projected
    component vanishes; vanishing regions are a legitimate transient under
    random initialization and the caller decides how to recover.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if phi.spec != u.spec or phi.k != u.k:
        raise ValueError("partition/fields mismatch")
    if op is None:
        op = HeatOperator(u.spec, tau)
    elif op.spec != u.spec or op.tau != tau:
        raise ValueError("heat operator does not match grid/tau")
    diffused = np.stack([op.apply(u.data[ell]) for ell in range(u.k)])
    new_data, empty = _project_components(phi.labels, diffused, op, u.spec.cell_volume)
    if empty:
        raise EmptyRegionError(empty)
    return MultiField(u.spec, new_data)
