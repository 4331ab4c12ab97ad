"""Partition solvers: one-step and inner-converged variants, adaptive time
schedules, the single-domain eigenvalue scheme, and energy-trace logging.

Every outer iteration performs diffusion, pointwise thresholding, and the norm
projection; the logged energy uses the same diffused fields as the update, so
the trace is exactly the monotone sequence the stability theorem covers.
Stationarity is declared when no node changes label between consecutive outer
iterations (the natural discrete fixed point for binary indicators); the test
is evaluated only from the second iteration of a run or warm-started segment.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .domains import DomainMask
from .grid import ScalarField
from .partition import (
    OUTSIDE,
    EmptyRegionError,
    EnergyValue,
    MultiField,
    Partition,
    _project_components,
    _region_overlaps,
)
from .spectral import HeatOperator

__all__ = [
    "SolverConfig",
    "TraceRecord",
    "EnergyTrace",
    "SolveResult",
    "EigenResult",
    "step_alg1",
    "run_alg1",
    "run_alg2",
    "run_adaptive",
    "solve",
    "eigen_solve",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters shared by the partition and eigenvalue solvers.

    tau_min is the final diffusion time: adaptive partition runs halve tau down
    to it, and the eigenvalue scheme uses it as the single tolerance that ends
    the tau ladder and bounds the change of the inner iterate.  adaptive_stop
    selects the adaptive stopping rule: "tau_floor" always descends to tau_min,
    while "phi_frozen" additionally stops once the converged partition survives
    a tau halving with h^dim * sqrt(changed nodes) <= level_tol (level_tol = 0
    demands an exactly identical partition).  inner_norm chooses how iterate
    changes are measured against the tolerances: "l2" is the grid-weighted L2
    norm, "vec" the plain vector 2-norm of the sample values.
    """

    tau0: float = 0.25
    tol_phi: int = 0
    tol_u: float = 1e-5
    tau_min: float = 1.0 / 128.0
    max_outer: int = 10000
    max_inner: int = 10000
    rng_seed: int = 0
    variant: str = "alg1"
    adaptive: bool = False
    adaptive_stop: str = "tau_floor"
    level_tol: float = 0.0
    inner_norm: str = "vec"
    tau_eval: float | None = None
    max_reseeds: int = 5

    def __post_init__(self) -> None:
        if self.tau0 <= 0:
            raise ValueError("tau0 must be positive")
        if self.tau_min <= 0 or self.tau_min > self.tau0:
            raise ValueError("need 0 < tau_min <= tau0")
        if self.tol_u <= 0:
            raise ValueError("tol_u must be positive")
        if self.tol_phi < 0:
            raise ValueError("tol_phi is a changed-node count, must be >= 0")
        if self.variant not in ("alg1", "alg2"):
            raise ValueError(f"variant must be 'alg1' or 'alg2', got {self.variant!r}")
        if self.adaptive_stop not in ("tau_floor", "phi_frozen"):
            raise ValueError(f"adaptive_stop must be 'tau_floor' or 'phi_frozen', got {self.adaptive_stop!r}")
        if self.level_tol < 0:
            raise ValueError("level_tol must be >= 0")
        if self.inner_norm not in ("l2", "vec"):
            raise ValueError(f"inner_norm must be 'l2' or 'vec', got {self.inner_norm!r}")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.tau_eval is not None and self.tau_eval <= 0:
            raise ValueError("tau_eval must be positive when set")


@dataclass(frozen=True)
class TraceRecord:
    """One outer iteration: energy and bookkeeping at the tau in force."""

    iteration: int
    tau: float
    energy: float
    per_region: tuple[float, ...]
    changed_cells: int
    wall_ms: float
    energy_eval: float | None = None
    inner_steps: int = 1  # projection substeps this iteration (0 on the closing record)


@dataclass
class EnergyTrace:
    """Per-iteration log of a solver run."""

    records: list[TraceRecord] = field(default_factory=list)

    def append(self, rec: TraceRecord) -> None:
        self.records.append(rec)

    def __len__(self) -> int:
        return len(self.records)

    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    def taus(self) -> np.ndarray:
        return np.array([r.tau for r in self.records])

    def changed(self) -> np.ndarray:
        return np.array([r.changed_cells for r in self.records])

    def eval_energies(self) -> np.ndarray:
        return np.array([np.nan if r.energy_eval is None else r.energy_eval for r in self.records])

    def segment_ends(self) -> list[tuple[float, float]]:
        """(tau, energy) of the last iteration at each tau level, in order."""
        out: list[tuple[float, float]] = []
        for r in self.records:
            if out and out[-1][0] == r.tau:
                out[-1] = (r.tau, r.energy)
            else:
                out.append((r.tau, r.energy))
        return out

    def min_energy(self) -> float:
        return float(min(r.energy for r in self.records))


@dataclass(frozen=True)
class SolveResult:
    """Final state of a partition run plus its full trace."""

    partition: Partition
    u: MultiField
    trace: EnergyTrace
    converged: bool
    reason: str
    tau_final: float

    @property
    def final_energy(self) -> EnergyValue:
        rec = self.trace.records[-1]
        return EnergyValue(rec.energy, rec.per_region)


@dataclass(frozen=True)
class EigenResult:
    """First eigenvalue/eigenfunction approximation on a fixed domain."""

    eigenvalue: float
    eigenfunction: ScalarField
    levels: tuple[tuple[float, float, int], ...]  # (tau, lambda, inner iterations)
    converged: bool
    tau_final: float


def _heat_all(op: HeatOperator, data: np.ndarray) -> np.ndarray:
    return np.stack([op.apply(data[ell]) for ell in range(data.shape[0])])


def _threshold_labels(diffused: np.ndarray, inside: np.ndarray) -> np.ndarray:
    winner = np.argmax(diffused * diffused, axis=0).astype(np.int32)
    return np.where(inside, winner, np.int32(OUTSIDE))


def _delta_norm(diff: np.ndarray, vol: float, kind: str) -> float:
    ss = float(np.sum(diff * diff))
    return np.sqrt(vol * ss) if kind == "l2" else np.sqrt(ss)


def step_alg1(
    state: tuple[Partition, MultiField],
    tau: float,
    mask: DomainMask,
    op: HeatOperator | None = None,
) -> tuple[Partition, MultiField]:
    """One diffusion/threshold/projection sweep; raises EmptyRegionError."""
    _, u = state
    if op is None:
        op = HeatOperator(u.spec, tau)
    diffused = _heat_all(op, u.data)
    labels = _threshold_labels(diffused, mask.inside)
    new_phi = Partition(u.spec, u.k, labels)
    new_data, empty = _project_components(labels, diffused, op, u.spec.cell_volume)
    if empty:
        raise EmptyRegionError(empty)
    return new_phi, MultiField(u.spec, new_data)


def _reseed_component(
    data: np.ndarray,
    ell: int,
    diffused: np.ndarray,
    inside: np.ndarray,
    vol: float,
) -> None:
    """Restart a vanished component at the in-domain node worst covered by the rest."""
    coverage = np.max(diffused * diffused, axis=0)
    coverage = np.where(inside, coverage, np.inf)
    target = np.unravel_index(np.argmin(coverage), coverage.shape)
    data[ell] = 0.0
    data[ell][target] = 1.0 / np.sqrt(vol)


class _ReseedLimit(Exception):
    pass


def _run_segment(
    cfg: SolverConfig,
    mask: DomainMask,
    u_data: np.ndarray,
    tau: float,
    trace: EnergyTrace,
    start_iter: int,
    trace_prev: np.ndarray | None,
    reseed_counts: np.ndarray,
    eval_op: HeatOperator | None,
) -> tuple[np.ndarray, np.ndarray, int, str]:
    """Iterate the chosen variant at fixed tau until the partition is stationary.

    ``trace_prev`` only feeds the changed-node column of the trace; the
    stopping test compares labels within this segment.  Returns
    (labels, u_data, next_iter, reason) with reason in "converged",
    "max_outer", "reseed_limit".
    """
    spec = mask.spec
    vol = spec.cell_volume
    k = u_data.shape[0]
    inside = mask.inside
    n_inside = mask.n_inside
    op = HeatOperator(spec, tau)
    seg_prev: np.ndarray | None = None
    labels = None
    reason = "max_outer"
    it = start_iter

    def note_reseed(new_data: np.ndarray, empty: list[int], diffused: np.ndarray) -> None:
        for ell in empty:
            reseed_counts[ell] += 1
            if reseed_counts[ell] > cfg.max_reseeds:
                raise _ReseedLimit()
            log.warning(
                "region %d vanished at iteration %d; reseeding (%d/%d)",
                ell, it, reseed_counts[ell], cfg.max_reseeds,
            )
            _reseed_component(new_data, ell, diffused, inside, vol)

    for _ in range(cfg.max_outer):
        t0 = time.perf_counter()
        diffused = _heat_all(op, u_data)
        labels = _threshold_labels(diffused, inside)
        overlaps = _region_overlaps(labels, diffused, k, vol)
        per_region = (1.0 - overlaps) / tau
        changed = (
            int(np.count_nonzero(labels != trace_prev)) if trace_prev is not None else n_inside
        )
        energy_eval = None
        if eval_op is not None:
            ev_overlaps = _region_overlaps(labels, _heat_all(eval_op, u_data), k, vol)
            energy_eval = float(np.sum((1.0 - ev_overlaps) / eval_op.tau))

        counts = np.bincount(labels.ravel()[labels.ravel() >= 0], minlength=k)
        stationary = (
            seg_prev is not None
            and int(np.count_nonzero(labels != seg_prev)) <= cfg.tol_phi
            and bool(np.all(counts > 0))  # an empty region is never a fixed point
        )
        if stationary:
            trace.append(TraceRecord(it, tau, float(per_region.sum()), tuple(per_region),
                                     changed, (time.perf_counter() - t0) * 1e3, energy_eval, 0))
            it += 1
            reason = "converged"
            break

        substeps = 1
        try:
            new_data, empty = _project_components(labels, diffused, op, vol)
            if empty:
                note_reseed(new_data, empty, diffused)
            elif cfg.variant == "alg2":
                for _ in range(cfg.max_inner):
                    prev = new_data
                    rediffused = _heat_all(op, prev)
                    new_data, empty = _project_components(labels, rediffused, op, vol)
                    substeps += 1
                    if empty:
                        note_reseed(new_data, empty, rediffused)
                        break
                    if _delta_norm(new_data - prev, vol, cfg.inner_norm) < cfg.tol_u:
                        break
        except _ReseedLimit:
            trace.append(TraceRecord(it, tau, float(per_region.sum()), tuple(per_region),
                                     changed, (time.perf_counter() - t0) * 1e3, energy_eval, substeps))
            return labels, u_data, it + 1, "reseed_limit"

        trace.append(TraceRecord(it, tau, float(per_region.sum()), tuple(per_region),
                                 changed, (time.perf_counter() - t0) * 1e3, energy_eval, substeps))
        seg_prev = labels
        trace_prev = labels
        u_data = new_data
        it += 1

    return labels, u_data, it, reason


def _run(cfg: SolverConfig, mask: DomainMask, u0: MultiField) -> SolveResult:
    if u0.spec != mask.spec:
        raise ValueError("grid mismatch between initial fields and mask")
    trace = EnergyTrace()
    eval_op = HeatOperator(mask.spec, cfg.tau_eval) if cfg.tau_eval else None
    reseeds = np.zeros(u0.k, dtype=int)
    u_data = np.array(u0.data)

    if not cfg.adaptive:
        labels, u_data, _, reason = _run_segment(
            cfg, mask, u_data, cfg.tau0, trace, 0, None, reseeds, eval_op
        )
        tau_final = cfg.tau0
    else:
        tau = cfg.tau0
        labels: np.ndarray | None = None
        it = 0
        while True:
            prev_labels = labels
            labels, u_data, it, reason = _run_segment(
                cfg, mask, u_data, tau, trace, it, labels, reseeds, eval_op
            )
            tau_final = tau
            if reason != "converged":
                break
            if cfg.adaptive_stop == "phi_frozen" and prev_labels is not None:
                cross = int(np.count_nonzero(labels != prev_labels))
                if mask.spec.cell_volume * np.sqrt(cross) <= cfg.level_tol:
                    break
            if tau / 2.0 < cfg.tau_min:
                break
            tau = tau / 2.0

    partition = Partition(mask.spec, u0.k, labels)
    return SolveResult(
        partition=partition,
        u=MultiField(mask.spec, u_data),
        trace=trace,
        converged=(reason == "converged"),
        reason=reason,
        tau_final=tau_final,
    )


def run_alg1(cfg: SolverConfig, mask: DomainMask, u0: MultiField) -> SolveResult:
    """One projection sweep per outer iteration, at fixed tau = tau0."""
    return _run(replace(cfg, variant="alg1", adaptive=False), mask, u0)


def run_alg2(cfg: SolverConfig, mask: DomainMask, u0: MultiField) -> SolveResult:
    """Inner-converged projection per outer iteration, at fixed tau = tau0."""
    return _run(replace(cfg, variant="alg2", adaptive=False), mask, u0)


def run_adaptive(cfg: SolverConfig, mask: DomainMask, u0: MultiField) -> SolveResult:
    """Run the chosen variant to stationarity, halve tau, warm-start, repeat.

    With adaptive_stop="tau_floor" the schedule descends to tau_min; with
    "phi_frozen" it also ends as soon as the converged partition is identical
    across one halving.
    """
    if not cfg.adaptive:
        cfg = replace(cfg, adaptive=True)
    return _run(cfg, mask, u0)


def solve(cfg: SolverConfig, mask: DomainMask, u0: MultiField) -> SolveResult:
    """Dispatch on cfg.adaptive / cfg.variant."""
    return _run(cfg, mask, u0)


def eigen_solve(mask: DomainMask, cfg: SolverConfig) -> EigenResult:
    """First-eigenvalue scheme on a fixed domain: k = 1 with phi = the mask.

    The projection iteration runs to stationarity at each tau, tau halves, and
    the ladder stops below tol = cfg.tau_min; the same tol bounds the change of
    the inner iterate (measured per cfg.inner_norm).  The reported value and
    field come from the last tau level.
    """
    spec = mask.spec
    vol = spec.cell_volume
    tol = cfg.tau_min
    if cfg.tau0 <= tol:
        raise ValueError("need tau0 > tau_min for the eigenvalue ladder")
    psi = mask.indicator.values
    u = psi / np.sqrt(vol * np.sum(psi * psi))
    tau = cfg.tau0
    levels: list[tuple[float, float, int]] = []
    converged = True
    lam = np.inf
    tau_final = tau
    while tau >= tol:
        op = HeatOperator(spec, tau)
        inner = 0
        for _ in range(cfg.max_inner):
            v = op.apply(psi * op.apply(u))
            v /= np.sqrt(vol * np.sum(v * v))
            delta = _delta_norm(v - u, vol, cfg.inner_norm)
            u = v
            inner += 1
            if delta < tol:
                break
        else:
            converged = False
        overlap = vol * np.sum(psi * op.apply(u) ** 2)
        lam = (1.0 - overlap) / tau
        levels.append((tau, float(lam), inner))
        tau_final = tau
        tau = tau / 2.0
    return EigenResult(
        eigenvalue=float(lam),
        eigenfunction=ScalarField(spec, u),
        levels=tuple(levels),
        converged=converged,
        tau_final=tau_final,
    )
