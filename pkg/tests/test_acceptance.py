"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.  Criteria 1-8 run by
default (criteria 2, 3, 5 and 6 take minutes each); criterion 9 is the
optional slow 3D suite (``-m slow``).

Criteria 6 and 7 are implemented exactly as stated and are expected to fail:

* Criterion 6 asserts published 2D gallery energies (13.91 / 20.45 / 35.72)
  for the catalog's side-pi square and side-pi triangle.  For the side-pi
  square every relaxed partition energy is bounded by twice the half-square
  eigenvalue, i.e. by 10, at every diffusion time, so 13.91 is not attainable;
  the measured ladders (printed by the test) show the same for the triangle
  values.  Those published figures evidently come from differently sized
  domains than the eigenvalue tables (a triangle with inradius 1 reproduces
  20.45 / 35.72 analytically and a square of side ~2.66 reproduces 13.91).
* Criterion 7 demands 1e-10 agreement between the FFT multiplier and a
  quadrature matrix of the sampled periodized Gaussian on a 16^2 grid at
  tau in {1/16, 1/4}; sampling aliasing floors that comparison at
  exp(-tau (n/2)^2 / 2) (~0.14 and ~3e-4), nine and six orders above the
  stated gate.  The same oracle does agree to 1e-10 once tau resolves the
  grid (see tests/test_spectral.py).
"""

import numpy as np
import pytest

from dgpart import (
    GridSpec,
    HeatOperator,
    MultiField,
    ScalarField,
    SolverConfig,
    eigen_solve,
    integrate,
    l2_norm,
    make_mask,
    run_alg1,
    run_alg2,
    solve,
    voronoi_init,
)
from dgpart.domains import DomainMask
from dgpart.grid import inner
from dgpart.reference import analytic_square_mode_energy, square_mode_energy
from tests.test_spectral import dense_heat_matrix


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"\n[{criterion}] {'PASS' if ok else 'FAIL'} — {detail}")


# --------------------------------------------------------------------------
# 1. relaxed-energy accuracy sweep on the square eigenfunction
# --------------------------------------------------------------------------

def test_criterion_1_energy_sweep():
    spec = GridSpec(2, 512)
    published = {4: 1.8801, 5: 1.9388, 6: 1.9691, 7: 1.9845, 8: 1.9922, 9: 1.9961}
    rows = []
    ok = True
    for j, expect in published.items():
        tau = 2.0**-j
        val = square_mode_energy(spec, tau)
        ana = analytic_square_mode_energy(tau)
        good = abs(val - expect) <= 2e-3 and abs(val - ana) <= 2e-3
        ok &= good
        rows.append(f"2^-{j}: {val:.4f} (table {expect}, analytic {ana:.4f})")
    report("criterion 1: energy sweep", ok, "; ".join(rows))
    assert ok


# --------------------------------------------------------------------------
# 2. eigenvalue table on the square, resolution x tolerance
# --------------------------------------------------------------------------

def test_criterion_2_square_eigenvalue_table():
    published = {
        (256, 1e-4): 1.9342, (256, 1e-5): 1.9463, (256, 1e-6): 1.9472,
        (512, 1e-4): 1.9543, (512, 1e-5): 1.9727, (512, 1e-6): 1.9746,
    }
    rows = []
    ok = True
    for (n, tol), expect in published.items():
        mask = make_mask(GridSpec(2, n), "square")
        res = eigen_solve(mask, SolverConfig(tau0=0.1, tau_min=tol))
        good = res.converged and abs(res.eigenvalue - expect) <= 5e-3
        ok &= good
        rows.append(f"(n={n}, tol={tol:g}): {res.eigenvalue:.4f} vs {expect}")
    report("criterion 2: square eigenvalue table", ok, "; ".join(rows))
    assert ok


# --------------------------------------------------------------------------
# 3. eigenvalues of general domains at n=1024
# --------------------------------------------------------------------------

def test_criterion_3_domain_eigenvalues():
    published = [
        ("rotated_square", 1.9877, 2.0),
        ("rectangle", 4.9274, 5.0),
        ("disk", 2.3360, 2.3438),
    ]
    rows = []
    ok = True
    for shape, expect, ref in published:
        mask = make_mask(GridSpec(2, 1024), shape)
        res = eigen_solve(mask, SolverConfig(tau0=0.1, tau_min=1e-5))
        good = res.converged and abs(res.eigenvalue - expect) <= 1e-2 and res.eigenvalue < ref
        ok &= good
        rows.append(f"{shape}: {res.eigenvalue:.4f} vs {expect} (< {ref}: {res.eigenvalue < ref})")
    report("criterion 3: domain eigenvalues", ok, "; ".join(rows))
    assert ok


# --------------------------------------------------------------------------
# 4. unconditional energy decay over randomized runs
# --------------------------------------------------------------------------

def test_criterion_4_energy_decay():
    spec = GridSpec(2, 128)
    mask = make_mask(spec, "torus")
    combos = [(k, variant, tau) for k in (2, 3, 4, 5)
              for variant in ("alg1", "alg2") for tau in (0.25, 1 / 16)]
    violations = 0
    runs = 0
    for seed in range(50):
        k, variant, tau = combos[seed % len(combos)]
        cfg = SolverConfig(tau0=tau, variant=variant, rng_seed=seed, max_outer=2000)
        res = solve(cfg, mask, voronoi_init(k, mask, seed))
        e = res.trace.energies()
        violations += int(np.sum(np.diff(e) > 1e-10 * k / tau))
        runs += 1
    ok = violations == 0
    report("criterion 4: energy decay", ok, f"{runs} randomized runs, {violations} violations")
    assert ok


# --------------------------------------------------------------------------
# 5. periodic 2D gallery energies
# --------------------------------------------------------------------------

def test_criterion_5_periodic_2d_energies():
    spec = GridSpec(2, 256)
    mask = make_mask(spec, "torus")
    rows = []
    ok = True
    for k, target in [(4, 5.06), (6, 10.48)]:
        finals = []
        areas_ok = True
        for seed in range(10):
            cfg = SolverConfig(tau0=0.25, tau_min=1 / 128, adaptive=True,
                               adaptive_stop="phi_frozen", level_tol=1 / 128,
                               rng_seed=seed)
            res = solve(cfg, mask, voronoi_init(k, mask, seed))
            assert res.converged
            finals.append(res.trace.records[-1].energy)
            if k == 4 and finals[-1] == min(finals):
                counts = res.partition.region_counts()
                areas_ok = counts.max() <= 1.05 * counts.min()
        best = min(finals)
        good = abs(best - target) <= 0.02 * target and (k != 4 or areas_ok)
        ok &= good
        rows.append(f"k={k}: best {best:.4f} vs {target}"
                    + ("" if k != 4 else f", areas equal within 5%: {areas_ok}"))
    report("criterion 5: periodic 2D energies", ok, "; ".join(rows))
    assert ok


# --------------------------------------------------------------------------
# 6. Dirichlet 2D gallery energies (expected FAIL; see module docstring)
# --------------------------------------------------------------------------

def test_criterion_6_dirichlet_2d_energies():
    spec = GridSpec(2, 512)
    cases = [("square", 2, 13.91), ("equilateral_triangle", 2, 20.45),
             ("equilateral_triangle", 3, 35.72)]
    rows = []
    ok = True
    for shape, k, target in cases:
        mask = make_mask(spec, shape)
        finals = []
        ladders = []
        for seed in range(10):
            cfg = SolverConfig(tau0=0.25, tau_min=1 / 128, adaptive=True,
                               adaptive_stop="tau_floor", rng_seed=seed)
            res = solve(cfg, mask, voronoi_init(k, mask, seed, metric="euclidean"))
            finals.append(res.trace.records[-1].energy)
            ladders.append([round(e, 3) for _, e in res.trace.segment_ends()])
        best = min(finals)
        good = abs(best - target) <= 0.02 * target
        ok &= good
        rows.append(f"{shape} k={k}: best final {best:.4f} vs {target} "
                    f"(best-seed ladder {ladders[int(np.argmin(finals))]})")
    report("criterion 6: Dirichlet 2D energies", ok, "; ".join(rows))
    assert ok


# --------------------------------------------------------------------------
# 7. dense-Gaussian spectral oracle (expected FAIL; see module docstring)
# --------------------------------------------------------------------------

def test_criterion_7_spectral_oracle():
    spec = GridSpec(2, 16)
    rng = np.random.default_rng(0)
    rows = []
    ok = True
    for tau in (1 / 16, 1 / 4):
        M = dense_heat_matrix(spec, tau)
        op = HeatOperator(spec, tau)
        worst = 0.0
        for _ in range(20):
            f = rng.standard_normal(spec.shape)
            err = np.max(np.abs(op.apply(f) - (M @ f.ravel()).reshape(spec.shape)))
            worst = max(worst, err)
        good = worst <= 1e-10
        ok &= good
        rows.append(f"tau={tau:g}: max-abs {worst:.3e} "
                    f"(aliasing floor ~{np.exp(-tau * (spec.n / 2) ** 2 / 2):.1e})")
    report("criterion 7: spectral oracle at 1e-10", ok, "; ".join(rows))
    assert ok


# --------------------------------------------------------------------------
# 8. semigroup property suite on 200 random fields
# --------------------------------------------------------------------------

def test_criterion_8_semigroup_properties():
    spec = GridSpec(2, 32)
    rng = np.random.default_rng(1)
    checks = 0
    worst = 0.0
    for i in range(200):
        f = ScalarField(spec, rng.standard_normal(spec.shape))
        g = ScalarField(spec, rng.standard_normal(spec.shape))
        tau = float(rng.choice([1 / 64, 1 / 32, 1 / 16, 1 / 8, 1 / 4]))
        op = HeatOperator(spec, tau)
        hf = ScalarField(spec, op.apply(f.values))
        assert l2_norm(hf) <= l2_norm(f) * (1 + 1e-12)
        worst = max(worst, abs(integrate(hf) - integrate(f)))
        assert abs(integrate(hf) - integrate(f)) <= 1e-10 * max(1.0, abs(integrate(f)))
        hg = ScalarField(spec, op.apply(g.values))
        assert abs(inner(hf, g) - inner(f, hg)) <= 1e-10 * max(1.0, l2_norm(f) * l2_norm(g))
        tau2 = tau / 2
        a = HeatOperator(spec, tau2).apply(op.apply(f.values))
        b = HeatOperator(spec, tau + tau2).apply(f.values)
        assert np.max(np.abs(a - b)) <= 1e-10
        pos = np.abs(f.values)
        assert op.apply(pos).min() >= -1e-12
        checks += 1
    report("criterion 8: semigroup properties", True,
           f"{checks} random fields; contraction, mass, self-adjointness, "
           f"composition, positivity all within 1e-10")


# --------------------------------------------------------------------------
# 9. optional slow 3D structure check
# --------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_9_rhombic_dodecahedron_structure():
    # best-of-N stochastic: converge the 4-partition of the periodic cube at
    # fixed tau = pi/16, then re-evaluate each region's first eigenvalue on a
    # deeper tau ladder (the working-tau energy is strongly relaxed)
    spec = GridSpec(3, 128)
    mask = make_mask(spec, "torus")
    best_sum = None
    balance = None
    for seed in (0, 1):
        cfg = SolverConfig(tau0=np.pi / 16, rng_seed=seed)
        res = solve(cfg, mask, voronoi_init(4, mask, seed))
        if not res.converged:
            continue
        counts = res.partition.region_counts()
        if counts.min() == 0:
            continue
        total = 0.0
        for ell in range(4):
            region = DomainMask(spec, res.partition.indicator(ell), f"region{ell}")
            total += eigen_solve(region, SolverConfig(tau0=np.pi / 16, tau_min=1e-3)).eigenvalue
        if best_sum is None or total < best_sum:
            best_sum = total
            balance = counts.max() / counts.min()
    ok = (
        best_sum is not None
        and abs(best_sum - 6.96) <= 0.03 * 6.96
        and balance <= 1.15
    )
    report("criterion 9: 3D rhombic dodecahedron", ok,
           f"best re-evaluated eigenvalue sum {best_sum:.4f} vs 6.96, "
           f"volume balance {balance:.3f}")
    assert ok
