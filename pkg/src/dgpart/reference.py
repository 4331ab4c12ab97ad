"""Closed-form reference eigenvalues and the square-eigenfunction energy sweep.

First Dirichlet eigenvalues with known analytic form, used as independent
oracles by the tests and reported next to computed values:

    rectangle a x b : pi^2 (1/a^2 + 1/b^2)
    disk radius R   : (j_{0,1} / R)^2
    equilateral side a : 16 pi^2 / (3 a^2)

The energy sweep samples the centered side-pi square's ground state.  That
eigenfunction continues across the square's boundary to the smooth global mode
cos(x) cos(y) on the torus (its odd reflection), so sampling the global mode
makes the discrete heat flow act on it exactly; the zero-extended sampling
would instead pick up a spurious boundary layer from mass diffusing back in.
"""

from __future__ import annotations

import math

import numpy as np

from .domains import make_mask
from .grid import GridSpec, ScalarField
from .partition import MultiField, Partition, relaxed_energy

__all__ = [
    "BESSEL_J0_FIRST_ZERO",
    "lambda1_rectangle",
    "lambda1_disk",
    "lambda1_equilateral_triangle",
    "square_mode_field",
    "square_mode_energy",
    "table1_sweep",
]

BESSEL_J0_FIRST_ZERO = 2.404825557695773


def lambda1_rectangle(width: float, height: float) -> float:
    return math.pi**2 * (1.0 / width**2 + 1.0 / height**2)


def lambda1_disk(radius: float) -> float:
    return (BESSEL_J0_FIRST_ZERO / radius) ** 2


def lambda1_equilateral_triangle(side: float) -> float:
    return 16.0 * math.pi**2 / (3.0 * side**2)


def square_mode_field(spec: GridSpec) -> ScalarField:
    """The side-pi square's ground state as the global product-cosine mode.

    Normalized to unit L2 norm over the square (the mode's norm over the whole
    torus is larger; only the square carries the energy integral).
    """
    if spec.dim != 2:
        raise ValueError("square mode is a 2D reference field")
    X, Y = spec.meshgrid()
    return ScalarField(spec, (2.0 / math.pi) * np.cos(X) * np.cos(Y))


def square_mode_energy(spec: GridSpec, tau: float) -> float:
    """Relaxed energy (k = 1) of the sampled square ground state at time tau."""
    mask = make_mask(spec, "square")
    u = MultiField(spec, square_mode_field(spec).values[None, :, :])
    labels = np.where(mask.inside, np.int32(0), np.int32(-1))
    phi = Partition(spec, 1, labels)
    return relaxed_energy(phi, u, tau).total


def analytic_square_mode_energy(tau: float) -> float:
    """(1 - e^(-2 tau)) / tau: the value the sweep approaches on fine grids."""
    return (1.0 - math.exp(-2.0 * tau)) / tau


def table1_sweep(n: int, exponents=range(4, 16)) -> list[tuple[float, float, float]]:
    """Rows (tau, computed energy, analytic value) for tau = 2^-j over ``exponents``."""
    spec = GridSpec(2, n)
    rows = []
    for j in exponents:
        tau = 2.0 ** (-j)
        rows.append((tau, square_mode_energy(spec, tau), analytic_square_mode_energy(tau)))
    return rows
