"""Potentials, manufactured solutions and initial data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Potential:
    name: str
    F: Callable[[np.ndarray], np.ndarray]
    Fprime: Callable[[np.ndarray], np.ndarray]


def _dw(phi):
    return 0.25 * (phi * phi - 1.0) ** 2


def _dw_prime(phi):
    return phi * phi * phi - phi


DOUBLE_WELL = Potential("double_well", _dw, _dw_prime)

POTENTIALS = {DOUBLE_WELL.name: DOUBLE_WELL}


def caputo_power(mu: float, alpha: float, t):
    """Caputo derivative of order ``alpha`` of ``t**mu`` (``mu > 0``)."""
    if not mu > 0:
        raise ValueError(f"exponent mu must be positive, got {mu}")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    t = np.asarray(t, dtype=float)
    return math.gamma(mu + 1) / math.gamma(mu + 1 - alpha) * t ** (mu - alpha)


@dataclass(frozen=True)
class ManufacturedSolution:
    """``amplitude * (t**mu + offset) * shape(x, y)`` with ``Lap shape = lap_factor * shape``."""

    amplitude: float
    mu: float
    offset: float
    shape: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lap_factor: float

    def phi(self, x, y, t):
        return self.amplitude * (t**self.mu + self.offset) * self.shape(x, y)

    def caputo(self, x, y, t, alpha):
        return self.amplitude * caputo_power(self.mu, alpha, t) * self.shape(x, y)

    def laplacian(self, x, y, t):
        return self.lap_factor * self.phi(x, y, t)

    def source(self, x, y, t, alpha, eps2, potential=DOUBLE_WELL):
        """Right side making ``phi`` solve ``D^a phi - eps2 Lap phi + F'(phi) = s``."""
        phi = self.phi(x, y, t)
        return (self.caputo(x, y, t, alpha) - eps2 * self.lap_factor * phi
                + potential.Fprime(phi))


def example1_solution():
    """``0.2 t^5 sin(x) cos(y)`` on the periodic square ``(0, 2 pi)^2``."""
    return ManufacturedSolution(0.2, 5.0, 0.0,
                                lambda x, y: np.sin(x) * np.cos(y), -2.0)


def example2_solution(mu):
    """``0.2 (t^mu + 1) cos(pi x) cos(pi y)`` on ``(-1, 1)^2`` with Neumann walls."""
    return ManufacturedSolution(0.2, float(mu), 1.0,
                                lambda x, y: np.cos(np.pi * x) * np.cos(np.pi * y),
                                -2.0 * np.pi**2)


CIRCLE_RADIUS = 8.0 / 32.0


def cosine44(x, y):
    return np.cos(4 * np.pi * x) * np.cos(4 * np.pi * y)


def circle(x, y, radius=CIRCLE_RADIUS, eps=None):
    """+1 inside the disc, -1 outside; ``eps`` switches to a tanh profile."""
    rho = np.sqrt(np.asarray(x) ** 2 + np.asarray(y) ** 2)
    if eps is None:
        return np.where(rho**2 < radius**2, 1.0, -1.0)
    return np.tanh((radius - rho) / (math.sqrt(2.0) * eps))


INITIAL_KINDS = ("cosine44", "circle", "random_uniform")


def initial_condition(kind, grid, seed=0, radius=CIRCLE_RADIUS, smooth_eps=None,
                      amplitude=0.05):
    """Nodal initial field of the given kind.

    ``random_uniform`` draws i.i.d. values on ``[-amplitude, amplitude]`` from
    numpy's PCG64 generator seeded with ``seed``.
    """
    X, Y = grid.mesh()
    if kind == "cosine44":
        return cosine44(X, Y)
    if kind == "circle":
        return circle(X, Y, radius, smooth_eps)
    if kind == "random_uniform":
        rng = np.random.default_rng(seed)
        return rng.uniform(-amplitude, amplitude, size=grid.shape)
    raise ValueError(f"unknown initial condition {kind!r}; choose from {INITIAL_KINDS}")
