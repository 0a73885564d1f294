"""Extended-SAV time steppers for the time-fractional Allen-Cahn equation.

Both schemes reduce each step to two constant-coefficient Helmholtz solves
plus a scalar update; the auxiliary variable never enters a linear system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .models import DOUBLE_WELL, Potential
from .time_mesh import l1_coefficients, l1cn_coefficients

SCHEMES = ("l1", "l1cn")


class ConfigurationError(ValueError):
    pass


class SolverError(RuntimeError):
    """Raised when a step cannot be carried out (e.g. ``E_theta + C0 <= 0``)."""


@dataclass
class SchemeConfig:
    alpha: float
    eps2: float
    theta: float | None = None
    c0: float = 0.0
    scheme: str = "l1cn"
    potential: Potential = DOUBLE_WELL
    source: Callable[[float], np.ndarray] | None = None
    dealias: bool = False

    def __post_init__(self):
        if self.theta is None:
            self.theta = self.eps2
        if not 0 < self.alpha <= 1:
            raise ConfigurationError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.eps2 > 0:
            raise ConfigurationError(f"eps2 must be positive, got {self.eps2}")
        if not 0 <= self.theta <= self.eps2:
            raise ConfigurationError(
                f"theta must satisfy 0 <= theta <= eps2={self.eps2}, got {self.theta}")
        if self.c0 < 0:
            raise ConfigurationError(f"C0 must be >= 0, got {self.c0}")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")


class IncrementHistory:
    """Growable store of ``(phi^{k+1} - phi^k) / dt_{k+1}``, one flat row per step."""

    def __init__(self, npts, capacity=16):
        self.data = np.empty((max(int(capacity), 1), npts))
        self.count = 0

    def append(self, incr):
        if self.count == self.data.shape[0]:
            grown = np.empty((2 * self.count, self.data.shape[1]))
            grown[: self.count] = self.data[: self.count]
            self.data = grown
        self.data[self.count] = incr.ravel()
        self.count += 1

    def weighted_sum(self, coeffs, n, out=None):
        """``sum_{k<n} coeffs[k] * row_k``."""
        if out is None:
            out = np.empty(self.data.shape[1])
        kernels.history_sum(coeffs, self.data, n, out)
        return out


@dataclass
class SavState:
    """Solver state after ``n`` completed steps.

    ``phi_prev`` equals ``phi`` at ``n = 0``.  ``sigma`` is the elimination
    scalar of the most recent step.
    """

    n: int
    t: float
    phi: np.ndarray
    phi_prev: np.ndarray
    R: float
    history: IncrementHistory
    sigma: float = 0.0


@dataclass(frozen=True)
class EnergyRecord:
    step: int
    t: float
    E: float
    E_mod: float
    R: float


def theta_energy(grid, phi, cfg):
    """``E_theta(phi) = theta/2 |grad phi|^2 + int F(phi)``."""
    return 0.5 * cfg.theta * grid.grad_norm_sq(phi) + grid.integrate_potential(phi, cfg.potential)


def original_energy(grid, phi, cfg):
    return 0.5 * cfg.eps2 * grid.grad_norm_sq(phi) + grid.integrate_potential(phi, cfg.potential)


def modified_energy(grid, state, cfg, scheme=None):
    """Discrete energy that the scheme keeps bounded by its initial value."""
    scheme = scheme or cfg.scheme
    value = 0.5 * (cfg.eps2 - cfg.theta) * grid.grad_norm_sq(state.phi) + state.R**2
    if scheme == "l1cn":
        value += 0.25 * cfg.theta * grid.grad_norm_sq(state.phi - state.phi_prev)
    return value


def energy_record(grid, state, cfg):
    return EnergyRecord(state.n, state.t, original_energy(grid, state.phi, cfg),
                        modified_energy(grid, state, cfg), state.R)


def init_state(grid, phi0, cfg, capacity=16):
    phi0 = np.array(phi0, dtype=float)
    if phi0.shape != grid.shape:
        raise ValueError(f"initial field of shape {phi0.shape} does not match {grid!r}")
    shifted = theta_energy(grid, phi0, cfg) + cfg.c0
    if not shifted > 0:
        raise ConfigurationError(
            f"E_theta(phi0) + C0 = {shifted!r} must be positive; increase C0")
    return SavState(0, 0.0, phi0, phi0.copy(), math.sqrt(shifted),
                    IncrementHistory(phi0.size, capacity))


def _nonlinearity(grid, phi, cfg):
    fp = cfg.potential.Fprime(phi)
    return grid.dealias(fp) if cfg.dealias else fp


def _shift(grid, phi, cfg, n):
    s2 = theta_energy(grid, phi, cfg) + cfg.c0
    if not s2 > 0:
        raise SolverError(f"step {n + 1}: E_theta + C0 = {s2!r} is not positive")
    return s2


def _history(state, coeffs, n, alpha):
    if n == 0 or alpha == 1.0:  # all lagged weights vanish at alpha = 1
        return 0.0
    return state.history.weighted_sum(coeffs, n).reshape(state.phi.shape)


def _finish(state, grid, mesh, gamma, a, kappa, rhs, denom, s):
    """Shared tail: two solves, the scalar recovery, and the state update."""
    n = state.n
    ainv_gamma = grid.solve_helmholtz(a, kappa, gamma)
    phi2 = grid.solve_helmholtz(a, kappa, rhs)
    sigma = grid.inner(gamma, ainv_gamma) / denom
    if sigma < -1e-12:
        raise SolverError(f"step {n + 1}: sigma = {sigma!r} < 0 (A is not positive)")
    proj = grid.inner(gamma, phi2) / (1.0 + sigma)
    new = phi2 - (proj / denom) * ainv_gamma
    dphi = new - state.phi
    state.R = state.R + grid.inner(gamma, dphi) / (2.0 * s)
    dt = mesh.step(n + 1)
    state.history.append(dphi / dt)
    state.phi_prev = state.phi
    state.phi = new
    state.n = n + 1
    state.t = float(mesh.nodes[n + 1])
    state.sigma = sigma
    return state


def step_first_order(state, grid, mesh, cfg):
    """Advance ``state`` by one step of the first-order L1 scheme (in place)."""
    n = state.n
    phi = state.phi
    dt = mesh.step(n + 1)
    lap = grid.laplacian(phi)
    gamma = -cfg.theta * lap + _nonlinearity(grid, phi, cfg)
    s2 = _shift(grid, phi, cfg, n)
    s = math.sqrt(s2)
    coeffs = l1_coefficients(mesh, n, cfg.alpha)
    a = coeffs[n] / dt
    rhs = (a * phi - _history(state, coeffs, n, cfg.alpha) - cfg.theta * lap
           - (state.R / s - grid.inner(gamma, phi) / (2.0 * s2)) * gamma)
    if cfg.source is not None:
        rhs = rhs + cfg.source(float(mesh.nodes[n + 1]))
    return _finish(state, grid, mesh, gamma, a, cfg.eps2, rhs, 2.0 * s2, s)


def extrapolate(state, mesh):
    """Explicit midpoint predictor ``phi^n + dt_{n+1}/(2 dt_n) (phi^n - phi^{n-1})``."""
    n = state.n
    if n == 0:
        return state.phi.copy()
    ratio = mesh.step(n + 1) / (2.0 * mesh.step(n))
    return state.phi + ratio * (state.phi - state.phi_prev)


def step_l1cn(state, grid, mesh, cfg):
    """Advance ``state`` by one step of the L1-CN scheme (in place)."""
    n = state.n
    phi = state.phi
    dt = mesh.step(n + 1)
    bar = extrapolate(state, mesh)
    lap_bar = grid.laplacian(bar)
    gamma = -cfg.theta * lap_bar + _nonlinearity(grid, bar, cfg)
    s2 = _shift(grid, bar, cfg, n)
    s = math.sqrt(s2)
    coeffs = l1cn_coefficients(mesh, n, cfg.alpha)
    a = coeffs[n] / dt
    rhs = (a * phi + 0.5 * cfg.eps2 * grid.laplacian(phi)
           - _history(state, coeffs, n, cfg.alpha) - cfg.theta * lap_bar
           - (state.R / s - grid.inner(gamma, phi) / (4.0 * s2)) * gamma)
    if cfg.source is not None:
        rhs = rhs + cfg.source(0.5 * float(mesh.nodes[n] + mesh.nodes[n + 1]))
    return _finish(state, grid, mesh, gamma, a, 0.5 * cfg.eps2, rhs, 4.0 * s2, s)


STEPPERS = {"l1": step_first_order, "l1cn": step_l1cn}


def solve(grid, phi0, mesh, cfg, observer=None, state=None):
    """Run ``cfg.scheme`` over the whole mesh.

    ``observer(state)`` is called on the initial state and after every step.
    Returns the final state.
    """
    if state is None:
        state = init_state(grid, phi0, cfg, capacity=mesh.M)
    step = STEPPERS[cfg.scheme]
    if observer is not None:
        observer(state)
    while state.n < mesh.M:
        step(state, grid, mesh, cfg)
        if observer is not None:
            observer(state)
    return state


def manufactured_source(solution, grid, cfg_alpha, eps2, potential=DOUBLE_WELL):
    """Nodal source ``t -> s(x, y, t)`` for a manufactured solution."""
    X, Y = grid.mesh()

    def source(t):
        return solution.source(X, Y, t, cfg_alpha, eps2, potential)

    return source
