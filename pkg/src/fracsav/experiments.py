"""Reproduction harness: convergence studies, shrinking circle, coarsening."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .models import (CIRCLE_RADIUS, ManufacturedSolution, example1_solution,
                     example2_solution, initial_condition)
from .spectral import Grid
from .stepper import (EnergyRecord, SchemeConfig, energy_record,
                      manufactured_source, solve)
from .time_mesh import (TimeMesh, build_composite_mesh, build_graded_mesh,
                        build_uniform_mesh)

PROBLEMS = ("ex1", "ex2", "ex3", "circle", "coarsen")

# eps^2 defaults per problem; the manufactured examples use unit diffusion
DEFAULT_EPS2 = {"ex1": 1.0, "ex2": 1.0, "ex3": 0.01,
                "circle": 0.0313**2, "coarsen": 0.001}
DEFAULT_GRID = {"ex1": 32, "ex2": 32, "ex3": 64, "circle": 128, "coarsen": 128}
DEFAULT_T = {"ex1": 1.0, "ex2": 1.0, "ex3": 1.0, "circle": 32.0, "coarsen": 20.0}
# graded-part step counts for the circle benchmark (alpha -> M); with the
# default dt = 0.01 these are the published run parameters
CIRCLE_M_GRADED = {1.0: 100, 0.9: 100, 0.4: 1000}


@dataclass
class Problem:
    name: str
    grid: Grid
    phi0: np.ndarray
    eps2: float
    T: float
    solution: ManufacturedSolution | None = None


def make_problem(name, grid_n=None, mu=0.5, eps2=None, T=None, seed=0):
    """Grid, initial data and coefficients for one of :data:`PROBLEMS`."""
    if name not in PROBLEMS:
        raise ValueError(f"unknown problem {name!r}; choose from {PROBLEMS}")
    n = DEFAULT_GRID[name] if grid_n is None else int(grid_n)
    eps2 = DEFAULT_EPS2[name] if eps2 is None else float(eps2)
    T = DEFAULT_T[name] if T is None else float(T)
    solution = None
    if name == "ex1":
        grid = Grid(n, "periodic")
        solution = example1_solution()
    elif name == "ex2":
        grid = Grid(n, "neumann")
        solution = example2_solution(mu)
    else:
        grid = Grid(n, "neumann")
    if solution is not None:
        X, Y = grid.mesh()
        phi0 = solution.phi(X, Y, 0.0)
    elif name == "ex3":
        phi0 = initial_condition("cosine44", grid)
    elif name == "circle":
        phi0 = initial_condition("circle", grid)
    else:
        phi0 = initial_condition("random_uniform", grid, seed=seed)
    return Problem(name, grid, phi0, eps2, T, solution)


def make_config(problem, alpha, scheme, theta=None, c0=0.0, dealias=False):
    source = None
    if problem.solution is not None:
        source = manufactured_source(problem.solution, problem.grid, alpha, problem.eps2)
    return SchemeConfig(alpha, problem.eps2, theta, c0, scheme, source=source,
                        dealias=dealias)


def make_mesh(family, T, M, r=1.0, dt=None, split_time=1.0):
    if family == "uniform":
        return build_uniform_mesh(T, M)
    if family == "graded":
        return build_graded_mesh(T, M, r)
    if family == "composite":
        if dt is None:
            raise ValueError("composite mesh needs dt")
        return build_composite_mesh(T, M, r, dt, split_time)
    raise ValueError(f"unknown mesh family {family!r}")


def natural_grading(alpha):
    """``r = (2 - alpha) / alpha``, the grading used on ``[0, 1]`` in the long runs."""
    return (2.0 - alpha) / alpha


# convergence ---------------------------------------------------------------

def observed_orders(errors, taus):
    """Pairwise orders ``log(e_{k-1}/e_k) / log(tau_{k-1}/tau_k)``."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(taus, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])


def lsq_order(errors, taus):
    """Least-squares slope of ``log e`` against ``log tau``."""
    return float(np.polyfit(np.log(taus), np.log(errors), 1)[0])


@dataclass
class ConvergenceRow:
    M: int
    tau_max: float
    error: float
    order: float  # nan on the first row


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    reference: str  # "exact" or "fine-run"
    meta: dict = field(default_factory=dict)

    @property
    def errors(self):
        return np.array([row.error for row in self.rows])

    @property
    def taus(self):
        return np.array([row.tau_max for row in self.rows])

    @property
    def orders(self):
        return np.array([row.order for row in self.rows[1:]])

    def lsq_order(self, last=None):
        sl = slice(-last, None) if last else slice(None)
        return lsq_order(self.errors[sl], self.taus[sl])

    @classmethod
    def from_errors(cls, Ms, taus, errors, reference, meta=None):
        orders = [math.nan] + list(observed_orders(errors, taus))
        rows = [ConvergenceRow(int(M), float(h), float(e), float(p))
                for M, h, e, p in zip(Ms, taus, errors, orders)]
        return cls(rows, reference, meta or {})


def run_to_final(problem, alpha, scheme, mesh, theta=None, c0=0.0, dealias=False):
    cfg = make_config(problem, alpha, scheme, theta, c0, dealias)
    return solve(problem.grid, problem.phi0, mesh, cfg).phi


def run_error(problem, alpha, scheme, mesh, error_mode="max", reference=None,
              theta=None, c0=0.0):
    """Max-norm error of one run against the exact solution or a reference field."""
    if error_mode not in ("max", "final"):
        raise ValueError(f"error_mode must be 'max' or 'final', got {error_mode!r}")
    cfg = make_config(problem, alpha, scheme, theta, c0)
    grid = problem.grid
    if problem.solution is None:
        if error_mode != "final" or reference is None:
            raise ValueError("without an exact solution only final-time errors "
                             "against a reference field are available")
        if np.shape(reference) != grid.shape:
            raise ValueError("reference field lives on a different grid")
        final = solve(grid, problem.phi0, mesh, cfg).phi
        return float(np.max(np.abs(final - reference)))

    X, Y = grid.mesh()
    worst = [0.0]

    def track(state):
        if state.n == 0 or (error_mode == "final" and state.n < mesh.M):
            return
        exact = problem.solution.phi(X, Y, state.t)
        worst[0] = max(worst[0], float(np.max(np.abs(state.phi - exact))))

    solve(grid, problem.phi0, mesh, cfg, observer=track)
    return worst[0]


def _convergence_job(args):
    (name, pkw, alpha, scheme, family, T, M, r, error_mode, reference) = args
    problem = make_problem(name, **pkw)
    mesh = make_mesh(family, T, M, r)
    return mesh.tau, run_error(problem, alpha, scheme, mesh, error_mode, reference)


def run_convergence(problem, alpha, scheme, mesh_family, M_list, error_mode="max",
                    r=1.0, T=None, M_ref=None, jobs=1, **problem_kwargs):
    """Errors over a sequence of meshes and the observed orders.

    ``problem`` is a name from :data:`PROBLEMS`.  Problems without an exact
    solution are measured at the final time against an L1-CN run on the graded
    mesh with ``r = 3`` and ``M_ref`` steps (default ``16 * max(M_list)``).
    """
    if mesh_family not in ("uniform", "graded"):
        raise ValueError("convergence studies use uniform or graded meshes")
    prob = make_problem(problem, T=T, **problem_kwargs)
    T = prob.T
    pkw = dict(problem_kwargs, T=T)
    reference = None
    kind = "exact"
    if prob.solution is None:
        kind = "fine-run"
        error_mode = "final"
        M_ref = M_ref or 16 * max(M_list)
        reference = run_to_final(prob, alpha, "l1cn", build_graded_mesh(T, M_ref, 3.0))
    tasks = [(problem, pkw, alpha, scheme, mesh_family, T, M, r, error_mode, reference)
             for M in M_list]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_convergence_job, tasks))
    else:
        results = [_convergence_job(task) for task in tasks]
    taus = [tau for tau, _ in results]
    errors = [err for _, err in results]
    meta = {"problem": problem, "alpha": alpha, "scheme": scheme,
            "mesh": mesh_family, "r": r, "T": T, "error_mode": error_mode}
    if M_ref:
        meta["M_ref"] = M_ref
    return ConvergenceReport.from_errors(M_list, taus, errors, kind, meta)


# interface radius -----------------------------------------------------------

def _center_index(coords, lo, hi):
    c = 0.5 * (lo + hi)
    i = int(np.argmin(np.abs(coords - c)))
    if abs(coords[i] - c) > 1e-12 * max(1.0, abs(hi - lo)):
        raise ValueError("the domain centre is not a grid node; use an even grid size")
    return i


def _ray_radius(values, offsets):
    if values[0] <= 0:
        return 0.0
    below = np.nonzero(values <= 0)[0]
    if below.size == 0:
        return float(offsets[-1])
    i = below[0]
    f0, f1 = values[i - 1], values[i]
    return float(offsets[i - 1] + f0 * (offsets[i] - offsets[i - 1]) / (f0 - f1))


def extract_radius(values, grid, rays=1):
    """Radius of the zero level set along rays from the domain centre.

    ``rays=1`` samples the positive x-axis; ``rays=4`` averages the four
    axis directions.  Returns 0 when the field is non-positive at the centre.
    """
    x0, x1, y0, y1 = grid.domain
    ix = _center_index(grid.x, x0, x1)
    iy = _center_index(grid.y, y0, y1)
    dx = grid.x - grid.x[ix]
    dy = grid.y - grid.y[iy]
    radii = [_ray_radius(values[ix:, iy], dx[ix:])]
    if rays == 4:
        radii.append(_ray_radius(values[ix::-1, iy], -dx[ix::-1]))
        radii.append(_ray_radius(values[ix, iy:], dy[iy:]))
        radii.append(_ray_radius(values[ix, iy::-1], -dy[iy::-1]))
    elif rays != 1:
        raise ValueError("rays must be 1 or 4")
    return float(np.mean(radii))


@dataclass
class RadiusRow:
    t: float
    R: float
    R2: float


def circle_mesh(alpha, T, dt, M_graded=None):
    if M_graded is None:
        M_graded = CIRCLE_M_GRADED.get(float(alpha), 100)
    return build_composite_mesh(T, M_graded, natural_grading(alpha), dt)


def run_benchmark_circle(alpha, grid_n=128, T=32.0, dt=0.01, M_graded=None,
                         eps=0.0313, smooth=False, scale=32.0, rays=1,
                         mesh: TimeMesh | None = None, observer=None):
    """Shrinking-circle run on ``(-1, 1)^2`` with the L1-CN scheme.

    Radii are reported in original units (``scale`` times the reference ones).
    Returns ``(radius_rows, energy_records)``.
    """
    grid = Grid(grid_n, "neumann")
    phi0 = initial_condition("circle", grid, radius=CIRCLE_RADIUS,
                             smooth_eps=eps if smooth else None)
    mesh = mesh or circle_mesh(alpha, T, dt, M_graded)
    cfg = SchemeConfig(alpha, eps**2, scheme="l1cn")
    radii, energies = [], []

    def record(state):
        R = scale * extract_radius(state.phi, grid, rays)
        radii.append(RadiusRow(state.t, R, R * R))
        energies.append(energy_record(grid, state, cfg))
        if observer is not None:
            observer(state)

    solve(grid, phi0, mesh, cfg, observer=record)
    return radii, energies


COARSENING_TIMES = (0.0, 2.0, 5.0, 20.0, 50.0, 80.0, 100.0)


def run_coarsening(alpha, seed=0, grid_n=128, T=20.0, dt=0.01, M_graded=100,
                   eps2=0.001, snapshot_times=COARSENING_TIMES, mesh=None):
    """Coarsening from small random data; returns ``(snapshots, energy_records)``.

    ``snapshots`` maps each requested time within ``[0, T]`` to the field.
    """
    problem = make_problem("coarsen", grid_n=grid_n, eps2=eps2, T=T, seed=seed)
    mesh = mesh or build_composite_mesh(T, M_graded, natural_grading(alpha), dt)
    wanted = {mesh.index_of(t): t for t in snapshot_times if t <= T}
    cfg = SchemeConfig(alpha, eps2, scheme="l1cn")
    snapshots: dict[float, np.ndarray] = {}
    energies: list[EnergyRecord] = []

    def record(state):
        energies.append(energy_record(problem.grid, state, cfg))
        if state.n in wanted:
            snapshots[wanted[state.n]] = state.phi.copy()

    solve(problem.grid, problem.phi0, mesh, cfg, observer=record)
    return snapshots, energies
