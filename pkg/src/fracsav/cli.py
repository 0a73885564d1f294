"""Command-line front end.

    fracsav converge --problem ex1 --scheme l1 --alpha 0.5 --M 16,32,64
    fracsav circle --alpha 1 --out radius.csv
    fracsav coarsen --alpha 0.5 --seed 3 --out energy.csv
    fracsav single-run --problem ex3 --mesh graded --r 2 --M 64

A ``--config FILE`` of ``key = value`` lines may supply any option; flags
given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from . import experiments as ex
from . import io
from .spectral import write_snapshot
from .stepper import ConfigurationError, SolverError, energy_record, solve
from .time_mesh import TimeMesh

COMMANDS = ("converge", "circle", "coarsen", "single-run")
PROBLEM_BC = {"ex1": "periodic", "ex2": "neumann", "ex3": "neumann",
              "circle": "neumann", "coarsen": "neumann"}
DEFAULT_PROBLEM = {"converge": "ex1", "circle": "circle", "coarsen": "coarsen",
                   "single-run": "ex1"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "converge"
    problem: str | None = None
    alpha: float = 0.5
    eps2: float | None = None
    theta: float | None = None
    c0: float = 0.0
    scheme: str = "l1cn"
    bc: str | None = None
    grid: int | None = None
    mesh: str | None = None
    r: float | None = None
    M: tuple = ()
    dt: float | None = None
    T: float | None = None
    mu: float = 0.5
    seed: int = 0
    error_mode: str = "max"
    out: str | None = None
    jobs: int = 1

    def canonical(self):
        """One ``key = value`` line per field, in declaration order."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "M":
                v = ",".join(str(m) for m in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {'' if v is None else v}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {"alpha": float, "eps2": float, "theta": float, "c0": float,
                "grid": int, "r": float, "dt": float, "T": float, "mu": float,
                "seed": int, "jobs": int}
_CHOICES = {"command": COMMANDS, "problem": ex.PROBLEMS, "scheme": ("l1", "l1cn"),
            "bc": ("periodic", "neumann"), "mesh": ("uniform", "graded", "composite"),
            "error_mode": ("max", "final")}
_KEYS = tuple(f.name for f in fields(RunConfig))
_HELP = {
    "problem": "ex1, ex2, ex3, circle or coarsen",
    "alpha": "fractional order in (0, 1]",
    "eps2": "interface parameter epsilon^2 (problem default)",
    "theta": "stabilization constant (default eps2)",
    "c0": "energy shift keeping the SAV root positive",
    "scheme": "l1 or l1cn",
    "bc": "periodic or neumann (fixed by the problem)",
    "grid": "grid intervals per direction",
    "mesh": "uniform, graded or composite",
    "r": "grading exponent (default (2-alpha)/alpha)",
    "M": "step count(s); comma list for converge",
    "dt": "uniform step after t=1 on composite meshes",
    "T": "final time",
    "mu": "regularity exponent of the ex2 solution",
    "seed": "RNG seed for random initial data",
    "error_mode": "max (over time) or final",
    "out": "output CSV path",
    "jobs": "worker processes for converge",
}


def _convert(key, text):
    key = key.replace("-", "_")
    if key not in _KEYS:
        raise ConfigError(f"unknown key {key!r}; valid keys: {', '.join(_KEYS)}")
    text = text.strip()
    if text == "":
        return key, None
    if key == "M":
        try:
            values = tuple(int(v) for v in text.split(","))
        except ValueError:
            raise ConfigError(f"M must be a comma-separated list of integers, got {text!r}")
        return key, values
    if key in _FIELD_TYPES:
        kind = _FIELD_TYPES[key]
        try:
            return key, kind(text)
        except ValueError:
            raise ConfigError(f"{key} expects {'an integer' if kind is int else 'a number'}, "
                              f"got {text!r}")
    if key in _CHOICES and text not in _CHOICES[key]:
        raise ConfigError(f"{key} must be one of {', '.join(_CHOICES[key])}, got {text!r}")
    return key, text


def parse_config_text(text):
    """Parse ``key = value`` lines into a dict of typed values."""
    values = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {num}: expected 'key = value', got {raw.strip()!r}")
        k, v = _convert(key.strip(), val)
        values[k] = v
    return values


def _raw_parser():
    p = argparse.ArgumentParser(prog="fracsav", description=__doc__.split("\n")[0],
                                argument_default=argparse.SUPPRESS)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--version", action="version", version=f"fracsav {__version__}")
    for key in _KEYS[1:]:
        flag = "--" + ("grid" if key == "grid" else key.replace("_", "-"))
        p.add_argument(flag, dest=key, metavar=key.upper(), help=_HELP.get(key))
    return p


def resolve(values):
    """Fill defaults and check constraints; raises :class:`ConfigError`."""
    cfg = RunConfig(**{k: v for k, v in values.items() if v is not None})
    cmd = cfg.command
    if cmd not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}")
    if cfg.problem is None:
        cfg.problem = DEFAULT_PROBLEM[cmd]
    if cmd == "circle" and cfg.problem != "circle":
        raise ConfigError("the circle command runs problem 'circle' only")
    if cmd == "coarsen" and cfg.problem != "coarsen":
        raise ConfigError("the coarsen command runs problem 'coarsen' only")
    if cmd == "converge" and cfg.problem not in ("ex1", "ex2", "ex3"):
        raise ConfigError("converge supports problems ex1, ex2 and ex3")
    bc = PROBLEM_BC[cfg.problem]
    if cfg.bc is None:
        cfg.bc = bc
    elif cfg.bc != bc:
        raise ConfigError(f"problem {cfg.problem} requires bc = {bc}")
    if not 0 < cfg.alpha <= 1:
        raise ConfigError(f"alpha must lie in (0, 1], got {cfg.alpha}")
    if cfg.eps2 is None:
        cfg.eps2 = ex.DEFAULT_EPS2[cfg.problem]
    if not cfg.eps2 > 0:
        raise ConfigError(f"eps2 must be positive, got {cfg.eps2}")
    if cfg.theta is None:
        cfg.theta = cfg.eps2
    if not 0 <= cfg.theta <= cfg.eps2:
        raise ConfigError(f"theta must satisfy 0 <= theta <= eps2 = {cfg.eps2}, got {cfg.theta}")
    if cfg.c0 < 0:
        raise ConfigError(f"c0 must be >= 0, got {cfg.c0}")
    if cfg.grid is None:
        cfg.grid = ex.DEFAULT_GRID[cfg.problem]
    if cfg.grid < 2 or (cfg.bc == "neumann" and cfg.grid % 2):
        raise ConfigError(f"grid must be an even integer >= 2, got {cfg.grid}")
    if cfg.T is None:
        cfg.T = ex.DEFAULT_T[cfg.problem]
    if not cfg.T > 0:
        raise ConfigError(f"T must be positive, got {cfg.T}")
    if cmd in ("circle", "coarsen"):
        if cfg.scheme != "l1cn":
            raise ConfigError(f"{cmd} uses the l1cn scheme")
        if cfg.mesh is None:
            cfg.mesh = "composite"
        if cfg.dt is None:
            cfg.dt = 0.01
        if cfg.r is None:
            cfg.r = ex.natural_grading(cfg.alpha)
        if not cfg.M:
            if cmd == "circle":
                cfg.M = (ex.CIRCLE_M_GRADED.get(float(cfg.alpha), 100),)
            else:
                cfg.M = (100,)
    else:
        if cfg.mesh is None:
            cfg.mesh = "uniform"
        if cfg.r is None:
            cfg.r = 1.0
        if not cfg.M:
            cfg.M = (16, 32, 64, 128, 256) if cmd == "converge" else (64,)
    if cfg.r < 1:
        raise ConfigError(f"r must be >= 1, got {cfg.r}")
    if any(m < 1 for m in cfg.M):
        raise ConfigError(f"M entries must be positive, got {cfg.M}")
    if cmd != "converge" and len(cfg.M) != 1:
        raise ConfigError(f"{cmd} takes a single M, got {len(cfg.M)} values")
    if cmd == "converge":
        if cfg.mesh == "composite":
            raise ConfigError("converge uses uniform or graded meshes")
        if len(cfg.M) < 2:
            raise ConfigError("converge needs at least two M values")
    if cfg.mesh == "composite":
        if cfg.dt is None or not cfg.dt > 0:
            raise ConfigError("a composite mesh needs a positive dt")
        count = (cfg.T - 1.0) / cfg.dt
        if cfg.T <= 1.0 or abs(count - round(count)) > 1e-9 * max(1.0, count):
            raise ConfigError(f"(T - 1)/dt must be a positive integer, got {count}")
    if cfg.jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {cfg.jobs}")
    if cfg.out is None:
        cfg.out = f"{cmd}_{cfg.problem}.csv"
    return cfg


def parse_config(argv=None, text=None):
    """Build a :class:`RunConfig` from a config text and/or command-line flags."""
    values = parse_config_text(text) if text else {}
    if argv is not None:
        ns = vars(_raw_parser().parse_args(argv))
        path = ns.pop("config", None)
        if path is not None:
            try:
                with open(path) as fh:
                    values.update(parse_config_text(fh.read()))
            except OSError as exc:
                raise ConfigError(f"cannot read config file: {exc}")
        for key, val in ns.items():
            values.update([_convert(key, val)])
    return resolve(values)


def _header(cfg):
    return [f"fracsav {__version__}"] + cfg.canonical().splitlines()


def _mesh(cfg, T=None) -> TimeMesh:
    return ex.make_mesh(cfg.mesh, cfg.T if T is None else T, cfg.M[0], cfg.r, cfg.dt)


def _sibling(path, tag):
    stem, ext = os.path.splitext(path)
    return f"{stem}_{tag}{ext or '.csv'}"


def run(cfg):
    """Execute a resolved config; returns the summary line."""
    header = _header(cfg)
    if cfg.command == "converge":
        report = ex.run_convergence(cfg.problem, cfg.alpha, cfg.scheme, cfg.mesh,
                                    list(cfg.M), cfg.error_mode, r=cfg.r, T=cfg.T,
                                    jobs=cfg.jobs, grid_n=cfg.grid, eps2=cfg.eps2,
                                    **({"mu": cfg.mu} if cfg.problem == "ex2" else {}))
        io.write_convergence(cfg.out, report, header + [f"reference = {report.reference}"])
        return (f"converge {cfg.problem}: final error {report.rows[-1].error:.6e}, "
                f"last order {report.rows[-1].order:.4f}, lsq order {report.lsq_order():.4f}")
    if cfg.command == "circle":
        eps = float(np.sqrt(cfg.eps2))
        radii, energies = ex.run_benchmark_circle(cfg.alpha, cfg.grid, cfg.T, eps=eps,
                                                  mesh=_mesh(cfg))
        io.write_radius(cfg.out, radii, header)
        io.write_energy(_sibling(cfg.out, "energy"), energies, header)
        last = energies[-1]
        return (f"circle alpha={cfg.alpha}: R({radii[-1].t:g}) = {radii[-1].R:.6f}, "
                f"E = {last.E:.10e}, E_mod = {last.E_mod:.10e}")
    if cfg.command == "coarsen":
        snaps, energies = ex.run_coarsening(cfg.alpha, cfg.seed, cfg.grid, cfg.T,
                                            eps2=cfg.eps2, mesh=_mesh(cfg))
        io.write_energy(cfg.out, energies, header)
        grid = ex.make_problem("coarsen", grid_n=cfg.grid).grid
        for t, field in sorted(snaps.items()):
            write_snapshot(_sibling(cfg.out, f"t{t:g}"), grid, field, t, header)
        last = energies[-1]
        return (f"coarsen alpha={cfg.alpha} seed={cfg.seed}: E({last.t:g}) = {last.E:.10e}, "
                f"E_mod = {last.E_mod:.10e}")
    # single-run
    problem = ex.make_problem(cfg.problem, grid_n=cfg.grid, mu=cfg.mu, eps2=cfg.eps2,
                              T=cfg.T, seed=cfg.seed)
    mesh = _mesh(cfg)
    scheme = ex.make_config(problem, cfg.alpha, cfg.scheme, cfg.theta, cfg.c0)
    records = []
    final = solve(problem.grid, problem.phi0, mesh, scheme,
                  observer=lambda s: records.append(energy_record(problem.grid, s, scheme)))
    io.write_energy(cfg.out, records, header)
    summary = (f"single-run {cfg.problem}: E({final.t:g}) = {records[-1].E:.10e}, "
               f"E_mod = {records[-1].E_mod:.10e}")
    if problem.solution is not None:
        X, Y = problem.grid.mesh()
        err = np.max(np.abs(final.phi - problem.solution.phi(X, Y, final.t)))
        summary += f", final error {err:.6e}"
    return summary


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"fracsav: error: {exc}", file=sys.stderr)
        return 2
    try:
        print(run(cfg))
    except (SolverError, ConfigurationError, ValueError, OSError) as exc:
        print(f"fracsav: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
