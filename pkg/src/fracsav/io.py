"""Plain CSV output with a ``#`` header."""

from __future__ import annotations

import math

ENERGY_COLUMNS = ("step", "t", "E", "E_mod", "R")
RADIUS_COLUMNS = ("t", "R", "R2")
CONVERGENCE_COLUMNS = ("M", "tau_max", "error", "order")


def format_value(v):
    if isinstance(v, (bool, int)) and not isinstance(v, float):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".15g")


def write_csv(path, columns, rows, header=()):
    """Write ``rows`` (sequences matching ``columns``) after ``# ``-prefixed header lines."""
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def read_csv(path):
    """Return ``(header_lines, columns, rows)`` with numeric cells as floats."""
    header, columns, rows = [], None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                header.append(line[1:].strip())
            elif columns is None:
                columns = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    return header, columns, rows


def write_energy(path, records, header=()):
    write_csv(path, ENERGY_COLUMNS,
              ((r.step, r.t, r.E, r.E_mod, r.R) for r in records), header)


def write_radius(path, rows, header=()):
    write_csv(path, RADIUS_COLUMNS, ((r.t, r.R, r.R2) for r in rows), header)


def write_convergence(path, report, header=()):
    write_csv(path, CONVERGENCE_COLUMNS,
              ((r.M, r.tau_max, r.error, r.order) for r in report.rows), header)
