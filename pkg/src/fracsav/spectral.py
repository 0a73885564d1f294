"""Spectral discretisation on 2D tensor grids.

Periodic grids use the real FFT on ``n`` equispaced nodes per direction.
Neumann grids use a cosine (DCT-I) basis on ``n + 1`` nodes that include both
walls, so ``x_j = a + j L / n`` for ``j = 0..n``.  Fields are plain float
arrays indexed ``[ix, iy]``.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as sfft

BCS = ("periodic", "neumann")


class Grid:
    """Tensor grid with its spectral Laplacian and quadrature.

    Parameters
    ----------
    n : int
        Intervals per direction (``ny`` defaults to ``n``).
    bc : {"periodic", "neumann"}
    domain : tuple, optional
        ``(x0, x1, y0, y1)``.  Defaults to ``(0, 2 pi)^2`` for periodic grids
        and ``(-1, 1)^2`` for Neumann grids.
    """

    def __init__(self, n, bc="periodic", domain=None, ny=None):
        if bc not in BCS:
            raise ValueError(f"bc must be one of {BCS}, got {bc!r}")
        nx = int(n)
        ny = nx if ny is None else int(ny)
        if nx < 2 or ny < 2:
            raise ValueError("need at least 2 intervals per direction")
        if domain is None:
            domain = (0.0, 2 * np.pi, 0.0, 2 * np.pi) if bc == "periodic" else (-1.0, 1.0, -1.0, 1.0)
        x0, x1, y0, y1 = map(float, domain)
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"degenerate domain {domain}")
        self.nx, self.ny, self.bc = nx, ny, bc
        self.domain = (x0, x1, y0, y1)
        self.lengths = (x1 - x0, y1 - y0)

        if bc == "periodic":
            self.x = x0 + self.lengths[0] * np.arange(nx) / nx
            self.y = y0 + self.lengths[1] * np.arange(ny) / ny
            kx = 2 * np.pi / self.lengths[0] * sfft.fftfreq(nx, 1.0 / nx)
            ky = 2 * np.pi / self.lengths[1] * sfft.rfftfreq(ny, 1.0 / ny)
            wy = np.full(ky.size, 2.0)
            wy[0] = 1.0
            if ny % 2 == 0:
                wy[-1] = 1.0
            wx = np.ones(nx)
            self._parseval = (self.area / (nx * ny) ** 2) * np.outer(wx, wy)
            qx = np.full(nx, self.lengths[0] / nx)
            qy = np.full(ny, self.lengths[1] / ny)
            self._kmax = (nx // 2, ny // 2)
            self._kidx = (np.abs(sfft.fftfreq(nx, 1.0 / nx)), sfft.rfftfreq(ny, 1.0 / ny))
        else:
            self.x = x0 + self.lengths[0] * np.arange(nx + 1) / nx
            self.y = y0 + self.lengths[1] * np.arange(ny + 1) / ny
            kx = np.pi / self.lengths[0] * np.arange(nx + 1)
            ky = np.pi / self.lengths[1] * np.arange(ny + 1)
            wx = np.full(nx + 1, 2.0)
            wx[[0, -1]] = 1.0
            wy = np.full(ny + 1, 2.0)
            wy[[0, -1]] = 1.0
            self._parseval = (self.area / (16.0 * nx**2 * ny**2)) * np.outer(wx, wy)
            qx = np.full(nx + 1, self.lengths[0] / nx)
            qx[[0, -1]] *= 0.5
            qy = np.full(ny + 1, self.lengths[1] / ny)
            qy[[0, -1]] *= 0.5
            self._kmax = (nx, ny)
            self._kidx = (np.arange(nx + 1), np.arange(ny + 1))
        self.shape = (self.x.size, self.y.size)
        self.eigenvalues = -(kx[:, None] ** 2 + ky[None, :] ** 2)
        self.weights = np.outer(qx, qy)

    @property
    def area(self):
        return self.lengths[0] * self.lengths[1]

    @property
    def spacing(self):
        return (self.lengths[0] / self.nx, self.lengths[1] / self.ny)

    def mesh(self):
        """Coordinate arrays ``X, Y`` of the nodes."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def describe(self):
        return {"nx": self.nx, "ny": self.ny, "domain": self.domain, "bc": self.bc}

    def __eq__(self, other):
        return isinstance(other, Grid) and self.describe() == other.describe()

    def __hash__(self):
        return hash((self.nx, self.ny, self.domain, self.bc))

    def __repr__(self):
        return f"Grid(n={self.nx}, ny={self.ny}, bc={self.bc!r}, domain={self.domain})"

    def _check(self, f):
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise ValueError(f"field of shape {f.shape} does not live on {self!r}")
        return f

    # transforms -------------------------------------------------------------

    def forward(self, f):
        f = self._check(f)
        if self.bc == "periodic":
            return sfft.rfft2(f)
        return sfft.dctn(f, type=1)

    def inverse(self, coeffs):
        if self.bc == "periodic":
            return sfft.irfft2(coeffs, s=self.shape)
        return sfft.idctn(coeffs, type=1)

    # operators --------------------------------------------------------------

    def laplacian(self, f):
        return self.inverse(self.eigenvalues * self.forward(f))

    def solve_helmholtz(self, a, kappa, rhs):
        """Solve ``(a - kappa * Laplacian) u = rhs`` with the grid's BC."""
        if not a > 0:
            raise ValueError(f"Helmholtz shift must be positive, got a={a}")
        if kappa < 0:
            raise ValueError(f"diffusion coefficient must be >= 0, got kappa={kappa}")
        return self.inverse(self.forward(rhs) / (a - kappa * self.eigenvalues))

    def dealias(self, f):
        """Zero the upper third of the modes in each direction."""
        coeffs = self.forward(f)
        cx = self._kidx[0] > (2 * self._kmax[0]) // 3
        cy = self._kidx[1] > (2 * self._kmax[1]) // 3
        coeffs[cx, :] = 0.0
        coeffs[:, cy] = 0.0
        return self.inverse(coeffs)

    # quadrature -------------------------------------------------------------

    def integrate(self, f):
        return float(np.sum(self.weights * self._check(f)))

    def inner(self, f, g):
        return float(np.sum(self.weights * self._check(f) * self._check(g)))

    def spectral_norm_sq(self, f):
        """``inner(f, f)`` evaluated from the transform coefficients."""
        c = self.forward(f)
        return float(np.sum(self._parseval * (c.real**2 + c.imag**2)))

    def grad_norm_sq(self, f):
        c = self.forward(f)
        return float(np.sum(-self.eigenvalues * self._parseval * (c.real**2 + c.imag**2)))

    def integrate_potential(self, f, potential):
        return self.integrate(potential.F(self._check(f)))


def write_snapshot(path, grid, values, t=None, header=()):
    """Dump a field as a row-major CSV grid with a ``#`` header."""
    values = grid._check(values)
    x0, x1, y0, y1 = grid.domain
    lines = list(header)
    lines += [f"nx = {grid.nx}", f"ny = {grid.ny}",
              f"domain = {x0!r} {x1!r} {y0!r} {y1!r}", f"bc = {grid.bc}"]
    if t is not None:
        lines.append(f"t = {t!r}")
    with open(path, "w") as fh:
        for line in lines:
            fh.write(f"# {line}\n")
        for row in values:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_snapshot(path):
    """Inverse of :func:`write_snapshot`; returns ``(grid, values, t)``."""
    meta = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, sep, val = line[1:].partition("=")
                if sep:
                    meta[key.strip()] = val.strip()
            elif line.strip():
                rows.append([float(v) for v in line.split(",")])
    domain = tuple(float(v) for v in meta["domain"].split())
    grid = Grid(int(meta["nx"]), meta["bc"], domain, ny=int(meta["ny"]))
    t = float(meta["t"]) if "t" in meta else None
    return grid, np.array(rows), t
