"""Time meshes and discrete Caputo weights.

All weight rows are indexed by lag: entry ``j`` multiplies the increment
``(phi^{n+1-j} - phi^{n-j}) / dt_{n+1-j}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True, eq=False)
class TimeMesh:
    """Strictly increasing time nodes ``0 = t_0 < ... < t_M = T``.

    ``family`` is one of ``uniform``, ``graded``, ``composite`` or ``custom``;
    ``params`` keeps the constructor arguments for headers and reports.
    ``steps`` may be given explicitly so that constant steps stay exactly
    constant instead of inheriting rounding from node differences.
    """

    nodes: np.ndarray
    family: str = "custom"
    params: dict = field(default_factory=dict)
    steps: np.ndarray | None = None

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a time mesh needs at least two nodes")
        if nodes[0] != 0.0:
            raise ValueError(f"first node must be 0, got {nodes[0]!r}")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("time nodes must be strictly increasing")
        if self.steps is None:
            steps = np.diff(nodes)
        else:
            steps = np.array(self.steps, dtype=float)
            if steps.shape != (nodes.size - 1,):
                raise ValueError("steps must have one entry per interval")
            if not np.allclose(steps, np.diff(nodes), rtol=0, atol=1e-12 * nodes[-1]):
                raise ValueError("steps disagree with node differences")
        nodes.setflags(write=False)
        steps.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "steps", steps)

    @property
    def M(self) -> int:
        return self.nodes.size - 1

    @property
    def T(self) -> float:
        return float(self.nodes[-1])

    @property
    def tau(self) -> float:
        return float(self.steps.max())

    def step(self, n: int) -> float:
        """Size of step ``n`` (1-based, ``t_n - t_{n-1}``)."""
        return float(self.steps[n - 1])

    def index_of(self, t: float, rtol: float = 1e-9) -> int:
        """Index of the node equal to ``t`` (within ``rtol`` of the step size)."""
        i = int(np.argmin(np.abs(self.nodes - t)))
        tol = rtol * max(1.0, abs(t))
        if abs(self.nodes[i] - t) > tol:
            raise ValueError(f"t={t} is not a mesh node")
        return i


def build_uniform_mesh(T: float, M: int) -> TimeMesh:
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    M = int(M)
    nodes = np.arange(M + 1) * (T / M)
    nodes[-1] = T
    return TimeMesh(nodes, "uniform", {"T": T, "M": M}, np.full(M, T / M))


def build_graded_mesh(T: float, M: int, r: float) -> TimeMesh:
    """Nodes ``t_n = (n/M)**r * T``; ``r = 1`` reproduces the uniform mesh."""
    if not r >= 1:
        raise ValueError(f"grading exponent r must be >= 1, got {r}")
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    M = int(M)
    if r == 1:
        return build_uniform_mesh(T, M)
    nodes = (np.arange(M + 1) / M) ** r * T
    nodes[-1] = T
    return TimeMesh(nodes, "graded", {"T": T, "M": M, "r": r})


def build_composite_mesh(T: float, M_graded: int, r: float, dt: float,
                         split_time: float = 1.0) -> TimeMesh:
    """Graded mesh on ``[0, split_time]`` followed by uniform steps ``dt``."""
    if not T > split_time:
        raise ValueError(f"T must exceed split_time={split_time}, got {T}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    count = (T - split_time) / dt
    n_uniform = int(round(count))
    if n_uniform < 1 or abs(count - n_uniform) > 1e-9 * max(1.0, count):
        raise ValueError(f"(T - split_time)/dt = {count} is not an integer")
    head = build_graded_mesh(split_time, M_graded, r)
    tail = split_time + dt * np.arange(1, n_uniform + 1)
    tail[-1] = T
    steps = np.concatenate([head.steps, np.full(n_uniform, dt)])
    params = {"T": T, "M_graded": int(M_graded), "r": r, "dt": dt,
              "split_time": split_time}
    return TimeMesh(np.concatenate([head.nodes, tail]), "composite", params, steps)


def _check_alpha(alpha):
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")


def _check_row(mesh, n):
    if not 0 <= n <= mesh.M - 1:
        raise ValueError(f"step index n={n} outside 0..{mesh.M - 1}")


def l1_coefficients(mesh: TimeMesh, n: int, alpha: float,
                    out: np.ndarray | None = None) -> np.ndarray:
    """L1 weights for the step ``t_n -> t_{n+1}``, indexed by step ``k``.

    ``out[k] = b_{n-k}``.  Any mesh is handled through the exact antiderivative
    of the kernel over ``[t_k, t_{k+1}]``.
    """
    _check_alpha(alpha)
    _check_row(mesh, n)
    if out is None:
        out = np.empty(n + 1)
    kernels.kernel_row(mesh.nodes, mesh.steps, n, 1.0 - alpha, False, out)
    out[: n + 1] /= math.gamma(2.0 - alpha)
    return out


def l1cn_coefficients(mesh: TimeMesh, n: int, alpha: float,
                      out: np.ndarray | None = None) -> np.ndarray:
    """Half-step L1 weights (kernel centred at ``t_{n+1/2}``), by step ``k``."""
    _check_alpha(alpha)
    _check_row(mesh, n)
    if out is None:
        out = np.empty(n + 1)
    kernels.kernel_row(mesh.nodes, mesh.steps, n, 1.0 - alpha, True, out)
    out[: n + 1] /= math.gamma(2.0 - alpha)
    return out


def l1_weights(mesh: TimeMesh, n: int, alpha: float) -> np.ndarray:
    """Row ``b_0 .. b_n`` of the L1 discretisation at ``t_{n+1}``.

    >>> from fracsav.time_mesh import build_uniform_mesh
    >>> l1_weights(build_uniform_mesh(1.0, 1), 0, 1.0)
    array([1.])
    """
    return l1_coefficients(mesh, n, alpha)[::-1].copy()


def l1cn_weights(mesh: TimeMesh, n: int, alpha: float) -> np.ndarray:
    """Row ``b~_0 .. b~_n``; ``b~_0`` only covers ``[t_n, t_{n+1/2}]``."""
    return l1cn_coefficients(mesh, n, alpha)[::-1].copy()


# Closed forms for specific mesh families.  The steppers do not use these;
# they serve as independent cross-checks of the general path.

def _pw(x, p):
    # x**p with 0**p = 0 also for p = 0
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, np.abs(x) ** p, 0.0)


def uniform_l1_weights(n, alpha, tau):
    j = np.arange(n + 1, dtype=float)
    p = 1.0 - alpha
    return tau**p / math.gamma(2.0 - alpha) * ((j + 1) ** p - _pw(j, p))


def graded_l1_weights(n, alpha, T, M, r):
    j = np.arange(n + 1, dtype=float)
    p = 1.0 - alpha
    head = T**p / (math.gamma(2.0 - alpha) * M ** (p * r))
    return head * (_pw((n + 1) ** r - (n - j) ** r, p)
                   - _pw((n + 1) ** r - (n - j + 1) ** r, p))


def uniform_l1cn_weights(n, alpha, tau):
    p = 1.0 - alpha
    scale = tau**p / math.gamma(2.0 - alpha)
    k = np.arange(n + 1, dtype=float)
    row = scale * ((k + 0.5) ** p - np.abs(k - 0.5) ** p)
    row[0] = scale / 2.0**p
    return row


def graded_l1cn_weights(n, alpha, T, M, r):
    """Half-step weights on ``t_n = (n/M)**r T`` written in mesh indices.

    The kernel integral over step ``n-k+1`` equals this expression; it carries
    no division by the step length.
    """
    p = 1.0 - alpha
    head = T**p / (math.gamma(2.0 - alpha) * (2.0 * M**r) ** p)
    k = np.arange(1, n + 1, dtype=float)
    mid = (n + 1) ** r + n**r
    row = np.empty(n + 1)
    row[0] = head * ((n + 1) ** r - n**r) ** p
    row[1:] = head * ((mid - 2 * (n - k) ** r) ** p - (mid - 2 * (n - k + 1) ** r) ** p)
    return row


def hat_weights(n: int, alpha: float, tau: float) -> np.ndarray:
    """Coefficients ``b^_0 .. b^_n`` of the symmetric |t-s|^-alpha form."""
    _check_alpha(alpha)
    q = 2.0 - alpha
    k = np.arange(n + 1, dtype=float)
    row = (k + 1) ** q - 2 * k**q + np.abs(k - 1) ** q
    row[0] = 1.0
    return tau ** (1.0 - alpha) / math.gamma(3.0 - alpha) * row
