"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def kernel_row(nodes, steps, n, p, half, out):
    """Antiderivative increments of the kernel over each step, by step index.

    ``out[k]`` receives ``(x - t_k)**p - (x - t_{k+1})**p`` for ``k < n`` and
    ``(x - t_n)**p`` for ``k = n``, where ``x = t_{n+1}`` or, with ``half``,
    the midpoint of the last step.  ``steps[k] = t_{k+1} - t_k``.
    """
    lead = 0.5 * steps[n] if half else steps[n]
    h = steps[:n]
    far = lead + (nodes[n] - nodes[1 : n + 1])
    out[:n] = np.power(far, p) * np.expm1(p * np.log1p(h / far))
    out[n] = lead**p


def history_sum(coeffs, incr, n, out):
    if n == 0:
        out[:] = 0.0
    else:
        np.dot(coeffs[:n], incr[:n], out=out)
