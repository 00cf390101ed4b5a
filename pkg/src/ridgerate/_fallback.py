"""Pure numpy implementations of the hot kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and semantics; :mod:`ridgerate.kernels` picks one at import time.
"""
from __future__ import annotations

from math import comb, factorial

import numpy as np

_CHUNK = 1 << 16


def bspline_values(k: int, u, deriv: int = 0, right: bool = False) -> np.ndarray:
    """Evaluate the ``deriv``-th derivative of the cardinal B-spline ``N_k``.

    Uses the alternating sum of truncated powers restricted to the support
    ``(0, k + 1)``, so the result is exactly zero outside it.

    Parameters
    ----------
    k : int
        Spline degree.
    u : array_like
        Evaluation points.
    deriv : int
        Derivative order, ``0 <= deriv <= k``.
    right : bool
        If true, the step function ``sigma_0`` is taken right-continuous
        (value 1 at 0). Only matters when ``deriv == k``.
    """
    u = np.asarray(u, dtype=float)
    q = k - deriv
    out = np.zeros_like(u)
    if q > 0:
        inside = (u > 0.0) & (u < k + 1)
    elif right:
        inside = (u >= 0.0) & (u < k + 1)
    else:
        inside = (u > 0.0) & (u <= k + 1)
    ui = u[inside]
    acc = np.zeros_like(ui)
    for i in range(k + 2):
        t = ui - i
        if q == 0:
            term = (t >= 0.0) if right else (t > 0.0)
            term = term.astype(float)
        else:
            term = np.where(t > 0.0, t, 0.0) ** q
        acc += (-1) ** i * comb(k + 1, i) * term
    out[inside] = acc / factorial(q)
    return out


def bspline_columns(proj, dir_index, scale, offset, k: int, deriv: int = 0) -> np.ndarray:
    """Matrix ``M[p, c] = N_k^{(deriv)}(scale[c] * proj[p, dir_index[c]] - offset[c])``.

    ``proj`` holds the projections of the sample points onto a set of
    directions; each column picks one of them.
    """
    proj = np.asarray(proj, dtype=float)
    dir_index = np.asarray(dir_index, dtype=np.int64)
    scale = np.asarray(scale, dtype=float)
    offset = np.asarray(offset, dtype=float)
    out = np.empty((proj.shape[0], dir_index.size), order="F")
    for c0 in range(0, dir_index.size, 256):
        sl = slice(c0, c0 + 256)
        u = proj[:, dir_index[sl]] * scale[sl] - offset[sl]
        out[:, sl] = bspline_values(k, u, deriv)
    return out


def _relu_power(t: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return (t > 0.0).astype(float)
    return np.where(t > 0.0, t, 0.0) ** k


def ridge_eval(amp, omega, bias, k: int, x) -> np.ndarray:
    """Evaluate ``sum_i amp[i] * sigma_k(omega[i] . x + bias[i])`` at rows of ``x``."""
    amp = np.asarray(amp, dtype=complex)
    omega = np.asarray(omega, dtype=float)
    bias = np.asarray(bias, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape[0], dtype=complex)
    step = max(1, _CHUNK // max(1, amp.size))
    for p0 in range(0, x.shape[0], step):
        t = x[p0:p0 + step] @ omega.T + bias
        out[p0:p0 + step] = _relu_power(t, k) @ amp
    return out


def ridge_eval_grad(amp, omega, bias, k: int, x) -> np.ndarray:
    """Gradient of :func:`ridge_eval` with respect to ``x``; requires ``k >= 1``."""
    amp = np.asarray(amp, dtype=complex)
    omega = np.asarray(omega, dtype=float)
    bias = np.asarray(bias, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=complex)
    step = max(1, _CHUNK // max(1, amp.size))
    for p0 in range(0, x.shape[0], step):
        t = x[p0:p0 + step] @ omega.T + bias
        dsig = k * _relu_power(t, k - 1)
        out[p0:p0 + step] = (dsig * amp) @ omega
    return out


def exp_sum(amp, freq, x) -> np.ndarray:
    """Evaluate ``sum_i amp[i] * exp(2 pi i freq[i] . x)`` at rows of ``x``."""
    amp = np.asarray(amp, dtype=complex)
    freq = np.asarray(freq, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape[0], dtype=complex)
    step = max(1, _CHUNK // max(1, amp.size))
    for p0 in range(0, x.shape[0], step):
        ph = 2.0 * np.pi * (x[p0:p0 + step] @ freq.T)
        out[p0:p0 + step] = np.exp(1j * ph) @ amp
    return out


def minplus_dp(cost, n_layers: int):
    """Layered min-plus recursion for optimal segmentations.

    ``cost[i, j]`` is the cost of a single segment spanning candidate points
    ``i < j``; entries with ``j <= i`` are ignored.  Layer ``b`` of the
    returned table holds the best cost of covering ``[0, j]`` with exactly
    ``b + 1`` segments.

    Returns
    -------
    value : ndarray, shape (n_layers + 1, G)
    arg : ndarray of int64, same shape
        Start point of the last segment (``-1`` where unreachable).
    """
    cost = np.asarray(cost, dtype=float)
    g = cost.shape[0]
    value = np.full((n_layers + 1, g), np.inf)
    arg = np.full((n_layers + 1, g), -1, dtype=np.int64)
    value[0, 1:] = cost[0, 1:]
    arg[0, 1:] = 0
    upper = np.triu(np.ones((g, g), dtype=bool), 1)
    masked = np.where(upper, cost, np.inf)
    for b in range(1, n_layers + 1):
        cand = value[b - 1][:, None] + masked
        best = np.argmin(cand, axis=0)
        value[b] = cand[best, np.arange(g)]
        arg[b] = np.where(np.isfinite(value[b]), best, -1)
    return value, arg
