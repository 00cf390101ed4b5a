"""Cosine networks obtained by greedy truncation of lattice expansions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ParameterError
from .lattice import LatticeExpansion
from .targets import as_points


@dataclass(frozen=True)
class ExponentialWeight:
    """Ordering weight ``exp(-c |a + xi|^beta)`` for exponentially decaying spectra."""

    beta: float
    c: float

    def __post_init__(self):
        if not 0 < self.beta <= 1:
            raise ParameterError("beta must lie in (0, 1]")
        if not self.c > 0:
            raise ParameterError("c must be positive")


@dataclass(eq=False)
class CosineNetwork:
    """``sum_i amplitudes[i] exp(2 pi i frequencies[i] . x)``.

    Since ``exp(i t) = cos(t) + i cos(t - pi/2)``, each term is a pair of
    cosine ridge units; :meth:`evaluate` can use either form.

    Attributes
    ----------
    amplitudes : ndarray of complex, shape (n,)
    frequencies : ndarray, shape (n, d)
        Distinct frequencies.
    nus : ndarray of int, shape (n, d)
        Lattice multi-indices of the terms, when built from an expansion.
    """

    amplitudes: np.ndarray
    frequencies: np.ndarray
    nus: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        self.frequencies = np.asarray(self.frequencies, dtype=float).reshape(self.amplitudes.size, -1)

    def __len__(self) -> int:
        return self.amplitudes.size

    @property
    def dim(self) -> int:
        return self.frequencies.shape[1]

    @property
    def ell1_mass(self) -> float:
        return float(np.sum(np.abs(self.amplitudes)))

    def evaluate(self, x, mode: str = "exp") -> np.ndarray:
        """Evaluate at the rows of ``x``.

        ``mode="cos"`` sums explicit cosine units, ``mode="exp"`` sums
        complex exponentials; the two agree to rounding.
        """
        x = as_points(x, self.dim)
        if mode == "exp":
            return kernels.exp_sum(self.amplitudes, self.frequencies, x)
        if mode == "cos":
            ph = 2 * np.pi * x @ self.frequencies.T
            return np.cos(ph) @ self.amplitudes + 1j * (np.cos(ph - np.pi / 2) @ self.amplitudes)
        raise ParameterError(f"unknown evaluation mode {mode!r}")

    __call__ = evaluate

    def gradient(self, x) -> np.ndarray:
        x = as_points(x, self.dim)
        out = np.empty(x.shape, dtype=complex)
        for r in range(self.dim):
            out[:, r] = kernels.exp_sum(2j * np.pi * self.frequencies[:, r] * self.amplitudes, self.frequencies, x)
        return out


def ordering_keys(expansion: LatticeExpansion, s: float = 0.0, m: int = 0, weight="polynomial") -> np.ndarray:
    """Greedy ordering keys of every coefficient.

    ``(1 + |xi|)^(2m - s) |c_xi|`` in polynomial mode and
    ``(1 + |xi|)^(2m) exp(-c |a + xi|^beta) |c_xi|`` for an
    :class:`ExponentialWeight`.
    """
    xi = np.linalg.norm(expansion.xis, axis=1)
    mag = np.abs(expansion.coeffs)
    if isinstance(weight, ExponentialWeight):
        th = np.linalg.norm(expansion.frequencies, axis=1)
        return (1 + xi) ** (2 * m) * np.exp(-weight.c * th**weight.beta) * mag
    if weight != "polynomial":
        raise ParameterError(f"unknown weight mode {weight!r}")
    return (1 + xi) ** (2 * m - s) * mag


def greedy_order(expansion: LatticeExpansion, s: float = 0.0, m: int = 0, weight="polynomial") -> np.ndarray:
    """Indices of the expansion sorted by decreasing key, ties by multi-index."""
    keys = ordering_keys(expansion, s, m, weight)
    cols = [expansion.nus[:, i] for i in range(expansion.dim - 1, -1, -1)]
    return np.lexsort(cols + [-keys])


def greedy_truncate(expansion: LatticeExpansion, n: int, s: float = 0.0, m: int = 0, weight="polynomial") -> CosineNetwork:
    """Keep the ``n`` terms with the largest ordering key.

    Parameters
    ----------
    expansion : LatticeExpansion
    n : int
        Number of terms, ``1 <= n <= len(expansion)``.
    s : float
        Smoothness index used by the polynomial key.
    m : int
        Sobolev order of the error, 0 or 1; polynomial mode needs ``m <= s``.
    weight : "polynomial" or ExponentialWeight

    Raises
    ------
    ParameterError
        ``"expansion too small for n"`` and invalid ``m``.
    """
    if m not in (0, 1):
        raise ParameterError("m must be 0 or 1")
    if not isinstance(weight, ExponentialWeight) and m > s:
        raise ParameterError(f"m={m} exceeds s={s}")
    if int(n) != n or n < 1:
        raise ParameterError("n must be a positive integer")
    if n > len(expansion):
        raise ParameterError(f"expansion too small for n: n={n}, expansion has {len(expansion)} terms")
    idx = greedy_order(expansion, s, m, weight)[: int(n)]
    idx = np.sort(idx)
    return CosineNetwork(expansion.coeffs[idx], expansion.frequencies[idx], expansion.nus[idx])


def sobolev_weight(theta: np.ndarray, m: int, L: float) -> np.ndarray:
    """Squared ``H^m([0, L]^d)`` norm of ``exp(2 pi i theta . x)``."""
    theta = np.atleast_2d(theta)
    d = theta.shape[1]
    w = np.ones(theta.shape[0])
    if m >= 1:
        w = w + (2 * np.pi) ** 2 * np.sum(theta**2, axis=1)
    if m >= 2:
        raise ParameterError("only m in {0, 1} is supported")
    return w * L**d


def hm_error_orthogonal(expansion: LatticeExpansion, net: CosineNetwork, m: int = 0) -> float:
    """Exact ``H^m([0, L]^d)`` norm of ``expansion - net``.

    The lattice exponentials are orthogonal on ``[0, L]^d``, so the error is
    ``sqrt(sum_discarded |c_xi|^2 w_m(a + xi))``.  It bounds the error on the
    unit cube from above.

    Raises
    ------
    ParameterError
        ``"net/expansion mismatch"`` when the network is not a sub-sum.
    """
    if net.nus is None:
        raise ParameterError("net/expansion mismatch: network carries no lattice indices")
    lookup = {tuple(nu): i for i, nu in enumerate(expansion.nus.tolist())}
    used = np.zeros(len(expansion), dtype=bool)
    for nu, amp in zip(net.nus.tolist(), net.amplitudes):
        i = lookup.get(tuple(nu))
        if i is None or used[i] or abs(expansion.coeffs[i] - amp) > 1e-12 * max(1.0, abs(amp)):
            raise ParameterError("net/expansion mismatch")
        used[i] = True
    rest = ~used
    w = sobolev_weight(expansion.frequencies[rest], m, expansion.L)
    return float(np.sqrt(np.sum(np.abs(expansion.coeffs[rest]) ** 2 * w)))


__all__ = [
    "CosineNetwork",
    "ExponentialWeight",
    "greedy_order",
    "greedy_truncate",
    "hm_error_orthogonal",
    "ordering_keys",
    "sobolev_weight",
]
