"""Cardinal B-splines, de Boor-Fix quasi-interpolation and the dyadic
multiscale expansion of ``exp(2 pi i y)``.

All splines here live on uniform knot sequences ``lam * Z`` and are written
in terms of the cardinal B-spline ``N_k`` supported on ``[0, k + 1]``:

.. math:: N_k(x) = \\frac{1}{k!}\\sum_{i=0}^{k+1} (-1)^i \\binom{k+1}{i}\\sigma_k(x - i),

with ``sigma_k(t) = max(t, 0)^k`` and ``sigma_0`` the Heaviside step
(``sigma_0(0) = 0``).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import Callable, Protocol

import numpy as np
from numpy.polynomial import polynomial as P

from . import kernels
from .errors import ParameterError

MAX_DEGREE = 3
MAX_LEVEL = 14
DUAL_OFFSETS = {0: 0.5, 1: 0.5, 2: 1.0, 3: 2.0}


def check_degree(k: int) -> int:
    if int(k) != k or not 0 <= k <= MAX_DEGREE:
        raise ParameterError(f"spline degree must be an integer in 0..{MAX_DEGREE}, got {k!r}")
    return int(k)


def relu_power(t, k: int) -> np.ndarray:
    """``sigma_k(t) = max(t, 0)^k``; for ``k = 0`` the step with value 0 at 0."""
    t = np.asarray(t, dtype=float)
    if k == 0:
        return (t > 0).astype(float)
    return np.where(t > 0, t, 0.0) ** k


@dataclass(frozen=True)
class BSpline:
    """The cardinal B-spline ``N_k``."""

    k: int

    def __call__(self, x) -> np.ndarray:
        return kernels.bspline_values(self.k, np.asarray(x, dtype=float))

    def derivative(self, x, r: int = 1, right: bool = True) -> np.ndarray:
        """``r``-th derivative; the order-``k`` derivative is taken from the right."""
        if not 0 <= r <= self.k:
            raise ParameterError(f"derivative order {r} exceeds degree {self.k}")
        return kernels.bspline_values(self.k, np.asarray(x, dtype=float), r, right)

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, float(self.k + 1))

    def two_scale_coefficients(self) -> np.ndarray:
        """Coefficients ``2^{-k} C(k+1, i)`` of ``N_k(x) = sum_i c_i N_k(2x - i)``."""
        return np.array([comb(self.k + 1, i) for i in range(self.k + 2)], dtype=float) / 2.0**self.k

    def norms(self, r: int) -> tuple[float, float]:
        """``(||N_k^{(r)}||_2^2, ||N_k^{(r)}||_inf^2)`` on the real line."""
        t, w = np.polynomial.legendre.leggauss(16)
        pts = np.concatenate([(t + 1) / 2 + i for i in range(self.k + 1)])
        wts = np.tile(w / 2, self.k + 1)
        vals = self.derivative(pts, r)
        if r == self.k:
            sup = float(np.max(np.abs(vals)))
        else:
            fine = np.linspace(0, self.k + 1, 4001)
            sup = float(np.max(np.abs(self.derivative(fine, r))))
        return float(np.sum(wts * vals**2)), sup**2


def bspline(k: int) -> BSpline:
    """Return ``N_k`` for ``k`` in ``0..3``."""
    return BSpline(check_degree(k))


# ---------------------------------------------------------------------------
# functions with derivatives


class Differentiable(Protocol):
    """A scalar function of one variable with derivatives: ``f(x, r)``."""

    def __call__(self, x: np.ndarray, r: int = 0) -> np.ndarray: ...


def complex_exponential(frequency: float = 1.0) -> Callable[..., np.ndarray]:
    """``y -> exp(2 pi i frequency y)`` with analytic derivatives."""

    def f(x, r: int = 0):
        x = np.asarray(x, dtype=float)
        return (2j * np.pi * frequency) ** r * np.exp(2j * np.pi * frequency * x)

    return f


def polynomial(coeffs) -> Callable[..., np.ndarray]:
    """Polynomial ``sum_i coeffs[i] x^i`` with exact derivatives."""
    coeffs = np.asarray(coeffs)

    def f(x, r: int = 0):
        c = P.polyder(coeffs, r) if r else coeffs
        return P.polyval(np.asarray(x, dtype=float), c)

    return f


@dataclass
class UniformSpline:
    """``sum_j values[j - start] N_k(x / spacing - j)``.

    Derivatives are one-sided from the right at the knots, which is the
    convention the dual functionals rely on.
    """

    k: int
    spacing: float
    start: int
    values: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self.values))

    def __call__(self, x, r: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = x / self.spacing
        base = np.floor(u).astype(np.int64)
        out = np.zeros(x.shape, dtype=np.result_type(self.values, float))
        for shift in range(self.k + 1):
            j = base - shift
            pos = j - self.start
            ok = (pos >= 0) & (pos < len(self.values))
            if not np.any(ok):
                continue
            val = kernels.bspline_values(self.k, u[ok] - j[ok], r, True)
            out[ok] += self.values[pos[ok]] * val
        return out / self.spacing**r

    def coefficient(self, j: int):
        pos = j - self.start
        if 0 <= pos < len(self.values):
            return self.values[pos]
        return 0.0


def dual_weights(k: int) -> tuple[float, np.ndarray]:
    """Offset ``tau_0`` and weights of the de Boor-Fix functional on unit knots.

    With ``psi_j(t) = prod_{i=1}^{k} (t - (j + i))`` and evaluation point
    ``tau_j = j + tau_0`` the functional reads
    ``lambda_j f = sum_r w[r] f^{(r)}(tau_j)`` where
    ``w[r] = (-1)^r psi_0^{(k-r)}(tau_0) / k!``.  Any ``tau_0`` inside the
    support gives a projector onto the splines.  The offsets in
    :data:`DUAL_OFFSETS` are the interval midpoint ``1/2`` for ``k <= 1`` and
    the central knots for ``k = 2, 3`` (derivatives of piecewise smooth
    arguments are then taken from the right).  These show the cleanest
    ``2^{-(k+1) l}`` decay of the multiscale coefficients at coarse levels.
    """
    k = check_degree(k)
    tau0 = DUAL_OFFSETS[k]
    psi = np.array([1.0])
    for i in range(1, k + 1):
        psi = P.polymul(psi, [-float(i), 1.0])
    w = np.empty(k + 1)
    for r in range(k + 1):
        d = P.polyder(psi, k - r) if k - r else psi
        w[r] = (-1) ** r * P.polyval(tau0, d) / factorial(k)
    return tau0, w


def quasi_interpolate(f: Differentiable, spacing: float, k: int, window: tuple[float, float]) -> UniformSpline:
    """De Boor-Fix quasi-interpolant of ``f`` on knots ``spacing * Z``.

    Coefficients are produced for every ``j`` whose support
    ``[spacing j, spacing (j + k + 1)]`` meets the open window.  The operator
    reproduces polynomials of degree ``<= k`` and is a projector onto splines
    of degree ``k`` with these knots.
    """
    k = check_degree(k)
    if spacing <= 0:
        raise ParameterError("knot spacing must be positive")
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ParameterError("window must have positive length")
    j0 = int(np.floor(lo / spacing)) - k
    # a right-continuous step needs the cell that starts at ``hi`` as well
    j1 = int(np.floor(hi / spacing)) if k == 0 else int(np.ceil(hi / spacing)) - 1
    j1 = max(j1, j0)
    j = np.arange(j0, j1 + 1)
    tau0, w = dual_weights(k)
    pts = spacing * (j + tau0)
    gamma = sum(w[r] * spacing**r * f(pts, r) for r in range(k + 1))
    return UniformSpline(k, spacing, j0, np.asarray(gamma))


@dataclass
class MultiscaleExpansion:
    """Dyadic expansion ``exp(2 pi i f y) = sum_l sum_j alpha[l][j] N_k(2^l y - j)``.

    ``levels[l - 1]`` is the level-``l`` correction (knot spacing ``2^-l``);
    the partial sums over levels ``1..L`` are the quasi-interpolants with
    spacing ``2^-L``.
    """

    k: int
    frequency: float
    window: tuple[float, float]
    levels: list[UniformSpline]

    @property
    def max_level(self) -> int:
        return len(self.levels)

    def coefficient(self, j: int, level: int):
        return self.levels[level - 1].coefficient(j)

    def level_coefficients(self, level: int) -> tuple[np.ndarray, np.ndarray]:
        sp = self.levels[level - 1]
        return sp.indices, sp.values

    def level_function(self, level: int, y, r: int = 0) -> np.ndarray:
        """The level-``level`` term ``h_l`` (or its ``r``-th derivative)."""
        return self.levels[level - 1](y, r)

    def partial_sum(self, y, upto: int | None = None, r: int = 0) -> np.ndarray:
        upto = self.max_level if upto is None else upto
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape, dtype=complex)
        for lev in self.levels[:upto]:
            out += lev(y, r)
        return out


def multiscale_expand(k: int, max_level: int, window=(0.0, 1.0), frequency: float = 1.0) -> MultiscaleExpansion:
    """Multiscale B-spline expansion of ``y -> exp(2 pi i frequency y)``.

    Level ``l`` applies the dual functionals with spacing ``2^-l`` to the
    residual ``e_{l-1} = exp(2 pi i frequency y) - sum_{l' < l} h_{l'}``,
    whose derivatives are evaluated analytically.  Because the
    quasi-interpolant is a projector, the partial sum through level ``L``
    coincides with the quasi-interpolant at spacing ``2^-L``.

    Parameters
    ----------
    k : int
        Degree in ``0..3``.
    max_level : int
        Finest level ``L >= 1``.
    window : tuple of float
        Interval of ``y`` on which the expansion must be exact; coarser
        levels are computed on a slightly enlarged interval so that every
        finer level sees a complete partial sum.
    frequency : float
        Frequency of the exponential.
    """
    k = check_degree(k)
    if int(max_level) != max_level or not 1 <= max_level <= MAX_LEVEL:
        raise ParameterError(f"max_level must be an integer in 1..{MAX_LEVEL}")
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ParameterError("window must have positive length")
    target = complex_exponential(frequency)
    levels: list[UniformSpline] = []

    for lev in range(1, int(max_level) + 1):
        spacing = 2.0**-lev
        pad = (k + 1) * spacing * 1.0000001
        done = list(levels)

        def residual(y, r=0, done=done):
            out = target(y, r)
            for sp in done:
                out = out - sp(y, r)
            return out

        levels.append(quasi_interpolate(residual, spacing, k, (lo - pad, hi + pad)))
    return MultiscaleExpansion(k, frequency, (lo, hi), levels)


__all__ = [
    "BSpline",
    "MultiscaleExpansion",
    "UniformSpline",
    "bspline",
    "check_degree",
    "complex_exponential",
    "dual_weights",
    "multiscale_expand",
    "polynomial",
    "quasi_interpolate",
    "relu_power",
]
