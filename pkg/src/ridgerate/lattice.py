"""Smooth cutoffs and shifted-lattice Fourier expansions.

A target ``f`` on ``[0, 1]^d`` is multiplied by a Gevrey-type cutoff
``phi`` that equals one on the unit cube and vanishes outside
``[-eps, L - eps]^d``.  The product ``h_f = phi f`` is then periodised with
period ``L`` and expanded on the shifted frequency lattice
``a + L^{-1} Z^d``:

.. math:: f(x) = \\sum_{\\xi \\in L^{-1}\\mathbb{Z}^d} c_\\xi e^{2\\pi i (a+\\xi)\\cdot x},
   \\qquad c_\\xi = L^{-d} \\hat h_f(a + \\xi),

for ``x`` in the unit cube.  The factor ``L^{-d}`` is the Fourier-series
normalisation on the period cell and is what makes the sum reproduce ``f``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import ParameterError
from .targets import TargetFunction, as_points, check_dim


@dataclass(frozen=True, eq=False)
class CutoffFunction:
    """Separable smooth cutoff ``phi(x) = prod_i phi_1(x_i)``.

    ``phi_1`` is the convolution of the indicator of
    ``[-eps/2, L - 3 eps/2]`` with the normalised bump
    ``g(t) = exp(-(1 - t^2)^(1 - alpha))`` rescaled to radius ``eps/4``.
    It equals 1 on ``[-eps/4, L - 7 eps/4]`` (which contains ``[0, 1]``) and
    vanishes outside ``[-3 eps/4, L - 5 eps/4]``.

    Attributes
    ----------
    dim : int
    L : float
        Period.
    eps : float
        Transition width.
    alpha : float
        Gevrey parameter, ``alpha > 1``; the transform decays like
        ``exp(-c |xi|^(1 - 1/alpha))``.
    mollifier_grid : int
        Gauss-Legendre nodes used for the bump's normalisation and CDF.
    """

    dim: int
    L: float = 2.0
    eps: float = 0.25
    alpha: float = 2.0
    mollifier_grid: int = 64

    def __post_init__(self):
        check_dim(self.dim)
        if not self.alpha > 1:
            raise ParameterError("alpha must exceed 1")
        if not self.eps > 0 or self.L - 2 * self.eps < 1:
            raise ParameterError(
                f"cutoff geometry infeasible: need eps > 0 and L - 2 eps >= 1 (L={self.L}, eps={self.eps})"
            )
        if self.mollifier_grid < 8:
            raise ParameterError("mollifier_grid must be at least 8")

    @property
    def plateau(self) -> tuple[float, float]:
        return (-self.eps / 4, self.L - 7 * self.eps / 4)

    @property
    def support(self) -> tuple[float, float]:
        return (-3 * self.eps / 4, self.L - 5 * self.eps / 4)

    @cached_property
    def _nodes(self):
        return np.polynomial.legendre.leggauss(self.mollifier_grid)

    def _bump(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1
        out[inside] = np.exp(-((1 - t[inside] ** 2) ** (1 - self.alpha)))
        return out

    @cached_property
    def _mass(self) -> float:
        t, w = self._nodes
        return float(np.sum(w * self._bump(t)))

    def _cdf(self, s):
        # integral of the normalised bump over [-1, min(s, 1)]
        s = np.clip(np.asarray(s, dtype=float), -1.0, 1.0)
        t, w = self._nodes
        half = (s + 1) / 2
        pts = -1 + half[..., None] * (t + 1)
        vals = np.sum(w * self._bump(pts), axis=-1) * half
        out = vals / self._mass
        out[s >= 1.0] = 1.0
        out[s <= -1.0] = 0.0
        return out

    def profile(self, t) -> np.ndarray:
        """The one-dimensional factor ``phi_1``."""
        t = np.asarray(t, dtype=float)
        r = self.eps / 4
        lo, hi = -self.eps / 2, self.L - 3 * self.eps / 2
        return self._cdf((t - lo) / r) - self._cdf((t - hi) / r)

    def __call__(self, x) -> np.ndarray:
        x = as_points(x, self.dim)
        out = np.ones(x.shape[0])
        for i in range(self.dim):
            out *= self.profile(x[:, i])
        return out

    def profile_transform(self, xi, points: int = 8192) -> np.ndarray:
        """Fourier transform of ``phi_1`` by a fine trapezoid rule.

        ``phi_1`` is smooth and compactly supported, so the trapezoid rule on
        its support converges faster than any power of the step.
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        lo, hi = self.support
        t = np.linspace(lo, hi, points + 1)
        w = np.full(t.size, (hi - lo) / points)
        w[[0, -1]] /= 2
        v = self.profile(t) * w
        return np.exp(-2j * np.pi * np.outer(xi, t)) @ v


def make_cutoff(alpha: float = 2.0, L: float = 2.0, eps: float = 0.25, mollifier_grid: int = 64, dim: int = 1) -> CutoffFunction:
    """Construct a :class:`CutoffFunction`; validates the geometry."""
    return CutoffFunction(dim, float(L), float(eps), float(alpha), int(mollifier_grid))


@dataclass(eq=False)
class LatticeExpansion:
    """Sparse expansion ``sum_nu c_nu exp(2 pi i (a + nu / L) . x)``.

    Attributes
    ----------
    L : float
        Period; lattice spacing is ``1 / L``.
    shift : ndarray, shape (d,)
        The offset ``a`` in ``[0, 1/L]^d``.
    nus : ndarray of int, shape (M, d)
        Integer multi-indices, sorted lexicographically.
    coeffs : ndarray of complex, shape (M,)
    radius : float
        Truncation radius ``R`` on ``|xi| = |nu| / L``.
    exact : bool
        True when the coefficients are the exact atoms of a trigonometric
        polynomial rather than a cutoff-and-FFT computation.
    """

    L: float
    shift: np.ndarray
    nus: np.ndarray
    coeffs: np.ndarray
    radius: float
    exact: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.shift = np.asarray(self.shift, dtype=float).reshape(-1)
        self.nus = np.asarray(self.nus, dtype=np.int64).reshape(-1, self.shift.size)
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        order = np.lexsort(self.nus.T[::-1]) if len(self.coeffs) else np.arange(0)
        self.nus = self.nus[order]
        self.coeffs = self.coeffs[order]

    @property
    def dim(self) -> int:
        return self.shift.size

    def __len__(self) -> int:
        return self.coeffs.size

    @property
    def xis(self) -> np.ndarray:
        """Lattice points ``xi = nu / L``."""
        return self.nus / self.L

    @property
    def frequencies(self) -> np.ndarray:
        """Frequencies ``theta = a + xi``."""
        return self.shift + self.xis

    @property
    def coefficients(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(v) for v in nu): complex(c) for nu, c in zip(self.nus, self.coeffs)}

    def evaluate(self, x) -> np.ndarray:
        return kernels.exp_sum(self.coeffs, self.frequencies, as_points(x, self.dim))

    __call__ = evaluate

    def weighted_mass(self, s: float = 0.0, beta: float | None = None, c: float | None = None) -> float:
        """``sum (1 + |a + xi|)^s |c_xi|``, or the exponential weight
        ``exp(c |a + xi|^beta)`` when ``beta`` and ``c`` are given."""
        nrm = np.linalg.norm(self.frequencies, axis=1)
        if beta is not None:
            w = np.exp((c or 0.0) * nrm**beta)
        else:
            w = (1 + nrm) ** s
        return float(np.sum(w * np.abs(self.coeffs)))

    def restrict(self, keep: np.ndarray) -> "LatticeExpansion":
        return LatticeExpansion(self.L, self.shift, self.nus[keep], self.coeffs[keep], self.radius, self.exact, dict(self.meta))


def default_fft_grid(dim: int, L: float, radius: float) -> int:
    """Smallest power of two resolving ``radius`` with a per-dimension floor."""
    floor = {1: 1024, 2: 128, 3: 32}[check_dim(dim)]
    n = floor
    while not radius < n / (2 * L):
        n *= 2
    return n


def _check_fft_grid(n: int) -> int:
    if int(n) != n or n < 2 or (int(n) & (int(n) - 1)):
        raise ParameterError(f"fft_grid must be a power of two, got {n!r}")
    return int(n)


def lattice_dft(f: TargetFunction, cutoff: CutoffFunction, a, fft_grid: int):
    """Full DFT of ``h_f(x) exp(-2 pi i a.x)`` sampled on ``[-eps, L - eps)^d``.

    Returns
    -------
    nus : ndarray of int, shape (N^d, d)
        Signed multi-indices in FFT order.
    coeffs : ndarray of complex, shape (N^d,)
        Approximations of ``L^{-d} int h_f e^{-2 pi i (a + nu/L).x}``.
    samples : ndarray
        The sampled ``h_f`` values on the grid (length ``N^d``), for energy
        checks; the grid spacing is ``L / N``.
    """
    d = f.dim
    N = _check_fft_grid(fft_grid)
    L, eps = cutoff.L, cutoff.eps
    a = np.asarray(a, dtype=float).reshape(d)
    x1 = -eps + np.arange(N) * (L / N)
    grids = np.meshgrid(*([x1] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    h = f.eval(pts) * cutoff(pts)
    vals = (h * np.exp(-2j * np.pi * pts @ a)).reshape((N,) * d)
    spec = np.fft.fftn(vals) / N**d
    k1 = np.fft.fftfreq(N, 1.0 / N).astype(np.int64)
    kg = np.meshgrid(*([k1] * d), indexing="ij")
    nus = np.stack([g.ravel() for g in kg], axis=1)
    # grid starts at x0 = -eps in each axis
    phase = np.exp(-2j * np.pi * (nus.sum(axis=1) * (-eps)) / L)
    return nus, spec.ravel() * phase, h


def _atoms_on_lattice(f: TargetFunction, L: float, a: np.ndarray, tol: float = 1e-9):
    freq, amp = f.atom_arrays()
    nu = (freq - a) * L
    rnd = np.rint(nu)
    if np.all(np.abs(nu - rnd) <= tol):
        return rnd.astype(np.int64), amp
    return None


def lattice_coefficients(
    f: TargetFunction,
    cutoff: CutoffFunction,
    a=None,
    R: float = 4.0,
    fft_grid: int | None = None,
    method: str = "auto",
    threshold: float = 1e-14,
) -> LatticeExpansion:
    """Coefficients ``c_xi`` of ``f`` on the lattice ``a + L^{-1} Z^d``, ``|xi| <= R``.

    Parameters
    ----------
    f : TargetFunction
    cutoff : CutoffFunction
        Supplies ``L`` and the cutoff used for continuous spectra.
    a : array_like, optional
        Shift in ``[0, 1/L]^d``; defaults to the origin.
    R : float
        Truncation radius in the ``xi`` variable.
    fft_grid : int, optional
        Samples per axis (power of two) with ``R < fft_grid / (2 L)``.
    method : {"auto", "cutoff"}
        ``"auto"`` uses the exact atoms of a trigonometric polynomial whose
        frequencies all lie on the shifted lattice and the cutoff route
        otherwise; ``"cutoff"`` always uses the cutoff route.
    threshold : float
        Coefficients of smaller magnitude are dropped.

    Raises
    ------
    ParameterError
        Shift outside ``[0, 1/L]^d``, non-positive radius, or
        ``"aliasing: grid under-resolves radius"``.
    """
    d = f.dim
    if cutoff.dim != d:
        cutoff = make_cutoff(cutoff.alpha, cutoff.L, cutoff.eps, cutoff.mollifier_grid, d)
    L = cutoff.L
    a = np.zeros(d) if a is None else np.asarray(a, dtype=float).reshape(d)
    if np.any(a < -1e-15) or np.any(a > 1 / L + 1e-15):
        raise ParameterError(f"shift {a} outside [0, 1/L]^d")
    if not R > 0:
        raise ParameterError("truncation radius must be positive")
    if method not in ("auto", "cutoff"):
        raise ParameterError(f"unknown method {method!r}")
    if method == "auto" and f.discrete:
        hit = _atoms_on_lattice(f, L, a)
        if hit is not None:
            nus, amp = hit
            keep = (np.linalg.norm(nus / L, axis=1) <= R) & (np.abs(amp) > threshold)
            return LatticeExpansion(L, a, nus[keep], amp[keep], R, exact=True)
    N = default_fft_grid(d, L, R) if fft_grid is None else _check_fft_grid(fft_grid)
    if not R < N / (2 * L):
        raise ParameterError(f"aliasing: grid under-resolves radius (R={R}, fft_grid={N}, L={L})")
    nus, coeffs, _ = lattice_dft(f, cutoff, a, N)
    keep = (np.linalg.norm(nus / L, axis=1) <= R) & (np.abs(coeffs) > threshold)
    return LatticeExpansion(L, a, nus[keep], coeffs[keep], R, meta={"fft_grid": N})


def shift_candidates(dim: int, L: float, candidates: int) -> np.ndarray:
    """``candidates^d`` shifts ``i / (candidates L)``, ``i = 0..candidates-1``."""
    if int(candidates) != candidates or candidates < 1:
        raise ParameterError("candidates must be a positive integer")
    axis = np.arange(int(candidates)) / (int(candidates) * L)
    return np.array(list(itertools.product(axis, repeat=dim)), dtype=float).reshape(-1, dim)


def candidate_masses(f, cutoff, s=0.0, R=4.0, candidates=4, fft_grid=None, beta=None, c=None):
    """Weighted masses of the expansions at every candidate shift.

    Returns ``(shifts, masses, expansions)``.
    """
    shifts = shift_candidates(f.dim, cutoff.L, candidates)
    exps = [lattice_coefficients(f, cutoff, a, R, fft_grid) for a in shifts]
    masses = np.array([e.weighted_mass(s, beta, c) for e in exps])
    return shifts, masses, exps


def shift_search(f, cutoff, s=0.0, R=4.0, candidates=4, fft_grid=None, beta=None, c=None) -> np.ndarray:
    """Shift minimising the weighted coefficient mass over a uniform candidate grid.

    Ties go to the first candidate in lexicographic order; with one
    candidate per axis the origin is returned.
    """
    shifts, masses, _ = candidate_masses(f, cutoff, s, R, candidates, fft_grid, beta, c)
    return shifts[int(np.argmin(masses))]


def best_expansion(f, cutoff, s=0.0, R=4.0, candidates=4, fft_grid=None, beta=None, c=None) -> LatticeExpansion:
    """The expansion at the shift chosen by :func:`shift_search`."""
    shifts, masses, exps = candidate_masses(f, cutoff, s, R, candidates, fft_grid, beta, c)
    return exps[int(np.argmin(masses))]


__all__ = [
    "CutoffFunction",
    "LatticeExpansion",
    "best_expansion",
    "candidate_masses",
    "default_fft_grid",
    "lattice_coefficients",
    "lattice_dft",
    "make_cutoff",
    "shift_candidates",
    "shift_search",
]
