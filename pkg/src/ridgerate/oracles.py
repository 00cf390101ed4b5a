"""Reference computations: quadrature norms and classical spline baselines.

These are the yardsticks the network approximations are measured against:
Gauss-Legendre quadrature for ``H^m`` norms on boxes, free-knot piecewise
polynomial fits computed by dynamic programming over a fine candidate grid,
and piecewise polynomial ``L^2`` projection onto uniform grids.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import legendre

from . import kernels
from .errors import NumericalError, ParameterError
from .splines import check_degree
from .targets import as_points, check_dim


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor composite Gauss-Legendre rule on a box.

    Attributes
    ----------
    points : ndarray, shape (N, d)
    weights : ndarray, shape (N,)
        Positive weights summing to the box volume.
    """

    dim: int
    points_per_axis: int
    cells_per_axis: int
    lo: float
    hi: float
    points: np.ndarray
    weights: np.ndarray

    @property
    def volume(self) -> float:
        return (self.hi - self.lo) ** self.dim

    def integrate(self, values) -> complex:
        return np.sum(self.weights * values)


def gauss_rule_1d(points: int, cells: int = 1, lo: float = 0.0, hi: float = 1.0):
    """Composite Gauss-Legendre nodes and weights on ``[lo, hi]``."""
    t, w = legendre.leggauss(points)
    h = (hi - lo) / cells
    left = lo + h * np.arange(cells)
    x = (left[:, None] + h * (t + 1) / 2).ravel()
    wt = np.tile(w * h / 2, cells)
    return x, wt


def gauss_legendre(dim: int, points_per_axis: int, cells_per_axis: int = 1, lo: float = 0.0, hi: float = 1.0) -> QuadratureGrid:
    """Tensor (composite) Gauss-Legendre grid on ``[lo, hi]^dim``."""
    dim = check_dim(dim)
    if points_per_axis < 1 or cells_per_axis < 1:
        raise ParameterError("points and cells per axis must be positive")
    if not hi > lo:
        raise ParameterError("empty box")
    x1, w1 = gauss_rule_1d(points_per_axis, cells_per_axis, lo, hi)
    grids = np.meshgrid(*([x1] * dim), indexing="ij")
    wgrids = np.meshgrid(*([w1] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return QuadratureGrid(dim, points_per_axis, cells_per_axis, lo, hi, pts, wts)


def hm_norm(f: Callable, grid: QuadratureGrid, m: int = 0, grad: Callable | None = None, h: float = 1e-4) -> float:
    """``H^m`` norm of ``f`` on the grid's box by quadrature.

    For ``m = 1`` the gradient is taken from ``grad`` when supplied and by
    central differences with step ``h`` otherwise.
    """
    if m not in (0, 1):
        raise ParameterError("m must be 0 or 1")
    x = grid.points
    total = float(np.sum(grid.weights * np.abs(f(x)) ** 2))
    if m == 1:
        if grad is not None:
            g = grad(x)
        else:
            g = np.empty(x.shape, dtype=complex)
            for r in range(grid.dim):
                e = np.zeros(grid.dim)
                e[r] = h
                g[:, r] = (f(x + e) - f(x - e)) / (2 * h)
        total += float(np.sum(grid.weights[:, None] * np.abs(g) ** 2))
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# free-knot piecewise polynomials (d = 1)


def _scalar_fn(f):
    if hasattr(f, "dim"):
        if f.dim != 1:
            raise ParameterError("free-knot fitting is one-dimensional")
        return lambda t: f.eval(np.asarray(t, dtype=float).reshape(-1, 1))
    return lambda t: np.asarray(f(np.asarray(t, dtype=float)))


def _segment_costs(fn, grid: np.ndarray, k: int, nodes: int) -> np.ndarray:
    """``cost[i, j]``: squared L2 error of the best degree-k fit on ``[grid_i, grid_j]``."""
    G = grid.size
    t, w = legendre.leggauss(nodes)
    # orthonormal Legendre basis on [-1, 1] w.r.t. dx/2
    V = np.stack([legendre.legval(t, np.eye(k + 1)[p]) * np.sqrt(2 * p + 1) for p in range(k + 1)])
    cost = np.full((G, G), np.inf)
    for i in range(G - 1):
        a = grid[i]
        b = grid[i + 1:]
        half = (b - a) / 2
        x = a + half[:, None] * (t + 1)
        fx = fn(x.ravel()).reshape(x.shape)
        energy = np.sum(w * np.abs(fx) ** 2, axis=1) / 2
        proj = (fx * w) @ V.T / 2
        resid = energy - np.sum(np.abs(proj) ** 2, axis=1)
        cost[i, i + 1:] = np.maximum(resid, 0.0) * 2 * half
    return cost


@dataclass(frozen=True, eq=False)
class FreeKnotFit:
    """Piecewise polynomial of degree ``k`` with free interior breakpoints.

    Attributes
    ----------
    breakpoints : ndarray
        Interior breakpoints, strictly increasing inside ``(0, 1)``.
    coefficients : ndarray, shape (pieces, k + 1)
        Coefficients in the orthonormal Legendre basis of each piece.
    l2_error : float
    piece_errors : ndarray
        Squared L2 error of every piece; ``l2_error**2`` is their sum.
    """

    k: int
    breakpoints: np.ndarray
    coefficients: np.ndarray
    l2_error: float
    piece_errors: np.ndarray

    @property
    def knots(self) -> np.ndarray:
        return np.concatenate([[0.0], self.breakpoints, [1.0]])

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        kn = self.knots
        piece = np.clip(np.searchsorted(kn, x, side="right") - 1, 0, len(kn) - 2)
        a, b = kn[piece], kn[piece + 1]
        t = 2 * (x - a) / (b - a) - 1
        out = np.zeros(x.shape, dtype=self.coefficients.dtype)
        for p in range(self.k + 1):
            out += self.coefficients[piece, p] * legendre.legval(t, np.eye(self.k + 1)[p]) * np.sqrt(2 * p + 1)
        return out


def _fit_pieces(fn, knots: np.ndarray, k: int, nodes: int):
    t, w = legendre.leggauss(nodes)
    V = np.stack([legendre.legval(t, np.eye(k + 1)[p]) * np.sqrt(2 * p + 1) for p in range(k + 1)])
    a, b = knots[:-1], knots[1:]
    half = (b - a) / 2
    x = a[:, None] + half[:, None] * (t + 1)
    fx = fn(x.ravel()).reshape(x.shape)
    coef = (fx * w) @ V.T / 2
    err = np.sum(w * np.abs(fx - coef @ V) ** 2, axis=1) * half
    return coef, err


class FreeKnotOracle:
    """Free-knot fits for one target and degree, sharing the segment costs.

    The candidate breakpoints are the uniform grid ``i / dp_grid``; the
    per-segment costs are computed once and the layered min-plus recursion
    then yields the optimum for every number of breakpoints up to the
    largest requested.
    """

    def __init__(self, f, k: int, dp_grid: int = 512, nodes: int = 24):
        self.k = check_degree(k)
        if dp_grid < 4:
            raise ParameterError("dp_grid must be at least 4")
        self.dp_grid = int(dp_grid)
        self.nodes = int(nodes)
        self._fn = _scalar_fn(f)
        self.grid = np.linspace(0.0, 1.0, self.dp_grid + 1)
        self._cost = _segment_costs(self._fn, self.grid, self.k, self.nodes)
        self._table = None

    def _check_n(self, n: int) -> int:
        if int(n) != n or n < 0:
            raise ParameterError("number of breakpoints must be a nonnegative integer")
        if n >= self.dp_grid or self.dp_grid < 4 * (n + 1):
            raise ParameterError(
                f"infeasible: dp_grid={self.dp_grid} too coarse for {n} breakpoints (need dp_grid >= 4(n+1))"
            )
        return int(n)

    def _ensure(self, layers: int):
        if self._table is None or self._table[0].shape[0] <= layers:
            self._table = kernels.minplus_dp(self._cost, layers)

    def prepare(self, n_max: int) -> None:
        """Run the recursion up to ``n_max`` breakpoints ahead of concurrent :meth:`fit` calls."""
        self._ensure(self._check_n(n_max))

    def fit(self, n: int) -> FreeKnotFit:
        n = self._check_n(n)
        self._ensure(n)
        value, arg = self._table
        G = self.dp_grid
        if not np.isfinite(value[n, G]):
            raise NumericalError("free-knot recursion found no feasible segmentation")
        idx = [G]
        for layer in range(n, 0, -1):
            idx.append(int(arg[layer, idx[-1]]))
        idx.append(0)
        idx = idx[::-1]
        knots = self.grid[idx]
        coef, err = _fit_pieces(self._fn, knots, self.k, self.nodes)
        return FreeKnotFit(self.k, knots[1:-1], coef, float(np.sqrt(np.sum(err))), err)

    def sweep(self, ns) -> list[FreeKnotFit]:
        ns = [self._check_n(n) for n in ns]
        self._ensure(max(ns))
        return [self.fit(n) for n in ns]


def free_knot_fit(f, n_breakpoints: int, k: int, dp_grid: int = 512, nodes: int = 24) -> FreeKnotFit:
    """Best ``L^2(0, 1)`` piecewise polynomial with ``n_breakpoints`` free knots.

    The optimum is taken over breakpoints on the grid ``i / dp_grid`` and is
    exact for that grid: each candidate segment's cost is the residual of
    the orthogonal projection onto polynomials of degree ``<= k``, computed
    with ``nodes``-point Gauss quadrature, and the segmentation is optimised
    by a min-plus recursion.

    Parameters
    ----------
    f : TargetFunction or callable
        One-dimensional target.
    n_breakpoints : int
        Interior breakpoints (the fit has ``n_breakpoints + 1`` pieces).
    k : int
        Polynomial degree.
    dp_grid : int
        Candidate grid size; must satisfy ``dp_grid >= 4 (n + 1)``.
    """
    return FreeKnotOracle(f, k, dp_grid, nodes).fit(n_breakpoints)


# ---------------------------------------------------------------------------
# uniform tensor grids


@dataclass(frozen=True, eq=False)
class UniformGridFit:
    """Piecewise tensor polynomial of degree ``<= k`` per axis on a uniform grid.

    ``coefficients`` has shape ``(cells,)*d + (k+1,)*d`` in the orthonormal
    Legendre basis of every cell.
    """

    dim: int
    cells: int
    k: int
    coefficients: np.ndarray

    @property
    def dof(self) -> int:
        return self.cells**self.dim * (self.k + 1) ** self.dim

    def _basis(self, t):
        return np.stack(
            [legendre.legval(t, np.eye(self.k + 1)[p]) * np.sqrt(2 * p + 1) for p in range(self.k + 1)], axis=-1
        )

    def __call__(self, x) -> np.ndarray:
        x = as_points(x, self.dim)
        u = x * self.cells
        cell = np.clip(np.floor(u).astype(np.int64), 0, self.cells - 1)
        t = 2 * (u - cell) - 1
        coef = self.coefficients[tuple(cell[:, i] for i in range(self.dim))]
        for i in range(self.dim):
            B = self._basis(t[:, i])
            coef = np.einsum("np,np...->n...", B, coef)
        return coef

    def l2_error(self, f, points: int | None = None) -> float:
        """Exact-per-cell ``L^2([0,1]^d)`` error by composite Gauss quadrature."""
        q = points or max(self.k + 4, 6)
        grid = gauss_legendre(self.dim, q, self.cells)
        fx = f.eval(grid.points) if hasattr(f, "eval") else f(grid.points)
        return float(np.sqrt(np.sum(grid.weights * np.abs(fx - self(grid.points)) ** 2)))


def uniform_grid_fit(
    f, cells_per_axis: int, k: int, nodes: int | None = None, dim: int | None = None
) -> tuple[UniformGridFit, int]:
    """``L^2`` projection onto tensor piecewise polynomials on a uniform grid.

    ``f`` is a :class:`TargetFunction` or a callable on ``(n, d)`` point
    arrays; in the latter case ``dim`` gives ``d`` (default 1).  Returns the
    fit and its number of degrees of freedom ``cells^d (k + 1)^d``.
    """
    k = check_degree(k)
    if int(cells_per_axis) != cells_per_axis or cells_per_axis < 1:
        raise ParameterError("cells_per_axis must be a positive integer")
    if hasattr(f, "dim"):
        if dim is not None and dim != f.dim:
            raise ParameterError(f"dim={dim} does not match target dimension {f.dim}")
        dim = f.dim
    dim = check_dim(1 if dim is None else dim)
    C = int(cells_per_axis)
    q = nodes or max(k + 4, 8)
    t, w = legendre.leggauss(q)
    V = np.stack([legendre.legval(t, np.eye(k + 1)[p]) * np.sqrt(2 * p + 1) for p in range(k + 1)])
    # nodes of all cells, axis-by-axis, in shape (C, q) per axis
    x1 = (np.arange(C)[:, None] + (t + 1) / 2) / C
    grids = np.meshgrid(*([x1.ravel()] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    fx = f.eval(pts) if hasattr(f, "eval") else f(pts)
    coef = fx.reshape((C, q) * dim)
    # project each axis: contract the q-node axis with (w V^T / 2)
    P = (V * w).T / 2  # (q, k+1)
    for i in range(dim):
        coef = np.tensordot(coef, P, axes=([2 * i + 1], [0]))
        coef = np.moveaxis(coef, -1, 2 * i + 1)
    # coef axes: (C, k+1, C, k+1, ...) -> (C,)*d + (k+1,)*d
    order = [2 * i for i in range(dim)] + [2 * i + 1 for i in range(dim)]
    coef = np.transpose(coef, order)
    fit = UniformGridFit(dim, C, k, coef)
    return fit, fit.dof


__all__ = [
    "FreeKnotFit",
    "FreeKnotOracle",
    "QuadratureGrid",
    "UniformGridFit",
    "free_knot_fit",
    "gauss_legendre",
    "gauss_rule_1d",
    "hm_norm",
    "uniform_grid_fit",
]
