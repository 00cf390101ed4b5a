"""Target functions with known Fourier transforms and spectral Barron norms.

The Fourier convention throughout the package is

.. math:: \\hat f(\\xi) = \\int f(x) e^{-2\\pi i \\xi\\cdot x}\\,dx,

and the spectral Barron norm of order ``s`` is
``int (1 + |xi|)^s |f_hat(xi)| dxi`` (a sum over atoms for functions with a
discrete spectrum).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import inf
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import NumericalError, ParameterError

SUPPORTED_DIMS = (1, 2, 3)

ArrayFn = Callable[[np.ndarray], np.ndarray]


def check_dim(dim: int) -> int:
    """Validate a spatial dimension and return it as ``int``."""
    if int(dim) != dim or int(dim) not in SUPPORTED_DIMS:
        raise ParameterError(f"unsupported dimension {dim!r}; expected one of {SUPPORTED_DIMS}")
    return int(dim)


def as_points(x, dim: int) -> np.ndarray:
    """Coerce ``x`` to an ``(n, dim)`` float array.

    A 1-D array is read as ``n`` points when ``dim == 1`` and as a single
    point otherwise.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        x = x.reshape(-1, 1) if dim == 1 else x.reshape(1, -1)
    if x.shape[-1] != dim:
        raise ParameterError(f"points have {x.shape[-1]} coordinates, expected {dim}")
    return x.reshape(-1, dim)


@dataclass(frozen=True)
class BarronMembership:
    """The range of smoothness indices ``s`` with ``f`` in ``B^s``.

    Attributes
    ----------
    s_max : float
        Supremum of admissible ``s`` (``inf`` for all ``s >= 0``).
    inclusive : bool
        Whether ``s_max`` itself is admissible.
    exponential : tuple of (beta, c) or None
        A representative pair for which ``f`` lies in the exponentially
        weighted class ``B_{beta,c}``.  For the Gaussian and for band-limited
        targets every ``beta < 1`` and ``c > 0`` is admissible.
    """

    s_max: float = inf
    inclusive: bool = False
    exponential: tuple[float, float] | None = None

    def contains(self, s: float) -> bool:
        if s < 0:
            return False
        return s < self.s_max or (self.inclusive and s == self.s_max)


@dataclass(frozen=True)
class Atom:
    """A single term ``amplitude * exp(2 pi i frequency . x)``."""

    frequency: tuple[float, ...]
    amplitude: complex


@dataclass(frozen=True, eq=False)
class TargetFunction:
    """A target ``f`` on ``[0, 1]^d`` with an analytic Fourier description.

    Attributes
    ----------
    name : str
    dim : int
    eval : callable
        Maps an ``(n, d)`` array of points to ``n`` complex values.
    fourier : callable
        Maps an ``(n, d)`` array of frequencies to ``n`` complex values of
        the continuous Fourier transform.  Discrete-spectrum targets have no
        density and use ``atoms`` instead; their ``fourier`` returns zeros.
    membership : BarronMembership
    atoms : tuple of Atom, optional
        Present for trigonometric polynomials.
    grad : callable, optional
        Maps ``(n, d)`` points to an ``(n, d)`` complex gradient.
    factors : tuple of TargetFunction, optional
        One-dimensional factors when ``f(x) = prod_i f_i(x_i)``.
    """

    name: str
    dim: int
    eval: ArrayFn
    fourier: ArrayFn
    membership: BarronMembership = field(default_factory=BarronMembership)
    atoms: tuple[Atom, ...] | None = None
    grad: ArrayFn | None = None
    factors: tuple["TargetFunction", ...] | None = None

    def __call__(self, x) -> np.ndarray:
        return self.eval(as_points(x, self.dim))

    def gradient(self, x) -> np.ndarray:
        if self.grad is None:
            raise ParameterError(f"target {self.name!r} has no analytic gradient")
        return self.grad(as_points(x, self.dim))

    @property
    def discrete(self) -> bool:
        return self.atoms is not None

    @property
    def barron_exponents(self) -> BarronMembership:
        return self.membership

    def atom_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequencies ``(M, d)`` and amplitudes ``(M,)`` of a discrete spectrum."""
        if self.atoms is None:
            raise ParameterError(f"target {self.name!r} has a continuous spectrum")
        freq = np.array([a.frequency for a in self.atoms], dtype=float).reshape(-1, self.dim)
        amp = np.array([a.amplitude for a in self.atoms], dtype=complex)
        return freq, amp


def _from_atoms(name: str, dim: int, atoms: Sequence[Atom], membership=None, evaluator=None) -> TargetFunction:
    freq = np.array([a.frequency for a in atoms], dtype=float).reshape(-1, dim)
    amp = np.array([a.amplitude for a in atoms], dtype=complex)

    def ev(x):
        return kernels.exp_sum(amp, freq, x)

    def gr(x):
        out = np.empty(x.shape, dtype=complex)
        for r in range(dim):
            out[:, r] = kernels.exp_sum(2j * np.pi * freq[:, r] * amp, freq, x)
        return out

    def ft(xi):
        return np.zeros(np.asarray(xi).shape[0], dtype=complex)

    if membership is None:
        membership = BarronMembership(inf, False, (0.9, 1.0))
    return TargetFunction(name, dim, evaluator or ev, ft, membership, tuple(atoms), gr)


def exponential_wave(nu) -> TargetFunction:
    """The single atom ``exp(2 pi i nu . x)``."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    dim = check_dim(nu.size)
    return _from_atoms("expwave", dim, [Atom(tuple(nu.tolist()), 1.0 + 0.0j)])


def cosine_sum(dim: int) -> TargetFunction:
    """``cos(2 pi x_1) * prod_{i >= 2} (1 + cos(2 pi x_i) / 2)`` as a finite atom sum."""
    dim = check_dim(dim)
    first = [((1.0,), 0.5), ((-1.0,), 0.5)]
    rest = [((0.0,), 1.0), ((1.0,), 0.25), ((-1.0,), 0.25)]
    atoms = []
    for combo in itertools.product(first, *([rest] * (dim - 1))):
        freq = tuple(c[0][0] for c in combo)
        amp = np.prod([c[1] for c in combo])
        atoms.append(Atom(freq, complex(amp)))

    def ev(x):
        out = np.cos(2 * np.pi * x[:, 0])
        for r in range(1, dim):
            out = out * (1.0 + 0.5 * np.cos(2 * np.pi * x[:, r]))
        return out.astype(complex)

    return _from_atoms("cossum", dim, atoms, evaluator=ev)


def gaussian(dim: int, sigma: float = 1.0, center=None) -> TargetFunction:
    """Gaussian ``exp(-pi |x - x0|^2 / sigma^2)``.

    Its transform is ``sigma^d exp(-pi sigma^2 |xi|^2 - 2 pi i xi . x0)``,
    so it lies in every ``B^s`` and in ``B_{beta,c}`` for all ``beta < 1``.
    """
    dim = check_dim(dim)
    if sigma <= 0:
        raise ParameterError("sigma must be positive")
    x0 = np.full(dim, 0.5) if center is None else np.asarray(center, dtype=float).reshape(dim)

    def ev(x):
        return np.exp(-np.pi * np.sum((x - x0) ** 2, axis=1) / sigma**2).astype(complex)

    def ft(xi):
        xi = np.asarray(xi, dtype=float).reshape(-1, dim)
        return sigma**dim * np.exp(-np.pi * sigma**2 * np.sum(xi**2, axis=1) - 2j * np.pi * xi @ x0)

    def gr(x):
        return (-2 * np.pi / sigma**2) * (x - x0) * ev(x)[:, None]

    factors = None
    if dim > 1:
        factors = tuple(gaussian(1, sigma, [c]) for c in x0)
    return TargetFunction("gaussian", dim, ev, ft, BarronMembership(inf, False, (0.9, 1.0)), None, gr, factors)


def _bump_1d(r: int) -> TargetFunction:
    # r-fold convolution of the normalised indicator of [0, 1/r]:
    # f(t) = r N_{r-1}(r t), supported on [0, 1].
    def ev(x):
        return (r * kernels.bspline_values(r - 1, r * x[:, 0])).astype(complex)

    def ft(xi):
        xi = np.asarray(xi, dtype=float).reshape(-1)
        return np.sinc(xi / r) ** r * np.exp(-1j * np.pi * xi)

    def gr(x):
        if r == 1:
            return np.zeros(x.shape, dtype=complex)
        d1 = kernels.bspline_values(r - 1, r * x[:, 0], 1)
        return (r * r * d1).astype(complex)[:, None]

    return TargetFunction(f"bump{r}", 1, ev, ft, BarronMembership(r - 1.0, False), None, gr)


def bump_product(dim: int, r: int = 3) -> TargetFunction:
    """Tensor product of ``r``-fold box convolutions, supported in ``[0, 1]^d``.

    The transform is ``prod_i sinc(xi_i / r)^r e^{-i pi xi_i}``, which places
    the target in ``B^s`` exactly for ``s < r - 1``.
    """
    dim = check_dim(dim)
    if int(r) != r or not 2 <= r <= 4:
        raise ParameterError("bump order r must be an integer in {2, 3, 4}")
    r = int(r)
    base = _bump_1d(r)
    if dim == 1:
        return base

    def ev(x):
        out = np.ones(x.shape[0], dtype=complex)
        for i in range(dim):
            out *= base.eval(x[:, i:i + 1])
        return out

    def ft(xi):
        xi = np.asarray(xi, dtype=float).reshape(-1, dim)
        out = np.ones(xi.shape[0], dtype=complex)
        for i in range(dim):
            out *= base.fourier(xi[:, i])
        return out

    def gr(x):
        vals = [base.eval(x[:, i:i + 1]) for i in range(dim)]
        out = np.empty(x.shape, dtype=complex)
        for i in range(dim):
            g = base.grad(x[:, i:i + 1])[:, 0]
            for j in range(dim):
                if j != i:
                    g = g * vals[j]
            out[:, i] = g
        return out

    return TargetFunction(f"bump{r}", dim, ev, ft, BarronMembership(r - 1.0, False), None, gr, (base,) * dim)


_FACTORIES: dict[str, Callable[[int], TargetFunction]] = {
    "gaussian": lambda d: gaussian(d),
    "expwave": lambda d: exponential_wave(np.eye(d)[0]),
    "cossum": cosine_sum,
    "bump2": lambda d: bump_product(d, 2),
    "bump3": lambda d: bump_product(d, 3),
    "bump4": lambda d: bump_product(d, 4),
}

BUILTIN_NAMES = ("gaussian", "expwave", "cossum", "bump3", "bump4")


def get_target(name: str, dim: int) -> TargetFunction:
    """Look up a named target in dimension ``dim``."""
    check_dim(dim)
    try:
        return _FACTORIES[name](dim)
    except KeyError:
        raise ParameterError(f"unknown target {name!r}; known: {sorted(_FACTORIES)}") from None


def target_names() -> list[str]:
    return sorted(_FACTORIES)


def builtin_targets(dim: int) -> list[TargetFunction]:
    """The standard suite: Gaussian, single exponential, cosine sum and two bumps."""
    dim = check_dim(dim)
    return [get_target(n, dim) for n in BUILTIN_NAMES]


# ---------------------------------------------------------------------------
# norm estimates and inverse transforms


def _ball_grid(dim: int, radius: float, step: float) -> np.ndarray:
    """Integer multi-indices ``m`` with ``|m| * step <= radius``, row by row."""
    n = int(np.floor(radius / step + 1e-12))
    axis = np.arange(-n, n + 1)
    if dim == 1:
        return axis.reshape(-1, 1)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    keep = np.sum(pts.astype(float) ** 2, axis=1) * step**2 <= radius**2 * (1 + 1e-12)
    return pts[keep]


def _barron_sum(f: TargetFunction, s: float, radius: float, step: float) -> float:
    if f.discrete:
        freq, amp = f.atom_arrays()
        nrm = np.linalg.norm(freq, axis=1)
        keep = nrm <= radius
        return float(np.sum((1 + nrm[keep]) ** s * np.abs(amp[keep])))
    idx = _ball_grid(f.dim, radius, step)
    total = 0.0
    for c0 in range(0, idx.shape[0], 1 << 18):
        xi = idx[c0:c0 + (1 << 18)] * step
        total += float(np.sum((1 + np.linalg.norm(xi, axis=1)) ** s * np.abs(f.fourier(xi))))
    return total * step**f.dim


def barron_norm_estimate(
    f: TargetFunction,
    s: float,
    radius: float,
    grid_step: float = 0.05,
    growth_ratio: float = 0.95,
    rel_tol: float = 1e-6,
) -> float:
    """Truncated spectral Barron norm ``int_{|xi| <= radius} (1+|xi|)^s |f_hat|``.

    The integral is a Riemann sum on the lattice ``grid_step * Z^d``; for
    discrete spectra the exact atom sum is returned.

    Divergence is detected by comparing the increments of the estimate over
    the shells ``[radius/4, radius/2]`` and ``[radius/2, radius]``: when the
    outer increment is not small relative to the total and is at least
    ``growth_ratio`` times the inner one, the tail is not summable and
    :class:`NumericalError` is raised.

    Raises
    ------
    ParameterError
        For ``s < 0`` or non-positive radius or step.
    NumericalError
        ``"norm estimate diverges"``.
    """
    if s < 0:
        raise ParameterError("s must be nonnegative")
    if radius <= 0 or grid_step <= 0:
        raise ParameterError("radius and grid_step must be positive")
    full = _barron_sum(f, s, radius, grid_step)
    if f.discrete:
        return full
    half = _barron_sum(f, s, radius / 2, grid_step)
    quarter = _barron_sum(f, s, radius / 4, grid_step)
    inner, outer = half - quarter, full - half
    if outer > rel_tol * full and outer >= growth_ratio * inner:
        raise NumericalError(
            f"norm estimate diverges: s={s} increments {inner:.3e} -> {outer:.3e} at radius {radius}"
        )
    return full


def _inverse_1d(f: TargetFunction, x: np.ndarray, radius: float, step: float) -> np.ndarray:
    n = int(np.floor(radius / step))
    xi = np.arange(-n, n + 1) * step
    fh = f.fourier(xi)
    out = np.empty(x.size, dtype=complex)
    for c0 in range(0, x.size, 4096):
        ph = np.exp(2j * np.pi * np.outer(x[c0:c0 + 4096], xi))
        out[c0:c0 + 4096] = ph @ fh
    return out * step


def inverse_transform(f: TargetFunction, x, radius: float = 64.0, step: float = 0.25) -> np.ndarray:
    """Truncated inverse Fourier integral of ``f_hat`` evaluated at ``x``.

    Separable targets are inverted one axis at a time; discrete spectra are
    summed exactly.  For targets supported in ``[0, 1]^d`` the step ``0.25``
    gives an alias-free Riemann sum on ``[0, 1]^d``.
    """
    x = as_points(x, f.dim)
    if f.discrete:
        return f.eval(x)
    if f.dim == 1:
        return _inverse_1d(f, x[:, 0], radius, step)
    if f.factors is not None:
        out = np.ones(x.shape[0], dtype=complex)
        for i, fac in enumerate(f.factors):
            out *= _inverse_1d(fac, x[:, i], radius, step)
        return out
    idx = _ball_grid(f.dim, radius, step)
    xi = idx * step
    fh = f.fourier(xi)
    return np.exp(2j * np.pi * x @ xi.T) @ fh * step**f.dim


def bump_component(r: int) -> TargetFunction:
    """One-dimensional bump of order ``r`` (degree ``r - 1`` B-spline profile)."""
    if int(r) != r or not 2 <= r <= 4:
        raise ParameterError("bump order r must be an integer in {2, 3, 4}")
    return _bump_1d(int(r))


__all__ = [
    "Atom",
    "BarronMembership",
    "BUILTIN_NAMES",
    "TargetFunction",
    "barron_norm_estimate",
    "builtin_targets",
    "bump_component",
    "bump_product",
    "check_dim",
    "cosine_sum",
    "exponential_wave",
    "gaussian",
    "get_target",
    "inverse_transform",
    "target_names",
]
