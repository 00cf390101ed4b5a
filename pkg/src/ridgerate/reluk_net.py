"""Shallow ReLU^k networks built from dyadic B-spline ridge atoms.

Every lattice exponential ``exp(2 pi i theta . x)`` with ``theta = a + xi``
is expanded with the multiscale B-spline expansion of ``y -> exp(2 pi i y)``
along ``y = theta . x``.  This produces ridge atoms

    psi(x) = N_k(2^l theta . x - j),

each of which is a combination of ``k + 2`` ReLU^k units with unit direction
``theta / |theta|``.  A network is obtained by selecting ``n`` atoms, either
greedily against a target sampled on a quadrature grid or by stratified
random sampling proportional to the atoms' coefficient budget.
"""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import blas
from scipy.special import expit

from . import kernels
from .errors import NumericalError, ParameterError
from .lattice import LatticeExpansion
from .oracles import QuadratureGrid
from .splines import BSpline, check_degree, multiscale_expand
from .targets import as_points

ZERO_FREQ_TOL = 1e-12


@dataclass(frozen=True)
class RidgeAtom:
    """One dictionary element.

    Spline atoms are ``N_k(scale * direction . x - offset)`` with
    ``scale = 2^l |a + xi|``.  Power atoms (``kind == "power"``) represent the
    zero frequency and are ``(x_1 + offset)^k = sigma_k(e_1 . x + offset)``.

    Attributes
    ----------
    xi : tuple of int
        Lattice multi-index ``nu`` of the parent frequency.
    level : int
        Dyadic level ``l`` (0 for power atoms).
    offset : int
        Knot offset ``j`` (or the shift ``b`` of a power atom).
    direction : tuple of float
        Unit ridge direction.
    scale : float
    coeff_weight : complex
        Coefficient of the atom in the expansion of ``f``: ``c_xi alpha_{j,l}``.
    budget_weight : complex
        ``a_xi 2^{-l(1+delta)} (1 + |xi|)^{-1}`` with
        ``a_xi = c_xi (1 + |a + xi|)^s``; drives stratified sampling.
    hm_norm_bound : float
        Upper bound on the ``H^m(Omega)`` norm of the normalised atom
        ``alpha_{j,l} (1 + |a + xi|)^{-s} psi``.
    xi_norm : float
        ``|xi|``, used for stratification.
    """

    kind: str
    xi: tuple
    level: int
    offset: int
    direction: tuple
    scale: float
    coeff_weight: complex
    budget_weight: complex
    hm_norm_bound: float
    xi_norm: float = 0.0

    def __call__(self, x, k: int) -> np.ndarray:
        t = np.asarray(x, dtype=float) @ np.asarray(self.direction)
        if self.kind == "power":
            return (t + self.offset) ** k
        return kernels.bspline_values(k, self.scale * t - self.offset)


@dataclass(eq=False)
class ReLUkNetwork:
    """``x -> sum_i amplitudes[i] sigma_k(omegas[i] . x + biases[i])``."""

    k: int
    amplitudes: np.ndarray
    omegas: np.ndarray
    biases: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = self.amplitudes.size
        om = np.asarray(self.omegas, dtype=float)
        self.omegas = om if om.ndim == 2 and om.shape[0] == n else om.reshape(n, -1)
        self.biases = np.asarray(self.biases, dtype=float).reshape(-1)

    def __len__(self) -> int:
        return self.amplitudes.size

    @property
    def dim(self) -> int:
        return self.omegas.shape[1]

    @property
    def ell1_mass(self) -> float:
        return float(np.sum(np.abs(self.amplitudes)))

    def __call__(self, x) -> np.ndarray:
        x = as_points(x, self.dim)
        if len(self) == 0:
            return np.zeros(x.shape[0], dtype=complex)
        return kernels.ridge_eval(self.amplitudes, self.omegas, self.biases, self.k, x)

    def gradient(self, x) -> np.ndarray:
        if self.k < 1:
            raise ParameterError("gradient needs k >= 1")
        x = as_points(x, self.dim)
        if len(self) == 0:
            return np.zeros(x.shape, dtype=complex)
        return kernels.ridge_eval_grad(self.amplitudes, self.omegas, self.biases, self.k, x)

    @property
    def terms(self) -> list[tuple[complex, np.ndarray, float]]:
        return list(zip(self.amplitudes, self.omegas, self.biases))


def write_network_csv(net: ReLUkNetwork, path) -> None:
    """Write one record per term: ``amplitude_re, amplitude_im, omega_1..omega_d, bias``."""
    with open(path, "w", newline="") as fh:
        fh.write(f"k={net.k} d={net.dim} n={len(net)}\n")
        w = csv.writer(fh, lineterminator="\n")
        for a, om, b in net.terms:
            w.writerow([repr(float(a.real)), repr(float(a.imag))] + [repr(float(v)) for v in om] + [repr(float(b))])


def read_network_csv(path) -> ReLUkNetwork:
    with open(path, newline="") as fh:
        header = dict(tok.split("=") for tok in fh.readline().split())
        k, d, n = int(header["k"]), int(header["d"]), int(header["n"])
        rows = [list(map(float, r)) for r in csv.reader(fh) if r]
    if len(rows) != n:
        raise ParameterError(f"network file declares {n} terms but holds {len(rows)}")
    arr = np.array(rows, dtype=float).reshape(n, d + 3)
    return ReLUkNetwork(k, arr[:, 0] + 1j * arr[:, 1], arr[:, 2:2 + d], arr[:, 2 + d])


# ---------------------------------------------------------------------------
# dictionary


def default_delta(k: int, m: int) -> float:
    return min(k - m + 0.5, 0.5) / 2


def _spline_norm_table(k: int, m: int) -> list[tuple[float, float]]:
    b = BSpline(k)
    return [b.norms(r) for r in range(m + 1)]


def _atom_hm_bound(scale: float, table, dim: int) -> float:
    rho = 1.0 if dim == 1 else np.sqrt(2.0)
    total = 0.0
    for r, (l2sq, supsq) in enumerate(table):
        total += min(rho * scale ** (2 * r - 1) * l2sq, scale ** (2 * r) * supsq)
    return float(np.sqrt(total))


def power_atom_weights(k: int) -> np.ndarray:
    """Weights ``beta_b`` with ``sum_{b=1}^{k+1} beta_b (x + b)^k = 1``."""
    A = np.array([[comb(k, p) * float(b) ** (k - p) for b in range(1, k + 2)] for p in range(k + 1)])
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    return np.linalg.solve(A, rhs)


def knot_offsets(theta, level: int, k: int) -> np.ndarray:
    """Offsets ``j`` for which ``N_k(2^l theta . x - j)`` is not identically zero on the unit cube."""
    theta = np.asarray(theta, dtype=float)
    ymin = np.sum(np.minimum(theta, 0.0)) * 2.0**level
    ymax = np.sum(np.maximum(theta, 0.0)) * 2.0**level
    lo = ymin - k - 1
    cand = np.arange(int(np.floor(lo)), int(np.ceil(ymax)) + 1)
    tol = 1e-9
    return cand[(cand > lo + tol) & (cand < ymax - tol)]


def build_dictionary(
    expansion: LatticeExpansion,
    k: int,
    L_max: int,
    s: float = 0.0,
    m: int = 0,
    delta: float | None = None,
    rel_threshold: float = 1e-8,
) -> list[RidgeAtom]:
    """Ridge-atom dictionary of a lattice expansion.

    For every coefficient above ``rel_threshold`` times the largest one and
    every level ``1 <= l <= L_max``, one atom is produced per knot offset
    ``j`` with ``N_k(2^l theta . x - j)`` not identically zero on the open
    unit cube and nonzero multiscale coefficient ``alpha_{j,l}``.

    Parameters
    ----------
    expansion : LatticeExpansion
    k : int
        Spline degree (0..3).
    L_max : int
        Finest level.
    s : float
        Smoothness index in the budget weights.
    m : int
        Sobolev order used by ``hm_norm_bound``.
    delta : float, optional
        Level decay margin; defaults to ``min(k - m + 1/2, 1/2) / 2``.

    Raises
    ------
    ParameterError
        Empty expansion or ``delta <= 0``.
    NumericalError
        If an offset count exceeds ``2^l |theta|_1 + k + 1``.
    """
    k = check_degree(k)
    if len(expansion) == 0:
        raise ParameterError("empty expansion")
    delta = default_delta(k, m) if delta is None else float(delta)
    if not delta > 0:
        raise ParameterError("delta must be positive")
    if int(L_max) != L_max or L_max < 1:
        raise ParameterError("L_max must be a positive integer")
    coeffs = expansion.coeffs
    thetas = expansion.frequencies
    xinorm = np.linalg.norm(expansion.xis, axis=1)
    keep = np.abs(coeffs) > rel_threshold * np.max(np.abs(coeffs))
    d = expansion.dim
    nonzero = keep & (np.linalg.norm(thetas, axis=1) > ZERO_FREQ_TOL)
    atoms: list[RidgeAtom] = []
    if np.any(nonzero):
        lo = float(np.min(np.sum(np.minimum(thetas[nonzero], 0.0), axis=1)))
        hi = float(np.max(np.sum(np.maximum(thetas[nonzero], 0.0), axis=1)))
        mexp = multiscale_expand(k, int(L_max), (lo, hi))
    table = _spline_norm_table(k, m)
    for i in np.flatnonzero(keep):
        theta = thetas[i]
        tn = float(np.linalg.norm(theta))
        c = coeffs[i]
        a_xi = c * (1 + tn) ** s
        nu = tuple(int(v) for v in expansion.nus[i])
        if tn <= ZERO_FREQ_TOL:
            e1 = tuple(np.eye(d)[0])
            for b, beta in zip(range(1, k + 2), power_atom_weights(k)):
                bound = abs(beta) * (1 + tn) ** -s * np.sqrt(
                    sum((factorial(k) / factorial(k - r)) ** 2 * (b + 1.0) ** (2 * (k - r)) for r in range(m + 1))
                )
                atoms.append(RidgeAtom("power", nu, 0, b, e1, 1.0, c * beta, a_xi * beta, float(bound), float(xinorm[i])))
            continue
        direction = tuple(theta / tn)
        l1 = float(np.sum(np.abs(theta)))
        for lev in range(1, int(L_max) + 1):
            js = knot_offsets(theta, lev, k)
            if js.size > 2.0**lev * l1 + k + 1 + 1e-9:
                raise NumericalError(f"offset count {js.size} exceeds bound at level {lev}")
            scale = 2.0**lev * tn
            hb = _atom_hm_bound(scale, table, d)
            budget = a_xi * 2.0 ** (-lev * (1 + delta)) / (1 + xinorm[i])
            for j in js:
                alpha = mexp.coefficient(int(j), lev)
                if alpha == 0:
                    continue
                atoms.append(
                    RidgeAtom(
                        "spline", nu, lev, int(j), direction, scale, complex(c * alpha), complex(budget),
                        float(abs(alpha) * (1 + tn) ** -s * hb), float(xinorm[i]),
                    )
                )
    return atoms


def dictionary_expansion(atoms: Sequence[RidgeAtom], k: int, x) -> np.ndarray:
    """``sum coeff_weight * psi``: the dictionary's own reconstruction of ``f``."""
    x = np.asarray(x, dtype=float)
    A = atom_matrix(atoms, k, x)
    return A @ np.array([a.coeff_weight for a in atoms])


# ---------------------------------------------------------------------------
# evaluation on grids


def atom_matrix(atoms: Sequence[RidgeAtom], k: int, x, deriv_axis: int | None = None) -> np.ndarray:
    """Values (or one partial derivative) of every atom at the rows of ``x``.

    Returns a Fortran-ordered ``(len(x), len(atoms))`` array.
    """
    x = np.asarray(x, dtype=float)
    n = len(atoms)
    out = np.zeros((x.shape[0], n), order="F")
    dirs: dict[tuple, int] = {}
    dir_index = np.empty(n, dtype=np.int64)
    for c, a in enumerate(atoms):
        dir_index[c] = dirs.setdefault(a.direction, len(dirs))
    D = np.array(list(dirs), dtype=float).reshape(len(dirs), x.shape[1])
    proj = x @ D.T if len(dirs) else np.zeros((x.shape[0], 0))
    spline = np.array([a.kind == "spline" for a in atoms], dtype=bool)
    if np.any(spline):
        cols = np.flatnonzero(spline)
        scale = np.array([atoms[c].scale for c in cols])
        offset = np.array([atoms[c].offset for c in cols], dtype=float)
        deriv = 0 if deriv_axis is None else 1
        M = kernels.bspline_columns(proj, dir_index[cols], scale, offset, k, deriv)
        if deriv_axis is not None:
            M = M * (scale * D[dir_index[cols], deriv_axis])
        out[:, cols] = M
    for c in np.flatnonzero(~spline):
        t = proj[:, dir_index[c]] + atoms[c].offset
        if deriv_axis is None:
            out[:, c] = t**k
        else:
            out[:, c] = (k * t ** (k - 1) if k else 0.0) * D[dir_index[c], deriv_axis]
    return out


@dataclass(eq=False)
class FitTarget:
    """A target sampled on a quadrature grid, with gradients when ``m = 1``."""

    grid: QuadratureGrid
    values: np.ndarray
    gradients: np.ndarray | None = None
    m: int = 0

    def stacked(self) -> np.ndarray:
        sw = np.sqrt(self.grid.weights)
        parts = [sw * self.values]
        if self.m == 1:
            parts += [sw * self.gradients[:, r] for r in range(self.grid.dim)]
        return np.concatenate(parts)


def fit_target(f, grid: QuadratureGrid, m: int = 0) -> FitTarget:
    """Sample ``f`` (and its gradient for ``m = 1``) on ``grid``."""
    if m not in (0, 1):
        raise ParameterError("m must be 0 or 1")
    vals = f.eval(grid.points)
    grads = f.gradient(grid.points) if m == 1 else None
    return FitTarget(grid, vals, grads, m)


def _stacked_matrix(atoms, k, target: FitTarget) -> np.ndarray:
    sw = np.sqrt(target.grid.weights)[:, None]
    x = target.grid.points
    blocks = [atom_matrix(atoms, k, x) * sw]
    if target.m == 1:
        blocks += [atom_matrix(atoms, k, x, r) * sw for r in range(target.grid.dim)]
    return np.asfortranarray(np.vstack(blocks))


class GreedySelector:
    """Orthogonal greedy selection in the discrete ``H^m`` inner product.

    At each step every remaining atom is orthogonalised against the span of
    the selected ones; the atom maximising
    ``|<r, v>| / ||v||`` (``r`` the residual, ``v`` the orthogonalised atom)
    is added, and the residual is the least-squares residual on the grid.
    Atoms whose orthogonalised norm falls below ``rank_tol`` relative to
    their original norm are linearly dependent on the selection and are
    dropped; ``dropped`` counts them.

    The selection path is computed once, so fits for several ``n`` share it.
    """

    def __init__(self, atoms: Sequence[RidgeAtom], k: int, target: FitTarget, n_max: int, rank_tol: float = 1e-9):
        self.atoms = list(atoms)
        self.k = k
        self.target = target
        if int(n_max) != n_max or n_max < 1:
            raise ParameterError("n must be a positive integer")
        if n_max > len(self.atoms):
            raise ParameterError(f"n={n_max} exceeds dictionary size {len(self.atoms)}")
        self.A = _stacked_matrix(self.atoms, k, target)
        self.y = target.stacked()
        self.order, self.dropped = self._path(int(n_max), rank_tol)

    def _path(self, n_max, rank_tol):
        P = self.A.copy(order="F")
        norms0 = np.einsum("ij,ij->j", P, P)
        pn2 = norms0.copy()
        active = norms0 > 0
        r = self.y.astype(complex).copy()
        order: list[int] = []
        dropped = int(np.count_nonzero(~active))
        while len(order) < n_max:
            dead = active & (pn2 <= rank_tol * norms0)
            dropped += int(np.count_nonzero(dead))
            active &= ~dead
            if not np.any(active):
                break
            corr = P.T @ r.real + 1j * (P.T @ r.imag)
            score = np.where(active, np.abs(corr) ** 2 / np.where(active, pn2, 1.0), -1.0)
            j = int(np.argmax(score))
            q = P[:, j] / np.sqrt(pn2[j])
            r -= q * (q @ r)
            qP = q @ P
            blas.dger(-1.0, q, qP, a=P, overwrite_a=True)
            pn2 = pn2 - qP**2
            active[j] = False
            order.append(j)
        return order, dropped

    def select(self, n: int) -> list[tuple[complex, RidgeAtom]]:
        idx = self.order[: int(n)]
        if not idx:
            return []
        amps, *_ = np.linalg.lstsq(self.A[:, idx], self.y, rcond=None)
        return [(complex(a), self.atoms[i]) for a, i in zip(amps, idx)]


def allocate_draws(masses, n: int) -> np.ndarray:
    """Split ``n`` draws proportionally to ``masses`` (largest-remainder rounding).

    Remainder ties go to the earlier stratum.
    """
    masses = np.asarray(masses, dtype=float)
    total = masses.sum()
    if total <= 0:
        raise ParameterError("strata have no mass")
    quota = n * masses / total
    base = np.floor(quota).astype(np.int64)
    rest = n - int(base.sum())
    frac = quota - base
    order = np.lexsort((np.arange(masses.size), -frac))
    base[order[:rest]] += 1
    return base


def stratum_key(atom: RidgeAtom) -> tuple:
    """``(level, dyadic shell of |xi|)``; power atoms form their own stratum."""
    if atom.kind == "power":
        return (0, -1)
    xn = atom.xi_norm
    shell = 0 if xn < 1 else int(np.floor(np.log2(xn))) + 1
    return (atom.level, shell)


def stratified_sample(atoms: Sequence[RidgeAtom], n: int, seed: int = 0) -> list[tuple[complex, RidgeAtom]]:
    """Stratified Monte Carlo selection of ``n`` draws.

    Within a stratum ``S`` of mass ``M_S = sum |budget_weight|`` the
    ``n_S`` draws pick atom ``i`` with probability ``|w_i| / M_S``; each draw
    contributes ``(M_S / n_S) (coeff_weight_i / |w_i|) psi_i``, an unbiased
    estimate of the stratum's part of the expansion.  Repeated draws of the
    same atom are merged.
    """
    strata: dict[tuple, list[int]] = defaultdict(list)
    for i, a in enumerate(atoms):
        if abs(a.budget_weight) > 0:
            strata[stratum_key(a)].append(i)
    keys = sorted(strata)
    masses = np.array([sum(abs(atoms[i].budget_weight) for i in strata[key]) for key in keys])
    draws = allocate_draws(masses, int(n))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(n)])))
    amp: dict[int, complex] = {}
    for key, mass, nd in zip(keys, masses, draws):
        if nd == 0:
            continue
        members = np.array(strata[key])
        w = np.array([abs(atoms[i].budget_weight) for i in members])
        picks = rng.choice(members, size=int(nd), p=w / w.sum())
        for i in picks:
            i = int(i)
            amp[i] = amp.get(i, 0.0) + (mass / nd) * atoms[i].coeff_weight / abs(atoms[i].budget_weight)
    return [(complex(amp[i]), atoms[i]) for i in sorted(amp)]


def select_atoms(
    atoms: Sequence[RidgeAtom],
    n: int,
    mode: str = "greedy",
    target: FitTarget | None = None,
    m: int = 0,
    k: int | None = None,
    seed: int = 0,
    diagnostics: dict | None = None,
) -> list[tuple[complex, RidgeAtom]]:
    """Select ``n`` atoms and their amplitudes.

    Parameters
    ----------
    atoms : sequence of RidgeAtom
    n : int
        ``1 <= n <= len(atoms)``.
    mode : {"greedy", "stratified"}
    target : FitTarget
        Required in greedy mode; its ``m`` overrides the argument.
    k : int
        Spline degree of the atoms (required in greedy mode).
    seed : int
        Seed of the stratified sampler.
    diagnostics : dict, optional
        Receives ``"dropped"``, the number of atoms discarded as linearly
        dependent during greedy selection.
    """
    if int(n) != n or n < 1:
        raise ParameterError("n must be a positive integer")
    if n > len(atoms):
        raise ParameterError(f"n={n} exceeds dictionary size {len(atoms)}")
    if mode == "greedy":
        if target is None or k is None:
            raise ParameterError("greedy selection needs a fit target and the degree k")
        if target.m != m:
            target = FitTarget(target.grid, target.values, target.gradients, m)
        sel = GreedySelector(atoms, k, target, n)
        if diagnostics is not None:
            diagnostics["dropped"] = sel.dropped
        return sel.select(n)
    if mode == "stratified":
        return stratified_sample(atoms, n, seed)
    raise ParameterError(f"unknown selection mode {mode!r}")


def to_relu_network(selection: Sequence[tuple[complex, RidgeAtom]], k: int, dim: int | None = None) -> ReLUkNetwork:
    """Expand selected atoms into ReLU^k units.

    With ``S = 2^l |theta|`` and ``omega = theta / |theta|``,

        N_k(S omega . x - j) = sum_{i=0}^{k+1} (-1)^i C(k+1, i) S^k / k!
                               sigma_k(omega . x - (j + i) / S),

    so every spline atom contributes ``k + 2`` units.  Power atoms are a
    single unit.
    """
    k = check_degree(k)
    amps, oms, bs = [], [], []
    for amp, atom in selection:
        om = np.asarray(atom.direction, dtype=float)
        if atom.kind == "power":
            amps.append(amp)
            oms.append(om)
            bs.append(float(atom.offset))
            continue
        S = atom.scale
        if not S > 0 or not np.all(np.isfinite(om)) or abs(np.linalg.norm(om) - 1) > 1e-12:
            raise ParameterError("degenerate ridge direction")
        for i in range(k + 2):
            amps.append(amp * (-1) ** i * comb(k + 1, i) * S**k / factorial(k))
            oms.append(om)
            bs.append(-(atom.offset + i) / S)
    if dim is None:
        dim = len(selection[0][1].direction) if selection else 1
    return ReLUkNetwork(k, np.array(amps, dtype=complex), np.array(oms, dtype=float).reshape(len(amps), dim), np.array(bs, dtype=float))


def evaluate_selection(selection, k: int, x) -> np.ndarray:
    """Direct evaluation ``sum amp * psi(x)`` without the ReLU expansion."""
    x = np.asarray(x, dtype=float)
    if not selection:
        return np.zeros(x.shape[0], dtype=complex)
    A = atom_matrix([a for _, a in selection], k, x)
    return A @ np.array([amp for amp, _ in selection], dtype=complex)


def logistic(t):
    return expit(t)


@dataclass(eq=False)
class SigmoidalNetwork:
    """``x -> sum a_i sigma(t (omega_i . x + b_i))``."""

    amplitudes: np.ndarray
    omegas: np.ndarray
    biases: np.ndarray
    t: float
    sigma: Callable = field(default=logistic)

    def __call__(self, x) -> np.ndarray:
        x = as_points(x, self.omegas.shape[1] if self.omegas.size else np.asarray(x).shape[-1])
        if self.amplitudes.size == 0:
            return np.zeros(x.shape[0], dtype=complex)
        z = self.t * (x @ self.omegas.T + self.biases)
        return self.sigma(z) @ self.amplitudes


def sigmoidal_convert(net: ReLUkNetwork, sigma: Callable = logistic, t: float = 1.0) -> SigmoidalNetwork:
    """Replace each Heaviside unit of a ``k = 0`` network by ``sigma(t (.))``."""
    if net.k != 0:
        raise ParameterError("unsupported: sigmoidal conversion needs a k = 0 network")
    if not t > 0:
        raise ParameterError("t must be positive")
    return SigmoidalNetwork(net.amplitudes.copy(), net.omegas.copy(), net.biases.copy(), float(t), sigma)


__all__ = [
    "FitTarget",
    "GreedySelector",
    "ReLUkNetwork",
    "RidgeAtom",
    "SigmoidalNetwork",
    "allocate_draws",
    "atom_matrix",
    "build_dictionary",
    "default_delta",
    "dictionary_expansion",
    "evaluate_selection",
    "fit_target",
    "knot_offsets",
    "logistic",
    "power_atom_weights",
    "read_network_csv",
    "select_atoms",
    "sigmoidal_convert",
    "stratified_sample",
    "stratum_key",
    "to_relu_network",
    "write_network_csv",
]
