"""Experiment configuration, rate prediction, n-sweeps and CSV output."""
from __future__ import annotations

import dataclasses
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .cosine_net import ExponentialWeight, greedy_truncate, hm_error_orthogonal
from .errors import ConfigError, ParameterError, RidgeRateError
from .lattice import best_expansion, make_cutoff
from .oracles import FreeKnotOracle, QuadratureGrid, gauss_legendre, uniform_grid_fit
from .reluk_net import (
    GreedySelector,
    build_dictionary,
    fit_target,
    stratified_sample,
    to_relu_network,
    write_network_csv,
)
from .targets import get_target

METHODS = ("cosine", "cosine_exp", "reluk_greedy", "reluk_stratified", "uniform_grid", "free_knot")
CSV_HEADER = "n,error_l2,error_hm,ell1_mass,wall_ms"


# ---------------------------------------------------------------------------
# theoretical exponents


def _reluk_threshold(m: float, k: int, d: int) -> float:
    return (d + 1) * (k - m + 0.5) + m + 0.5


def predict_exponents(s: float, m: int, k: int, d: int, method: str) -> tuple[float, float]:
    """Predicted rate ``n^{-t} log(n)^q`` of the error in ``H^m``.

    ``cosine``: ``t = 1/2 + (s - m)/d``.  ReLU^k methods:
    ``t = 1/2 + min((2(s - m) - 1) / (2(d + 1)), k - m + 1/2)`` with ``q``
    equal to 0 below the threshold ``T = (d+1)(k - m + 1/2) + m + 1/2``, 1
    above it and ``1 + k - m + 1/2`` at ``s = T``.  The classical baselines
    are ``uniform_grid``: ``t = (k + 1 - m)/d`` and ``free_knot``:
    ``t = k + 1 - m``; ``cosine_exp`` converges faster than any power, so
    ``t = inf``.

    Raises
    ------
    ParameterError
        ``"outside theorem hypotheses"``.
    """
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}")
    if d < 1 or k < 0 or m < 0:
        raise ParameterError("outside theorem hypotheses: need d >= 1, k >= 0, m >= 0")
    if method == "cosine":
        if m > s:
            raise ParameterError(f"outside theorem hypotheses: cosine rate needs m <= s (m={m}, s={s})")
        return 0.5 + (s - m) / d, 0.0
    if method == "cosine_exp":
        return math.inf, 0.0
    if method == "uniform_grid":
        return (k + 1 - m) / d, 0.0
    if method == "free_knot":
        return float(k + 1 - m), 0.0
    if not (s >= 0.5 and m <= s - 0.5 and m < k + 0.5):
        raise ParameterError(
            f"outside theorem hypotheses: ReLU^k rate needs s >= 1/2, m <= s - 1/2, m < k + 1/2 (s={s}, m={m}, k={k})"
        )
    t = 0.5 + min((2 * (s - m) - 1) / (2 * (d + 1)), k - m + 0.5)
    T = _reluk_threshold(m, k, d)
    if math.isclose(s, T, rel_tol=1e-12, abs_tol=1e-12):
        q = 1 + (k - m + 0.5)
    elif s < T:
        q = 0.0
    else:
        q = 1.0
    return t, float(q)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    """One n-sweep.

    Only ``target``, ``dim``, ``method`` and ``n_list`` are required; fields
    left at ``None`` take per-dimension defaults when the experiment runs.
    """

    target: str
    dim: int
    method: str
    n_list: tuple[int, ...]
    k: int = 1
    m: int = 0
    s: float = 0.0
    beta: float | None = None
    c: float | None = None
    L: float = 2.0
    R: float = 4.0
    seed: int = 0
    output: str | None = None
    eps: float = 0.25
    alpha: float = 2.0
    fft_grid: int | None = None
    candidates: int | None = None
    L_max: int | None = None
    delta: float | None = None
    dp_grid: int = 512
    threads: int | None = None
    timing: bool = False
    network_output: str | None = None

    def __post_init__(self):
        self.n_list = tuple(int(n) for n in self.n_list)
        try:
            self._validate()
        except ConfigError:
            raise
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc

    def _validate(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.dim not in (1, 2, 3):
            raise ConfigError(f"unsupported dimension {self.dim}")
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ConfigError("n_list must hold positive integers")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigError("n_list must be strictly increasing")
        if self.m not in (0, 1):
            raise ConfigError("m must be 0 or 1")
        if not 0 <= self.k <= 3:
            raise ConfigError("k must lie in 0..3")
        exp_fields = self.beta is not None or self.c is not None
        if self.method == "cosine_exp":
            if self.beta is None or self.c is None:
                raise ConfigError("cosine_exp requires beta and c")
        elif exp_fields:
            raise ConfigError("beta and c are only valid with method=cosine_exp")
        if self.method in ("uniform_grid", "free_knot") and self.m != 0:
            raise ConfigError(f"{self.method} supports m = 0 only")
        if self.method == "free_knot" and self.dim != 1:
            raise ConfigError("free_knot is one-dimensional")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads must be positive")
        get_target(self.target, self.dim)
        make_cutoff(self.alpha, self.L, self.eps, dim=self.dim)
        predict_exponents(self.s, self.m, self.k, self.dim, self.method)


def _coerce(name: str, raw: str, ftype: Any):
    text = str(ftype)
    raw = raw.strip()
    if name == "n_list":
        return tuple(int(v) for v in raw.split(",") if v.strip())
    if raw.lower() in ("none", "") and "None" in text:
        return None
    if text.startswith("bool"):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if text.startswith("int"):
        return int(raw)
    if text.startswith("float"):
        return float(raw)
    return raw


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` comments, comma-separated lists)."""
    types = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, raw = (p.strip() for p in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _coerce(key, raw, types[key])
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    missing = [k for k in ("target", "dim", "method", "n_list") if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# reports


@dataclass
class RateRow:
    n: int
    error_l2: float
    error_hm: float
    ell1_mass: float
    wall_ms: float
    error_orthogonal: float | None = None


@dataclass
class RateReport:
    rows: list[RateRow]
    fitted_slope: float
    slope_stderr: float
    theory_exponent: float
    theory_q: float
    config: ExperimentConfig | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def ns(self) -> np.ndarray:
        return np.array([r.n for r in self.rows])

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error_hm for r in self.rows])


def fit_slope(ns, errors) -> tuple[float, float]:
    """Least-squares slope of ``log error`` against ``log n`` and its standard error.

    Zero, non-finite and underflowed (``< 1e-300``) errors are excluded.
    """
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    ok = np.isfinite(errors) & (errors > 1e-300) & (ns > 0)
    x, y = np.log(ns[ok]), np.log(errors[ok])
    if x.size < 2:
        return math.nan, math.nan
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean()) / sxx)
    if x.size == 2:
        return slope, 0.0
    resid = y - y.mean() - slope * xc
    return slope, float(math.sqrt(resid @ resid / (x.size - 2) / sxx))


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def format_csv(report: RateReport, include_timing: bool = False) -> str:
    lines = [CSV_HEADER]
    for r in report.rows:
        wall = r.wall_ms if include_timing else 0.0
        lines.append(",".join([str(int(r.n)), _fmt(r.error_l2), _fmt(r.error_hm), _fmt(r.ell1_mass), _fmt(wall)]))
    lines.append(
        f"# slope={_fmt(report.fitted_slope)} stderr={_fmt(report.slope_stderr)} "
        f"theory_t={_fmt(report.theory_exponent)} theory_q={_fmt(report.theory_q)}"
    )
    return "\n".join(lines) + "\n"


def emit_csv(report: RateReport, path, include_timing: bool | None = None) -> None:
    """Write the report as CSV; ``wall_ms`` is zero unless timing is enabled.

    Raises
    ------
    OSError
        With the offending path in the message.
    """
    if include_timing is None:
        include_timing = bool(report.config and report.config.timing)
    text = format_csv(report, include_timing)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write report to {path}: {exc.strerror}") from None


def parse_csv(path) -> tuple[dict[str, np.ndarray], dict[str, float]]:
    """Read a report back: column arrays and the footer values."""
    cols: dict[str, list[float]] = {}
    footer: dict[str, float] = {}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        for name in header:
            cols[name] = []
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                for tok in line[1:].split():
                    key, val = tok.split("=")
                    footer[key] = float(val)
            elif line:
                for name, val in zip(header, line.split(",")):
                    cols[name].append(float(val))
    return {k: np.array(v) for k, v in cols.items()}, footer


# ---------------------------------------------------------------------------
# running


def resolve_threads(cfg: ExperimentConfig) -> int:
    if cfg.threads is not None:
        return cfg.threads
    env = os.environ.get("RIDGERATE_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"RIDGERATE_THREADS must be an integer, got {env!r}") from None
    return 1


def fitting_grid(dim: int) -> QuadratureGrid:
    """Least-squares grid for greedy selection."""
    if dim == 1:
        return gauss_legendre(1, 2, 512)
    return gauss_legendre(dim, 64 if dim == 2 else 24)


def evaluation_grid(dim: int) -> QuadratureGrid:
    """Error-measurement grid, disjoint in structure from the fitting grid."""
    if dim == 1:
        return gauss_legendre(1, 3, 700)
    if dim == 2:
        return gauss_legendre(2, 3, 96)
    return gauss_legendre(3, 2, 20)


def _default_L_max(dim: int) -> int:
    return {1: 7, 2: 4, 3: 3}[dim]


def _default_candidates(dim: int) -> int:
    return {1: 8, 2: 4, 3: 2}[dim]


def _errors(f, approx, approx_grad, grid: QuadratureGrid, m: int) -> tuple[float, float]:
    x = grid.points
    diff = f.eval(x) - approx(x)
    l2sq = float(np.sum(grid.weights * np.abs(diff) ** 2))
    hmsq = l2sq
    if m == 1:
        g = f.gradient(x) - approx_grad(x)
        hmsq += float(np.sum(grid.weights[:, None] * np.abs(g) ** 2))
    return math.sqrt(l2sq), math.sqrt(hmsq)


def _row_runner(cfg: ExperimentConfig, f, diagnostics: dict):
    """Prepare shared state once and return a function computing one row."""
    d = cfg.dim
    egrid = evaluation_grid(d)
    method = cfg.method
    if method in ("cosine", "cosine_exp", "reluk_greedy", "reluk_stratified"):
        cutoff = make_cutoff(cfg.alpha, cfg.L, cfg.eps, dim=d)
        cands = cfg.candidates or _default_candidates(d)
        if method == "cosine_exp":
            exp = best_expansion(f, cutoff, 0.0, cfg.R, cands, cfg.fft_grid, cfg.beta, cfg.c)
        else:
            exp = best_expansion(f, cutoff, cfg.s, cfg.R, cands, cfg.fft_grid)
        diagnostics["shift"] = exp.shift.tolist()
        diagnostics["expansion_terms"] = len(exp)

    if method in ("cosine", "cosine_exp"):
        weight = ExponentialWeight(cfg.beta, cfg.c) if method == "cosine_exp" else "polynomial"

        def row(n):
            # a network with fewer than n terms is still an n-term network
            net = greedy_truncate(exp, min(n, len(exp)), cfg.s, cfg.m, weight)
            e2, em = _errors(f, net.evaluate, net.gradient, egrid, cfg.m)
            return RateRow(n, e2, em, net.ell1_mass, 0.0, hm_error_orthogonal(exp, net, cfg.m)), None

        return row

    if method in ("reluk_greedy", "reluk_stratified"):
        atoms = build_dictionary(exp, cfg.k, cfg.L_max or _default_L_max(d), cfg.s, cfg.m, cfg.delta)
        diagnostics["dictionary_size"] = len(atoms)
        if max(cfg.n_list) > len(atoms):
            raise ParameterError(f"n={max(cfg.n_list)} exceeds dictionary size {len(atoms)}")
        if method == "reluk_greedy":
            selector = GreedySelector(atoms, cfg.k, fit_target(f, fitting_grid(d), cfg.m), max(cfg.n_list))
            diagnostics["dropped"] = selector.dropped

            def select(n):
                return selector.select(n)
        else:

            def select(n):
                return stratified_sample(atoms, n, cfg.seed)

        def row(n):
            net = to_relu_network(select(n), cfg.k, d)
            grad = net.gradient if cfg.m == 1 else None
            e2, em = _errors(f, net, grad, egrid, cfg.m)
            return RateRow(n, e2, em, net.ell1_mass, 0.0), net

        return row

    if method == "uniform_grid":

        def row(cells):
            fit, dof = uniform_grid_fit(f, cells, cfg.k)
            e = fit.l2_error(f)
            return RateRow(dof, e, e, math.nan, 0.0), None

        return row

    oracle = FreeKnotOracle(f, cfg.k, cfg.dp_grid)
    try:
        oracle.prepare(max(cfg.n_list))
    except RidgeRateError as exc:
        raise type(exc)(f"n={max(cfg.n_list)}: {exc}") from exc

    def row(n):
        fit = oracle.fit(n)
        return RateRow(n, fit.l2_error, fit.l2_error, math.nan, 0.0), None

    return row


def run_experiment(cfg: ExperimentConfig) -> RateReport:
    """Run the n-sweep described by ``cfg``.

    The expansion, dictionary and greedy path are built once; rows may run
    concurrently (``cfg.threads`` or ``RIDGERATE_THREADS``) and are reported
    in ``n`` order.  For ``uniform_grid`` the entries of ``n_list`` are cells
    per axis and the reported ``n`` is the number of degrees of freedom; for
    ``free_knot`` they are interior breakpoints.
    """
    f = get_target(cfg.target, cfg.dim)
    t, q = predict_exponents(cfg.s, cfg.m, cfg.k, cfg.dim, cfg.method)
    diagnostics: dict = {}
    row_fn = _row_runner(cfg, f, diagnostics)

    def timed(n):
        start = time.perf_counter()
        try:
            row, net = row_fn(n)
        except RidgeRateError as exc:
            raise type(exc)(f"n={n}: {exc}") from exc
        row.wall_ms = (time.perf_counter() - start) * 1e3
        return row, net

    threads = resolve_threads(cfg)
    if threads == 1:
        results = [timed(n) for n in cfg.n_list]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(timed, cfg.n_list))
    rows = [r for r, _ in results]
    last_net = results[-1][1]
    if cfg.network_output and last_net is not None:
        write_network_csv(last_net, cfg.network_output)
    slope, stderr = fit_slope([r.n for r in rows], [r.error_hm for r in rows])
    return RateReport(rows, slope, stderr, t, q, cfg, diagnostics)


__all__ = [
    "CSV_HEADER",
    "ExperimentConfig",
    "METHODS",
    "RateReport",
    "RateRow",
    "emit_csv",
    "evaluation_grid",
    "fit_slope",
    "fitting_grid",
    "format_csv",
    "load_config",
    "parse_config",
    "parse_csv",
    "predict_exponents",
    "run_experiment",
]
