"""End-to-end acceptance checks.

Each test carries ``@pytest.mark.criterion(number, title)``; the terminal
summary prints one PASS/FAIL line per criterion.
"""
import itertools

import numpy as np
import pytest

from ridgerate.cosine_net import CosineNetwork, greedy_truncate, hm_error_orthogonal
from ridgerate.harness import ExperimentConfig, emit_csv, predict_exponents, run_experiment
from ridgerate.lattice import LatticeExpansion, lattice_coefficients, make_cutoff
from ridgerate.oracles import gauss_legendre, hm_norm
from ridgerate.splines import UniformSpline, bspline, complex_exponential, multiscale_expand, quasi_interpolate
from ridgerate.targets import BUILTIN_NAMES, get_target

criterion = pytest.mark.criterion


def _log2_slope(levels, values):
    return np.polyfit(np.asarray(levels, float), np.log2(values), 1)[0]


# ---------------------------------------------------------------------------
# 1


@criterion(1, "spline kernel exactness")
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_partition_of_unity(k, rng):
    x = rng.uniform(-4, 4, 1000)
    n = bspline(k)
    np.testing.assert_allclose(sum(n(x - j) for j in range(-8, 9)), 1.0, atol=1e-12)
    assert np.all(n(x) >= 0)


@criterion(1, "spline kernel exactness")
def test_quadratic_value():
    assert bspline(2)(1.5) == pytest.approx(0.75, abs=1e-15)


@criterion(1, "spline kernel exactness")
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_spline_reproduction(k, rng):
    s = UniformSpline(k, 0.0625, -k - 3, rng.uniform(-1, 1, 24 + k))
    q = quasi_interpolate(s, 0.0625, k, (0.0, 1.0))
    x = rng.uniform(0, 1, 500)
    np.testing.assert_allclose(q(x), s(x), atol=1e-10)


# ---------------------------------------------------------------------------
# 2

_LEVELS = range(2, 7)


@criterion(2, "multiscale coefficient decay")
@pytest.mark.parametrize("k", [1, 2])
def test_coefficient_slope(k):
    ex = multiscale_expand(k, 6)
    tops = [np.max(np.abs(ex.level_coefficients(lev)[1])) for lev in _LEVELS]
    assert abs(_log2_slope(_LEVELS, tops) + (k + 1)) <= 0.25


@criterion(2, "multiscale coefficient decay")
@pytest.mark.parametrize("k", [1, 2])
def test_partial_sum_slope(k):
    ex = multiscale_expand(k, 6)
    y = np.linspace(0, 1, 4001)
    e = complex_exponential()(y)
    errs = [np.max(np.abs(ex.partial_sum(y, lev) - e)) for lev in _LEVELS]
    assert abs(_log2_slope(_LEVELS, errs) + (k + 1)) <= 0.25


@criterion(2, "multiscale coefficient decay")
@pytest.mark.parametrize("k,m", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)])
def test_level_derivative_slope(k, m):
    ex = multiscale_expand(k, 6)
    y = np.linspace(0, 1, 20001)
    if m < k:
        sizes = [np.max(np.abs(ex.level_function(lev, y, m))) for lev in _LEVELS]
    else:
        # the k-th derivative is piecewise constant: difference quotients of the (k-1)-th
        h = y[1] - y[0]
        sizes = [np.max(np.abs(np.diff(ex.level_function(lev, y, m - 1)))) / h for lev in _LEVELS]
    assert abs(_log2_slope(_LEVELS, sizes) + (k + 1 - m)) <= 0.25


# ---------------------------------------------------------------------------
# 3


@criterion(3, "lattice round trip")
@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_reconstruction_monotone(name, dim):
    f = get_target(name, dim)
    phi = make_cutoff(dim=dim)
    grid = gauss_legendre(dim, 8, 64 if dim == 1 else 16)
    errs = []
    for R in (4, 8, 16):
        exp = lattice_coefficients(f, phi, [0.0] * dim, R=R)
        errs.append(np.sqrt(grid.integrate(np.abs(exp(grid.points) - f(grid.points)) ** 2).real))
    for a, b in zip(errs, errs[1:]):
        # exact atom expansions sit at the rounding floor for every R
        assert b < a if a > 1e-12 else b <= 1e-12


@criterion(3, "lattice round trip")
def test_exponential_exact():
    f = get_target("expwave", 1)
    grid = gauss_legendre(1, 8, 64)
    exp = lattice_coefficients(f, make_cutoff(), [0.0], R=4)
    assert np.sqrt(grid.integrate(np.abs(exp(grid.points) - f(grid.points)) ** 2).real) <= 1e-6


# ---------------------------------------------------------------------------
# 4


@criterion(4, "cosine network algebraic rate")
def test_cosine_rate_bump():
    s, d = 2.0, 2
    cfg = ExperimentConfig("bump3", d, "cosine", (8, 16, 32, 64, 128), s=s, R=16.0, fft_grid=128)
    rep = run_experiment(cfg)
    assert rep.fitted_slope <= -(0.5 + s / d) + 0.2


# ---------------------------------------------------------------------------
# 5

_EXP_CFG = dict(target="gaussian", dim=1, method="cosine_exp", n_list=(4, 8, 16, 32, 64), beta=0.9, c=1.0, R=32.0)


@criterion(5, "cosine network spectral rate")
def test_spectral_error_beats_tenth_power():
    rep = run_experiment(ExperimentConfig(**_EXP_CFG))
    scaled = rep.ns.astype(float) ** 10 * np.array([r.error_l2 for r in rep.rows])
    assert np.all(np.diff(scaled) < 0)


@criterion(5, "cosine network spectral rate")
def test_spectral_log_linear_in_stretched_n():
    rep = run_experiment(ExperimentConfig(**_EXP_CFG))
    x = rep.ns.astype(float) ** 0.9
    y = np.log([r.error_l2 for r in rep.rows])
    resid = y - np.polyval(np.polyfit(x, y, 1), x)
    r2 = 1 - resid @ resid / np.sum((y - y.mean()) ** 2)
    assert r2 >= 0.95


# ---------------------------------------------------------------------------
# 6

_N = (8, 16, 32, 64, 128)


@criterion(6, "ReLU^k network rate")
def test_relu_rate_1d():
    rep = run_experiment(ExperimentConfig("gaussian", 1, "reluk_greedy", _N, k=1, s=4.0))
    assert rep.fitted_slope <= -1.6


@criterion(6, "ReLU^k network rate")
def test_relu_rate_2d_beats_uniform_grid():
    relu = run_experiment(ExperimentConfig("gaussian", 2, "reluk_greedy", _N, k=1, s=6.0, R=1.5))
    grid = run_experiment(ExperimentConfig("gaussian", 2, "uniform_grid", (2, 4, 8, 16), k=1))
    assert relu.fitted_slope <= -1.2
    assert relu.fitted_slope < grid.fitted_slope


# ---------------------------------------------------------------------------
# 7

_NK = (4, 8, 16, 32, 64)


@criterion(7, "free-knot saturation")
@pytest.mark.parametrize("k", [0, 1])
def test_free_knot_slope(k):
    rep = run_experiment(ExperimentConfig("cossum", 1, "free_knot", _NK, k=k))
    assert abs(rep.fitted_slope + (k + 1)) <= 0.3


@criterion(7, "free-knot saturation")
@pytest.mark.parametrize("k", [0, 1])
def test_relu_does_not_beat_saturation(k):
    rep = run_experiment(ExperimentConfig("cossum", 1, "reluk_greedy", _NK, k=k, s=4.0))
    assert rep.fitted_slope >= -(k + 1) - 0.3


# ---------------------------------------------------------------------------
# 8


@criterion(8, "exponent calculator")
@pytest.mark.parametrize(
    "args,expected",
    [
        ((4.0, 0, 1, 1, "reluk_greedy"), (2.0, 1.0)),
        ((1.0, 0, 0, 3, "reluk_greedy"), (0.625, 0.0)),
        ((3.5, 0, 1, 1, "reluk_greedy"), (2.0, 2.5)),
        ((2.0, 0, 1, 2, "cosine"), (1.5, 0.0)),
    ],
)
def test_predicted_exponents(args, expected):
    assert predict_exponents(*args) == expected


@criterion(8, "exponent calculator")
def test_case_boundary_continuity(rng):
    for _ in range(10):
        d, k = int(rng.integers(1, 6)), int(rng.integers(0, 4))
        m = int(rng.integers(0, k + 1))
        T = (d + 1) * (k - m + 0.5) + m + 0.5
        low = 0.5 + (2 * (T - m) - 1) / (2 * (d + 1))
        high = 0.5 + (k - m + 0.5)
        assert low == pytest.approx(high, abs=1e-12)
        assert predict_exponents(T, m, k, d, "reluk_greedy")[0] == pytest.approx(high, abs=1e-12)


# ---------------------------------------------------------------------------
# 9


def _random_expansion(rng, size, d, L=2.0):
    nus = set()
    while len(nus) < size:
        nus.add(tuple(int(v) for v in rng.integers(-size, size + 1, d)))
    coeffs = rng.normal(size=size) + 1j * rng.normal(size=size)
    return LatticeExpansion(L, rng.uniform(0, 1 / L, d), sorted(nus), coeffs, np.inf)


@criterion(9, "cross-oracle agreement")
def test_orthogonal_error_matches_quadrature(rng):
    for trial in range(20):
        d = 1 + trial % 2
        m = (trial // 2) % 2
        exp = _random_expansion(rng, 12 if d == 1 else 20, d)
        net = greedy_truncate(exp, 5, s=1.0, m=m)
        rest = CosineNetwork(exp.coeffs, exp.frequencies)
        grid = gauss_legendre(d, 24, 8, lo=0.0, hi=exp.L)

        def resid(x):
            return rest(x) - net(x)

        def resid_grad(x):
            return rest.gradient(x) - net.gradient(x)

        quad = hm_norm(resid, grid, m, grad=resid_grad)
        assert hm_error_orthogonal(exp, net, m) == pytest.approx(quad, rel=1e-6)


@criterion(9, "cross-oracle agreement")
@pytest.mark.parametrize("size", [6, 9, 12])
def test_greedy_is_best_subset(size, rng):
    exp = _random_expansion(rng, size, 1)
    for n in range(1, size):
        best = np.inf
        for idx in itertools.combinations(range(size), n):
            idx = np.array(idx)
            sub = CosineNetwork(exp.coeffs[idx], exp.frequencies[idx], exp.nus[idx])
            best = min(best, hm_error_orthogonal(exp, sub, 0))
        assert hm_error_orthogonal(exp, greedy_truncate(exp, n), 0) <= best + 1e-12


# ---------------------------------------------------------------------------
# 10


@criterion(10, "determinism")
@pytest.mark.parametrize(
    "fields",
    [
        dict(target="gaussian", dim=2, method="reluk_greedy", n_list=(8, 16, 32), s=2.0, R=2.0, L_max=3),
        dict(target="bump3", dim=1, method="reluk_stratified", n_list=(8, 16, 32, 64), s=1.0, seed=7),
        dict(target="gaussian", dim=1, method="cosine", n_list=(4, 8, 16), s=1.0),
    ],
)
def test_byte_identical_csv(fields, tmp_path):
    texts = []
    for run, threads in enumerate((1, 1, 4)):
        path = tmp_path / f"run{run}.csv"
        emit_csv(run_experiment(ExperimentConfig(**fields, threads=threads)), path)
        texts.append(path.read_bytes())
    assert texts[0] == texts[1] == texts[2]
