import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgerate.cosine_net import (
    CosineNetwork,
    ExponentialWeight,
    greedy_order,
    greedy_truncate,
    hm_error_orthogonal,
    ordering_keys,
)
from ridgerate.errors import ParameterError
from ridgerate.lattice import LatticeExpansion, lattice_coefficients, make_cutoff
from ridgerate.oracles import gauss_legendre
from ridgerate.targets import gaussian


def _expansion(nus, coeffs, L=2.0, shift=None, d=1):
    shift = np.zeros(d) if shift is None else shift
    return LatticeExpansion(L, shift, nus, coeffs, radius=np.inf)


def _random_expansion(rng, size, d=1, L=2.0):
    nus = set()
    while len(nus) < size:
        nus.add(tuple(rng.integers(-size, size + 1, d)))
    nus = np.array(sorted(nus))
    coeffs = rng.normal(size=size) + 1j * rng.normal(size=size)
    return _expansion(nus, coeffs, L, rng.uniform(0, 1 / L, d), d)


class TestGreedyTruncate:
    def test_keeps_larger_key(self):
        exp = _expansion([[0], [1]], [1.0, 0.1])
        net = greedy_truncate(exp, 1, s=0, m=0)
        np.testing.assert_array_equal(net.nus, [[0]])

    def test_polynomial_key_arithmetic(self):
        # xi = 4 is nu = 8 on the L = 2 lattice
        exp = _expansion([[0], [8]], [0.1, 0.9])
        keys = ordering_keys(exp, s=2, m=0)
        np.testing.assert_allclose(keys, [0.1, 0.9 / 25])
        net = greedy_truncate(exp, 1, s=2, m=0)
        np.testing.assert_array_equal(net.nus, [[0]])

    def test_full_selection_reproduces_expansion(self, rng):
        exp = _random_expansion(rng, 15, d=2)
        net = greedy_truncate(exp, len(exp))
        x = rng.uniform(0, 1, (50, 2))
        np.testing.assert_allclose(net(x), exp(x), atol=1e-12)
        assert hm_error_orthogonal(exp, net, 0) == 0.0

    def test_ties_broken_lexicographically(self):
        exp = _expansion([[-1], [0], [1]], [1.0, 1.0, 1.0])
        order = greedy_order(exp)
        np.testing.assert_array_equal(exp.nus[order, 0], [-1, 0, 1])

    def test_too_small(self):
        exp = _expansion([[0]], [1.0])
        with pytest.raises(ParameterError, match="expansion too small for n"):
            greedy_truncate(exp, 2)

    def test_m_exceeds_s(self):
        exp = _expansion([[0]], [1.0])
        with pytest.raises(ParameterError):
            greedy_truncate(exp, 1, s=0.5, m=1)

    def test_exponential_key(self):
        exp = _expansion([[0], [4]], [0.2, 1.0], shift=np.array([0.25]))
        w = ExponentialWeight(0.9, 1.0)
        keys = ordering_keys(exp, m=0, weight=w)
        theta = np.array([0.25, 2.25])
        np.testing.assert_allclose(keys, np.exp(-(theta**0.9)) * [0.2, 1.0])

    def test_exponential_weight_validation(self):
        with pytest.raises(ParameterError):
            ExponentialWeight(1.5, 1.0)
        with pytest.raises(ParameterError):
            ExponentialWeight(0.5, 0.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 20), st.integers(0, 2**31 - 1))
    def test_mass_bounded_by_expansion(self, n, seed):
        exp = _random_expansion(np.random.default_rng(seed), 20)
        net = greedy_truncate(exp, n, s=1.0)
        assert net.ell1_mass <= exp.weighted_mass(0.0) + 1e-12
        assert len(np.unique(net.frequencies, axis=0)) == len(net)


class TestEvaluate:
    def test_constant_term(self):
        net = CosineNetwork([1.0], [[0.0]])
        np.testing.assert_allclose(net(np.array([0.3, 0.9])), 1.0)

    def test_cosine_identity(self):
        net = CosineNetwork([0.5, 0.5], [[1.0], [-1.0]])
        assert abs(net(0.25)[0]) < 1e-15

    def test_random_against_loop(self, rng):
        amp = rng.normal(size=5) + 1j * rng.normal(size=5)
        fr = rng.normal(size=(5, 1)) * 3
        net = CosineNetwork(amp, fr)
        ref = sum(a * np.exp(2j * np.pi * f[0] * 0.3) for a, f in zip(amp, fr))
        assert net(0.3)[0] == pytest.approx(ref, abs=1e-13)

    def test_cosine_mode_matches(self, rng):
        net = CosineNetwork(rng.normal(size=7) + 1j * rng.normal(size=7), rng.normal(size=(7, 2)))
        x = rng.uniform(0, 1, (30, 2))
        np.testing.assert_allclose(net.evaluate(x, "cos"), net.evaluate(x, "exp"), atol=1e-12)

    def test_dimension_mismatch(self):
        net = CosineNetwork([1.0], [[0.0, 1.0]])
        with pytest.raises(ParameterError):
            net(np.zeros((3, 3)))

    def test_ell1_mass(self, rng):
        amp = rng.normal(size=9) + 1j * rng.normal(size=9)
        net = CosineNetwork(amp, rng.normal(size=(9, 1)))
        assert net.ell1_mass == pytest.approx(np.abs(amp).sum(), rel=1e-12)

    def test_gradient(self, rng):
        net = CosineNetwork(rng.normal(size=4) + 0j, rng.normal(size=(4, 2)))
        x = rng.uniform(0, 1, (10, 2))
        h = 1e-6
        for r in range(2):
            e = np.zeros(2)
            e[r] = h
            np.testing.assert_allclose(net.gradient(x)[:, r], (net(x + e) - net(x - e)) / (2 * h), atol=1e-6)


class TestOrthogonalError:
    def test_nothing_discarded(self):
        exp = _expansion([[0], [1]], [0.3, 0.4])
        assert hm_error_orthogonal(exp, greedy_truncate(exp, 2), 0) == 0.0

    def test_single_discarded_constant(self):
        exp = _expansion([[0], [1]], [0.5, 1.0])
        net = greedy_truncate(exp, 1)
        np.testing.assert_array_equal(net.nus, [[1]])
        assert hm_error_orthogonal(exp, net, 0) == pytest.approx(0.5 * np.sqrt(2), rel=1e-15)

    def test_m1_dominates_m0(self, rng):
        exp = _random_expansion(rng, 10, d=2)
        net = greedy_truncate(exp, 4, s=1.0, m=1)
        assert hm_error_orthogonal(exp, net, 1) >= hm_error_orthogonal(exp, net, 0)

    def test_mismatch(self):
        exp = _expansion([[0], [1]], [0.5, 1.0])
        with pytest.raises(ParameterError, match="net/expansion mismatch"):
            hm_error_orthogonal(exp, CosineNetwork([0.5], [[0.0]], nus=np.array([[5]])), 0)
        with pytest.raises(ParameterError, match="net/expansion mismatch"):
            hm_error_orthogonal(exp, CosineNetwork([0.9], [[0.0]], nus=np.array([[0]])), 0)

    def test_bounds_unit_cube_error(self):
        f = gaussian(1)
        exp = lattice_coefficients(f, make_cutoff(), [0.0625], R=8)
        grid = gauss_legendre(1, 64, 8)
        for n in (2, 5, 10, 20):
            net = greedy_truncate(exp, n)
            quad = np.sqrt(grid.integrate(np.abs(exp(grid.points) - net(grid.points)) ** 2).real)
            assert hm_error_orthogonal(exp, net, 0) >= quad - 1e-6


def _subset_error(exp, idx, m=0):
    net = CosineNetwork(exp.coeffs[idx], exp.frequencies[idx], exp.nus[idx])
    return hm_error_orthogonal(exp, net, m)


@pytest.mark.parametrize("size,n", [(8, 3), (10, 5), (12, 6)])
def test_greedy_optimal_exhaustive(size, n, rng):
    exp = _random_expansion(rng, size)
    best = min(_subset_error(exp, np.array(c)) for c in itertools.combinations(range(size), n))
    assert hm_error_orthogonal(exp, greedy_truncate(exp, n), 0) <= best + 1e-12


def test_greedy_optimal_sampled(rng):
    exp = _random_expansion(rng, 30, d=2)
    n = 10
    g = hm_error_orthogonal(exp, greedy_truncate(exp, n), 0)
    for _ in range(200):
        idx = np.sort(rng.choice(30, n, replace=False))
        assert g <= _subset_error(exp, idx) + 1e-12
