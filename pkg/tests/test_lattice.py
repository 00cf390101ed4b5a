import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgerate.errors import ParameterError
from ridgerate.lattice import (
    LatticeExpansion,
    candidate_masses,
    default_fft_grid,
    lattice_coefficients,
    lattice_dft,
    make_cutoff,
    shift_candidates,
    shift_search,
)
from ridgerate.oracles import gauss_legendre
from ridgerate.targets import exponential_wave, gaussian, get_target


class TestCutoff:
    def test_examples(self):
        phi = make_cutoff(L=2, eps=0.25)
        assert phi(0.5)[0] == 1.0
        assert phi(1.9)[0] == 0.0
        # the transition band is (L - 7 eps / 4, L - 5 eps / 4) = (1.5625, 1.6875)
        assert 0.0 < phi(1.65)[0] < 1.0
        assert phi(1.74)[0] == 0.0

    @pytest.mark.xfail(strict=True, reason="1.74 lies beyond the mollified support, which ends at 1.6875")
    def test_value_inside_outer_band(self):
        assert 0.0 < make_cutoff(L=2, eps=0.25)(1.74)[0] < 1.0

    def test_infeasible_geometry(self):
        with pytest.raises(ParameterError, match="cutoff geometry infeasible"):
            make_cutoff(L=1.4, eps=0.25)
        with pytest.raises(ParameterError):
            make_cutoff(alpha=1.0)

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_invariants_on_random_sample(self, dim, rng):
        phi = make_cutoff(dim=dim)
        inside = rng.uniform(0, 1, (1000, dim))
        np.testing.assert_array_equal(phi(inside), 1.0)
        wide = rng.uniform(-1, 3, (1000, dim))
        v = phi(wide)
        assert np.all((v >= 0) & (v <= 1))
        out = np.any((wide < -phi.eps) | (wide > phi.L - phi.eps), axis=1)
        np.testing.assert_array_equal(v[out], 0.0)

    def test_profile_is_smooth_transition(self):
        phi = make_cutoff()
        t = np.linspace(phi.plateau[1], phi.support[1], 200)
        assert np.all(np.diff(phi.profile(t)) <= 1e-15)

    def test_transform_decay_envelope(self):
        """``|phi_hat(xi)| <= C exp(-c |xi|^(1/2))`` with C, c fitted at xi = 1, 2."""
        phi = make_cutoff(alpha=2.0)
        v1, v2 = np.abs(phi.profile_transform([1.0, 2.0], 16384))
        c = (np.log(v1) - np.log(v2)) / (np.sqrt(2) - 1)
        C = v1 * np.exp(c)
        assert c > 0
        xi = np.concatenate([[4.0, 8.0, 16.0, 32.0], np.linspace(4, 32, 57) + 0.13])
        vals = np.abs(phi.profile_transform(xi, 16384))
        assert np.all(vals <= C * np.exp(-c * np.sqrt(xi)))

    def test_transform_total_mass(self):
        phi = make_cutoff()
        # phi_hat(0) is the integral of the profile: L - eps for this construction
        assert phi.profile_transform([0.0])[0].real == pytest.approx(phi.L - phi.eps, rel=1e-10)


class TestLatticeCoefficients:
    def test_exponential_reconstruction(self):
        f = exponential_wave([1])
        phi = make_cutoff()
        grid = gauss_legendre(1, 512)

        def err(exp):
            return np.sqrt(grid.integrate(np.abs(exp(grid.points) - f(grid.points)) ** 2).real)

        assert err(lattice_coefficients(f, phi, [0.0], R=4)) <= 1e-6
        # the cutoff route converges too, at the cutoff's sub-exponential rate
        errs = [err(lattice_coefficients(f, phi, [0.0], R=R, method="cutoff")) for R in (4, 8, 16, 32)]
        assert np.all(np.diff(errs) < 0)
        assert errs[-1] < 1e-3

    def test_exact_atoms(self):
        exp = lattice_coefficients(exponential_wave([1]), make_cutoff(), [0.0], R=4)
        assert exp.exact
        assert exp.coefficients == {(2,): 1.0}

    def test_zero_target(self):
        f = exponential_wave([1])
        zero = type(f)("zero", 1, lambda x: np.zeros(len(x), complex), lambda xi: np.zeros(len(xi), complex))
        exp = lattice_coefficients(zero, make_cutoff(), R=4, threshold=0.0)
        np.testing.assert_array_equal(exp.coeffs, 0)

    def test_aliasing_error(self):
        with pytest.raises(ParameterError, match="aliasing: grid under-resolves radius"):
            lattice_coefficients(gaussian(1), make_cutoff(), R=8, fft_grid=32)

    def test_non_power_of_two_grid(self):
        with pytest.raises(ParameterError):
            lattice_coefficients(gaussian(1), make_cutoff(), R=2, fft_grid=100)

    def test_shift_out_of_range(self):
        with pytest.raises(ParameterError):
            lattice_coefficients(gaussian(1), make_cutoff(), a=[0.6], R=2)

    def test_convolution_cross_check(self):
        """For f = exp(2 pi i x) the cutoff route gives L^-1 phi_hat(a + xi - 1)."""
        f = exponential_wave([1])
        phi = make_cutoff()
        a = 0.1875
        exp = lattice_coefficients(f, phi, [a], R=6, method="cutoff", fft_grid=2048, threshold=0.0)
        theta = exp.frequencies[:, 0]
        ref = phi.profile_transform(theta - 1.0, 16384) / phi.L
        np.testing.assert_allclose(exp.coeffs, ref, atol=1e-10)

    def test_parseval(self):
        f = gaussian(2)
        phi = make_cutoff(dim=2)
        N = 64
        nus, coeffs, samples = lattice_dft(f, phi, [0.1, 0.2], N)
        lhs = np.sum(np.abs(coeffs) ** 2) * phi.L**2
        rhs = np.sum(np.abs(samples) ** 2) * (phi.L / N) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_mass_partial_sums_nondecreasing(self):
        f = gaussian(1)
        phi = make_cutoff()
        a = shift_search(f, phi, 0.0, R=16, candidates=8)
        masses = [lattice_coefficients(f, phi, a, R=R).weighted_mass(0.0) for R in (2, 4, 8, 16)]
        assert np.all(np.diff(masses) >= 0)

    def test_mass_stabilises_between_8_and_16_frozen(self):
        """Frozen difference of the unweighted mass at R = 8 and R = 16.

        The cutoff transform decays like exp(-c sqrt|xi|), so the tail
        beyond 8 is still of order 1e-2 for the default parameters.
        """
        f = gaussian(1)
        phi = make_cutoff()
        a = shift_search(f, phi, 0.0, R=16, candidates=8)
        m8 = lattice_coefficients(f, phi, a, R=8).weighted_mass(0.0)
        m16 = lattice_coefficients(f, phi, a, R=16).weighted_mass(0.0)
        assert m16 - m8 == pytest.approx(0.0093768, rel=1e-4)

    @pytest.mark.xfail(strict=True, reason="cutoff tail beyond |xi| = 8 carries about 9e-3 of mass")
    def test_mass_stabilises_between_8_and_16(self):
        f = gaussian(1)
        phi = make_cutoff()
        a = shift_search(f, phi, 0.0, R=16, candidates=8)
        m8 = lattice_coefficients(f, phi, a, R=8).weighted_mass(0.0)
        m16 = lattice_coefficients(f, phi, a, R=16).weighted_mass(0.0)
        assert abs(m16 - m8) <= 1e-4

    def test_default_grid(self):
        assert default_fft_grid(1, 2.0, 4.0) == 1024
        assert default_fft_grid(2, 2.0, 40.0) == 256
        assert default_fft_grid(3, 2.0, 4.0) == 32


class TestShiftSearch:
    def test_single_candidate(self):
        a = shift_search(gaussian(2), make_cutoff(dim=2), 0.0, R=2, candidates=1)
        np.testing.assert_array_equal(a, [0.0, 0.0])

    def test_exponential_dominates_origin(self):
        f = exponential_wave([1])
        phi = make_cutoff()
        a = shift_search(f, phi, 0.0, R=4, candidates=8)
        m_best = lattice_coefficients(f, phi, a, R=4).weighted_mass(0.0)
        m_zero = lattice_coefficients(f, phi, [0.0], R=4).weighted_mass(0.0)
        assert m_best <= m_zero

    def test_minimiser_below_average(self):
        f = gaussian(1)
        phi = make_cutoff()
        shifts, masses, _ = candidate_masses(f, phi, s=2.0, R=8, candidates=8)
        assert len(masses) == 8
        a = shift_search(f, phi, 2.0, R=8, candidates=8)
        i = int(np.argmin(masses))
        np.testing.assert_array_equal(a, shifts[i])
        assert masses[i] <= masses.mean()

    def test_candidates_grid(self):
        sh = shift_candidates(2, 2.0, 4)
        assert sh.shape == (16, 2)
        assert sh.max() < 0.5 and sh.min() == 0.0


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-50, 50), min_size=3, max_size=3),
    st.lists(st.floats(-50, 50), min_size=3, max_size=3),
)
def test_submultiplicative_weight(xi, om):
    xi, om = np.array(xi), np.array(om)
    lhs = 1 + np.linalg.norm(xi + om)
    rhs = (1 + np.linalg.norm(xi)) * (1 + np.linalg.norm(om))
    assert lhs <= rhs * (1 + 1e-12)


def test_expansion_sorted_and_restrict():
    exp = LatticeExpansion(2.0, [0.0], [[3], [-1], [0]], [1.0, 2.0, 3.0], 4.0)
    np.testing.assert_array_equal(exp.nus[:, 0], [-1, 0, 3])
    np.testing.assert_array_equal(exp.coeffs, [2.0, 3.0, 1.0])
    sub = exp.restrict(np.array([True, False, True]))
    assert sub.coefficients == {(-1,): 2.0, (3,): 1.0}


@pytest.mark.parametrize("name", ["gaussian", "bump3"])
def test_reconstruction_small_in_2d(name):
    f = get_target(name, 2)
    phi = make_cutoff(dim=2)
    exp = lattice_coefficients(f, phi, [0.0, 0.0], R=8)
    grid = gauss_legendre(2, 24)
    err = np.sqrt(grid.integrate(np.abs(exp(grid.points) - f(grid.points)) ** 2).real)
    assert err < 5e-3
