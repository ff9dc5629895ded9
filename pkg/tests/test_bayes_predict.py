import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussbayes import selftest
from gaussbayes.bayes_predict import (
    PriorParams,
    exchangeable_state,
    plugin_predictive,
    posterior_density,
    posterior_update,
    predictive_joint_fock,
    predictive_joint_pdensity,
    predictive_mmode,
    predictive_single_mode,
    reduce_predictive_risk,
    joint_quadratic_form,
)
from gaussbayes.gaussian_states import GaussianParams, gaussian_state_fock, product_state, rel_entropy_closed, thermal_fock
from gaussbayes.heterodyne import HeterodyneSample, log_likelihood

complexes = st.builds(complex, st.floats(-3, 3), st.floats(-3, 3))


def brute_force_posterior_moments(prior, alphas, N, half=8.0, pts=801):
    """Posterior mean and per-component variance from likelihood x prior on a grid."""
    x = np.linspace(-half, half, pts)
    T = prior.xi + x[:, None] + 1j * x[None, :]
    logp = log_likelihood(HeterodyneSample(alphas), T, N) - np.abs(T - prior.xi) ** 2 / (2 * prior.tau2)
    w = np.exp(logp - logp.max())
    w /= w.sum()
    mean = (w * T).sum()
    var = (w * (T.real - mean.real) ** 2).sum()
    return mean, var


class TestPosterior:
    def test_worked_example(self):
        post = posterior_update(PriorParams(0, 1.0), [2.0], 1.0)
        assert post.theta_bar == pytest.approx(1.0)
        assert post.delta2 == pytest.approx(0.5)
        mean, var = brute_force_posterior_moments(PriorParams(0, 1.0), [2.0], 1.0)
        assert mean == pytest.approx(1.0, abs=1e-8)
        assert var == pytest.approx(0.5, abs=1e-8)

    def test_brute_force_general(self):
        prior = PriorParams(0.3 - 0.2j, 0.7)
        alphas = [0.5 + 0.1j, -0.2 + 0.9j, 1.1 - 0.3j]
        post = posterior_update(prior, alphas, 0.6)
        mean, var = brute_force_posterior_moments(prior, alphas, 0.6)
        assert post.theta_bar == pytest.approx(mean, abs=1e-8)
        assert post.delta2 == pytest.approx(var, abs=1e-8)

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_flat_prior(self, n):
        alphas = np.linspace(-1, 1, n) + 0.3j
        post = posterior_update(PriorParams(noninformative=True), alphas, 1.5)
        assert post.theta_bar == pytest.approx(alphas.mean())
        assert 2 * post.delta2 == pytest.approx(2.5 / n)

    def test_flat_prior_one_sample_exact(self):
        for N in (0.5, 1.0, 2.0, 3.7):
            post = posterior_update(PriorParams(noninformative=True), [0.2], N)
            assert 2 * post.delta2 == N + 1

    def test_large_tau2_limit(self):
        alphas = [0.4 + 0.2j, -0.1j]
        a = posterior_update(PriorParams(1 + 1j, 1e12), alphas, 1.0)
        b = posterior_update(PriorParams(noninformative=True), alphas, 1.0)
        assert abs(a.theta_bar - b.theta_bar) <= 1e-9
        assert abs(a.delta2 - b.delta2) <= 1e-9

    def test_rejects_zero_tau2(self):
        with pytest.raises(ValueError):
            PriorParams(0, 0.0)

    def test_width_bound(self):
        for tau2 in (0.01, 1.0, 1e6):
            post = posterior_update(PriorParams(0, tau2), [0.1, 0.2, 0.3], 2.0)
            assert post.delta2 <= 3.0 / (2 * 3)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(complexes, min_size=1, max_size=8), complexes, st.floats(0.05, 20), st.floats(0.1, 5))
    def test_sequential_equals_batch(self, alphas, xi, tau2, N):
        prior = PriorParams(xi, tau2)
        batch = posterior_update(prior, alphas, N)
        seq = prior
        for a in alphas:
            post = posterior_update(seq, [a], N)
            seq = post.as_prior()
        assert post.theta_bar == pytest.approx(batch.theta_bar, abs=1e-12)
        assert post.delta2 == pytest.approx(batch.delta2, rel=1e-12)

    def test_density_mode_and_mass(self):
        post = posterior_update(PriorParams(0.5, 2.0), [0.1, 1.2j], 1.0)
        assert posterior_density(post.theta_bar, post) == pytest.approx(1 / (2 * math.pi * post.delta2))
        half = 12 * math.sqrt(post.delta2)
        x, w = np.polynomial.legendre.leggauss(200)
        pts = post.theta_bar + half * (x[:, None] + 1j * x[None, :])
        wts = half * half * np.outer(w, w)
        dens = posterior_density(pts, post)
        assert (wts * dens).sum() == pytest.approx(1.0, abs=1e-9)
        assert (wts * dens * np.abs(pts - post.theta_bar) ** 2).sum() == pytest.approx(2 * post.delta2, abs=1e-9)

    def test_bayes_rule(self):
        prior = PriorParams(-0.2 + 0.4j, 1.3)
        s = HeterodyneSample([0.3, 0.9 - 0.5j, -0.4j])
        N = 0.8
        post = posterior_update(prior, s, N)
        thetas = np.linspace(-2, 2, 9)[:, None] + 1j * np.linspace(-2, 2, 9)[None, :]
        lhs = np.log(posterior_density(thetas, post))
        rhs = log_likelihood(s, thetas, N) + np.log(prior.density(thetas))
        diff = lhs - rhs
        np.testing.assert_allclose(diff, diff.flat[0], atol=1e-10)


class TestPredictives:
    def test_plugin_copies(self):
        assert plugin_predictive(0, 1.0, 3) == [GaussianParams(0, 1.0)] * 3
        assert plugin_predictive(0.4j, 2.0, 1) == [GaussianParams(0.4j, 2.0)]

    def test_plugin_fock_trace(self):
        for p in plugin_predictive(0.5, 1.0, 2):
            assert abs(gaussian_state_fock(p, 40).trace_deficit) <= 1e-8

    def test_single_mode_worked_example(self):
        post = posterior_update(PriorParams(0, 1.0), [2.0], 1.0)
        assert predictive_single_mode(post) == GaussianParams(1.0, 2.0)

    def test_flat_prior_photon_number(self):
        for N in (0.5, 1.0, 2.0):
            post = posterior_update(PriorParams(noninformative=True), [0.3], N)
            assert predictive_single_mode(post).photon_number == pytest.approx(2 * N + 1, abs=1e-14)

    def test_point_prior_limit(self):
        post = posterior_update(PriorParams(0.2, 1e-12), [3.0], 1.0)
        pred = predictive_single_mode(post)
        assert pred.photon_number == pytest.approx(1.0, abs=1e-10)
        assert pred.mean == pytest.approx(0.2, abs=1e-10)

    def test_center_of_mass_parameters(self):
        post = posterior_update(PriorParams(0.1, 1.0), [0.5], 1.0)
        com = predictive_single_mode(post, 3)
        assert com.mean == pytest.approx(math.sqrt(3) * post.theta_bar)
        assert com.photon_number == pytest.approx(1.0 + 6 * post.delta2)


class TestJointDensity:
    def test_coefficients(self):
        post = posterior_update(PriorParams(0, 2.0), [0.5, 0.1j], 0.7)
        pred = predictive_mmode(post, 3)
        assert 3 * pred.p + pred.q == pytest.approx(1, abs=1e-12)
        one = predictive_mmode(post, 1)
        assert one.p + one.q == pytest.approx(1, abs=1e-12)
        assert 1 / pred.delta2_tilde == pytest.approx(1 / post.delta2 + 3 / (0.7 / 2))

    def test_m1_collapse(self):
        assert selftest.collapse_deviation(configs=5, points=100) <= 1e-12

    def test_maximal_at_mean(self):
        post = posterior_update(PriorParams(0.3, 1.0), [0.2], 1.0)
        pred = predictive_mmode(post, 2)
        peak = predictive_joint_pdensity(pred, [post.theta_bar] * 2)
        for shift in (0.1, -0.3j, 1 + 1j):
            assert predictive_joint_pdensity(pred, [post.theta_bar + shift] * 2) < peak

    def test_length_mismatch(self):
        pred = predictive_mmode(posterior_update(PriorParams(), [0.0], 1.0), 2)
        with pytest.raises(ValueError):
            predictive_joint_pdensity(pred, [0.0, 0.0, 0.0])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 4), st.lists(complexes, min_size=4, max_size=4), st.floats(0.1, 3), st.floats(0.1, 10))
    def test_quadratic_form_nonnegative(self, m, betas, N, tau2):
        post = posterior_update(PriorParams(0.5j, tau2), [0.3], N)
        pred = predictive_mmode(post, m)
        assert joint_quadratic_form(pred, np.array(betas[:m])) >= -1e-12

    @pytest.mark.parametrize("case", selftest.TWO_MODE_CASES)
    def test_m2_normalization_and_covariance(self, case):
        n, N, tau2, xi, outcomes, _ = case
        post = posterior_update(PriorParams(xi, tau2), outcomes, N)
        pred = predictive_mmode(post, 2)
        mass, mean, cov = selftest.joint_density_moments(pred, order=24)
        assert abs(mass - 1) <= 1e-6
        np.testing.assert_allclose(mean, [post.theta_bar] * 2, atol=1e-8)
        np.testing.assert_allclose(cov, N * np.eye(2) + 2 * post.delta2 * np.ones((2, 2)), atol=1e-8)

    def test_hierarchical_form(self):
        # posterior mixture of independent N(theta, N) amplitudes, integrated by brute force over theta
        post = posterior_update(PriorParams(0.1, 0.8), [0.4 - 0.2j], 1.2)
        pred = predictive_mmode(post, 2)
        half = 10 * math.sqrt(post.delta2)
        x, w = np.polynomial.legendre.leggauss(120)
        T = post.theta_bar + half * (x[:, None] + 1j * x[None, :])
        W = half * half * np.outer(w, w) * posterior_density(T, post)
        for beta in ([0.0, 0.0], [0.5 + 0.5j, -0.2], [1.3, 1.1j]):
            inner = np.prod([np.exp(-np.abs(b - T) ** 2 / 1.2) / (math.pi * 1.2) for b in beta], axis=0)
            assert predictive_joint_pdensity(pred, beta) == pytest.approx((W * inner).sum(), rel=1e-9)


class TestJointFock:
    def test_m1_matches_gaussian_state(self):
        post = posterior_update(PriorParams(0.2, 1.0), [0.6 - 0.3j], 1.0)
        sigma = predictive_joint_fock(predictive_mmode(post, 1), 40)
        ref = gaussian_state_fock(predictive_single_mode(post), 40, check_guard=False)
        assert np.linalg.norm(sigma.matrix - ref.matrix) <= 1e-7

    @pytest.mark.slow
    def test_m2_swap_symmetry_and_trace(self):
        post = posterior_update(PriorParams(0, 1.0), [0.7], 1.0)
        sigma = predictive_joint_fock(predictive_mmode(post, 2), 16)
        S = sigma.matrix.reshape(16, 16, 16, 16)
        np.testing.assert_allclose(S, S.transpose(1, 0, 3, 2), atol=1e-8)
        assert np.linalg.eigvalsh(sigma.matrix)[0] >= -1e-8

    def test_m2_unit_trace(self):
        post = posterior_update(PriorParams(0, 0.5), [0.2], 0.5)
        sigma = predictive_joint_fock(predictive_mmode(post, 2), 24)
        # per-mode marginal photon number N + 2 delta2; trace deficit stays tiny
        assert abs(sigma.trace_deficit) <= 1e-6

    def test_m3_small(self):
        post = posterior_update(PriorParams(0, 1.0), [0.3], 0.5)
        sigma = predictive_joint_fock(predictive_mmode(post, 3), 6)
        assert sigma.dim == 216
        assert np.linalg.eigvalsh(sigma.matrix)[0] >= -1e-8

    def test_limits(self):
        post = posterior_update(PriorParams(), [0.0], 1.0)
        with pytest.raises(ValueError):
            predictive_joint_fock(predictive_mmode(post, 4), 4)
        with pytest.raises(ValueError, match="cap"):
            predictive_joint_fock(predictive_mmode(post, 3), 20)


class TestReduction:
    def test_m1_is_plain_divergence(self):
        post = posterior_update(PriorParams(0, 1.0), [0.5], 1.0)
        val = reduce_predictive_risk(0.3, post, 1)
        expected = rel_entropy_closed(GaussianParams(0.3, 1.0), predictive_single_mode(post))
        assert val == pytest.approx(expected, abs=1e-15)

    def test_at_posterior_mean(self):
        post = posterior_update(PriorParams(0, 1.0), [0.5], 1.0)
        val = reduce_predictive_risk(post.theta_bar, post, 2)
        assert val == pytest.approx(rel_entropy_closed(GaussianParams(0, 1.0), GaussianParams(0, 1.0 + 4 * post.delta2)))
        assert val > 0

    @pytest.mark.slow
    @pytest.mark.parametrize("case", selftest.TWO_MODE_CASES)
    def test_two_mode_numeric(self, case):
        dev, numeric, reduced = selftest.two_mode_deviation(case, dim_per_mode=24)
        assert dev <= 1e-4

    def test_two_mode_numeric_small(self):
        # cheaper version of the same oracle at a coarser cutoff
        dev, _, _ = selftest.two_mode_deviation(selftest.TWO_MODE_CASES[0], dim_per_mode=16)
        assert dev <= 1e-3


class TestExchangeable:
    def test_point_prior(self):
        ex = exchangeable_state(PriorParams(0, 1e-12), 1.0, 1, 40)
        np.testing.assert_allclose(ex.matrix, thermal_fock(1.0, 40).matrix, atol=1e-6)

    def test_adds_variances(self):
        ex = exchangeable_state(PriorParams(0, 0.5), 1.0, 1, 40)
        np.testing.assert_allclose(ex.matrix, gaussian_state_fock(GaussianParams(0, 2.0), 40).matrix, atol=1e-6)

    def test_displaced_prior(self):
        ex = exchangeable_state(PriorParams(0.5 - 0.2j, 0.3), 0.7, 1, 40)
        ref = gaussian_state_fock(GaussianParams(0.5 - 0.2j, 1.3), 40)
        np.testing.assert_allclose(ex.matrix, ref.matrix, atol=1e-8)

    def test_two_modes_symmetric(self):
        ex = exchangeable_state(PriorParams(0.2, 0.5), 1.0, 2, 12)
        S = ex.matrix.reshape(12, 12, 12, 12)
        np.testing.assert_allclose(S, S.transpose(1, 0, 3, 2), atol=1e-8)
        # per-mode photon number 2: truncation at 12 levels drops about 2 (2/3)^12 of the trace
        assert 0.97 <= np.trace(ex.matrix).real <= 1

    def test_two_modes_reduce_to_marginal(self):
        ex = exchangeable_state(PriorParams(0.2, 0.5), 1.0, 2, 14)
        marginal = np.einsum("aibi->ab", ex.matrix.reshape(14, 14, 14, 14))
        ref = gaussian_state_fock(GaussianParams(0.2, 2.0), 14, check_guard=False)
        # partial trace of the truncated product loses the tail of the traced mode
        np.testing.assert_allclose(marginal[:6, :6], ref.matrix[:6, :6], atol=1e-3)

    def test_flat_prior_rejected(self):
        with pytest.raises(ValueError):
            exchangeable_state(PriorParams(noninformative=True), 1.0, 1, 40)

    def test_too_many_modes(self):
        with pytest.raises(ValueError):
            exchangeable_state(PriorParams(), 1.0, 3, 8)


def test_product_state_two_mode_guard():
    one = gaussian_state_fock(GaussianParams(0.3, 1.0), 24, check_guard=False)
    assert product_state([one, one]).dim == 576
