import math

import numpy as np
import pytest

from gaussbayes.bayes_predict import PriorParams
from gaussbayes.risk import (
    ExperimentConfig,
    inequality_check,
    mc_average,
    mc_risk,
    numeric_replicate_deviation,
    risk_bayes_closed,
    risk_curve,
    risk_plugin_closed,
    risk_report,
    risk_star,
)


def four_term_bayes(N, n, m, tau2):
    """Four-term display of the Bayesian risk, written out independently."""
    delta2 = 1.0 / (2.0 * n / (N + 1) + 1.0 / tau2)
    M = N + 2 * m * delta2
    return (math.log((M + 1) / (N + 1)) + N * math.log(N / (N + 1))
            - N * math.log(M / (M + 1)) - 2 * m * delta2 * math.log(M / (M + 1)))


class TestClosedForms:
    def test_plugin_values(self):
        assert risk_plugin_closed(1, 1, 1) == pytest.approx(2 * math.log(2), abs=1e-12)
        assert risk_plugin_closed(1, 4, 2) == pytest.approx(math.log(2), abs=1e-12)
        assert risk_plugin_closed(1, 1, 1) == pytest.approx(1.386294, abs=1e-6)

    def test_plugin_m_equals_n(self):
        for n in (1, 3, 7):
            assert risk_plugin_closed(1.5, n, n) == pytest.approx(2.5 * math.log(2.5 / 1.5), rel=1e-14)

    def test_plugin_rejects_m0(self):
        with pytest.raises(ValueError):
            risk_plugin_closed(1, 1, 0)

    def test_bayes_unit_point(self):
        # M = 2: log(3/2) + log(1/2) - 2 log(2/3) = 3 log(3/2) - log 2
        r = risk_bayes_closed(1, 1, 1, PriorParams(0, 1.0))
        assert r == pytest.approx(3 * math.log(1.5) - math.log(2), abs=1e-14)
        assert r == pytest.approx(0.523248, abs=1e-6)

    def test_bayes_independent_of_xi(self):
        a = risk_bayes_closed(1, 2, 1, PriorParams(0, 1.0))
        b = risk_bayes_closed(1, 2, 1, PriorParams(3 - 4j, 1.0))
        assert a == b

    @pytest.mark.parametrize("N,n,m,tau2", [(1, 1, 1, 1), (0.5, 2, 1, 10), (2, 3, 3, 1), (1, 4, 2, 1e6)])
    def test_bayes_matches_four_term_display(self, N, n, m, tau2):
        assert risk_bayes_closed(N, n, m, PriorParams(0, tau2)) == pytest.approx(four_term_bayes(N, n, m, tau2), rel=1e-12)

    def test_bayes_point_prior(self):
        assert risk_bayes_closed(1, 1, 1, PriorParams(0, 1e-12)) == pytest.approx(0, abs=1e-10)

    def test_flat_prior_equals_star(self):
        for N in (0.5, 1.0, 2.0):
            r = risk_bayes_closed(N, 1, 1, PriorParams(noninformative=True))
            assert r == pytest.approx(risk_star(N), abs=1e-12)

    def test_star_value(self):
        assert risk_star(1) == pytest.approx(3 * math.log(4 / 3), abs=1e-14)
        assert risk_star(1) == pytest.approx(0.863046, abs=1e-6)

    def test_star_limit(self):
        for N in (0.5, 1.0, 2.0, 5.0):
            assert abs(risk_bayes_closed(N, 1, 1, PriorParams(0, 1e9)) - risk_star(N)) <= 1e-6

    def test_star_below_plugin(self):
        for N in np.geomspace(0.01, 100, 30):
            assert risk_star(N) < risk_plugin_closed(N, 1, 1)

    def test_nonnegative(self):
        for N in (0.1, 1, 10):
            for tau2 in (1e-3, 1, 1e3):
                assert risk_bayes_closed(N, 2, 3, PriorParams(0, tau2)) >= 0


class TestInequalities:
    def test_single_mode_grid(self):
        rep = inequality_check([0.5, 1, 2], [0.5, 1, 10], 1, 1)
        assert rep.ok and rep.star_ok
        assert rep.min_margin > 0
        assert len(rep.points) == 9

    def test_general_grid(self):
        rep = inequality_check([0.5, 1, 2], [0.5, 1, 10], 5, 3)
        assert rep.ok
        assert rep.star_ok is None

    def test_flat_point_margin(self):
        rep = inequality_check([1.0], [math.inf], 1, 1)
        assert rep.ok
        assert rep.min_margin == pytest.approx(risk_plugin_closed(1, 1, 1) - risk_star(1), abs=1e-12)

    def test_wide_grid(self):
        Ns = np.geomspace(0.05, 20, 12)
        taus = list(np.geomspace(1e-3, 1e6, 12)) + [math.inf]
        for n, m in ((1, 1), (2, 1), (1, 3), (4, 2)):
            assert inequality_check(Ns, taus, n, m).ok

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            inequality_check([], [1.0], 1, 1)


class TestRiskCurve:
    grid = np.geomspace(1e-3, 1e9, 49)

    def test_columns(self):
        t = risk_curve(1.0, 1, 1, self.grid)
        assert t.shape == (49, 4)
        np.testing.assert_array_equal(t[:, 0], self.grid)
        assert np.all(t[:, 1] == t[0, 1])
        np.testing.assert_allclose(t[:, 3], t[:, 1] - t[:, 2], rtol=0, atol=0)

    @pytest.mark.parametrize("N", [0.5, 1.0, 2.0])
    def test_monotone_with_limit(self, N):
        t = risk_curve(N, 1, 1, self.grid)
        assert np.all(np.diff(t[:, 2]) >= 0)
        assert abs(t[-1, 2] - risk_star(N)) <= 1e-6
        assert np.all(t[:, 3] > 0)

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            risk_curve(1.0, 1, 1, [1.0, 0.5])


class TestConfig:
    def test_rejects_few_samples(self):
        with pytest.raises(ValueError):
            ExperimentConfig(1.0, 1, 1, mc_samples=99)

    def test_rejects_small_dim(self):
        with pytest.raises(ValueError):
            ExperimentConfig(1.0, 1, 1, truncation_dim=20)

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            ExperimentConfig(1.0, 0, 1)
        with pytest.raises(ValueError):
            ExperimentConfig(-1.0, 1, 1)


class TestMonteCarlo:
    def cfg(self, **kw):
        base = dict(N=1.0, n=1, m=1, prior=PriorParams(0, 1.0), mc_samples=20_000, seed=42)
        base.update(kw)
        return ExperimentConfig(**base)

    def test_plugin_agrees(self):
        est, se = mc_risk("plugin", self.cfg())
        assert abs(est - 2 * math.log(2)) <= 3 * se

    def test_bayes_agrees(self):
        est, se = mc_risk("bayes", self.cfg())
        assert abs(est - risk_bayes_closed(1, 1, 1, PriorParams(0, 1.0))) <= 3 * se

    def test_deterministic(self):
        assert mc_risk("bayes", self.cfg()) == mc_risk("bayes", self.cfg())

    def test_worker_count_irrelevant(self):
        cfg = self.cfg(mc_samples=35_000)
        assert mc_risk("plugin", cfg, workers=1) == mc_risk("plugin", cfg, workers=4)

    def test_seed_matters(self):
        assert mc_risk("plugin", self.cfg()) != mc_risk("plugin", self.cfg(seed=43))

    def test_flat_prior_rejected(self):
        with pytest.raises(ValueError):
            mc_risk("plugin", self.cfg(prior=PriorParams(noninformative=True)))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            mc_risk("oracle", self.cfg())

    def test_identities(self):
        cfg = self.cfg(N=1.0, n=4, prior=PriorParams(0.3, 2.0))
        est, se = mc_average("mle_error", cfg)
        assert abs(est - 0.5) <= 3 * se
        delta2 = 1.0 / (4.0 + 0.5)
        est, se = mc_average("posterior_error", cfg)
        assert abs(est - 2 * delta2) <= 3 * se

    def test_report(self):
        rep = risk_report(self.cfg())
        assert rep.inequality_ok
        assert rep.mc_consistent()
        assert rep.r_star == pytest.approx(risk_star(1.0))
        assert rep.numeric_check_deviation <= 1e-6

    def test_report_flat_prior(self):
        rep = risk_report(self.cfg(prior=PriorParams(noninformative=True)))
        assert rep.r_plugin_mc is None and rep.r_bayes_mc is None
        assert rep.r_bayes_closed == pytest.approx(rep.r_star)

    def test_numeric_replicate_multi_mode(self):
        assert numeric_replicate_deviation(self.cfg(m=2)) is None
