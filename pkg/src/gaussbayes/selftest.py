"""Oracle checks comparing every closed form with an independent computation.

Each check returns a :class:`CheckResult`.  Closed forms are looked up
through their modules at call time so that a patched formula is exercised
rather than a stale reference.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import bayes_predict as bp
from . import gaussian_states as gs
from . import risk
from .fock_linalg import annihilation_op
from .quadrature import gauss_hermite_real

GRID_N = (0.5, 1.0, 2.0)
GRID_ZETA = (0j, 1 + 0j, 0.5 + 0.5j)

MC_POINTS = ((1.0, 1, 1, 1.0), (1.0, 4, 2, 1.0), (0.5, 2, 1, 10.0),
             (2.0, 1, 1, 0.5), (1.0, 1, 1, 1e6), (2.0, 3, 3, 1.0))

TWO_MODE_CASES = (
    # (n, N, tau2, xi, outcomes, theta)
    (1, 1.0, 1.0, 0j, (0.7,), 0.3),
    (2, 0.5, 2.0, 0.1j, (0.2 - 0.3j, 0.5 + 0.1j), 0.2 + 0.1j),
    (1, 1.0, 0.5, 0.2, (-0.4 + 0.2j,), -0.1 + 0.3j),
)


@dataclass
class CheckResult:
    name: str
    anchor: str
    ok: bool
    detail: str
    seconds: float = 0.0


# -- building blocks shared with the CLI and tests ---------------------------


def rela_grid_deviations(dim=gs.DEFAULT_DIM, Ns=GRID_N, zetas=GRID_ZETA):
    """Rows ``(zeta, N, zeta', M, closed, numeric, |diff|)`` over the full grid."""
    states = {}
    for N in Ns:
        for z in zetas:
            states[z, N] = gs.gaussian_state_fock(gs.GaussianParams(z, N), dim)
    rows = []
    for N in Ns:
        for M in Ns:
            for z in zetas:
                for zp in zetas:
                    closed = gs.rel_entropy_closed(gs.GaussianParams(z, N), gs.GaussianParams(zp, M))
                    numeric = gs.rel_entropy_numeric(states[z, N], states[zp, M])
                    rows.append((z, N, zp, M, closed, numeric, abs(closed - numeric)))
    return rows


def thermal_trace_deviations(dim=gs.DEFAULT_DIM, Ns=GRID_N, zetas=GRID_ZETA):
    """Largest deviations of the cross trace and coherent log-expectation from matrix numerics."""
    worst_cross = 0.0
    worst_bra_ket = 0.0
    logs = {M: gs.thermal_fock(M, dim).log_matrix for M in Ns}
    for M in Ns:
        for z in zetas:
            vec = gs.coherent_fock(z, dim).amplitudes
            numeric = np.vdot(vec, logs[M] @ vec).real
            worst_bra_ket = max(worst_bra_ket, abs(numeric - gs.log_thermal_expectation(z, M)))
        for N in Ns:
            for eta in zetas:
                rho = gs.gaussian_state_fock(gs.GaussianParams(-eta, N), dim)
                numeric = np.trace(rho.matrix @ logs[M]).real
                worst_cross = max(worst_cross, abs(numeric - gs.cross_trace(N, eta, M)))
    worst_entropy = max(abs(-gs.cross_trace(N, 0, N) - gs.thermal_entropy(N)) for N in Ns)
    return worst_cross, worst_bra_ket, worst_entropy


def collapse_deviation(configs=5, points=100, seed=7):
    """Largest pointwise gap between the one-mode joint density and the single-mode P-density."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(configs):
        n = int(rng.integers(1, 6))
        N = float(rng.uniform(0.2, 3.0))
        tau2 = float(rng.uniform(0.1, 5.0))
        xi = complex(*rng.normal(size=2))
        alphas = rng.normal(size=n) + 1j * rng.normal(size=n)
        post = bp.posterior_update(bp.PriorParams(xi, tau2), alphas, N)
        pred = bp.predictive_mmode(post, 1)
        single = bp.predictive_single_mode(post, 1)
        beta = post.theta_bar + 2.0 * (rng.normal(size=points) + 1j * rng.normal(size=points))
        joint = bp.predictive_joint_pdensity(pred, beta[:, None])
        direct = np.exp(-np.abs(beta - single.mean) ** 2 / single.photon_number) / (math.pi * single.photon_number)
        worst = max(worst, float(np.max(np.abs(joint - direct))))
    return worst


def joint_density_moments(pred: bp.PredictiveMmode, order=24):
    """Total mass, mean and complex covariance of the joint P-density by Gauss-Hermite quadrature.

    The reference Gaussian is isotropic with the largest marginal variance;
    the density is divided by it and integrated against the rule.
    """
    m = pred.m
    s2 = (pred.N + 2.0 * m * pred.delta2) / 2.0
    center = np.array([pred.theta_bar.real, pred.theta_bar.imag] * m)
    x, w = gauss_hermite_real(order, center, np.eye(2 * m) * s2)
    beta = x[:, 0::2] + 1j * x[:, 1::2]
    ref = np.exp(-np.sum((x - center) ** 2, axis=1) / (2 * s2)) / (2 * math.pi * s2) ** m
    f = w * bp.predictive_joint_pdensity(pred, beta) / ref
    mass = f.sum()
    mean = (f[:, None] * beta).sum(axis=0) / mass
    dev = beta - mean
    cov = np.einsum("k,kj,kl->jl", f, dev, dev.conj()) / mass
    return mass, mean, cov


def two_mode_deviation(case, dim_per_mode=24):
    n, N, tau2, xi, outcomes, theta = case
    post = bp.posterior_update(bp.PriorParams(xi, tau2), outcomes, N)
    pred = bp.predictive_mmode(post, 2)
    sigma = bp.predictive_joint_fock(pred, dim_per_mode)
    one = gs.gaussian_state_fock(gs.GaussianParams(theta, N), dim_per_mode, check_guard=False)
    rho = gs.product_state([one, one])
    numeric = gs.rel_entropy_numeric(rho, sigma)
    reduced = float(bp.reduce_predictive_risk(theta, post, 2))
    return abs(numeric - reduced), numeric, reduced


def mc_point_check(point, samples, seed, workers=None, k=3.0):
    """Both Monte Carlo risks within ``k`` standard errors; one reseeded retry."""
    N, n, m, tau2 = point
    details = []
    for attempt in range(2):
        cfg = risk.ExperimentConfig(N, n, m, bp.PriorParams(0j, tau2), samples, seed + attempt)
        rp = risk.risk_plugin_closed(N, n, m)
        rb = risk.risk_bayes_closed(N, n, m, cfg.prior)
        pm, pse = risk.mc_risk("plugin", cfg, workers)
        bm, bse = risk.mc_risk("bayes", cfg, workers)
        zp, zb = (pm - rp) / pse, (bm - rb) / bse
        details.append(f"z_plugin={zp:+.2f} z_bayes={zb:+.2f}")
        if abs(zp) <= k and abs(zb) <= k:
            return True, "; ".join(details)
    return False, "; ".join(details)


def identity_check(samples, seed, workers=None, k=3.0):
    """``E|mean(alpha) - theta|^2 = (N+1)/n`` and ``E|theta_bar - theta|^2 = 2 delta2``."""
    worst = 0.0
    for N, n, tau2 in ((1.0, 4, 1.0), (0.5, 2, 10.0), (2.0, 3, 0.5)):
        cfg = risk.ExperimentConfig(N, n, 1, bp.PriorParams(0j, tau2), samples, seed)
        e1, s1 = risk.mc_average("mle_error", cfg, workers)
        e2, s2 = risk.mc_average("posterior_error", cfg, workers)
        delta2 = bp.posterior_delta2(cfg.prior, n, N)
        worst = max(worst, abs(e1 - (N + 1) / n) / s1, abs(e2 - 2 * delta2) / s2)
    return worst <= k, worst


# -- the suite ---------------------------------------------------------------


def _check_rela(fast):
    worst = max(rela_grid_deviations(), key=lambda r: r[-1])
    ok = worst[-1] <= 1e-6
    return ok, f"max |closed - numeric| = {worst[-1]:.2e} at zeta={worst[0]}, N={worst[1]}, zeta'={worst[2]}, M={worst[3]}"


def _check_thermal_traces(fast):
    cross, braket, ent = thermal_trace_deviations()
    # thermal spectrum and log diagonal
    th = gs.thermal_fock(1.0, 40)
    diag_ok = np.allclose(np.diag(th.log_matrix).real, -(np.arange(40) + 1) * math.log(2), atol=1e-12)
    ok = cross <= 1e-6 and braket <= 1e-6 and ent <= 1e-12 and diag_ok
    return ok, f"cross trace {cross:.1e}, coherent log-expectation {braket:.1e}, entropy identity {ent:.1e}"


def _check_displacement(fast):
    a = annihilation_op(60)
    rho = gs.gaussian_state_fock(gs.GaussianParams(1.0, 1.0), 60)
    mean_err = abs(gs.expectation(rho, a) - 1.0)
    num_err = abs(gs.expectation(rho, a.conj().T @ a) - 2.0)
    vac = gs.coherent_fock(1.0, 40).amplitudes[0]
    ok = mean_err <= 1e-7 and num_err <= 1e-6 and abs(vac - math.exp(-0.5)) <= 1e-12
    return ok, f"<a> error {mean_err:.1e}, <a^dagger a> error {num_err:.1e}"


def _check_collapse(fast):
    worst = collapse_deviation()
    return worst <= 1e-12, f"max pointwise gap {worst:.1e} over 5 configurations x 100 points"


def _check_normalization(fast):
    worst_mass = worst_cov = 0.0
    for case in TWO_MODE_CASES:
        n, N, tau2, xi, outcomes, _ = case
        post = bp.posterior_update(bp.PriorParams(xi, tau2), outcomes, N)
        pred = bp.predictive_mmode(post, 2)
        mass, mean, cov = joint_density_moments(pred)
        expected = N * np.eye(2) + 2 * post.delta2 * np.ones((2, 2))
        worst_mass = max(worst_mass, abs(mass - 1))
        worst_cov = max(worst_cov, float(np.max(np.abs(cov - expected))), float(np.max(np.abs(mean - post.theta_bar))))
    ok = worst_mass <= 1e-6 and worst_cov <= 1e-6
    return ok, f"|mass - 1| = {worst_mass:.1e}, moment error {worst_cov:.1e}"


def _check_two_mode(fast):
    devs = [two_mode_deviation(c)[0] for c in TWO_MODE_CASES]
    return max(devs) <= 1e-4, f"max |reduced - two-mode numeric| = {max(devs):.1e}"


def _check_mc(fast, workers=None):
    samples = 20_000 if fast else 100_000
    fails = []
    for i, point in enumerate(MC_POINTS):
        ok, detail = mc_point_check(point, samples, seed=1000 + 10 * i, workers=workers)
        if not ok:
            fails.append(f"{point}: {detail}")
    return not fails, f"{len(MC_POINTS) - len(fails)}/{len(MC_POINTS)} points within 3 stderr at {samples} replicates" + (
        "; failed " + ", ".join(fails) if fails else "")


def _check_inequalities(fast):
    rep11 = risk.inequality_check(GRID_N, (0.5, 1.0, 10.0, math.inf), 1, 1)
    rep53 = risk.inequality_check(GRID_N, (0.5, 1.0, 10.0, math.inf), 5, 3)
    mono_ok = True
    limit_err = 0.0
    grid = np.geomspace(1e-3, 1e9, 49)
    for N in GRID_N:
        curve = risk.risk_curve(N, 1, 1, grid)
        mono_ok &= bool(np.all(np.diff(curve[:, 2]) >= 0))
        limit_err = max(limit_err, abs(curve[-1, 2] - risk.risk_star(N)))
    flat = bp.posterior_update(bp.PriorParams(noninformative=True), [0.3 + 0.1j], 1.0)
    flat_ok = 2 * flat.delta2 == 2.0
    star1 = abs(risk.risk_star(1.0) - 3 * math.log(4 / 3)) <= 1e-12
    ok = rep11.ok and rep53.ok and mono_ok and limit_err <= 1e-6 and flat_ok and star1
    return ok, (f"min R_p - R_pi margin {min(rep11.min_margin, rep53.min_margin):.3f}, "
                f"monotone {mono_ok}, limit error {limit_err:.1e}, flat prior 2*delta2 = N+1: {flat_ok}")


def _check_identities(fast, workers=None):
    ok, worst = identity_check(20_000 if fast else 100_000, seed=77, workers=workers)
    return ok, f"largest |z| = {worst:.2f}"


def _check_exchangeable(fast):
    ex = bp.exchangeable_state(bp.PriorParams(0j, 0.5), 1.0, 1, 40)
    err = float(np.max(np.abs(ex.matrix - gs.thermal_fock(2.0, 40).matrix)))
    return err <= 1e-6, f"mixture vs thermal(N + 2 tau2) max error {err:.1e}"


CHECKS = (
    # name, anchor (what the check exercises), function, runs in --fast
    ("relative-entropy-closed-form", "closed-form relative entropy between Gaussian states", _check_rela, True),
    ("thermal-traces", "thermal diagonal form, coherent log-expectation and cross trace", _check_thermal_traces, True),
    ("displacement", "displaced thermal states and coherent-state expansion", _check_displacement, True),
    ("joint-density-collapse", "joint predictive P-density at one mode", _check_collapse, True),
    ("joint-density-normalization", "joint predictive P-density normalization and covariance", _check_normalization, False),
    ("two-mode-reduction", "center-of-mass reduction of the two-mode predictive risk", _check_two_mode, False),
    ("exchangeable-mixture", "prior mixture of product Gaussian states", _check_exchangeable, True),
    ("risk-monte-carlo", "average relative-entropy risks of plug-in and Bayesian predictives", _check_mc, True),
    ("risk-inequalities", "R_p > R_* >= R_pi, monotonicity in tau2, flat-prior limit", _check_inequalities, True),
    ("estimation-identities", "mean squared errors of the MLE and the posterior mean", _check_identities, True),
)


def run_selftest(fast=False, workers=None, only=None):
    """Run the oracle suite and return a list of :class:`CheckResult`."""
    results = []
    for name, anchor, func, in_fast in CHECKS:
        if fast and not in_fast:
            continue
        if only is not None and name not in only:
            continue
        t0 = time.perf_counter()
        try:
            kwargs = {"workers": workers} if func in (_check_mc, _check_identities) else {}
            ok, detail = func(fast, **kwargs)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, anchor, bool(ok), detail, time.perf_counter() - t0))
    return results
