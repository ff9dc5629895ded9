"""Average risk of plug-in and Bayesian predictives.

The plug-in risk does not depend on the prior.  The Bayesian risk grows with
the prior variance and levels off at the flat-prior value, which stays below
the plug-in risk.
"""

import numpy as np

from gaussbayes import ExperimentConfig, PriorParams, mc_risk, risk_curve, risk_star

N = 1.0
table = risk_curve(N, 1, 1, np.geomspace(1e-2, 1e6, 9))
print(f"{'tau2':>10} {'plug-in':>10} {'Bayes':>10} {'gap':>10}")
for tau2, rp, rb, gap in table:
    print(f"{tau2:10.3g} {rp:10.6f} {rb:10.6f} {gap:10.6f}")
print(f"flat-prior limit: {risk_star(N):.6f}")

cfg = ExperimentConfig(N, 1, 1, PriorParams(0, 1.0), mc_samples=100_000, seed=42)
for kind in ("plugin", "bayes"):
    est, se = mc_risk(kind, cfg)
    print(f"Monte Carlo {kind:>6}: {est:.4f} +/- {se:.4f}")
