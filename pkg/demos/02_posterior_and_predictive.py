"""From heterodyne data to a Bayesian predictive state.

Draw a few heterodyne outcomes for an unknown mean, update a Gaussian prior,
and compare the plug-in predictive (the estimated state itself) with the
Bayesian predictive, which is broader because it carries the posterior
uncertainty.
"""

from gaussbayes import (
    PriorParams,
    mle,
    plugin_predictive,
    posterior_update,
    predictive_single_mode,
    rel_entropy_closed,
    sample,
    GaussianParams,
)

theta, N = 0.8 - 0.4j, 1.0
data = sample(theta, N, n=3, seed=2024)
print("outcomes:", ", ".join(f"{a:.3f}" for a in data.outcomes))

prior = PriorParams(xi=0, tau2=1.0)
post = posterior_update(prior, data, N)
print(f"MLE            : {mle(data):.4f}")
print(f"posterior mean : {post.theta_bar:.4f}   delta^2 = {post.delta2:.4f}")

truth = GaussianParams(theta, N)
plug = plugin_predictive(mle(data), N, 1)[0]
bayes = predictive_single_mode(post)
print(f"plug-in predictive : mean {plug.mean:.4f}, N = {plug.photon_number:.4f}, "
      f"D(truth || plug-in) = {rel_entropy_closed(truth, plug):.4f}")
print(f"Bayes predictive   : mean {bayes.mean:.4f}, N = {bayes.photon_number:.4f}, "
      f"D(truth || Bayes)   = {rel_entropy_closed(truth, bayes):.4f}")

# With a flat prior and a single outcome the predictive photon number is 2N + 1.
flat = posterior_update(PriorParams(noninformative=True), data.outcomes[:1], N)
print("flat prior, one outcome: predictive N =", predictive_single_mode(flat).photon_number)
