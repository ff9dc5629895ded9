"""Relative entropy between displaced thermal states.

A displaced thermal state is fixed by a complex mean and a mean photon
number.  The divergence between two such states has a closed form; here it
is compared with a direct matrix computation in a truncated Fock basis.
"""

from gaussbayes import GaussianParams, gaussian_state_fock, rel_entropy_closed, rel_entropy_numeric

DIM = 60

pairs = [
    (GaussianParams(0, 1.0), GaussianParams(0, 2.0)),
    (GaussianParams(1.0, 1.0), GaussianParams(0, 1.0)),
    (GaussianParams(0.5 + 0.5j, 0.5), GaussianParams(1.0, 2.0)),
    (GaussianParams(1.0, 2.0), GaussianParams(0.5 + 0.5j, 0.5)),
]

print(f"{'rho':>22} {'sigma':>22} {'closed':>12} {'matrix':>12} {'|diff|':>9}")
for P, Q in pairs:
    closed = rel_entropy_closed(P, Q)
    numeric = rel_entropy_numeric(gaussian_state_fock(P, DIM), gaussian_state_fock(Q, DIM))
    label = lambda s: f"({s.mean:.2g}, N={s.photon_number:g})"
    print(f"{label(P):>22} {label(Q):>22} {closed:12.8f} {numeric:12.8f} {abs(closed - numeric):9.1e}")

# The divergence is not symmetric: compare the last two rows.
