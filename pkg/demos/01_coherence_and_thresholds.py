"""How much sparsity does coherence alone certify?

Walks from a random sensing matrix to its coherence profile, then to the
sparsity thresholds for OLS and block OLS.
"""

import math

import numpy as np

from olscert import bench, guarantees, profile

M, N = 128, 256

D = bench.gen_matrix(M, N, d=4, seed=0)
p = profile(D)
print(f"Gaussian {M}x{N}, blocks of 4")
print(f"  coherence      {p.mu:.4f}")
print(f"  block coh.     {p.mu_block:.4f}")
print(f"  sub-coherence  {p.nu:.4f}")
print(f"  Welch bound    {p.welch:.4f}")

# Random matrices sit far above the Welch bound, so the certified sparsity is tiny.
rep = guarantees.cardano_threshold_ols(p.mu)
print(f"\nOLS certified for K < {rep.threshold:.3f} (closed form {rep.cardano:.9f})")

# With an idealized matrix at the Welch-type scaling the numbers get interesting.
print("\nidealized coherence, M = 128")
mu = 1 / math.sqrt(M)
print(f"  OLS/MOLS limit    K  < {guarantees.asymptotic_ols(mu):.2f}")
print(f"  OMP condition     K  < {guarantees.tropp_omp(mu):.2f}")
print(f"  1/mu + 1          K  < {1 / mu + 1:.2f}")
for d in (4, 8):
    mb = 1 / math.sqrt(d * M)
    print(f"  BOLS d={d}         kd < {guarantees.asymptotic_bols(mb, d):.2f}"
          f"  (BOMP {guarantees.bomp_bound(mb, d):.2f})")

# The exact threshold approaches the limit as the coherence shrinks.
print("\n   mu      threshold   limit     ratio")
for mu in np.logspace(-1, -4, 7):
    t = guarantees.cardano_threshold_ols(mu).threshold
    a = guarantees.asymptotic_ols(mu)
    print(f"  {mu:.1e}  {t:10.3f}  {a:10.3f}  {t / a:.4f}")
