"""Signal energy needed for correct selections when the measurements are noisy."""

import numpy as np

from olscert import guarantees

sigma, M, mb = 0.1, 512, 0.025

print("floor on the unselected energy, mu = mu_B = nu = 0.025, sigma = 0.1, M = 512")
print("  l    OLS K=8    BOLS d=2 k=4")
for l in range(4):
    ols = guarantees.noisy_floor_ols(mb, 8, 2 * l, sigma, M).vector_floor
    b2 = guarantees.noisy_floor_bols(mb, mb, 4, 2, l, sigma, M, nu=mb).vector_floor
    print(f"  {l}   {ols:8.3f}   {b2:8.3f}")

print("\n  l    BOLS d=4 k=2")
for l in range(2):
    b4 = guarantees.noisy_floor_bols(mb, mb, 2, 4, l, sigma, M, nu=mb).vector_floor
    print(f"  {l}   {b4:8.3f}")

# Floors are linear in the noise level.
for s in np.array([0.05, 0.1, 0.2]):
    f = guarantees.noisy_floor_ols(mb, 8, 0, s, M)
    print(f"sigma {s:.2f}: vector {f.vector_floor:7.3f}, per entry {f.entry_floor:6.3f}")
