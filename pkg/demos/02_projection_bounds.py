"""Lower bounds on the norm of a projected column.

Compares the coherence bound used by the OLS analysis with the older
sqrt(1 - K mu) bound, then checks both against real matrices.
"""

import math

import numpy as np

from olscert import MeasurementMatrix, guarantees
from olscert.errors import DomainError

K = 6
print(f"K = {K}")
print("   mu     new bound   sqrt(1-K mu)   block (k=3, d=2, nu=mu/2)")
for mu in np.arange(0.01, 0.17, 0.01):
    try:
        new = f"{1 / math.sqrt(guarantees.t_factor(mu, K)):.4f}"
    except DomainError:
        new = "   --  "
    try:
        blk = f"{1 / math.sqrt(guarantees.t_factor_block(mu, mu / 2, 3, 2)):.4f}"
    except DomainError:
        blk = "   --  "
    old = math.sqrt(1 - K * mu)
    print(f"  {mu:.2f}    {new}      {old:.4f}        {blk}")

# Near the edge of its domain the new bound drops below the old one and
# then stops being defined, even though mu (K - 1) < 1 still holds.

# Every partial support of a tall Gaussian matrix respects the bound.
r = np.random.default_rng(1)
D = MeasurementMatrix.from_array(r.normal(size=(300, 20)))
rep = guarantees.check_projection_bounds(D, 3)
print(f"\n300x20 Gaussian, K=3: bound {rep.lower_bound:.4f}, "
      f"observed [{rep.min_norm:.4f}, {rep.max_norm:.4f}] over "
      f"{rep.supports_checked} supports, {rep.violations} violations")
