"""Watching the exact-recovery indicator along one OLS run."""

import numpy as np

from olscert import SolverConfig, bench, erc_indicator_ols, ols_recover

rng = np.random.default_rng(3)
D = bench.gen_matrix(64, 128, seed=rng)
sig = bench.gen_signal(128, 6, seed=rng)
res = ols_recover(D, D.mat @ sig.x, SolverConfig(sig.K))

print("true support", sig.support)
chosen = []
for step, (j,) in enumerate(res.selections):
    val = erc_indicator_ols(D, sig.support, chosen)
    verdict = "certified" if val < 1 else "not certified"
    print(f"step {step}: indicator {val:.3f} ({verdict}), picked {j}"
          f" {'ok' if j in sig.support else 'WRONG'}")
    if j not in sig.support:
        break
    chosen.append(j)

print("recovered support", res.support_estimate,
      "error", np.linalg.norm(res.estimate - sig.x))
