"""Frequency of exact recovery versus sparsity for OLS, MOLS and BOLS.

Runs the four JSON configs next to this script.  Pass a trial count to trade
accuracy for time, e.g. ``python demos/03_recovery_curves.py 50``.
"""

import os
import sys
from dataclasses import replace

from olscert import ExperimentConfig, run_curve

here = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
trials = int(sys.argv[1]) if len(sys.argv) > 1 else 200

for name in ("ols", "mols_L2", "bols_d4", "bols_d8"):
    cfg = replace(ExperimentConfig.from_json(os.path.join(here, name + ".json")),
                  trials=trials)
    curve = run_curve(cfg, workers=None)
    label = cfg.algo.upper() + (f" d={cfg.d}" if cfg.algo == "bols" else "")
    label += f" L={cfg.L}" if cfg.algo == "mols" else ""
    print(f"\n{label}  ({cfg.trials} trials per point, config {cfg.digest()})")
    for p in curve.points:
        bar = "#" * round(40 * p.frequency)
        print(f"  {p.sparsity:3d}  {p.frequency:5.3f}  {bar}")
