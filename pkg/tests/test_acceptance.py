"""Acceptance suite: nine end-to-end checks at their stated tolerances.

Each check records one PASS/FAIL line.  Under pytest the lines are printed in
the terminal summary; ``python tests/test_acceptance.py`` runs the checks
directly and prints the same lines.
"""

import itertools
import math
import os
import sys
import time

import numpy as np
import pytest
from scipy.linalg import hadamard

from olscert import bench, guarantees as g
from olscert.coherence import MeasurementMatrix, profile
from olscert.errors import DomainError
from olscert.solvers import (SolverConfig, bols_recover, bols_select, ols_recover,
                             ols_select)

sys.path.insert(0, os.path.dirname(__file__))
from oracles import proj_orth  # noqa: E402

RESULTS = []


def report(num, name, ok, detail, started):
    line = f"criterion {num} [{'PASS' if ok else 'FAIL'}] {name}: {detail} ({time.time() - started:.1f}s)"
    RESULTS.append(line)
    print(line)
    return ok


# --- 1 -----------------------------------------------------------------------

def check_sparsity_limits():
    t0 = time.time()
    rows = [
        ("K < (2/3)(1/mu+1), M=128", g.asymptotic_ols(1 / math.sqrt(128)), 8.209),
        ("kd bound, d=4, M=128", g.asymptotic_bols(1 / math.sqrt(512), 4), 18.08),
        ("K < 1/mu+1, M=128", 1 / (1 / math.sqrt(128)) + 1, 12.31),
        ("kd bound, d=8 (formula value)", g.asymptotic_bols(1 / math.sqrt(1024), 8), 27.44),
    ]
    bad = [(n, v, want) for n, v, want in rows if abs(v - want) > 0.05]
    detail = ", ".join(f"{v:.3f}" for _, v, _ in rows)
    return report(1, "sparsity limits", not bad, detail, t0)


def test_criterion_1_sparsity_limits():
    assert check_sparsity_limits()


# --- 2 -----------------------------------------------------------------------

def check_threshold_agreement():
    t0 = time.time()
    worst = 0.0
    for mu in np.round(np.arange(0.01, 0.2001, 0.01), 10):
        rep = g.cardano_threshold_ols(float(mu))
        worst = max(worst, abs(rep.cardano - rep.bisection))
    for mb, d in itertools.product([0.005, 0.01, 0.02, 0.03, 0.05], [2, 4, 8]):
        rep = g.cardano_threshold_bols(1.2 * mb, mb, 0.8 * mb, d)
        worst = max(worst, abs(rep.cardano - rep.bisection))
    ratio = g.cardano_threshold_ols(1e-3).threshold / (2 / 3 * (1 / 1e-3 + 1))
    ok = worst <= 1e-6 and 0.98 <= ratio <= 1.02
    return report(2, "closed form vs bisection", ok,
                  f"max gap {worst:.2e} over 35 cases, small-mu ratio {ratio:.5f}", t0)


def test_criterion_2_threshold_agreement():
    assert check_threshold_agreement()


# --- 3 -----------------------------------------------------------------------

def single_atom_grid():
    """Compare the two single-atom lower bounds on every grid point with mu (K-1) < 1."""
    worse, undefined, compared = [], 0, 0
    for mu in np.linspace(0.001, 0.5, 500):
        for K in range(1, 400):
            if mu * (K - 1) >= 1 or K * mu >= 1:
                continue
            try:
                new = 1 / math.sqrt(g.t_factor(mu, K))
            except DomainError:
                undefined += 1
                continue
            compared += 1
            if new < g.projection_bound_classic(mu, K):
                worse.append((float(mu), K))
    return worse, undefined, compared


def block_vs_single_grid():
    bad, compared = 0, 0
    for mu in np.linspace(0.001, 0.3, 300):
        for k in range(1, 200):
            try:
                tb = g.t_factor_block(mu, mu / 2, k, 2)
                t = g.t_factor(mu, 2 * k)
            except DomainError:
                continue
            compared += 1
            bad += 1 / math.sqrt(tb) < 1 / math.sqrt(t)
    return bad, compared


def check_lower_bound_curves():
    t0 = time.time()
    worse, undefined, compared = single_atom_grid()
    bad_b, compared_b = block_vs_single_grid()
    ok = not worse and bad_b == 0
    edge = min(K * mu for mu, K in worse) if worse else float("nan")
    detail = (f"single-atom bound below sqrt(1-K mu) at {len(worse)}/{compared} points "
              f"(smallest K mu {edge:.3f}), undefined at {undefined} more; "
              f"block bound below single-atom bound at {bad_b}/{compared_b}")
    return report(3, "lower-bound curves", ok, detail, t0)


@pytest.mark.xfail(strict=True, reason="the improved bound loses to sqrt(1 - K mu) "
                   "for K mu above about 0.66; see the decisions ledger")
def test_criterion_3_lower_bound_curves():
    assert check_lower_bound_curves()


def test_criterion_3_block_part_holds():
    bad, compared = block_vs_single_grid()
    assert compared > 1000 and bad == 0


# --- 4 -----------------------------------------------------------------------

def check_projection_bounds():
    t0 = time.time()
    viol = checked = 0
    for seed in range(100):
        r = np.random.default_rng(seed)
        D = MeasurementMatrix.from_array(r.normal(size=(300, 20)))
        rep = g.check_projection_bounds(D, 3)
        viol += rep.violations
        checked += rep.supports_checked
        Db = MeasurementMatrix.from_array(r.normal(size=(2000, 16)), 2)
        rep = g.check_projection_bounds(Db, 2)
        viol += rep.violations
        checked += rep.supports_checked
    return report(4, "projection-norm bounds", viol == 0,
                  f"{checked} supports over 200 matrices, {viol} violations", t0)


def test_criterion_4_projection_bounds():
    assert check_projection_bounds()


# --- 5 -----------------------------------------------------------------------

def check_selection_equivalence():
    t0 = time.time()
    mism = 0
    for seed in range(100):
        r = np.random.default_rng(seed)
        D = MeasurementMatrix.from_array(r.normal(size=(20, 40)))
        S = sorted(r.choice(40, size=seed % 8, replace=False).tolist())
        y = r.normal(size=20)
        res = proj_orth(D.mat[:, S], y)
        mism += ols_select(D, S, res) != ols_select(D, S, res, y=y, rule="residual")
    for seed in range(100):
        r = np.random.default_rng(10_000 + seed)
        d = (2, 4)[seed % 2]
        D = MeasurementMatrix.from_array(r.normal(size=(32, 64)), d)
        Sb = sorted(r.choice(64 // d, size=seed % 4, replace=False).tolist())
        S = [i for b in Sb for i in range(b * d, (b + 1) * d)]
        y = r.normal(size=32)
        res = proj_orth(D.mat[:, S], y)
        mism += (bols_select(D, Sb, res, y=y, rule="residual")
                 != bols_select(D, Sb, res, y=y, rule="decomposition"))
    return report(5, "selection-rule equivalence", mism == 0,
                  f"{mism} mismatches over 200 instances", t0)


def test_criterion_5_selection_equivalence():
    assert check_selection_equivalence()


# --- 6 -----------------------------------------------------------------------

SHARED = [8, 16, 24, 32, 40, 48]


def recovery_curves(trials=200, seed=0):
    base = dict(M=128, N=256, trials=trials, seed=seed)
    return {
        "ols": bench.run_curve(bench.ExperimentConfig(algo="ols", sparsity=[12] + SHARED, **base), None),
        "mols": bench.run_curve(bench.ExperimentConfig(algo="mols", L=2, sparsity=SHARED, **base), None),
        "bols4": bench.run_curve(bench.ExperimentConfig(algo="bols", d=4, sparsity=SHARED, **base), None),
        "bols8": bench.run_curve(bench.ExperimentConfig(algo="bols", d=8, sparsity=SHARED, **base), None),
    }


def check_recovery_curves():
    t0 = time.time()
    c = recovery_curves()
    f = {name: {p.sparsity: p.frequency for p in curve.points} for name, curve in c.items()}
    ok = f["ols"][12] >= 0.95 and f["bols4"][40] >= 0.95 and f["bols8"][48] >= 0.95
    order = ["bols8", "bols4", "mols", "ols"]
    broken = [(k, a, b) for k in SHARED for a, b in zip(order, order[1:])
              if f[a][k] < f[b][k] - 0.05]
    ok = ok and not broken
    table = "; ".join(f"{k}: " + "/".join(f"{f[n][k]:.2f}" for n in order) for k in SHARED)
    detail = (f"OLS@12 {f['ols'][12]:.3f}, BOLS4@40 {f['bols4'][40]:.3f}, "
              f"BOLS8@48 {f['bols8'][48]:.3f}; d8/d4/MOLS/OLS {table}; "
              f"order violations {broken}")
    return report(6, "recovery-frequency curves", ok, detail, t0)


@pytest.mark.slow
def test_criterion_6_recovery_curves():
    assert check_recovery_curves()


# --- 7 -----------------------------------------------------------------------

def certified_run(D, true_support, result, indicator, unit):
    """Walk the solver's picks; return (certified, counterexample).

    The run is certified when the indicator stays below 1 at every state it
    visits.  A counterexample is a certified state followed by a wrong pick.
    """
    T0 = set(true_support)
    chosen = []
    for step in result.selections:
        if indicator(D, true_support, chosen) >= 1:
            return False, False
        picked = unit(step)
        if picked not in T0:
            return True, True
        chosen.append(picked)
    return len(chosen) == len(T0), False


def check_certificates():
    t0 = time.time()
    found = {"ols": 0, "bols": 0}
    bad = tried = 0
    seed = 0
    while min(found.values()) < 200 and tried < 5000:
        r = np.random.default_rng(seed)
        seed += 1
        tried += 1
        if found["ols"] < 200:
            D = bench.gen_matrix(64, 128, 1, r)
            s = bench.gen_signal(128, int(r.integers(3, 9)), r)
            res = ols_recover(D, D.mat @ s.x, SolverConfig(s.K))
            cert, counter = certified_run(D, s.support, res, g.erc_indicator_ols,
                                          lambda step: step[0])
            if cert:
                found["ols"] += 1
                bad += counter or set(res.support_estimate) != set(s.support)
        if found["bols"] < 200:
            d = (2, 4)[seed % 2]
            D = bench.gen_matrix(64, 128, d, r)
            s = bench.gen_block_signal(128, d, int(r.integers(2, 5)), r)
            res = bols_recover(D, D.mat @ s.x, SolverConfig(s.k))
            cert, counter = certified_run(D, s.block_support, res, g.erc_indicator_bols,
                                          lambda step: step[0] // d)
            if cert:
                found["bols"] += 1
                bad += counter or set(res.support_estimate) != set(s.support)
    ok = bad == 0 and min(found.values()) >= 200
    return report(7, "certificate soundness", ok,
                  f"{found['ols']} OLS + {found['bols']} BOLS certified runs "
                  f"({tried} seeds), {bad} counterexamples", t0)


def test_criterion_7_certificates():
    assert check_certificates()


# --- 8 -----------------------------------------------------------------------

def hadamard_dictionary(M=512):
    return np.hstack([np.eye(M), hadamard(M) / math.sqrt(M)])


def check_noisy():
    t0 = time.time()
    M, sigma, trials = 512, 0.1, 100
    A = hadamard_dictionary(M)
    D1 = MeasurementMatrix(A, 1)
    D2 = MeasurementMatrix(A, 2)
    p1, p2 = profile(D1), profile(D2)
    K, k, d = 8, 4, 2
    floor1 = g.noisy_floor_ols(p1.mu, K, 0, sigma, M).entry_floor
    floor2 = g.noisy_floor_bols(p2.mu, p2.mu_block, k, d, 0, sigma, M, nu=p2.nu).entry_floor
    ok1 = ok2 = 0
    for t in range(trials):
        r = np.random.default_rng(t)
        x = np.zeros(A.shape[1])
        supp = r.choice(A.shape[1], K, replace=False)
        x[supp] = floor1 * (1.01 + r.random(K)) * r.choice([-1, 1], K)
        res = ols_recover(D1, A @ x + sigma * r.standard_normal(M), SolverConfig(K, residual_tol=0))
        ok1 += set(res.support_estimate) == set(supp.tolist())

        x = np.zeros(A.shape[1])
        blocks = r.choice(A.shape[1] // d, k, replace=False)
        for b in blocks:
            v = r.standard_normal(d)
            x[b * d:(b + 1) * d] = floor2 * (1.01 + r.random()) * v / np.linalg.norm(v)
        res = bols_recover(D2, A @ x + sigma * r.standard_normal(M), SolverConfig(k, residual_tol=0))
        truth = {i for b in blocks for i in range(b * d, (b + 1) * d)}
        ok2 += set(res.support_estimate) == truth
    ok = ok1 >= 0.95 * trials and ok2 >= 0.95 * trials
    return report(8, "noisy support recovery", ok,
                  f"OLS K={K}: {ok1}/{trials} above entry floor {floor1:.2f}; "
                  f"BOLS d={d} k={k}: {ok2}/{trials} above block floor {floor2:.2f} "
                  f"(mu={p1.mu:.4f}, mu_B={p2.mu_block:.4f}, nu={p2.nu:.1f})", t0)


def test_criterion_8_noisy():
    assert check_noisy()


# --- 9 -----------------------------------------------------------------------

def check_noisy_floor_curves():
    t0 = time.time()
    mb, sigma, M = 0.025, 0.1, 512
    ok = True
    for d, k in ((2, 4), (4, 2)):
        f = [g.noisy_floor_bols(mb, mb, k, d, l, sigma, M, nu=mb).vector_floor for l in range(k)]
        ok &= all(a >= b for a, b in zip(f, f[1:]))
        for s in (0.05, 0.2, 0.5):
            ok &= math.isclose(g.noisy_floor_bols(mb, mb, k, d, 0, s, M, nu=mb).vector_floor,
                               f[0] * s / sigma, rel_tol=1e-12)
    f = [g.noisy_floor_ols(mb, 8, l, sigma, M).vector_floor for l in range(8)]
    ok &= all(a >= b for a, b in zip(f, f[1:]))
    ok &= math.isclose(g.noisy_floor_ols(mb, 8, 0, 0.3, M).vector_floor, 3 * f[0], rel_tol=1e-12)
    v2 = g.noisy_floor_bols(mb, mb, 4, 2, 0, sigma, M, nu=mb).vector_floor
    v4 = g.noisy_floor_bols(mb, mb, 2, 4, 0, sigma, M, nu=mb).vector_floor
    m2 = g.noisy_floor_bols(mb, mb, 4, 2, 2, sigma, M, nu=mb).vector_floor
    m4 = g.noisy_floor_bols(mb, mb, 2, 4, 1, sigma, M, nu=mb).vector_floor
    ok &= v4 <= v2 and m4 <= m2
    return report(9, "noisy floor curves", ok,
                  f"kd=8 floors d=2 {v2:.3f} vs d=4 {v4:.3f}; "
                  f"4 atoms left {m2:.3f} vs {m4:.3f}", t0)


def test_criterion_9_noisy_floor_curves():
    assert check_noisy_floor_curves()


CHECKS = [check_sparsity_limits, check_threshold_agreement, check_lower_bound_curves,
          check_projection_bounds, check_selection_equivalence, check_recovery_curves,
          check_certificates, check_noisy, check_noisy_floor_curves]


if __name__ == "__main__":
    results = [check() for check in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria pass")
