"""Seeded Monte Carlo recovery experiments.

Every trial draws its own matrix, signal and noise from a random stream keyed
by ``(seed, sparsity, trial)``, so results do not depend on execution order
or on how many worker processes run the trials.  OLS and MOLS trials at the
same sparsity see identical instances, which makes their curves paired.
"""

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .coherence import MeasurementMatrix
from .errors import InvalidConfig, OlsCertError
from .solvers import (BlockSparseSignal, SolverConfig, SparseSignal,
                      DEFAULT_TOL, recover)

ALGOS = ("ols", "mols", "bols")
CSV_HEADER = ["algo", "M", "N", "d", "L", "sigma", "sparsity", "trials",
              "successes", "frequency", "errors"]


@dataclass(frozen=True)
class ExperimentConfig:
    """One frequency-of-recovery curve.

    For BOLS the sparsity grid counts atoms (kd), so each value must be a
    multiple of `d`.  ``ensemble="orthonormal"`` replaces the Gaussian matrix
    by a random orthogonal one and requires ``M == N``.
    """

    M: int
    N: int
    sparsity: tuple
    algo: str = "ols"
    d: int = 1
    L: int = 1
    trials: int = 200
    sigma: float = 0.0
    seed: int = 0
    success_radius: float = 1e-6
    ensemble: str = "gaussian"
    residual_tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "sparsity", tuple(int(k) for k in self.sparsity))
        object.__setattr__(self, "algo", self.algo.lower())
        if self.algo not in ALGOS:
            raise InvalidConfig(f"algo must be one of {ALGOS}, got {self.algo!r}")
        if not 1 <= self.M <= self.N:
            raise InvalidConfig(f"need 1 <= M <= N, got M={self.M}, N={self.N}")
        if self.d < 1 or self.N % self.d:
            raise InvalidConfig(f"block length {self.d} does not divide N={self.N}")
        if self.trials < 1 or self.L < 1 or self.sigma < 0:
            raise InvalidConfig("need trials >= 1, L >= 1, sigma >= 0")
        if self.ensemble not in ("gaussian", "orthonormal"):
            raise InvalidConfig(f"unknown ensemble {self.ensemble!r}")
        if self.ensemble == "orthonormal" and self.M != self.N:
            raise InvalidConfig("orthonormal ensemble needs M == N")
        width = self.L if self.algo == "mols" else 1
        for k in self.sparsity:
            if not 0 <= k <= self.M or k * width > self.M:
                raise InvalidConfig(f"sparsity {k} not admissible for M={self.M}")
            if self.algo == "bols" and k % self.d:
                raise InvalidConfig(f"BOLS sparsity {k} is not a multiple of d={self.d}")

    @classmethod
    def from_dict(cls, data):
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def as_dict(self):
        out = asdict(self)
        out["sparsity"] = list(self.sparsity)
        return out

    def digest(self):
        """Short stable hash used to name output files."""
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class CurvePoint:
    sparsity: int
    successes: int
    trials: int
    errors: int = 0

    @property
    def frequency(self):
        return self.successes / self.trials


@dataclass(frozen=True)
class FrequencyCurve:
    algo: str
    M: int
    N: int
    d: int
    L: int
    sigma: float
    points: tuple = field(default_factory=tuple)

    def frequency_at(self, sparsity):
        for p in self.points:
            if p.sparsity == sparsity:
                return p.frequency
        raise KeyError(sparsity)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for p in self.points:
            w.writerow([self.algo, self.M, self.N, self.d, self.L, repr(float(self.sigma)),
                        p.sparsity, p.trials, p.successes, repr(p.frequency), p.errors])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty curve file")
        head = rows[0]
        points = []
        for row in rows:
            p = CurvePoint(int(row["sparsity"]), int(row["successes"]),
                           int(row["trials"]), int(row["errors"]))
            if float(row["frequency"]) != p.frequency:
                raise ValueError(f"frequency column disagrees with counts: {row}")
            points.append(p)
        return cls(head["algo"], int(head["M"]), int(head["N"]), int(head["d"]),
                   int(head["L"]), float(head["sigma"]), tuple(points))


# --- instance generation ---------------------------------------------------

def gen_matrix(M, N, d=1, seed=None):
    """Gaussian N(0, 1/M) matrix with columns then scaled to unit norm."""
    if M > N:
        raise InvalidConfig(f"need M <= N, got M={M}, N={N}")
    rng = np.random.default_rng(seed)
    return MeasurementMatrix.from_array(rng.normal(0.0, 1.0 / np.sqrt(M), size=(M, N)), d)


def gen_orthonormal(N, d=1, seed=None):
    """Haar-random orthogonal N x N matrix."""
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.normal(size=(N, N)))
    return MeasurementMatrix.from_array(Q * np.sign(np.diag(R)), d)


def gen_signal(N, K, seed=None):
    """K-sparse vector: uniform random support, standard normal nonzeros."""
    if not 0 <= K <= N:
        raise InvalidConfig(f"need 0 <= K <= N, got K={K}, N={N}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(N, size=K, replace=False))
    x = np.zeros(N)
    x[support] = rng.standard_normal(K)
    return SparseSignal(x, tuple(support.tolist()))


def gen_block_signal(N, d, k, seed=None):
    """Block k-sparse vector: uniform random blocks, standard normal entries."""
    if d < 1 or N % d or not 0 <= k * d <= N:
        raise InvalidConfig(f"bad block signal shape N={N}, d={d}, k={k}")
    rng = np.random.default_rng(seed)
    blocks = np.sort(rng.choice(N // d, size=k, replace=False))
    x = np.zeros(N)
    for b in blocks:
        x[b * d:(b + 1) * d] = rng.standard_normal(d)
    return BlockSparseSignal(x, d, tuple(blocks.tolist()))


def trial_streams(seed, sparsity, trial):
    """Independent seed sequences for (matrix, signal, noise) of one trial."""
    root = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(sparsity), int(trial)))
    return root.spawn(3)


# --- trial engine -------------------------------------------------------------

def run_trial(cfg, sparsity, trial):
    """Run one trial; returns True on success.  Solver errors propagate."""
    s_mat, s_sig, s_noise = trial_streams(cfg.seed, sparsity, trial)
    if cfg.ensemble == "orthonormal":
        D = gen_orthonormal(cfg.N, cfg.d, s_mat)
    else:
        D = gen_matrix(cfg.M, cfg.N, cfg.d, s_mat)
    if cfg.algo == "bols":
        sig = gen_block_signal(cfg.N, cfg.d, sparsity // cfg.d, s_sig)
        budget = sparsity // cfg.d
    else:
        sig = gen_signal(cfg.N, sparsity, s_sig)
        budget = sparsity
    y = D.mat @ sig.x
    if cfg.sigma > 0:
        y = y + cfg.sigma * np.random.default_rng(s_noise).standard_normal(cfg.M)
    if budget == 0:
        return True
    res = recover(D, y, cfg.algo,
                  SolverConfig(budget, residual_tol=cfg.residual_tol, mols_L=cfg.L))
    if cfg.sigma > 0:
        return set(res.support_estimate) == set(sig.support)
    return bool(np.linalg.norm(res.estimate - sig.x) < cfg.success_radius)


def _run_point(args):
    cfg, sparsity = args
    successes = errors = 0
    for t in range(cfg.trials):
        try:
            successes += run_trial(cfg, sparsity, t)
        except (OlsCertError, np.linalg.LinAlgError):
            errors += 1
    return CurvePoint(sparsity, successes, cfg.trials, errors)


def run_curve(cfg, workers=1):
    """Estimate the success frequency at every grid point of `cfg`.

    Trial errors count as failures and are tallied in ``errors``.  The
    result is identical for any `workers` value.
    """
    jobs = [(cfg, k) for k in cfg.sparsity]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_run_point, jobs))
    else:
        points = [_run_point(j) for j in jobs]
    return FrequencyCurve(cfg.algo, cfg.M, cfg.N, cfg.d, cfg.L, cfg.sigma, tuple(points))
