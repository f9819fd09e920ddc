"""Incoherence measures of a column-normalized sensing matrix."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .matcore import as_dense

UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """An M x N sensing matrix with unit-norm columns, split into blocks of `block_len`.

    Build instances with :meth:`from_array`, which normalizes the columns.
    """

    mat: np.ndarray
    block_len: int = 1

    def __post_init__(self):
        mat = as_dense(self.mat)
        d = int(self.block_len)
        if d < 1 or mat.shape[1] % d:
            raise DimensionMismatch(
                f"block length {d} does not divide N = {mat.shape[1]}")
        norms = np.linalg.norm(mat, axis=0)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ValueError("columns must have unit l2 norm; use from_array()")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "block_len", d)

    @classmethod
    def from_array(cls, a, block_len=1):
        a = as_dense(a)
        norms = np.linalg.norm(a, axis=0)
        if np.any(norms == 0):
            raise ValueError(f"zero column(s) at {np.flatnonzero(norms == 0).tolist()}")
        return cls(a / norms, block_len)

    @property
    def M(self):
        return self.mat.shape[0]

    @property
    def N(self):
        return self.mat.shape[1]

    @property
    def n_blocks(self):
        return self.N // self.block_len

    def block_columns(self, b):
        """Column indices of block `b`."""
        d = self.block_len
        return tuple(range(b * d, (b + 1) * d))

    def block(self, b):
        d = self.block_len
        return self.mat[:, b * d:(b + 1) * d]


@dataclass(frozen=True)
class CoherenceProfile:
    mu: float
    mu_block: float
    nu: float
    welch: float

    def as_dict(self):
        return {"mu": self.mu, "mu_block": self.mu_block, "nu": self.nu,
                "welch": self.welch}


def _as_measurement(D, block_len=None):
    if isinstance(D, MeasurementMatrix):
        if block_len is not None and block_len != D.block_len:
            return MeasurementMatrix(D.mat, block_len)
        return D
    return MeasurementMatrix.from_array(D, 1 if block_len is None else block_len)


def coherence(D):
    """Largest absolute inner product between two distinct columns."""
    D = _as_measurement(D)
    if D.N < 2:
        raise DimensionMismatch("coherence needs at least two columns")
    G = np.abs(D.mat.T @ D.mat)
    np.fill_diagonal(G, 0.0)
    return float(G.max())


def block_coherence(D, block_len=None):
    """Max over distinct block pairs of ``spectral_norm(D[i].T @ D[j]) / d``."""
    D = _as_measurement(D, block_len)
    d, nb = D.block_len, D.n_blocks
    if nb < 2:
        raise DimensionMismatch("block coherence needs at least two blocks")
    G = D.mat.T @ D.mat
    if d == 1:
        norms = np.abs(G)
    else:
        blocks = G.reshape(nb, d, nb, d).transpose(0, 2, 1, 3)
        norms = np.linalg.norm(blocks, ord=2, axis=(2, 3))
    np.fill_diagonal(norms, 0.0)
    return float(norms.max() / d)


def sub_coherence(D, block_len=None):
    """Largest |<D_i, D_j>| over distinct columns sharing a block (0 when d = 1)."""
    D = _as_measurement(D, block_len)
    d, nb = D.block_len, D.n_blocks
    if d == 1:
        return 0.0
    blocks = D.mat.reshape(D.M, nb, d).transpose(1, 0, 2)
    grams = np.abs(np.einsum("bmi,bmj->bij", blocks, blocks))
    grams[:, np.arange(d), np.arange(d)] = 0.0
    return float(grams.max())


def welch_bound(M, N):
    """Lower bound ``sqrt((N - M) / (M (N - 1)))`` on the coherence of unit columns."""
    if not (1 <= M <= N) or N < 2:
        raise ValueError(f"need 1 <= M <= N and N >= 2, got M={M}, N={N}")
    return float(np.sqrt((N - M) / (M * (N - 1))))


def profile(D, block_len=None):
    """All three measures plus the Welch bound for `D`."""
    D = _as_measurement(D, block_len)
    mu = coherence(D)
    if D.block_len == 1:
        mu_b, nu = mu, 0.0
    else:
        mu_b, nu = block_coherence(D), sub_coherence(D)
    return CoherenceProfile(mu=mu, mu_block=mu_b, nu=nu, welch=welch_bound(D.M, D.N))
