"""Greedy sparse recovery: OLS, multiple OLS (MOLS) and block OLS (BOLS).

Every selection rule comes in two mathematically equivalent forms so the
forms can be checked against each other:

* OLS / MOLS: the normalized-correlation quotient
  ``|<D_j, r>| / ||P_S^perp D_j||`` (``rule="quotient"``) versus the direct
  post-projection residual ``||P_{S+j}^perp y||`` (``rule="residual"``).
* BOLS: the direct residual after adding a whole block (``rule="residual"``)
  versus the telescoping sum of nested normalized correlations
  (``rule="decomposition"``).

The recover functions use the fast forms internally, with an incrementally
updated projection of the dictionary, and re-solve the least-squares estimate
from scratch every iteration.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .coherence import MeasurementMatrix
from .errors import InvalidConfig, NoCandidate, RankDeficient
from .matcore import index_set, least_squares, orth_basis, project_orth

DEGENERATE_TOL = 1e-10
DEFAULT_TOL = 1e-6


class HaltReason(str, enum.Enum):
    SPARSITY_BUDGET = "SparsityBudget"
    RESIDUAL_TOLERANCE = "ResidualTolerance"
    RANK_DEFICIENCY = "RankDeficiency"


@dataclass(frozen=True, eq=False)
class SparseSignal:
    x: np.ndarray
    support: tuple

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).copy()
        support = index_set(self.support, x.size)
        off = np.ones(x.size, dtype=bool)
        off[list(support)] = False
        if np.any(x[off] != 0):
            raise ValueError("nonzero entries outside the declared support")
        if np.any(x[list(support)] == 0):
            raise ValueError("zero entry on the declared support")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "support", support)

    @property
    def N(self):
        return self.x.size

    @property
    def K(self):
        return len(self.support)


@dataclass(frozen=True, eq=False)
class BlockSparseSignal:
    x: np.ndarray
    block_len: int
    block_support: tuple

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).copy()
        d = int(self.block_len)
        if d < 1 or x.size % d:
            raise ValueError(f"block length {d} does not divide N = {x.size}")
        blocks = index_set(self.block_support, x.size // d)
        energy = np.linalg.norm(x.reshape(-1, d), axis=1)
        on = np.zeros(x.size // d, dtype=bool)
        on[list(blocks)] = True
        if np.any(energy[~on] != 0):
            raise ValueError("nonzero block outside the declared block support")
        if np.any(energy[on] == 0):
            raise ValueError("zero block on the declared block support")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "block_len", d)
        object.__setattr__(self, "block_support", blocks)

    @property
    def N(self):
        return self.x.size

    @property
    def k(self):
        return len(self.block_support)

    @property
    def support(self):
        d = self.block_len
        return tuple(i for b in self.block_support for i in range(b * d, (b + 1) * d))


@dataclass
class RecoveryResult:
    support_estimate: tuple
    estimate: np.ndarray
    residual_norms: list
    iterations: int
    halted_by: HaltReason
    selections: list = field(default_factory=list)

    def as_dict(self):
        return {
            "support": list(self.support_estimate),
            "estimate": [float(v) for v in self.estimate],
            "residual_norms": [float(v) for v in self.residual_norms],
            "iterations": self.iterations,
            "halted_by": self.halted_by.value,
        }


@dataclass(frozen=True)
class SolverConfig:
    """Loop controls.  `max_sparsity` counts atoms for OLS/MOLS and blocks for BOLS."""

    max_sparsity: int
    residual_tol: float = DEFAULT_TOL
    mols_L: int = 1

    def __post_init__(self):
        if self.max_sparsity < 1:
            raise InvalidConfig("max_sparsity must be positive")
        if self.residual_tol < 0:
            raise InvalidConfig("residual_tol must be >= 0")
        if self.mols_L < 1:
            raise InvalidConfig("mols_L must be positive")


def _mat(D):
    return D.mat if isinstance(D, MeasurementMatrix) else np.asarray(D, dtype=float)


def _block_len(D, block_len):
    if block_len is not None:
        return int(block_len)
    return D.block_len if isinstance(D, MeasurementMatrix) else 1


# --- selection rules ----------------------------------------------------

def _quotient_scores(A, Dp, r, exclude):
    """Quotient scores with excluded and degenerate columns set to -inf."""
    pnorm = np.sqrt(np.einsum("ij,ij->j", Dp, Dp))
    corr = np.abs(A.T @ r)
    usable = pnorm >= DEGENERATE_TOL
    usable[list(exclude)] = False
    scores = np.full(A.shape[1], -np.inf)
    scores[usable] = corr[usable] / pnorm[usable]
    return scores


def _projected_dictionary(A, S):
    Q = orth_basis(A[:, list(S)])
    return A - Q @ (Q.T @ A)


def _top(scores, L):
    # stable sort on -score keeps the smallest index first among ties
    order = np.argsort(-scores, kind="stable")[:L]
    if len(order) < L or not np.all(np.isfinite(scores[order])):
        raise NoCandidate(f"fewer than {L} usable candidates remain")
    return order


def ols_select(D, S, r, y=None, rule="quotient"):
    """Index of the next OLS atom given the selected set `S` and residual `r`.

    ``rule="quotient"`` maximizes ``|<D_j, r>| / ||P_S^perp D_j||``;
    ``rule="residual"`` minimizes ``||P_{S+j}^perp y||`` by solving one least
    squares problem per candidate.  Both skip candidates that add no new
    direction and break ties toward the smallest index.
    """
    return int(mols_select(D, S, r, 1, y=y, rule=rule)[0])


def mols_select(D, S, r, L, y=None, rule="quotient"):
    """The `L` candidates with the smallest post-projection residuals, sorted."""
    A = _mat(D)
    S = index_set(S, A.shape[1])
    r = np.asarray(r, dtype=float)
    if rule == "quotient":
        scores = _quotient_scores(A, _projected_dictionary(A, S), r, S)
    elif rule == "residual":
        target = r if y is None else np.asarray(y, dtype=float)
        scores = np.full(A.shape[1], -np.inf)
        chosen = set(S)
        for j in range(A.shape[1]):
            if j in chosen:
                continue
            cols = list(S) + [j]
            try:
                resid = project_orth(A[:, cols], target)
            except RankDeficient:
                continue
            scores[j] = -float(resid @ resid)
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return index_set(_top(scores, L))


def _block_reductions(Dp, r, d, exclude_blocks):
    """Residual-power reduction from adding each block; -inf where unusable."""
    M, N = Dp.shape
    nb = N // d
    stacked = Dp.reshape(M, nb, d).transpose(1, 0, 2)
    Q, R = np.linalg.qr(stacked)
    diag = np.abs(np.diagonal(R, axis1=1, axis2=2))
    gain = ((Q.transpose(0, 2, 1) @ r) ** 2).sum(axis=1)
    usable = diag.min(axis=1) >= DEGENERATE_TOL
    usable[list(exclude_blocks)] = False
    return np.where(usable, gain, -np.inf)


def _nested_block_score(A, S, cols, y):
    """Sum over the block's columns of squared correlations with nested projections."""
    total = 0.0
    resid = project_orth(A[:, list(S)], y)
    prefix = list(S)
    for c in cols:
        col = A[:, c]
        denom = np.linalg.norm(project_orth(A[:, prefix], col))
        if denom < DEGENERATE_TOL:
            return None
        total += (col @ resid) ** 2 / denom ** 2
        prefix.append(c)
        resid = project_orth(A[:, prefix], y)
    return total


def bols_select(D, S_blocks, r, y=None, rule="residual", block_len=None):
    """Index of the next BOLS block.

    ``rule="residual"`` picks the block whose addition leaves the smallest
    residual.  ``rule="decomposition"`` scores each block by the telescoping
    sum of squared correlations ``<D_j, r_j>^2 / ||P^perp D_j||^2`` in which
    both the residual and the projection absorb the block's earlier columns
    one at a time, in natural column order.
    """
    A = _mat(D)
    d = _block_len(D, block_len)
    nb = A.shape[1] // d
    S_blocks = index_set(S_blocks, nb)
    S = [i for b in S_blocks for i in range(b * d, (b + 1) * d)]
    r = np.asarray(r, dtype=float)
    target = r if y is None else np.asarray(y, dtype=float)
    if rule == "residual":
        scores = _block_reductions(_projected_dictionary(A, S), r, d, S_blocks)
    elif rule == "decomposition":
        scores = np.full(nb, -np.inf)
        chosen = set(S_blocks)
        for b in range(nb):
            if b in chosen:
                continue
            s = _nested_block_score(A, S, range(b * d, (b + 1) * d), target)
            if s is not None:
                scores[b] = s
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return int(_top(scores, 1)[0])


# --- recovery loops -----------------------------------------------------

class _Projector:
    """P_S^perp applied to every column of A, updated as S grows."""

    def __init__(self, A):
        self.A = A
        self.Dp = A.copy()
        self.Q = np.zeros((A.shape[0], 0))

    def add(self, cols):
        for c in cols:
            u = self.Dp[:, c].copy()
            u -= self.Q @ (self.Q.T @ u)  # second Gram-Schmidt pass
            nrm = np.linalg.norm(u)
            if nrm < DEGENERATE_TOL:
                raise RankDeficient(f"column {c} is in the span of the selection")
            u /= nrm
            self.Dp -= np.outer(u, u @ self.Dp)
            self.Q = np.column_stack([self.Q, u])


def _check_y(A, y):
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size != A.shape[0]:
        raise InvalidConfig(f"y must be a vector of length M = {A.shape[0]}")
    return y


def _greedy(A, y, cfg, pick):
    M, N = A.shape
    proj = _Projector(A)
    S = ()
    x = np.zeros(N)
    r = y.copy()
    norms = [float(np.linalg.norm(y))]
    selections = []
    halted = None
    while len(selections) < cfg.max_sparsity and norms[-1] > cfg.residual_tol:
        try:
            new = pick(proj, S, r)
            proj.add(new)
            S_next = index_set(S + tuple(new))
            coef = least_squares(A[:, list(S_next)], y)
        except (NoCandidate, RankDeficient):
            halted = HaltReason.RANK_DEFICIENCY
            break
        S = S_next
        selections.append(tuple(int(i) for i in new))
        x = np.zeros(N)
        x[list(S)] = coef
        r = y - A[:, list(S)] @ coef
        norms.append(float(np.linalg.norm(r)))
    if halted is None:
        halted = (HaltReason.RESIDUAL_TOLERANCE if norms[-1] <= cfg.residual_tol
                  else HaltReason.SPARSITY_BUDGET)
    return RecoveryResult(S, x, norms, len(selections), halted, selections)


def ols_recover(D, y, cfg):
    """Orthogonal least squares: one atom per iteration."""
    A = _mat(D)
    y = _check_y(A, y)
    if cfg.max_sparsity > A.shape[0]:
        raise InvalidConfig("OLS needs K <= M")

    def pick(proj, S, r):
        return [int(_top(_quotient_scores(A, proj.Dp, r, S), 1)[0])]

    return _greedy(A, y, cfg, pick)


def mols_recover(D, y, cfg):
    """Multiple OLS: the `cfg.mols_L` best atoms per iteration, no final pruning."""
    A = _mat(D)
    y = _check_y(A, y)
    L = cfg.mols_L
    if L * cfg.max_sparsity > A.shape[0]:
        raise InvalidConfig("MOLS needs L*K <= M")

    def pick(proj, S, r):
        return sorted(int(j) for j in _top(_quotient_scores(A, proj.Dp, r, S), L))

    return _greedy(A, y, cfg, pick)


def bols_recover(D, y, cfg, block_len=None):
    """Block OLS: one whole block of `d` atoms per iteration, at most k iterations."""
    A = _mat(D)
    y = _check_y(A, y)
    d = _block_len(D, block_len)
    if A.shape[1] % d:
        raise InvalidConfig(f"block length {d} does not divide N = {A.shape[1]}")
    if cfg.max_sparsity * d > A.shape[0]:
        raise InvalidConfig("BOLS needs k*d <= M")

    def pick(proj, S, r):
        blocks = {i // d for i in S}
        b = int(_top(_block_reductions(proj.Dp, r, d, blocks), 1)[0])
        return list(range(b * d, (b + 1) * d))

    return _greedy(A, y, cfg, pick)


def recover(D, y, algo, cfg, block_len=None):
    """Dispatch on ``algo`` in {"ols", "mols", "bols"}."""
    algo = algo.lower()
    if algo == "ols":
        return ols_recover(D, y, cfg)
    if algo == "mols":
        return mols_recover(D, y, cfg)
    if algo == "bols":
        return bols_recover(D, y, cfg, block_len=block_len)
    raise ValueError(f"unknown algorithm {algo!r}")
