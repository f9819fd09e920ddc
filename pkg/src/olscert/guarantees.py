"""Coherence-based recovery guarantees for OLS, MOLS and BOLS.

Scalar formulas raise :class:`DomainError` instead of returning a number
whenever their preconditions fail.  The sparsity thresholds are computed as
the first failure point of the underlying rational condition (sign scan plus
bisection); the closed-form cubic root is carried along as a cross-check.
"""

import itertools
import math
from dataclasses import dataclass, asdict

import numpy as np

from .coherence import MeasurementMatrix
from .errors import DomainError, InconsistentRoots, InvalidState
from .matcore import index_set, norm_11, orth_basis, pseudoinverse_apply, rho_c

SCAN_STEP = 0.25
BISECT_TOL = 1e-9
ROOT_TOL = 1e-4
_SCAN_LIMIT = 1e8


@dataclass(frozen=True)
class ThresholdReport:
    threshold: float
    coefficients: tuple
    discriminant: float
    method: str
    cardano: float
    bisection: float
    inputs: dict

    def as_dict(self):
        out = asdict(self)
        out["coefficients"] = list(self.coefficients)
        return out


@dataclass(frozen=True)
class NoisyBoundReport:
    vector_floor: float
    entry_floor: float
    inputs: dict

    def as_dict(self):
        return asdict(self)


# --- normalization-factor bounds ----------------------------------------

def _t_value(mu, K):
    den = 1.0 - (K - 1) * mu
    if den <= 0:
        raise DomainError(f"mu (K - 1) = {(K - 1) * mu:.6g} must be < 1", den)
    inner = 1.0 - (1 + (K - 1) * mu) * K * mu ** 2 / den ** 2
    if inner <= 0:
        raise DomainError("normalization bound is vacuous (inner term <= 0)", inner)
    return 1.0 / inner


def t_factor(mu, K):
    """Inverse squared lower bound on ``||P_S^perp D_i||`` for K-sparse supports."""
    if mu < 0 or K < 1:
        raise DomainError(f"need mu >= 0 and K >= 1, got mu={mu}, K={K}")
    return _t_value(mu, K)


def _t_block_value(mu, nu, k, d):
    if mu * (k * d - 1) >= 1:
        raise DomainError(f"mu (kd - 1) = {mu * (k * d - 1):.6g} must be < 1")
    den = 1.0 - (d - 1) * nu - (k - 1) * d * mu
    if den <= 0:
        raise DomainError("(d - 1) nu + (k - 1) d mu must be < 1", den)
    ratio = math.sqrt(1 + (k * d - 1) * mu) * math.sqrt(k * d * mu ** 2) / den
    inner = 1.0 - ratio ** 2
    if inner <= 0:
        raise DomainError("block normalization bound is vacuous (inner term <= 0)", inner)
    return 1.0 / inner


def t_factor_block(mu, nu, k, d):
    """Block analogue of :func:`t_factor` using sub-coherence `nu`."""
    if mu < 0 or nu < 0 or k < 1 or d < 1:
        raise DomainError(f"bad arguments mu={mu}, nu={nu}, k={k}, d={d}")
    return _t_block_value(mu, nu, k, d)


def projection_bound_classic(mu, K):
    """The older lower bound ``sqrt(1 - K mu)`` kept for comparison."""
    if K * mu >= 1:
        raise DomainError(f"K mu = {K * mu:.6g} must be < 1")
    return math.sqrt(1.0 - K * mu)


# --- exact-recovery indicators --------------------------------------------

def _mat_and_d(D, block_len=None):
    if isinstance(D, MeasurementMatrix):
        return D.mat, D.block_len if block_len is None else int(block_len)
    return np.asarray(D, dtype=float), 1 if block_len is None else int(block_len)


def _orth_norms(A, S, cols):
    """``||P_S^perp A_c||`` for each c in `cols`."""
    Q = orth_basis(A[:, list(S)])
    C = A[:, list(cols)]
    C = C - Q @ (Q.T @ C)
    return np.linalg.norm(C, axis=0)


def _nested_orth_norms(A, S, cols, d):
    """Per-block nested norms: column j of a block is projected off S and the
    block's preceding columns."""
    out = np.empty(len(cols))
    Q = orth_basis(A[:, list(S)])
    for start in range(0, len(cols), d):
        block = list(cols[start:start + d])
        C = A[:, block]
        C = C - Q @ (Q.T @ C)
        # QR of the projected block: |R_jj| is the norm of column j after
        # removing the block's first j - 1 columns as well.
        R = np.linalg.qr(C, mode="r")
        out[start:start + d] = np.abs(np.diag(R))
    return out


def erc_indicator_ols(D, true_support, selected):
    """Mixed-norm exact-recovery indicator for the next OLS/MOLS step.

    A value below 1 certifies that OLS picks a true atom next (and that
    MOLS picks at least one).
    """
    A, _ = _mat_and_d(D)
    N = A.shape[1]
    T0 = index_set(true_support, N)
    S = index_set(selected, N)
    if not set(S) <= set(T0):
        raise InvalidState("selected set is not contained in the true support")
    if len(S) >= len(T0):
        raise InvalidState("no true atoms remain to be selected")
    rest = [i for i in T0 if i not in S]
    off = [i for i in range(N) if i not in set(T0)]
    if not off:
        return 0.0
    Qr = A[:, rest] / _orth_norms(A, S, rest)
    Qo = A[:, off] / _orth_norms(A, S, off)
    return norm_11(pseudoinverse_apply(Qr, Qo))


def erc_indicator_bols(D, true_block_support, selected_blocks, block_len=None):
    """Block mixed-norm exact-recovery indicator for the next BOLS step."""
    A, d = _mat_and_d(D, block_len)
    nb = A.shape[1] // d
    T0 = index_set(true_block_support, nb)
    Sb = index_set(selected_blocks, nb)
    if not set(Sb) <= set(T0):
        raise InvalidState("selected blocks are not contained in the true block support")
    if len(Sb) >= len(T0):
        raise InvalidState("no true blocks remain to be selected")

    def cols(blocks):
        return [i for b in blocks for i in range(b * d, (b + 1) * d)]

    S = cols(Sb)
    rest = cols(b for b in T0 if b not in Sb)
    off = cols(b for b in range(nb) if b not in set(T0))
    if not off:
        return 0.0
    Qr = A[:, rest] / _nested_orth_norms(A, S, rest, d)
    Qo = A[:, off] / _nested_orth_norms(A, S, off, d)
    return rho_c(pseudoinverse_apply(Qr, Qo), d, d)


# --- sparsity thresholds -----------------------------------------------

def _cardano_root(a, b, c, e, near):
    """Real root of ``a t^3 + b t^2 + c t + e`` via Cardano, plus q, p, Delta.

    With a negative discriminant all three roots are real and the one
    closest to `near` is returned (trigonometric form).
    """
    q = (27 * a * a * e - 9 * a * b * c + 2 * b ** 3) / (27 * a ** 3)
    p = (3 * a * c - b * b) / (3 * a * a)
    disc = (q / 2) ** 2 + (p / 3) ** 3
    shift = -b / (3 * a)
    if disc >= 0:
        s = math.sqrt(disc)
        root = float(np.cbrt(-q / 2 + s) + np.cbrt(-q / 2 - s)) + shift
    else:
        amp = 2 * math.sqrt(-p / 3)
        phi = math.acos(max(-1.0, min(1.0, (3 * q / (2 * p)) * math.sqrt(-3 / p))))
        roots = [amp * math.cos(phi / 3 - 2 * math.pi * j / 3) + shift for j in range(3)]
        root = min(roots, key=lambda t: abs(t - near))
    return root, disc


def _first_failure(holds):
    """Smallest t > 0 at which ``holds(t)`` turns false: scan, then bisect."""
    lo = 0.0
    hi = SCAN_STEP
    while holds(hi):
        lo, hi = hi, hi + SCAN_STEP
        if hi > _SCAN_LIMIT:
            raise DomainError("condition never fails; threshold unbounded")
    for _ in range(200):
        if hi - lo <= BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ols_condition(mu, K):
    """Left side of ``2 K T mu / (2 - (K - T) mu) < 1``, or ``inf`` outside its domain."""
    # evaluated for any K > 0 (the scan starts below K = 1)
    try:
        T = _t_value(mu, K)
    except DomainError:
        return math.inf
    den = 2 - (K - T) * mu
    return math.inf if den <= 0 else 2 * K * T * mu / den


def bols_condition(mu, mu_block, nu, d, kd):
    """Block counterpart of :func:`ols_condition` as a function of total sparsity kd."""
    k = kd / d
    try:
        T = _t_block_value(mu, nu, k, d)
    except DomainError:
        return math.inf
    den = 2 - (k - T) * d * mu_block
    return math.inf if den <= 0 else 2 * T * kd * mu_block / den


def _report(coeffs, mu_inputs, holds):
    bis = _first_failure(holds)
    card, disc = _cardano_root(*coeffs, near=bis)
    if not abs(card - bis) <= ROOT_TOL * max(1.0, abs(bis)):
        raise InconsistentRoots(
            f"closed form gives {card!r} but bisection gives {bis!r}")
    return ThresholdReport(threshold=bis, coefficients=tuple(coeffs),
                           discriminant=disc, method="Bisection",
                           cardano=card, bisection=bis, inputs=mu_inputs)


def ols_cubic(mu):
    """Coefficients (alpha, beta, gamma, delta) of the cubic in K."""
    return (-mu ** 4 / 2 + 1.5 * mu ** 3,
            mu ** 4 / 2 - 3 * mu ** 3 - 4 * mu ** 2,
            1.5 * mu ** 3 + 7 * mu ** 2 + 3.5 * mu,
            -0.5 * mu ** 3 - 2 * mu ** 2 - 2.5 * mu - 1)


def bols_cubic(mu, mu_block, nu, d):
    """Coefficients of the cubic in kd."""
    g = (d - 1) * nu - 1 - d * mu
    mb = mu_block
    return (-mb * mu ** 3 + 3 * mb * mu ** 2,
            (2 + mb) * mu ** 3 - (d * mb + mb + 2) * mu ** 2 + 6 * mb * g * mu,
            -2 * mu ** 3 + 2 * mu ** 2 - (2 * d * mb * g + 4 * g) * mu + 3 * mb * g ** 2,
            -d * mb * g ** 2 - 2 * g ** 2)


def cardano_threshold_ols(mu):
    """Largest sparsity K (exclusive) certified by the coherence condition."""
    if not 0 < mu < 1:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    return _report(ols_cubic(mu), {"mu": mu}, lambda K: ols_condition(mu, K) < 1)


def cardano_threshold_bols(mu, mu_block, nu, d):
    """Largest total sparsity kd (exclusive) certified for BOLS."""
    if not 0 < mu < 1 or mu_block <= 0 or nu < 0 or d < 1:
        raise DomainError(
            f"need 0 < mu < 1, mu_block > 0, nu >= 0, d >= 1; got "
            f"{mu}, {mu_block}, {nu}, {d}")
    return _report(bols_cubic(mu, mu_block, nu, d),
                   {"mu": mu, "mu_block": mu_block, "nu": nu, "d": d},
                   lambda kd: bols_condition(mu, mu_block, nu, d, kd) < 1)


# --- asymptotic and comparison formulas ----------------------------------

def _positive(**kw):
    for name, v in kw.items():
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")


def asymptotic_ols(mu):
    """Small-coherence limit of the OLS/MOLS threshold, ``(2/3)(1/mu + 1)``."""
    _positive(mu=mu)
    return 2.0 / 3.0 * (1.0 / mu + 1.0)


def asymptotic_bols(mu_block, d):
    """Small-coherence limit of the BOLS threshold on kd."""
    _positive(mu_block=mu_block, d=d)
    return 2.0 / 3.0 * (1.0 / mu_block + 7.0 * d / 6.0 - 1.0 / 6.0)


def tropp_omp(mu):
    """The classical OMP coherence condition ``(1/2)(1/mu + 1)``."""
    _positive(mu=mu)
    return 0.5 * (1.0 / mu + 1.0)


def bomp_bound(mu_block, d):
    """The classical BOMP block-coherence condition ``(1/2)(1/mu_B + d)``."""
    _positive(mu_block=mu_block, d=d)
    return 0.5 * (1.0 / mu_block + d)


def remark1_cap(M, omega):
    """Large-dimension cap on the OLS threshold at compression ratio `omega`."""
    _positive(M=M)
    if not 0 < omega < 1:
        raise DomainError(f"omega must lie in (0, 1), got {omega}")
    return 2.0 / 3.0 * (math.sqrt(M / (1 - omega)) + 1)


def w_factor(d):
    """Leading coefficient of the BOLS large-dimension cap."""
    _positive(d=d)
    U = -8 / 729 * d ** 3 + 4 / 81 * d ** 2 - 2 / 27 * d + 1 / 27
    V = -4 / 81 * d ** 2 + 4 / 27 * d - 1 / 9
    # U^2 + V^3 cancels analytically; clip the rounding residue
    s = math.sqrt(max(U * U + V ** 3, 0.0))
    return float(np.cbrt(-U + s) + np.cbrt(-U - s)) + 2 * d / 9 + 2 / 3


def remark4_cap(M, omega, d):
    """Large-dimension cap on the BOLS threshold (zero sub-coherence)."""
    _positive(M=M, d=d)
    if not 0 < omega < 1:
        raise DomainError(f"omega must lie in (0, 1), got {omega}")
    return w_factor(d) * math.sqrt(M / (1 - omega)) + 5 * d / 9 + 1 / 9


# --- probability bounds ----------------------------------------------------

def probability_constant(M, K_or_kd, tau, T_or_TB, d=1):
    k = K_or_kd / d
    return M * (k - T_or_TB) ** 2 * d ** 2 * tau ** 2 / (4 * (K_or_kd - 1) ** 2) - 1


def probability_bound(M, K_or_kd, tau, T_or_TB, d=1):
    """Lower bound on the probability that a Gaussian M x K block is incoherent enough.

    For ``d > 1``, `K_or_kd` is the total sparsity kd and `T_or_TB` the block
    normalization factor.  Natural logarithm throughout.
    """
    if K_or_kd < 2 or d < 1:
        raise DomainError(f"need K >= 2 and d >= 1, got K={K_or_kd}, d={d}")
    C = probability_constant(M, K_or_kd, tau, T_or_TB, d)
    if C <= 0:
        raise DomainError(f"bound is vacuous: C = {C:.6g} <= 0; grow M or tau", C)
    n = K_or_kd - 1
    k = K_or_kd / d
    tail = k * math.exp(-n / 2 * (C - math.log1p(C))) / (C * math.sqrt(math.pi * n))
    return min(1.0, max(0.0, 1.0 - tail))


# --- noisy recovery floors ----------------------------------------------

def noise_amplitude(M):
    """``sqrt(M + 2 sqrt(M log M))`` with natural log."""
    return math.sqrt(M + 2 * math.sqrt(M * math.log(M)))


def noisy_floor_ols(mu, K, l, sigma, M):
    """Signal-energy floors above which OLS/MOLS keep picking true atoms under noise.

    Returns the floor on the norm of the not-yet-selected part of x
    (``vector_floor``) and the per-entry floor that guarantees the whole
    support (``entry_floor``).
    """
    if not 0 <= l < K:
        raise DomainError(f"need 0 <= l < K, got l={l}, K={K}")
    if sigma < 0 or M < 2:
        raise DomainError(f"need sigma >= 0 and M >= 2, got sigma={sigma}, M={M}")
    T = t_factor(mu, K)
    a = 2 - (K - T) * mu
    den = (a - 2 * K * T * mu) * (1 - (K - 1) * mu)
    if a - 2 * K * T * mu <= 0 or 1 - (K - 1) * mu <= 0:
        raise DomainError("noiseless recovery condition fails; no noisy guarantee", den)
    entry = 2 * a * sigma * noise_amplitude(M) / den
    return NoisyBoundReport(
        vector_floor=math.sqrt(K - l) * entry, entry_floor=entry,
        inputs={"mu": mu, "K": K, "l": l, "sigma": sigma, "M": M})


def noisy_floor_bols(mu, mu_block, k, d, l, sigma, M, nu=0.0):
    """Block counterpart of :func:`noisy_floor_ols`; floors apply to block norms."""
    if not 0 <= l < k:
        raise DomainError(f"need 0 <= l < k, got l={l}, k={k}")
    if sigma < 0 or M < 2:
        raise DomainError(f"need sigma >= 0 and M >= 2, got sigma={sigma}, M={M}")
    T = t_factor_block(mu, nu, k, d)
    a = 2 - (k - T) * d * mu_block
    gap = a - 2 * T * k * d * mu_block
    tail = 1 - (k * d - 1) * mu
    if gap <= 0 or tail <= 0:
        raise DomainError("noiseless block recovery condition fails; no noisy guarantee",
                          gap * tail)
    entry = 2 * a * math.sqrt(d) * sigma * noise_amplitude(M) / (gap * tail)
    return NoisyBoundReport(
        vector_floor=math.sqrt(k - l) * entry, entry_floor=entry,
        inputs={"mu": mu, "mu_block": mu_block, "nu": nu, "k": k, "d": d,
                "l": l, "sigma": sigma, "M": M})


# --- empirical check of the normalization bounds -----------------------------

@dataclass(frozen=True)
class LemmaCheck:
    lower_bound: float
    min_norm: float
    max_norm: float
    supports_checked: int
    violations: int

    def as_dict(self):
        return asdict(self)


def check_projection_bounds(D, K, nu=None, block_len=None, tol=1e-9):
    """Measure ``||P_S^perp D_i||`` over every partial support and count bound violations.

    With ``block_len == 1`` the supports are all column sets of size at most
    ``K - 1`` and the bound is ``1/sqrt(t_factor(mu, K))``.  With blocks, `K`
    is the block sparsity k, supports are unions of at most ``k - 1`` blocks
    and the bound is ``1/sqrt(t_factor_block(mu, nu, k, d))``.
    """
    from .coherence import coherence, sub_coherence

    A, d = _mat_and_d(D, block_len)
    mu = coherence(MeasurementMatrix.from_array(A))
    if d == 1:
        bound = 1 / math.sqrt(t_factor(mu, K))
    else:
        if nu is None:
            nu = sub_coherence(MeasurementMatrix.from_array(A, d))
        bound = 1 / math.sqrt(t_factor_block(mu, nu, K, d))
    nb = A.shape[1] // d
    lo, hi, count, bad = math.inf, -math.inf, 0, 0
    for size in range(K):
        for blocks in itertools.combinations(range(nb), size):
            S = [i for b in blocks for i in range(b * d, (b + 1) * d)]
            out = np.setdiff1d(np.arange(A.shape[1]), S)
            norms = _orth_norms(A, S, out)
            lo, hi = min(lo, norms.min()), max(hi, norms.max())
            bad += int(np.sum((norms < bound - tol) | (norms > 1 + 1e-12)))
            count += 1
    return LemmaCheck(bound, float(lo), float(hi), count, bad)
