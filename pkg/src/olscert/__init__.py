"""Orthogonal least squares (OLS, MOLS, block OLS) with coherence-based recovery certificates."""

from .errors import (DimensionMismatch, DomainError, InconsistentRoots, InvalidConfig,
                     InvalidState, NoCandidate, OlsCertError, RankDeficient)
from .coherence import (CoherenceProfile, MeasurementMatrix, block_coherence, coherence,
                        profile, sub_coherence, welch_bound)
from .solvers import (BlockSparseSignal, HaltReason, RecoveryResult, SolverConfig,
                      SparseSignal, bols_recover, bols_select, mols_recover, mols_select,
                      ols_recover, ols_select, recover)
from .guarantees import (LemmaCheck, NoisyBoundReport, ThresholdReport, asymptotic_bols,
                         asymptotic_ols, bomp_bound, cardano_threshold_bols,
                         cardano_threshold_ols, check_projection_bounds, erc_indicator_bols,
                         erc_indicator_ols, noisy_floor_bols, noisy_floor_ols,
                         probability_bound, t_factor, t_factor_block, tropp_omp)
from .bench import (CurvePoint, ExperimentConfig, FrequencyCurve, gen_block_signal,
                    gen_matrix, gen_signal, run_curve)

__version__ = "0.1.0"
