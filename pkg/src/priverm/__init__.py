"""Finite-class workbench for privileged empirical risk minimization.

Everything here operates on explicitly enumerated hypothesis classes over
small indexed domains, so VC dimensions, risk minimizers, and true errors
are computed exactly rather than estimated.
"""

from priverm.core import (
    FiniteDomain,
    FiniteDistribution,
    Hypothesis,
    HypothesisClass,
    Triple,
    TripleSample,
    aux_loss,
    composite_loss,
    exact_true_error,
    f_loss,
    ignoring_loss,
    zero_one_loss,
)
from priverm.vc import (
    VcReport,
    build_aux_class,
    build_f_class,
    build_loss_class,
    growth_function,
    is_shattered,
    k_fold_union,
    sauer_bound,
    union_class,
    vc_dimension,
)
from priverm.constructions import (
    Theorem5Family,
    construct_lemma1_tight,
    construct_lemma2_witness,
    construct_theorem1,
    construct_theorem5_family,
    phi_prime_subclass,
)
from priverm.erm import (
    ErmResult,
    PrivilegedErmResult,
    empirical_stats,
    erm_privileged,
    erm_standard,
)
from priverm.bounds import (
    BoundInputs,
    alpha_threshold,
    bound_erm,
    bound_pr,
    d_a_interval,
    necessary_condition,
    r_fast,
    r_slow,
    sufficient_condition,
)
from priverm.simulate import (
    ExperimentConfig,
    TrialRecord,
    persist_run,
    run_comparison,
    run_theorem5_experiment,
    sample,
)

__version__ = "0.1.0"
