"""
Closed-form evaluators for the lab.
Re-exports constants, moment identities and bound formulas from the specialized modules.
"""
from .contraction import (
    contraction_bound_sqrt,
    contraction_constants,
    phi,
    psi,
    uniform_sqrt_bound,
    v_tilde,
    wasserstein_bound_constant,
    wasserstein_contraction_bound,
)
from .moments import (
    STATIONARY_MEAN_BRACKET,
    constant_rate_moment,
    deviation_bounds,
    invariant_density,
    invariant_moment_sequence,
    invariant_moment_step,
    inverse_moment_from_mean,
    wasserstein_moment_bound,
)
from .tv_bounds import (
    CoalescenceBounds,
    a_coefficient,
    alpha_fn,
    atom_lower_bound,
    bounds_misc,
    coalescence_bound_q,
    constant_rate_tv_bound,
    ergodic_tv_bound_constant,
    ergodic_tv_bound_storage,
    hybrid_bound_terms,
    hybrid_constant,
    plan_tv_schedule,
    storage_tv_bound,
    tv_bound_hybrid,
)

__all__ = [
    # Wasserstein contraction
    'phi',
    'contraction_constants',
    'psi',
    'v_tilde',
    'contraction_bound_sqrt',
    'uniform_sqrt_bound',
    'wasserstein_bound_constant',
    'wasserstein_contraction_bound',

    # Moments and invariant law
    'STATIONARY_MEAN_BRACKET',
    'wasserstein_moment_bound',
    'deviation_bounds',
    'invariant_density',
    'invariant_moment_step',
    'invariant_moment_sequence',
    'inverse_moment_from_mean',
    'constant_rate_moment',

    # Total variation
    'CoalescenceBounds',
    'alpha_fn',
    'a_coefficient',
    'coalescence_bound_q',
    'plan_tv_schedule',
    'hybrid_constant',
    'hybrid_bound_terms',
    'tv_bound_hybrid',
    'atom_lower_bound',
    'constant_rate_tv_bound',
    'storage_tv_bound',
    'ergodic_tv_bound_constant',
    'ergodic_tv_bound_storage',
    'bounds_misc',
]
