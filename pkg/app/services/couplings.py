"""
Coupling constructions for the lab.
Main entry point that re-exports the specialized coupling modules.
"""
from .maximal_coupling import (
    DensitySpec,
    integrate_on,
    maximal_coupling_1d,
    overlap_integral,
    shifted_density,
)
from .processes import tcp_jump_density
from .shared_clock_couplings import (
    synchronous_coupling_constant,
    synchronous_coupling_storage,
    tv_coupling_constant_rate,
    tv_coupling_storage,
)
from .tcp_couplings import (
    advance_wasserstein,
    attempt_coalescence_tcp,
    hybrid_tv_coupling,
    simulate_wasserstein_coupling,
)
from .trajectory import CoupledState, CouplingOutcome

__all__ = [
    # Types
    'CoupledState',
    'CouplingOutcome',
    'DensitySpec',

    # Variable-rate TCP
    'simulate_wasserstein_coupling',
    'advance_wasserstein',
    'attempt_coalescence_tcp',
    'hybrid_tv_coupling',

    # Shared Poisson clock
    'synchronous_coupling_constant',
    'tv_coupling_constant_rate',
    'synchronous_coupling_storage',
    'tv_coupling_storage',

    # Densities
    'maximal_coupling_1d',
    'overlap_integral',
    'integrate_on',
    'shifted_density',
    'tcp_jump_density',
]
