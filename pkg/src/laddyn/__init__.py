"""laddyn: exact dynamics of a Bell-seeded four-qubit triangular spin ladder.

XX exchange on the rungs, z-axis DM coupling on the legs; spectral (exact)
time evolution, Wootters concurrence and spin correlations, closed-form
cross-checks, and detection of entanglement-transfer and W-state events.
"""

from .analytic import (
    PairClass,
    SpectralParams,
    classify_pair,
    concurrence_formula,
    correlation_formula,
    eta_xi,
    spectral_params,
    transfer_times,
    w_times,
)
from .detect import (
    EventRecord,
    SweepRow,
    find_transfer_events,
    find_w_events,
    sweep,
    w_fidelity,
    w_time_curves,
)
from .dynamics import (
    Propagator,
    evolve,
    evolve_series,
    evolve_states,
    make_propagator,
    one_particle_amplitudes,
    sector_leakage,
)
from .errors import (
    DomainError,
    LaddynError,
    NumericalFailureError,
    SectorLeakageError,
    ValidationError,
)
from .linalg import EigenSystem, hermitian_eig, kron, partial_trace_to_pair
from .measures import (
    PairObservables,
    concurrence_one_particle,
    pair_observables,
    total_spin_expectation,
    two_point_correlation,
    wootters_concurrence,
)
from .model import (
    DEFAULT_GRAPH,
    CouplingGraph,
    ModelParams,
    build_hamiltonian,
    calibrate_leg_orientation,
    initial_state,
    one_particle_hamiltonian,
    spin_operator,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
