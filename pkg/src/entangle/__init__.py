"""Simulations of teleportation, purification and concentration of
entanglement, and numerical entanglement measures for qubit systems."""

__version__ = "0.1.0"

from .core import (
    BELL_STATES,
    PHI_MINUS,
    PHI_PLUS,
    PSI_MINUS,
    PSI_PLUS,
    BellCoefficients,
    CheckFailed,
    DensityMatrix,
    InvalidStateError,
    LocalOperator,
    PureState,
    apply_local,
    ket,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    schmidt,
    tensor,
    von_neumann_entropy,
)
from .concentration import asymptotic_rate, convergence_table, expected_entanglement
from .measures import (
    concurrence,
    entanglement_of_formation,
    entropy_of_entanglement,
    is_separable,
    relative_entropy,
    relative_entropy_of_entanglement,
    werner,
    werner_sweep,
)
from .purification import fidelity_max_entangled, iterate, qpa_gate_kept, qpa_gate_round, qpa_map
from .separable import RelEntOptions, SeparableMixture
from .teleportation import average_fidelity, teleport, teleport_entangled_half
from .locc import (
    audit_monotonicity,
    audit_separable_closure,
    check_additivity_pure,
    check_purification_bound,
    check_teleport_accounting,
)
