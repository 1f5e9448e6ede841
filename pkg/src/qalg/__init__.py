"""Contextual hidden-parameter model of finite-dimensional quantum mechanics."""

from .algebra import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SpectralDecomposition,
    add,
    adjoint,
    commutator,
    commutes,
    identity,
    mul,
    operator_norm,
    positive_sqrt,
    spectral,
    tensor,
)
from .bell import (
    Direction,
    chsh,
    correlation_contextual,
    correlation_exact,
    epr_anticorrelation,
    lhv_sample,
    singlet,
    spin_observable,
)
from .context import Context, common_context, context_of, is_diagonal_in
from .dynamics import evolve_context, evolve_physical_state_value, heisenberg_evolve
from .ensemble import (
    QuantumState,
    SampleReport,
    born_probabilities,
    check_cbs,
    monte_carlo_average,
    quantum_average,
    sample_physical_state,
    sample_physical_states,
)
from .errors import (
    ContextualityError,
    DimensionError,
    GnsCheckError,
    IrrelevantStateError,
    ModelInvariantError,
    NotHermitianError,
    NumericalError,
    QalgError,
)
from .gns import GnsRepresentation, gns_construct, verify_gns
from .rng import make_rng
from .valuation import PhysicalState, UsageAudit, check_postulates, evaluate, is_relevant

__version__ = "0.1.0"
