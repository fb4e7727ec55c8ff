"""Classical and quantum dynamics of Hamiltonians H = f(H0) built on the harmonic oscillator."""

from .classical import (
    ClassicalTrajectory,
    analytic_trajectory,
    evolve_f,
    evolve_h0,
    integrate_eom,
    reparametrized_time,
)
from .errors import (
    ConfigurationError,
    ExprDomainError,
    ExprSyntaxError,
    NumericalError,
    OscfunError,
    SingularFrequencyError,
    TruncationError,
    UnknownIdentifierError,
)
from .evolution import (
    DephasingSeries,
    EvolutionPlan,
    autocorrelation,
    coherence_defect,
    dephasing_scan,
    ehrenfest_gap,
    evolve,
    find_revivals,
)
from .expr import differentiate, parse_expression, to_text
from .fock import (
    CoherentLabel,
    FockState,
    ObservableReport,
    coherent_state,
    expectations,
    identity_resolution_check,
    position_wavefunction,
    truncation_rule,
)
from .hamiltonians import HamiltonianFunction, as_hamiltonian, builtin, resolve
from .nogo import (
    ExistenceReport,
    ResidualSample,
    branch_ratio,
    er_impossibility_scan,
    er_residual,
    family_existence_check,
)

__version__ = "0.1.0"
