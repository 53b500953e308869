"""Tensor product structures induced by families of observable algebras."""
from .algebra import (
    AxiomReport,
    DegenerateDrawError,
    StarAlgebra,
    SuperselectionReport,
    center,
    check_axioms,
    closure,
    commutant,
    full_algebra,
    join,
    join_all,
    minimal_central_projections,
    scalars,
    superselect,
)
from .dynamics import (
    HamiltonianSpec,
    HamiltonianTerm,
    PulseSchedule,
    active_tps,
    assemble,
    average_hamiltonian_error,
    refocus_average,
    strobe,
    symmetrized_schedule,
)
from .entanglement import cut_entropy, entropy, operator_schmidt, reduced_density, to_tps_coordinates
from .factorize import (
    AxiomFailureError,
    TPSFactorization,
    chain_decompose,
    chain_subsystems,
    induced_tps,
    multiplicity_formula,
    wedderburn,
)
from .linalg import DEFAULT_SEED, DEFAULT_TOL, Tolerances

__version__ = "0.1.0"
