"""Semidiscrete canonical Hamiltonian lattice systems.

Structure-preserving simulation of the semidiscrete nonlinear wave and
nonlinear Schrödinger systems on a uniform 1-D lattice, with a nonlocal
skew-adjoint difference operator, discrete variational derivatives, the
canonical Poisson bracket, tangent (variational) flow with the symplectic
2-form, and a catalogue of certified conserved functionals.
"""

__version__ = "1.0.0"

from .mesh import (
    Boundary,
    LatticeField,
    Mesh,
    MeshError,
    decay_margin,
    inner_product,
    sum_functional,
)
from .operators import (
    D_MINUS,
    D_PLUS,
    D_ZERO,
    OperatorError,
    SeriesCoefficients,
    ShiftSeriesOperator,
    adjoint,
    build_dtilde0,
    compute_alpha,
    compute_c,
    d_minus,
    d_plus,
    d_zero,
)
from .potentials import (
    Potential,
    cubic_focusing,
    quadratic_potential,
    quartic_potential,
    zero_potential,
)
from .variational import (
    HamiltonianVectorField,
    LatticeFunctional,
    hamiltonian_field_of,
    is_hamiltonian_field,
    poisson_bracket,
)
from .systems import (
    CanonicalState,
    IntegrationError,
    SystemSpec,
    TangentState,
    evolve_tangent,
    nls_system,
    step_midpoint,
    step_rk4,
    symplectic_form,
    wave_system,
)
from .conservation import (
    ConservationReport,
    Verdict,
    energy_nls,
    energy_wave,
    hierarchy_Rk,
    mass,
    momentum,
    monitor,
    negative_P_star,
    negative_galilean,
    superposition_T,
)
from .lagrangian import (
    SecondOrderState,
    euler_lagrange_rhs,
    inverse_legendre,
    legendre,
)
