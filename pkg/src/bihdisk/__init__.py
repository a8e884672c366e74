"""Boundary-integral solver for the plane biharmonic problem in corner domains.

The pipeline works on the unit disk: a conformal map with corner metadata
pulls the boundary data back to the circle, a Cauchy-type representation
in the commutative biharmonic algebra reduces the problem to a pair of
integral equations for two real densities, and a corner-graded Nystrom
discretization solves them.  Interior fields and the biharmonic function
itself are reconstructed by quadrature.
"""

from .algebra import (
    E1,
    E2,
    NIL,
    RHO,
    ZERO,
    BihNumber,
    MonogenicComponents,
    biharmonic_residual,
    cauchy_riemann_residual,
    embed_point,
    inverse,
    inverse_difference,
    monomial,
    mul,
)
from .errors import (
    BihdiskError,
    ConfigError,
    DataSingularAtCorner,
    ExponentOutOfRange,
    GridTooSmall,
    MapViolation,
    NodeOnCorner,
    NonInvertible,
    PathExitsDomain,
    SingularityUnresolved,
    SingularSystem,
)
from .geometry import (
    CornerDomainMap,
    CornerSpec,
    arc_chord_ratio,
    builtin_maps,
    corner_distance,
    cusp_map,
    diff_quotient,
    diff_quotients_12,
    identity_map,
    make_map,
    power_map,
)
from .kernels import (
    BoundaryDensity,
    ExponentBook,
    exponent_bookkeeping,
    kernel_omega1,
    kernel_omega2,
    kernel_omega_star,
    kernel_omega_star_star,
)
from .moduli import (
    Modulus,
    ModulusConfig,
    dini_ok,
    log_modulus,
    power_modulus,
    semi_additive_ok,
    strong_dini_ok,
)
from .pipeline import (
    ManufacturedSolution,
    ProblemSpec,
    SolveReport,
    antiderivative_u,
    evaluate_Phi,
    manufactured_problem,
    pull_back,
    solve_13_problem,
)
from .quadrature import (
    DeltaSweepReport,
    LinearSystem,
    QuadratureGrid,
    assemble_system,
    boundary_value_u13,
    delta_sweep,
    density_from_samples,
    integral_I,
    mean_constant,
    schwarz_integral,
    solve_densities,
)

__version__ = "0.1.0"
