"""oseenlab: a numerical laboratory for the steady compressible Oseen system
with slip boundary conditions on convex planar domains."""
from .errors import (
    ConfigError,
    DomainError,
    GeometryUnsupportedError,
    InvalidInputError,
    NumericalError,
    OseenLabError,
    SolverError,
)
from .geometry import (
    ConvexDomain,
    LocalGraph,
    Region,
    classify_boundary_point,
    disk,
    ellipse,
    log_cap,
    power_cap,
    shipped_domains,
)
from .fields import (
    ExprField,
    NodalField,
    PolyField,
    QuadratureSet,
    VectorField,
    boundary_l2,
    div,
    grad,
    h1_norm,
    inflow_antiderivative,
    l2_norm,
    perp_grad,
    rot,
)
from .flatness import FlatnessReport, Verdict, classify_admissibility, g_limit, sobolev_half_check, war1_integral
from .galerkin import GalerkinBasis, GalerkinSolution, OseenParameters, build_basis, solve
from .helmholtz import HelmholtzParts, decompose, solve_potential, solve_stream, vorticity
from .transport import lambda_field, membership_check, regularity_report, solve_transport

__version__ = "0.1.0"
