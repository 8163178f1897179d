"""Exact computations with multiplicative preprojective relations.

The main entry points:

* :class:`Quiver`, :func:`double`, :func:`build_star` for quivers;
* :class:`Representation` with :func:`phi`, :func:`check_relation`, :func:`sigma_tau`;
* :func:`check_general_stability` and :func:`check_framed_stability`;
* :func:`middle_convolve` and :func:`reduce_dimension_vector`;
* :func:`tuple_to_rep` and :func:`rep_to_tuple` for matrix tuples;
* :func:`run_suite` for the property suites.
"""

from .convolution import (
    check_lusztig_conditions,
    middle_convolve,
    reduce_dimension_vector,
    verify_involution,
)
from .errors import (
    ContractViolation,
    DomainError,
    EmptinessError,
    FunctorInapplicable,
    GenerationFailure,
    ModeError,
    MQVError,
    StabilityViolation,
)
from .generators import InstanceRecipe, generate_solution
from .jacobian import dimension_check
from .linalg import EXACT, FLOAT, Matrix, kernel_basis, rank_numeric, solve_sylvester_intertwiner
from .quiver import DoubledQuiver, Quiver, StarQuiver, a_n, build_star, double, jordan, kronecker
from .representation import (
    FramedRepresentation,
    Representation,
    Subspace,
    arm_complex,
    check_relation,
    frame,
    in_invertibility_domain,
    invariant_closure,
    mu,
    phi,
    phi_split,
    psi,
    quadratic_approx_probe,
    sigma_tau,
)
from .roots import (
    bilinear_form,
    enumerate_Rplus_bounded,
    is_generic,
    reflect_dim,
    reflect_q,
    reflect_theta,
    root_datum_from_graph,
)
from .scalars import GaussianRational, format_scalar, parse_scalar
from .stability import associated_graded, check_framed_stability, check_general_stability
from .star import (
    LocalSystemData,
    beta_stability_report,
    canonical_flags,
    params_from_weights,
    rep_to_tuple,
    trace_coordinates,
    tuple_to_rep,
)
from .suites import run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
