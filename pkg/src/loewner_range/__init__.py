"""Value regions of univalent self-maps of the disc and the radial Loewner flow.

The closed-form boundary curves (``scalar``, ``regions``) are cross-checked
against direct integration of the Loewner equation (``loewner``, ``verify``).
"""
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import (
    DomainError, LoewnerRangeError, NoRoot, NumericalFailure, RootNearOne, StepUnderflow,
    Unsupported,
)
from .loewner import (
    Driver, ExtremalInit, Trajectory, hamiltonian, herglotz_point, integrate_costate,
    integrate_extremal, integrate_free_time, integrate_inverse, integrate_radial,
    optimal_kappa, random_driver,
)
from .regions import (
    Case, CurvePoint, Family, Membership, Region, Verdict, build_free_preimage_region,
    build_preimage_region, build_value_region, contains, contains_free_exact,
    find_sigma_pi_crossings, sample_curve,
)
from .scalar import (
    BranchDirection, Direction, FORWARD_PLUS, INVERSE_PLUS, ProblemParams, Sign,
    coeffs_forward, coeffs_inverse, forward_sigma_argmax, free_time_modulus, hyp_dist, psi,
    sigma_forward, sigma_inverse, solve_radius_forward, solve_radius_inverse, t_star, theta,
    x_along,
)
from .verify import (
    VerifyReport, check_duality, check_extremal_consistency, check_free_time,
    check_hamiltonian_constancy, check_inclusion,
)

__version__ = "0.1.0"
