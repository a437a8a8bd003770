"""Divergences, one-shot error probabilities and error exponents for s-hypothesis testing.

The main entry points::

    from sdiv import RenyiProfile, ExtremalFamily
    prof = RenyiProfile(rho, sigma)
    prof.xi_s(0.5), prof.chernoff(), prof.hoeffding_b(0.2)
    ExtremalFamily(rho, sigma).q_s_c(s=2.0, C=1.0)
"""

from .channels import KrausChannel, dephasing_channel, identity_channel, random_channel, replacement_channel
from .divergences import (
    RenyiProfile,
    chernoff,
    d_min,
    hoeffding_b,
    lipschitz_constant,
    petz_renyi,
    q_alpha,
    solve_fixed_point,
    umegaki,
    xi_s,
)
from .errors import DegenerateInputError, DomainError, ResourceError, SdivError, ValidationError
from .linalg import density_matrix, fractional_power, load_state, positive_part_trace, save_state, tensor_power
from .oneshot import (
    ErrorPoint,
    ExtremalFamily,
    NPBoundary,
    beta_epsilon,
    error_pair,
    np_boundary,
    p_err_bayes,
    p_err_s_c,
    q_min,
    q_s_c,
)
from .policy import DEFAULT_POLICY, NumericPolicy
from .states import generate_state, pure_qubit, random_state

__version__ = "0.1.0"
