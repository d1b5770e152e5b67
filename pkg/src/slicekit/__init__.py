"""Numerical toolkit for slice monogenic functions and the operators G, H_a and D_u."""

from .algebra import (
    H,
    CliffordAlgebra,
    Multivector,
    Paravector,
    Quaternion,
    QuaternionAlgebra,
    SliceTriple,
    clifford,
    mv_mul,
    multivector_to_quaternion,
    paravector_inverse,
    quaternion_mul,
    quaternion_to_multivector,
    slice_decompose,
)
from .config import RunConfig, format_config, parse_config
from .diffeo import DiffeoMap, diffeo_apply, family, material_velocity, volume_factor
from .errors import (
    ConfigError,
    ContractError,
    DegeneracyError,
    DomainError,
    EvaluationError,
    SingularInputError,
    SingularKernelError,
    SingularPointError,
    SliceKitError,
    UnsupportedDimensionError,
)
from .kernels import cauchy_kernel_S, kernel_A, kernel_B, kernel_C, kernel_membership_residual, nu_weight
from .moebius import MoebiusMap, covariance_constraints_ok, covariance_factors, moebius_apply, real_family
from .operators import (
    FDConfig,
    JetFn,
    apply_D_u,
    apply_G,
    apply_G_r,
    apply_H_a,
    apply_H_ab,
    apply_H_ar,
    du_relation_residual,
)
from .quadrature import BallDomain, ContourRule, SurfaceRule, VolumeRule, contour_integrate, volume_integrate_singular
from .slice import AxSymDomain, IntrinsicPair, PowerSeriesFn, cr_residual, eval_power_series, representation_eval, splitting_extract
from .theorems import CheckCase, VerificationReport, run_suite

__version__ = "0.1.0"
