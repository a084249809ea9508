"""Operators on spaces of holomorphic functions in several variables.

Kernels and their inverse integral transform, dual pairings with germs on
complementary cylinders, and the projections ``P_k`` of complete circled
domains with block extraction and assembly of operators.
"""
from ._core import BACKEND
from .circled import (BlockFamily, Decomposition, ProjectionFamily, UniformBoundWarning,
                      assemble, decompose, extract_blocks, growth_criterion,
                      identity_decomposition_check, project, project_quadrature,
                      project_zero, projection_bound_check, tail_sum, topology_compare)
from .domains import (Contour, CylindricalDomain, PlanarFactor, ReinhardtDomain, delta,
                      delta_zero, domain_from_json, eta_radii, exhaustion, monomial_max)
from .kernelop import (KernelCoefficients, NamedOperator, OperatorMatrix,
                       dual_growth_demo, dual_kernel_from_functional, dual_pair,
                       dual_pair_exact, inverse_bound, kernel_eval, matrix_from_kernel,
                       matrix_of, operator_norm_estimate, parse_operator, phi_forward,
                       phi_inverse, zoo)
from .multiindex import enumerate_primitives, primitive_factor
from .quadrature import (QuadratureError, QuadratureSpec, boundary_component_split,
                         cauchy_transform, contour_integral, taylor_coeff, taylor_coeffs)
from .rng import SplitMix64
from .series import LaurentSeries, PowerSeries, random_polynomial, series_from_json, sup_norm

__version__ = "0.1.0"
