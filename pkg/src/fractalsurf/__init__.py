"""Fractal interpolation surfaces: alpha-fractal perturbations and bilinear FIS.

The main entry points are re-exported here; see the submodules for details.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .net import AffineMaps, Net, build_affine_maps, build_net, locate_cell, tau, uniform_net
from .field import SampledField
from .ifs import (ConformanceReport, FractalSurface, SolveResult, SurfaceOrbit, VerticalMapFamily,
                  fixed_point_solve, orbit_evaluate, orbit_residual, rb_apply, trace_evaluate,
                  verify_conformance, verify_corner_conditions, verify_matching_conditions)
from .operators import (PerturbOperator, ScaleFunction, bernstein_operator, composition_operator,
                        multiplication_operator, scale_function)
from .alpha import (AlphaSurface, NeumannResult, NormBounds, apply_inverse_neumann, build_alpha_surface,
                    defect_norm, evaluate, evaluate_points, operator_norm_bounds, perturbation_bound)
from .bilinear import (BilinearData, DimensionVerdict, build_bilinear_fis, co_bilinear_check,
                       corner_bilinear, gamma_constant, piecewise_bilinear, steadiness_check,
                       theoretical_box_dimension)
from .analysis import (BoxCountReport, ConvergenceTable, box_count_dimension, convergence_table_alpha,
                       convergence_table_operator, dt_modulus, lp_norm, lp_norm_of, sup_norm, verify_lp_bound)
from .approx import (ApproxResult, Polynomial2D, PolySpace, best_approx, best_fractal_approx,
                     epsilon_fractal_polynomial, fractal_polynomial, poly_basis, verify_approx_chain)
from .expressions import Expression, parse_expression
from .io import export_field, load_csv
from .config import ExperimentConfig, load_config
