"""Numerical-range geometry and inequality verification for positive
2x2-block matrices: width/inradius/indiameter of W(X), the elliptical width
delta_2, eigenvalue and Schatten-norm verifiers with margin reports, and
reproducible extremal searches.
"""

__version__ = "0.1.0"

from .blockpos import (BlockPositive, FunctionPair, assemble, from_contraction,
                       from_schur, intro_equality_example, partial_trace_sum,
                       sample_random, witness_modulus)
from .config import DEFAULT_TOL, RunConfig, Tolerances
from .corelinalg import (HermitianEigenDecomp, SingularDecomp, func_apply,
                         hermitian_eig, matrix_abs, min_eig_psd_check,
                         normality_defect, operator_norm, polar_decompose,
                         schatten_norm, svd_decompose)
from .ellwidth import (Delta2Estimate, Frame2, compress2, delta2_certificates,
                       delta2_estimate, inradius_certificate, minor_axis_sq)
from .explore import (SearchBudget, SearchResult, derive_trial_seed, scan_q38,
                      search_conj33, search_q26)
from .numrange import (Ellipse, RangeSummary, dist_to_scalars, ellipse_2x2,
                       essential_hermitian_defect, range_summary,
                       smallest_enclosing_disc, support_function, width_of)
from .verify import (MarginReport, batch_verify, verify_cor22, verify_cor23,
                     verify_cor24, verify_cor35, verify_cor36, verify_cor37,
                     verify_prop34, verify_prop39, verify_reverse,
                     verify_thm11, verify_thm21)
