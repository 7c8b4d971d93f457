"""Autoconjugate representers for linear monotone operators on R^n."""

from .linop import (INF, DimensionError, LinearMonotoneOperator, MatrixParseError,
                    NotMonotoneError, QuadraticForm, as_operator, certify_monotone, decompose,
                    dump_matrix, is_finite, load_matrix, pairing, parse_matrix, quad_conjugate_eval, quad_eval,
                    rotation)
from .oracle import (AutoconjugacyReport, BivariateFunction, GraphSample, GridSpec,
                     ImproperRestrictionError, audit_monotone, autoconjugacy_residual,
                     extract_graph, fenchel_young_check, grid_conjugate, grid_error_bound,
                     lipschitz_estimate, sampled_conjugate_check, tabulate)
from .fitzpatrick import (fitz_conjugate_eval, fitz_eval, fitz_sampled, fitzpatrick_function,
                          fitzpatrick_conjugate_transpose)
from .minimize import MinimizerReport
from .representers import (SymmetryVerdict, RepresenterKind, a_rep_eval, a_representer, b_rep_eval,
                           c_rep_eval, c_representer, ghoussoub_sum_identity, graph_indicator,
                           hoe_symmetry_check, partial_inf_conv, separable, shear_rep,
                           sum_identity_gaps, unified_eval, unified_representer)
from .gallery import (DiagonalTruncation, GSpec, diag_truncation_reps, energy_sequence_demo,
                      g_axiom_check, id_family, id_family_eval, neglog_domain_classify,
                      neglog_function, neglog_pair, neglog_values)

__version__ = "0.1.0"
