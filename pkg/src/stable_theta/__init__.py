"""Truncated Fourier expansions of Siegel and Jacobi theta series attached to
even unimodular lattices, with exact degree-lowering operators, products, and
verification tools."""

from .budget import Budget, DEFAULT_NODE_BUDGET
from .errors import (BudgetExceededError, CatalogError, FormatError,
                     ShapeError, UnsupportedError)
from .lattice import (EvenLattice, NormProfile, SIGN_CONVENTION,
                      catalog_lattice, count_vectors_by_norm, direct_sum,
                      is_even_unimodular, load_catalog, min_norm, norm_series,
                      register_lattice, short_vectors)
from .expansion import (HalfIntegralMatrix, JacobiExpansion, JacobiIndex,
                        SiegelExpansion, SingularReport, block_psd,
                        canonical_key, deserialize, is_psd_half_integral,
                        linear_combine, serialize, singular_support_check)
from .theta import jacobi_theta, representation_count, siegel_theta, theta_sc
from .operators import (StableFamilyReport, shimura_product, siegel_jacobi_psi,
                        siegel_phi, verify_stable)
from .schottky import (PairCondition, igusa_form, igusa_genus4_witness,
                       mu_condition, pair_condition, pair_vanishing_case,
                       schottky_jacobi_candidate, theta_difference)
from .numeric import (EvalResult, SiegelJacobiPoint, check_inversion_genus1,
                      check_translation_genus1, eval_jacobi_expansion,
                      eval_siegel_expansion, eval_theta_direct,
                      in_siegel_upper_half, point_from_json)

__version__ = "0.1.0"
