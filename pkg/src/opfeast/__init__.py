"""opfeast: eigenvalues of differential operators without discretizing them.

The solver applies approximate spectral projectors through shifted ODE solves
(ultraspherical spectral method), orthonormalizes function bases with weighted
quasimatrix Householder QR, and extracts eigenvalues by Rayleigh-Ritz
projection; only functions are ever discretized.
"""

__version__ = "0.1.0"

from .chebfun import (ChebFun, QuadRule, SplitWeight, abs_power_weight,
                      clenshaw_curtis_rule, gauss_legendre_rule, inner_product,
                      norm, random_bandlimited)
from .eigensolver import (EigResult, FeastConfig, adapt_rank, contfeast,
                          dense_eig, eigenvalue_condition_number,
                          rayleigh_ritz, residual_norm)
from .errors import (ConfigError, DomainError, DomainMismatchError,
                     IllConditionedShiftError, OpfeastError, PoleProximityError,
                     RankCollapseError, ResolutionFailureError, StagnationError)
from .expressions import parse_coeff_expression
from .filters import (RationalFilter, apply_filter, disk_filter, filter_value,
                      halfplane_filter)
from .operators import (BoundaryCondition, LinDiffOp, Pencil, clamped_free,
                        dirichlet, pinned_ends)
from .quasimatrix import (Quasimatrix, gram, householder_qr, oversampled_gram,
                          svd, trim_by_rank)
from .rqi import RqiTrace, beam_initial_guess, cantilever_root, rayleigh_quotient, rqi_iterate
from .ultraspherical import solve_generalized_shifted, solve_shifted
