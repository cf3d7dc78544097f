"""Isotropic positive definite kernels on products of compact two-point
homogeneous spaces: Jacobi expansions, classification of strict positive
definiteness, and Gram-matrix verification."""

__version__ = "0.1.0"

from . import _backend
from .classification import (ClassificationResult, FiniteSet, Grid, IndexSet, Ray, classify,
                             classify_dc_spd, classify_pd, classify_spd, jk_membership, split_parity)
from .errors import (DimensionError, DomainError, EigenSolverError, NonConvergenceError,
                     NumericalError, QuadratureError, SamplingError, SchemaError, TwoPointError,
                     UnsupportedError, UnsupportedFamilyError, UnsupportedRegimeError)
from .expansions import (CoefficientTable, FamilyTerm, KernelSpec, addition_constant,
                         coefficient_table, compute_coefficient, connection_coefficients,
                         gangolli_coefficient_1d, kernel_eval, kernel_eval_points, load_spec,
                         spec_from_json)
from .spaces import Point, Space, SpaceFamily, cos_half_distance, make_space, sample_point
from .special_functions import (JacobiParams, gauss_jacobi_rule, hypergeometric_2f1, jacobi_eval,
                                jacobi_norm_h, poisson_lhs, poisson_rhs)
from .verification import (GramExperiment, GramReport, NoConstruction, NullCertificate,
                           assemble_gram, construct_null_config, min_eigenvalue, numerical_rank,
                           run_batch, run_experiment)

BACKEND = _backend.NAME
