"""Asymptotic-subrank gap classification of 3-tensors with exact certificates."""

from .classifier import Bucket, GapClass, Subcase, Value, cayley_hyperdeterminant, classify
from .corpus import diag, named, null_tensor, tensor_D, tensor_I, tensor_W
from .degeneration import (DegenerationCertificate, LaurentMatrix, RestrictionCertificate,
                           blaser_lysikov_normalize, degenerate_tensor_to_N, verify_certificate)
from .errors import *  # noqa: F401,F403
from .fields import ExtensionField, PrimeField, Rationals, field_from_name, lifted_field
from .linalg import Matrix, MatrixSpace, max_rank, rank
from .oracle import SearchBudget, brute_restricts_to, brute_subrank, kronecker_power_subrank
from .subspace import SubspaceTag, classify_subspace
from .tensor import (RestrictionMaps, Tensor3, apply, concise_core, flattening_ranks,
                     generic_restrict, kronecker, permute_factors, slice_ranks, subrank_i)
from .values import (Support, binary_entropy, compute_constants, is_tight, support_of,
                     tight_support_value)

__version__ = "0.1.0"
