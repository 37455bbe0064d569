"""Exact Pfaffian, determinant and symmetric-function kernels, with a
registry of identity checks around weighted Schur sums."""

from .combinat import Partition, enumerate_partitions, enumerate_Pn, omega_weight
from .linalg import Matrix, SkewMatrix, determinant, pfaffian
from .ring import Poly, RatFun, SeriesCap, var, variables, xvars
from .symfun import p_basis_decompose, schur, weighted_sum
from .verify import IdentityCheck, VerificationReport, run_check, run_suite

__version__ = "0.1.0"

__all__ = [
    "IdentityCheck",
    "Matrix",
    "Partition",
    "Poly",
    "RatFun",
    "SeriesCap",
    "SkewMatrix",
    "VerificationReport",
    "determinant",
    "enumerate_Pn",
    "enumerate_partitions",
    "omega_weight",
    "p_basis_decompose",
    "pfaffian",
    "run_check",
    "run_suite",
    "schur",
    "var",
    "variables",
    "weighted_sum",
    "xvars",
]
