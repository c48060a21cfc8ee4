"""Quotients of complex-valued functions at common simple zeros.

Evaluate, classify and continuously extend f/g where both vanish: the
derivative ratio A with Df = A Dg, path limits along transversal curves,
the scaled-rotation test for a continuous quotient, and a stable evaluator
near the zero set.
"""

from .autodiff import JacobianR, TaylorJet, fd_jacobian, jacobian, jacobian_batch, taylor_jet
from .errors import QltError
from .expr import Expr, cdiv, evaluate, parse, partial
from .extension import AveragedJacobian, QuotientValue, averaged_jacobian, quotient_eval
from .fixtures import FixturePair, bump_sum, catalog, fixture
from .limits import PathSpec, path_limit_empirical, path_limit_formula
from .ratio import (
    ComplexLinear,
    DerivativeRatio,
    NotComplexLinear,
    classify_scaled_rotation,
    derivative_ratio,
)
from .whitney import Factor1D, complex_quotient_1d, peano_derivatives
from .zerofind import ZeroPoint, is_simple_zero, nearest_zero, refine_zero

__all__ = [
    "AveragedJacobian", "ComplexLinear", "DerivativeRatio", "Expr", "Factor1D", "FixturePair",
    "JacobianR", "NotComplexLinear", "PathSpec", "QltError", "QuotientValue", "TaylorJet", "ZeroPoint",
    "averaged_jacobian", "bump_sum", "catalog", "cdiv", "classify_scaled_rotation", "complex_quotient_1d",
    "derivative_ratio", "evaluate", "fd_jacobian", "fixture", "is_simple_zero", "jacobian",
    "jacobian_batch", "nearest_zero", "parse", "partial", "path_limit_empirical", "path_limit_formula",
    "peano_derivatives", "quotient_eval", "refine_zero", "taylor_jet",
]

__version__ = "0.1.0"
