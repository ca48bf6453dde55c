"""Arbitrary-precision gamma functions with rigorous midpoint-radius enclosures."""

from .api import AlgorithmUnavailable, evaluate, select_algorithm
from .balls import (ComplexBall, Precision, RealBall, ball_arith, ball_elem,
                    cb, cb_str, contains, overlaps, rb_from_q, rb_from_str,
                    rb_parse, rb_str)
from .kinds import AlgoKind, FunctionKind

__version__ = '0.1.0'

__all__ = [
    'AlgoKind', 'AlgorithmUnavailable', 'ComplexBall', 'FunctionKind',
    'Precision', 'RealBall', 'ball_arith', 'ball_elem', 'cb', 'cb_str',
    'contains', 'evaluate', 'overlaps', 'rb_from_q', 'rb_from_str',
    'rb_parse', 'rb_str', 'select_algorithm', '__version__',
]
