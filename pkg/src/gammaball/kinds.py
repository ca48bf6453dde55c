"""Shared enums: which function is being evaluated, by which algorithm."""

import enum


class FunctionKind(enum.Enum):
    GAMMA = 'gamma'
    RGAMMA = 'rgamma'
    LGAMMA = 'lgamma'
    DIGAMMA = 'digamma'


class AlgoKind(enum.Enum):
    AUTO = 'auto'
    STIRLING = 'stirling'
    TAYLOR = 'taylor'
    SPOUGE = 'spouge'
    HYPER = 'hyper'
    HYPER_RATIONAL_BS = 'hyper-bs'
