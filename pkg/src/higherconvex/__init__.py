"""Exact iterated sumsets, higher convexity and certified witness constructions."""
from .construction import (DifferenceIndex, DyadicDecomposition, Refinement, WitnessBatch, WitnessCertificate,
                           difference_index, dyadic_pigeonhole, refine, squeeze_check, theorem3_witnesses,
                           theorem4_witnesses, verify_certificate)
from .convexity import ConvexityReport, convexity_order, forward_differences, function_convexity_check
from .errors import (BadFamily, CapExceeded, DomainViolation, EmptyDomain, HigherConvexError, HypothesisViolated,
                     MonoidMismatch, NotKConvex, NotKConvexFunction, NotMonotone, ParseError, PrecisionExhausted,
                     SqueezeViolated, TooSmall, ZeroDilation)
from .maps import (ConvexMap, DeltaMap, IntegerPower, LogMap, PolynomialMap, RealPower, ShiftedLogExp, delta_h,
                   evaluate, map_set, parse_map)
from .sets import (ADDITIVE, MULTIPLICATIVE, GroupedSet, Monoid, combine, dilate, invert, iterated_combine,
                   iterated_size, translate)

__version__ = "0.1.0"

__all__ = [
    "BadFamily", "CapExceeded", "DomainViolation", "EmptyDomain", "HigherConvexError", "HypothesisViolated",
    "MonoidMismatch", "NotKConvex", "NotKConvexFunction", "NotMonotone", "ParseError", "PrecisionExhausted",
    "SqueezeViolated", "TooSmall", "ZeroDilation",
    "ADDITIVE", "MULTIPLICATIVE", "ConvexMap", "ConvexityReport", "DeltaMap", "DifferenceIndex",
    "DyadicDecomposition", "GroupedSet", "IntegerPower", "LogMap", "Monoid", "PolynomialMap", "RealPower",
    "Refinement", "ShiftedLogExp", "WitnessBatch", "WitnessCertificate", "combine", "convexity_order", "delta_h",
    "difference_index", "dilate", "dyadic_pigeonhole", "evaluate", "forward_differences",
    "function_convexity_check", "invert", "iterated_combine", "iterated_size", "map_set", "parse_map", "refine",
    "squeeze_check", "theorem3_witnesses", "theorem4_witnesses", "translate", "verify_certificate",
]
