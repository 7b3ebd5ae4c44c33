"""Exception hierarchy shared by every module of the toolkit."""


class HigherConvexError(Exception):
    """Base class; the CLI maps these to exit status 1 unless noted."""


class MonoidMismatch(HigherConvexError):
    pass


class CapExceeded(HigherConvexError):
    def __init__(self, cap, size=None, stage=None):
        self.cap = cap
        self.size = size
        self.stage = stage
        msg = f"cardinality cap {cap} exceeded"
        if size is not None:
            msg += f" ({size} elements"
            msg += f" at {stage})" if stage else ")"
        super().__init__(msg)


class ZeroDilation(HigherConvexError):
    pass


class TooSmall(HigherConvexError):
    pass


class DomainViolation(HigherConvexError):
    pass


class EmptyDomain(DomainViolation):
    pass


class PrecisionExhausted(HigherConvexError):
    pass


class NotMonotone(HigherConvexError):
    pass


class NotKConvex(HigherConvexError):
    pass


class NotKConvexFunction(HigherConvexError):
    pass


class SqueezeViolated(HigherConvexError):
    pass


class HypothesisViolated(HigherConvexError):
    pass


class BadFamily(HigherConvexError):
    pass


class ParseError(HigherConvexError):
    pass
