"""Exception types shared across the package."""


class PhialgError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(PhialgError):
    pass


class NotCommutative(PhialgError):
    def __init__(self, triple, deviation):
        self.triple = triple
        self.deviation = deviation
        super().__init__(
            f"structure constants not symmetric at (i, j, k)={triple}: |c_ijk - c_jik|={deviation:.3e}"
        )


class NotAssociative(PhialgError):
    def __init__(self, triple, deviation):
        self.triple = triple
        self.deviation = deviation
        super().__init__(
            f"basis associativity fails at (i, j, k)={triple}: deviation {deviation:.3e}"
        )


class NoUnit(PhialgError):
    def __init__(self, index, deviation):
        self.index = index
        self.deviation = deviation
        super().__init__(f"claimed unit does not fix e_{index}: deviation {deviation:.3e}")


class AssociativityViolation(PhialgError):
    """Raised when a parametric family that should be associative by construction is not."""


class SingularElement(PhialgError):
    pass


class PhiNotInvertible(PhialgError):
    pass


class NoMatch(PhialgError):
    """A two-equation PDE system does not match any recoverable pattern."""

    def __init__(self, stage, detail=""):
        self.stage = stage
        super().__init__(f"no match at stage '{stage}'" + (f": {detail}" if detail else ""))


class NotEquivalent(PhialgError):
    pass


class NewtonDivergence(PhialgError):
    pass


class NoConvergence(PhialgError):
    def __init__(self, message, history=None):
        self.history = list(history) if history is not None else []
        super().__init__(message)


class DegenerateParameters(PhialgError):
    pass


class ConditionViolated(PhialgError):
    """A constructor precondition failed; the message names the condition."""


class DeltaZeroInconsistent(PhialgError):
    pass


class B1Zero(PhialgError):
    pass
