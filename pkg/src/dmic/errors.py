"""Exception hierarchy shared by all modules."""


class DmicError(Exception):
    """Base class for every error raised by the package."""


class InputError(DmicError, ValueError):
    """Malformed channel data, distributions or parameters."""


class NegativeEntry(InputError):
    pass


class RowSumViolation(InputError):
    def __init__(self, index, total):
        self.index = index
        self.total = total
        super().__init__(f"row {index} sums to {total!r}, expected 1")


class ShapeMismatch(InputError):
    pass


class InvalidDistribution(InputError):
    pass


class OverlappingGroups(InputError):
    pass


class OutOfRange(InputError):
    pass


class ParameterOutOfRange(InputError):
    pass


class NotApplicable(DmicError):
    """A theorem's or construction's precondition does not hold."""


class NotOneSided(NotApplicable):
    pass


class NotFactorizable(NotApplicable):
    def __init__(self, max_deviation):
        self.max_deviation = max_deviation
        super().__init__(f"quotient p(y1,y2|x1,x2)/p(y2|.) varies across x2 by {max_deviation:.3g}")


class Infeasible(NotApplicable):
    def __init__(self, x1, certificate):
        self.x1 = x1
        self.certificate = certificate
        super().__init__(f"no degrading map for x1={x1}; minimal L1 residual {certificate:.3g}")


class NonConstantConditionalEntropy(NotApplicable):
    pass


class UnsupportedInputSize(NotApplicable):
    pass


class CollapseBreaksInjectivity(NotApplicable):
    pass


class BudgetExceeded(DmicError):
    def __init__(self, needed, budget):
        self.needed = needed
        self.budget = budget
        super().__init__(f"search needs {needed} evaluations, budget is {budget}")
