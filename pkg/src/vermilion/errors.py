"""Exception hierarchy.

``ValidationError`` subclasses mean the caller handed us bad input (CLI exit 2).
``InvariantError`` subclasses mean an internal guarantee broke (CLI exit 3).
"""


class VermilionError(Exception):
    pass


class ValidationError(VermilionError, ValueError):
    pass


class InvariantError(VermilionError, RuntimeError):
    pass


class NegativeEntry(ValidationError):
    pass


class NonzeroDiagonal(ValidationError):
    pass


class HoseViolation(ValidationError):
    def __init__(self, node, axis, total, limit):
        self.node = node
        self.axis = axis
        self.total = total
        self.limit = limit
        super().__init__(
            f"hose bound violated: {axis} {node} sums to {total!r} > {limit!r}"
        )


class InvalidK(ValidationError):
    pass


class MatrixFormatError(ValidationError):
    pass


class Infeasible(InvariantError):
    pass


class DeficitMismatch(InvariantError):
    pass


class NotRegular(ValidationError):
    pass


class MatchingNotFound(InvariantError):
    pass


class NotSubstochastic(ValidationError):
    pass


class ScheduleFormatError(ValidationError):
    pass


class InvalidEpsilon(ValidationError):
    pass


class ZeroDemand(ValidationError):
    pass


class ConfigInvalid(ValidationError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class BadDistributionFile(ValidationError):
    pass
