"""Exception hierarchy.

The CLI maps these onto exit codes, so every error raised by the library
belongs to exactly one of the four families below.
"""


class TreeDegreeError(Exception):
    """Base class for all errors raised by treedegree."""


# -- malformed input (exit code 2) -------------------------------------------

class InputError(TreeDegreeError, ValueError):
    pass


class SelfLoop(InputError):
    pass


class DuplicateEdge(InputError):
    pass


class NonPositiveProbabilityWeight(InputError):
    pass


class NodeOutOfRange(InputError, IndexError):
    pass


class EdgeNotFound(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SameNode(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class GraphFileError(InputError):
    """Parse error in a graph file; carries the offending line and field."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


# -- numerical failure (exit code 4) -----------------------------------------

class NumericalFailure(TreeDegreeError, ArithmeticError):
    pass


class SingularMatrix(NumericalFailure):
    """Reduced Laplacian is (numerically) singular."""

    def __init__(self, message, condition=None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition estimate {condition:.3e})"
        super().__init__(message)


class IllConditionedInterpolation(NumericalFailure):
    def __init__(self, message, residual=None, condition=None):
        self.residual = residual
        self.condition = condition
        super().__init__(message)


# -- no spanning tree exists (exit code 3) -----------------------------------

class Disconnected(SingularMatrix):
    """Graph is disconnected, or some node cannot reach the in-tree root."""

    def __init__(self, message="graph has no spanning tree", condition=None):
        super().__init__(message, condition)


# -- capability violation (exit code 5) --------------------------------------

class CapabilityError(TreeDegreeError):
    pass


class NonIntegerDegreeWeights(CapabilityError, ValueError):
    pass


class CapExceeded(CapabilityError, RuntimeError):
    pass


class PreconditionViolated(CapabilityError, ValueError):
    pass
