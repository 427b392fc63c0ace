"""Exception hierarchy shared by every module of the toolkit.

``DataError`` covers malformed or out-of-contract inputs, ``NumericError``
covers iterative procedures that failed to converge.  The CLI maps these two
branches to distinct exit codes.
"""


class EbtsError(Exception):
    """Base class for all toolkit errors."""


class DataError(EbtsError):
    """Input violates a documented precondition or file contract."""


class NumericError(EbtsError):
    """A numeric procedure failed to reach its stated tolerance."""


# --- weather ingestion ----------------------------------------------------

class MissingColumn(DataError):
    pass


class MalformedRow(DataError):
    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class EmptyInput(DataError):
    pass


class UnsortedInput(DataError):
    pass


class AllGaps(DataError):
    pass


class EmptySplit(DataError):
    pass


# --- dependence modelling -------------------------------------------------

class TooFewSamples(DataError):
    pass


class DegenerateInput(DataError):
    pass


class TauOutOfDomain(DataError):
    pass


class BoundaryInput(DataError):
    pass


class NoFeasibleFamily(NumericError):
    pass


class NumericFailure(NumericError):
    pass


# --- scenario generation ---------------------------------------------------

class KTooLarge(DataError):
    pass


class RangeTooNarrow(DataError):
    pass


class EmptyCluster(DataError):
    pass


# --- linear programming ----------------------------------------------------

class NumericInstability(NumericError):
    pass


class SolverInfeasible(EbtsError):
    """The scheduling LP has no feasible dispatch."""

    def __init__(self, message: str, rows: tuple[str, ...] = ()):
        super().__init__(message)
        self.rows = rows


# --- scheduling model -------------------------------------------------------

class NonpositiveFlow(DataError):
    pass


class InconsistentDimensions(DataError):
    pass


class NotOptimal(EbtsError):
    pass


class InvariantViolation(EbtsError):
    pass
