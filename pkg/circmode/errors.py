# -*- coding: utf-8 -*-
"""Exception hierarchy shared by every circmode module."""


class CircModeError(ValueError):
    """Base class for all errors raised by circmode."""


class InvalidParameterError(CircModeError):
    """A numeric parameter is outside its admissible range."""


class InvalidRangeError(CircModeError):
    """An integration segment is given with its endpoints out of order."""


class InsufficientSampleError(CircModeError):
    """The operation needs more observations than the sample holds."""


class TieError(CircModeError):
    """The sample contains repeated observations."""

    def __init__(self, duplicates):
        self.duplicates = tuple(duplicates)
        shown = ", ".join(f"{value:.12g}" for value in self.duplicates[:5])
        more = "" if len(self.duplicates) <= 5 else f" (+{len(self.duplicates) - 5} more)"
        super().__init__(
            f"Sample has repeated observations: {shown}{more}. "
            "The cross-validation pseudo-likelihood is only bounded for distinct observations."
        )

    def __reduce__(self):
        return (type(self), (self.duplicates,))


class DegenerateDensityError(CircModeError):
    """The kernel density estimate is numerically flat over an arc."""


class DivisionHazardError(CircModeError):
    """A density value in a denominator is too small to divide by."""


class IngestError(CircModeError):
    """An angle file could not be turned into a sample."""


class StudyRunError(CircModeError):
    """A single Monte Carlo run of a study failed."""

    def __init__(self, model_id, n, run_index, cause):
        self.model_id = model_id
        self.n = n
        self.run_index = run_index
        self.cause = cause
        super().__init__(f"Study run failed for model {model_id}, n={n}, run {run_index}: {cause}")

    def __reduce__(self):
        return (type(self), (self.model_id, self.n, self.run_index, self.cause))
