"""
Exception hierarchy

Every failure the library raises on purpose derives from SmallFiberError.
The command line maps the families onto exit codes:
  ParameterError  -> 1 (usage)
  DegeneracyError -> 2 (numerical degeneracy)
  VerdictFailure  -> 3 (a sphere-check verdict came out inconsistent)
"""


class SmallFiberError(Exception):
    """Base class for library errors"""


class ParameterError(SmallFiberError, ValueError):
    """A parameter or input point is outside its admissible range"""


class DegeneracyError(SmallFiberError):
    """A numerical construction is too ill-conditioned to trust"""


class ProjectionError(DegeneracyError):
    """No transverse projection was found within the resample budget"""


class EmbeddingError(SmallFiberError):
    """The straight-line tree embedding cannot be built or measured"""


class CoverageError(SmallFiberError):
    """Two regions were expected to cover the sphere but do not"""


class VerdictFailure(SmallFiberError):
    """A statistical check reported an inconsistent verdict"""

    def __init__(self, instance: str, message: str = ''):
        self.instance = instance
        super().__init__(f"{instance}: {message}" if message else instance)
