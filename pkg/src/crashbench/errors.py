"""Exception taxonomy shared by the whole evaluation pipeline.

Every error carries a ``category`` string so that front ends (CLI exit
codes, HTTP status mapping) can dispatch without isinstance ladders:

* ``usage``  - bad request: wrong dimension, variables out of domain, ...
* ``solver`` - the simulation stage failed (spawn, nonzero exit, timeout,
  missing output files)
* ``parse``  - solver output exists but cannot be interpreted
"""


class CrashBenchError(Exception):
    category = "usage"


class DimensionError(CrashBenchError):
    """Requested problem dimension is outside the supported range."""


class DomainError(CrashBenchError):
    """A design-variable component is outside its admissible interval."""


class UnknownObjectiveError(CrashBenchError):
    """An objective name is not in the extraction registry."""


class GeometryError(CrashBenchError):
    """Parameterized geometry is unusable (degenerate polygon, overlapping
    trigger bands, inconsistent part table)."""


class SolverError(CrashBenchError):
    category = "solver"


class SolverSpawnError(SolverError):
    """External solver binary missing or not executable."""


class SolverTimeoutError(SolverError):
    """External solver exceeded its wall-clock budget and was killed."""


class MissingOutputError(SolverError):
    """Solver finished but the expected time-history file is absent."""


class ParseError(CrashBenchError):
    category = "parse"


class MissingColumnError(ParseError):
    pass


class MalformedNumberError(ParseError):
    pass


class NonMonotoneTimeError(ParseError):
    pass


class DegenerateSeriesError(ParseError):
    """Time history carries no usable signal (e.g. all-zero force)."""
