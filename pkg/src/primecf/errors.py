"""Error types shared across the package.

Each class names a distinct failure mode so callers (and the CLI) can map
them to exit behaviour without string matching.
"""


class OutOfRangeError(ValueError):
    """A query exceeded the range a table or sieve was built for."""


class DivergentSeriesError(ValueError):
    """A series parameter lies outside the region of convergence."""


class EnumerationGuardError(RuntimeError):
    """An enumeration would exceed the configured word/node budget."""


class BracketError(RuntimeError):
    """A root finder could not bracket its root; carries end diagnostics."""


class ConstructionInfeasibleError(RuntimeError):
    """No parameter choice satisfies the named feasibility inequality."""


class PrecisionExhaustedError(RuntimeError):
    """Certified digits could not be produced within the retry budget."""


class UndefinedExponentError(ValueError):
    """Every sampled window entry was skipped; growth exponent undefined."""
