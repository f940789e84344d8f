"""Exception hierarchy shared across the package."""


class CaventError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(CaventError, ValueError):
    """Bad user input: parameters, config files, dimension mismatches."""


class NumericsError(CaventError, RuntimeError):
    """A numerical invariant was violated (trace drift, negativity, ...)."""


class ParameterRegimeError(CaventError, ValueError):
    """Parameters sit on a singular point of an analytic formula."""


class DegenerateSteadyStateError(NumericsError):
    """The Liouvillian null space has dimension greater than one."""


class ConvergenceError(NumericsError):
    """Time integration failed to reach a steady state within the horizon."""
