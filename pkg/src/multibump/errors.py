"""Exception taxonomy shared by all modules.

Validation problems (bad parameters, malformed configs, geometric
impossibilities) raise ConfigurationError; everything that goes wrong
*during* a computation raises NumericalFailureError or one of its
subclasses.  The CLI maps the two branches to exit codes 2 and 3.
"""


class MultibumpError(Exception):
    """Base class for all package errors."""


class ConfigurationError(MultibumpError):
    """Invalid parameters, config files, or geometric setup."""


class UnsolvableParametersError(MultibumpError):
    """Shooting bracket search exhausted without a sign change."""


class NumericalFailureError(MultibumpError):
    """An iteration failed to converge or a postcondition check failed."""


class InsufficientResolutionError(MultibumpError):
    """A grid or window is too coarse for the requested quantity."""


class NoRootError(NumericalFailureError):
    """A 1D root solve found no sign change in its search interval."""
