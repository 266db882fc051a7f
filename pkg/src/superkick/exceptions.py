"""Exception and warning types raised by the package."""


class DomainError(ValueError):
    """An argument lies outside the supported domain of an operation."""


class RegionError(DomainError):
    """A momentum point lies outside the kinematically allowed region."""


class SingularWeightError(DomainError):
    """Phase-space weight requested exactly at the threshold, where it diverges."""


class ConvergenceError(RuntimeError):
    """A quadrature failed to reach its tolerance within the node budget."""


class ParaxialityWarning(UserWarning):
    """A scale-separation assumption is only weakly satisfied."""
