"""Exception hierarchy shared by the simulation modules and the CLI."""


class WalkError(Exception):
    """Base class for every error raised by the walk simulator."""


class WalkDomainError(WalkError, ValueError):
    """An argument lies outside its mathematical domain (angle, rate, index, epsilon)."""


class DimensionError(WalkError, ValueError):
    """Array shapes do not agree with the cycle length or the 2x2 coin space."""


class InvalidDensityError(WalkError, ValueError):
    """A matrix fails the Hermitian / unit-trace / PSD checks of a density operator."""
