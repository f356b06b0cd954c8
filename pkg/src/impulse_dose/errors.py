"""Exception types raised by the library."""


class ImpulseDoseError(Exception):
    """Base class for all library errors."""


class InvalidParameter(ImpulseDoseError, ValueError):
    """A parameter lies outside its admissible range."""


class OutOfRange(ImpulseDoseError, ValueError):
    """An argument falls outside the domain of a function."""


class DegenerateSpectrum(ImpulseDoseError, ValueError):
    """Plant eigenvalues are not pairwise distinct."""


class DegenerateSlope(ImpulseDoseError, ValueError):
    """The Hill slope vanishes at the operating point, so no gain can be realised."""
