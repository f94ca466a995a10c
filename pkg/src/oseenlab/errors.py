"""Exception hierarchy shared by every oseenlab module."""


class OseenLabError(Exception):
    """Base class for all library errors."""


class InvalidInputError(OseenLabError, ValueError):
    pass


class DomainError(OseenLabError, ValueError):
    """A query point lies outside the range where an operation is defined."""


class GeometryUnsupportedError(OseenLabError):
    """The boundary does not have exactly two points with n1 = 0."""


class NumericalError(OseenLabError):
    pass


class SolverError(OseenLabError):
    pass


class ConfigError(OseenLabError, ValueError):
    pass
