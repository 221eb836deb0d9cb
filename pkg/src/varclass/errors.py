"""Exception hierarchy shared by the library and the command line."""


class VarclassError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(VarclassError, ValueError):
    """Array dimensions do not agree with the model or with each other."""


class DataError(VarclassError, ValueError):
    """Input data could not be parsed or failed validation."""


class NumericalError(VarclassError, ArithmeticError):
    """A non-finite value appeared during optimization."""
