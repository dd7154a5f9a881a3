"""Exception hierarchy shared by the symbolic and numerical layers."""


class JetPHError(Exception):
    """Base class for all errors raised by jetph."""


class UnsupportedExpressionError(JetPHError):
    """Expression leaves the polynomial class (e.g. a negative power of a jet)."""


class OrderOverflowError(JetPHError):
    """A jet coordinate of order greater than the supported maximum was requested."""


class UnknownVariableError(JetPHError):
    """A dependent variable is not declared in the chart."""


class ParseError(JetPHError):
    """Expression text could not be parsed."""


class EquivalenceMismatchError(JetPHError):
    """Symbolic zero test and random-point evaluation disagree."""


class NotHyperregularError(JetPHError):
    """The velocity Hessian of a Lagrangian is not diagonal and invertible."""


class StructureError(JetPHError):
    """A port-Hamiltonian structure assumption is violated."""


class RepresentationError(JetPHError):
    """A Hamiltonian cannot be written algebraically in the energy variables."""


class NotSkewAdjointError(JetPHError):
    """A matrix differential operator is not formally skew-adjoint."""


class ConfigError(JetPHError):
    """Invalid model or simulation configuration."""


class NumericalError(JetPHError):
    """A numerical step failed (solver breakdown, non-finite values)."""


class StabilityError(NumericalError):
    """The requested time step exceeds the explicit stability estimate."""
