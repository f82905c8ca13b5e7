"""Exception hierarchy.

Numerical failures and configuration failures are kept on separate branches so
the command line can map them to distinct exit codes.
"""


class TransistorError(Exception):
    """Base class for all package errors."""


class NumericalError(TransistorError):
    """A physical or numerical precondition failed."""


class ConfigError(TransistorError):
    """The run configuration could not be read or validated."""


# circuit
class SingularMatrix(NumericalError):
    pass


class RegimeViolation(NumericalError):
    pass


class ResonanceViolation(NumericalError):
    pass


# spectrum
class FrequencyCollision(NumericalError):
    pass


# bath
class DomainError(NumericalError):
    pass


class WeakCouplingViolation(NumericalError):
    pass


# lindblad
class TemplateMismatch(NumericalError):
    pass


class DegenerateKernel(NumericalError):
    pass


class NegativePopulation(NumericalError):
    pass


class IntegrationFailure(NumericalError):
    pass


# thermo
class DefinitionMismatch(NumericalError):
    pass


class FlatModulator(NumericalError):
    pass


# cli
class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


class EmptyTable(TransistorError):
    pass
