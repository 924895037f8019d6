"""Exception hierarchy shared by every module of the package."""


class KoranyiError(Exception):
    """Base class for all errors raised by ``koranyi_acf``."""


class InvalidArgumentError(KoranyiError, ValueError):
    pass


class UndefinedCoordinatesError(KoranyiError, ValueError):
    """Spherical coordinates requested at the origin."""


class CharacteristicPointError(KoranyiError, ValueError):
    """The horizontal frame does not exist: x**2 + y**2 is (numerically) zero."""


class PoleError(KoranyiError, ValueError):
    """A formula with a 1/sin(phi) factor was evaluated at phi in {0, pi}."""


class PropagatedNaNError(KoranyiError, FloatingPointError):
    pass


class MissingGradientError(KoranyiError, ValueError):
    pass


class DegenerateError(KoranyiError, ZeroDivisionError):
    """A quotient whose denominator vanishes."""


class ConvergenceError(KoranyiError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
