"""Exception hierarchy shared by all modules."""


class PainleveError(Exception):
    """Base class for every error raised by :mod:`dpainleve`."""


class ZeroArgument(PainleveError, ValueError):
    """Logarithm of exactly zero."""


class StencilCrossesSingularity(PainleveError, ArithmeticError):
    """A finite-difference stencil hit a pole, a cut, or failed to converge."""


class UnsupportedFamily(PainleveError, ValueError):
    """Operation not defined for this equation family."""


class ConstraintViolated(PainleveError, ValueError):
    """The q-P(A2) product constraint on b1..b8 does not hold."""


class ChartSingular(PainleveError, ArithmeticError):
    def __init__(self, denominator):
        super().__init__(f"chart denominator {denominator} vanishes")
        self.denominator = denominator


class SingularDenominator(PainleveError, ArithmeticError):
    """A rational map was evaluated at (or too near) a pole."""

    def __init__(self, name, magnitude=0.0):
        super().__init__(f"singular denominator {name} (|den| = {magnitude:.3e})")
        self.name = name
        self.magnitude = magnitude


class ZeroCoordinate(SingularDenominator):
    def __init__(self, name):
        super().__init__(name, 0.0)


class LogSingular(PainleveError, ArithmeticError):
    """A log (or pole) term of a discrete Hamiltonian blew up."""

    def __init__(self, term):
        super().__init__(f"singular term: {term}")
        self.term = term


class SamplingExhausted(PainleveError, RuntimeError):
    pass


class InapplicableCheck(PainleveError, ValueError):
    pass
