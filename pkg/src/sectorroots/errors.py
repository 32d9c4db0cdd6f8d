"""Exception types raised across the package."""


class SectorRootsError(Exception):
    """Base class for all package errors."""


class ModulusOneError(SectorRootsError, ValueError):
    """A matrix or lattice point has modulus c^2 + d^2 = 1, which carries no root."""


class BijectionError(SectorRootsError):
    """Coset-derived and lattice-derived triples disagree."""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class ScaleOutOfRangeError(SectorRootsError, ValueError):
    pass


class QuadratureError(SectorRootsError, RuntimeError):
    """An adaptive rule failed to reach its tolerance."""


class PoleError(SectorRootsError, ValueError):
    pass


class DegenerateParametersError(SectorRootsError, ValueError):
    """The power-series Whittaker form is singular (2*mu is an integer)."""


class ContourTooLowError(SectorRootsError, ValueError):
    pass


class ConvergenceError(SectorRootsError, RuntimeError):
    pass


class FitIllConditionedError(SectorRootsError, RuntimeError):
    pass


class PositivityUnattainableError(SectorRootsError):
    pass


class HypothesisViolatedError(SectorRootsError, ValueError):
    pass


class EmptyInputError(SectorRootsError, ValueError):
    pass
