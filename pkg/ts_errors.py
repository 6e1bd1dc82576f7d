class TorusSpectraError(Exception):
    """Base exception class for the torus spectra toolkit"""


class BadParameterError(TorusSpectraError, ValueError):
    """Raised when an argument lies outside its admissible range"""


class ConfigError(BadParameterError):
    """Raised when a configuration file or mapping fails validation"""


class ReductionError(TorusSpectraError):
    """Raised when a lattice basis cannot be reduced to the moduli space"""


class NonUnimodularError(ReductionError):
    """Raised when a basis does not span a unit-volume lattice"""


class DegenerateBasisError(ReductionError):
    """Raised when the columns of a basis are (numerically) dependent"""


class RadiusTooLargeError(BadParameterError):
    """Raised when a dual-lattice enumeration would exceed the configured cap"""


class NotDualVectorError(BadParameterError):
    """Raised when a frequency vector has non-integer inner products with the primal generators"""


class AdmissibilityError(TorusSpectraError):
    """Raised when a kernel profile is not positive and non-increasing"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotPositiveError(AdmissibilityError):
    """Raised when a kernel profile takes a negative value (or vanishes at the origin)"""


class NotMonotoneError(AdmissibilityError):
    """Raised when a kernel profile increases between two sampled arguments"""


class NumericalError(TorusSpectraError):
    """Raised when a numerical procedure cannot deliver a trustworthy value"""


class DepthExceededError(NumericalError):
    """Raised by strict quadrature when the subdivision budget runs out"""

    def __init__(self, message: str, best_value: float = None, error_estimate: float = None):
        super().__init__(message)
        self.best_value = best_value
        self.error_estimate = error_estimate


class NonFiniteIntegrandError(NumericalError):
    """Raised when an integrand returns NaN or infinity"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SymmetryViolationError(NumericalError):
    """Raised when the sine part of an eigenvalue integral does not vanish"""


class StepTooSmallError(NumericalError):
    """Raised when quadrature noise dominates a finite-difference stencil"""


class MonotonicityViolatedError(NumericalError):
    """Raised when the objective decreases along the rearrangement path"""

    def __init__(self, message: str, step: int = None):
        super().__init__(message)
        self.step = step


class DomainError(BadParameterError):
    """Raised when an operation is called outside the parameter set it is stated for"""


class AreaOutOfRangeError(BadParameterError):
    """Raised when a segment area is negative or exceeds the disc area"""


class DegenerateRegionError(BadParameterError):
    """Raised when two points and the origin are collinear, pinching the rearranged region"""


class DuplicateSitesError(BadParameterError):
    """Raised when two Voronoi sites coincide"""


class OriginOutsideError(BadParameterError):
    """Raised when a polygon must contain the origin but does not"""


class FoldingError(NumericalError):
    """Raised when folding a point into the Voronoi cell does not terminate"""
