"""Exception types shared across the package."""


class BlocknormError(Exception):
    """Base class for all package errors."""


class NonFinite(BlocknormError):
    """An input matrix contains NaN or Inf entries."""


class NotHermitian(BlocknormError):
    """A matrix expected to be Hermitian fails the symmetry check."""


class NotPSD(BlocknormError):
    """A matrix expected to be positive semidefinite has a too-negative eigenvalue."""

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotPD(BlocknormError):
    """A matrix expected to be positive definite is (numerically) singular."""


class FunctionDomain(BlocknormError):
    """A scalar function is undefined (non-finite) at an eigenvalue."""


class BadExponent(BlocknormError):
    """Schatten exponent outside [1, inf]."""


class BadAlpha(BlocknormError):
    """Function-pair exponent alpha outside the open interval (0, 1)."""


class BadFrame(BlocknormError):
    """A 2-frame fails the orthonormality check."""


class DimensionTooSmall(BlocknormError):
    """Operation requires a larger matrix dimension."""


class DimensionMismatch(BlocknormError):
    """Block dimensions do not agree."""


class NotContraction(BlocknormError):
    """Operator norm exceeds 1 beyond tolerance."""


class NegativeInput(BlocknormError):
    """A parameter required to be nonnegative is negative."""


class BadKind(BlocknormError):
    """Unknown random-instance kind."""


class GridTooSmall(BlocknormError):
    """Support-function grid below the minimum size."""


class SingularX(BlocknormError):
    """Hermitian factor X is numerically singular."""


class HypothesisFailed(BlocknormError):
    """A verifier's hypothesis check failed on the given inputs."""


class NotNormal(BlocknormError):
    """A matrix required to be normal has a too-large normality defect."""


class SpectrumOutsideDisc(BlocknormError):
    """Spectrum escapes the prescribed disc."""


class BadJ(BlocknormError):
    """Eigenvalue index j outside {0, ..., n-1}."""


class UsageError(BlocknormError):
    """Bad CLI arguments or malformed configuration/input files."""
