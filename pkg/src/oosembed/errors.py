"""Exception hierarchy shared by every module."""


class OosEmbedError(Exception):
    """Base class for all errors raised by oosembed."""


class InputError(OosEmbedError, ValueError):
    """Malformed or inconsistent input data."""


class NonSquare(InputError):
    pass


class AsymmetricBeyondTolerance(InputError):
    pass


class NegativeEntry(InputError):
    pass


class NonzeroDiagonal(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class InvalidSimilarity(InputError):
    """Raised instead of warning when similarity validation runs in strict mode."""


class SimilarityWarning(UserWarning):
    """Similarity matrix violates 0 <= gamma_ij <= gamma_ii."""


class SpectrumError(OosEmbedError):
    pass


class InsufficientPositiveSpectrum(SpectrumError):
    """Fewer strictly positive eigenvalues than the requested dimension."""

    def __init__(self, message, n_positive=None, requested=None):
        super().__init__(message)
        self.n_positive = n_positive
        self.requested = requested


class ZeroSingularValue(SpectrumError):
    pass


class SolverError(OosEmbedError):
    pass


class ConvergenceFailure(SolverError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class RankDeficientConfiguration(SolverError):
    pass


class NearSingular(SolverError):
    """Ridge system within the guard band of an eigenvalue of -X'X."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class BracketingFailure(SolverError):
    def __init__(self, message, scanned=None):
        super().__init__(message)
        self.scanned = scanned


class NonFiniteObjective(SolverError):
    pass


class DimensionTooLarge(OosEmbedError, ValueError):
    pass
