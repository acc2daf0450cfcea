"""Exception hierarchy shared by the library and the CLI.

``exit_code`` mirrors the CLI contract: 2 for malformed input, 3 for a
violated mathematical precondition, 4 is reserved for failed verification
suites (no exception; the CLI maps suite results itself).
"""


class MaslovError(Exception):
    exit_code = 1


class InternalNumericsError(MaslovError):
    """A quantity that is guaranteed by construction came out wrong.

    Signals a numerically broken input (e.g. a frame that slipped past
    validation), never a user error.
    """


class InvalidInputError(MaslovError):
    exit_code = 2


class DimensionMismatchError(InvalidInputError):
    """Operands live over different symplectic spaces or have wrong shapes."""


class PreconditionError(MaslovError):
    exit_code = 3


class TransversalityError(PreconditionError):
    """A required transversal pair actually intersects."""

    def __init__(self, first: str, second: str, detail: str = ""):
        msg = f"{first} is not transversal to {second}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.pair = (first, second)


class DegenerateFormError(PreconditionError):
    """A quadratic form required to be nondegenerate has (near-)kernel."""


class UndersampledPathError(PreconditionError):
    """Adjacent samples step the squared-determinant phase by >= pi/2."""

    def __init__(self, t_lo: float, t_hi: float, step: float):
        super().__init__(
            f"phase step {step:.4f} >= pi/2 on ({t_lo:.6g}, {t_hi:.6g}); "
            "densify the sample grid"
        )
        self.interval = (t_lo, t_hi)
        self.step = step


class InconsistentLoopError(PreconditionError):
    """Unwrapped winding is too far from an integer to be trusted."""

    def __init__(self, residual: float):
        super().__init__(
            f"winding residual {residual:.4g} exceeds 0.05; "
            "the loop data is inconsistent or under-sampled"
        )
        self.residual = residual


class ResolutionError(PreconditionError):
    """Crossings closer than the grid resolves; densify and retry."""


class NonRegularCrossingError(PreconditionError):
    """A crossing of intersection dimension > 1; the signature-sum formula
    requires simple transversal crossings."""

    def __init__(self, t_star: float, dim: int):
        super().__init__(
            f"crossing at t={t_star:.8f} has intersection dimension {dim} > 1"
        )
        self.t_star = t_star
        self.crossing_dim = dim


class BetaSelectionError(PreconditionError):
    """No auxiliary transversal frame found after the rotation retries."""


class MethodDomainError(PreconditionError):
    """The requested method does not cover these inputs (use PATH)."""


class IncompatibleChartsError(PreconditionError):
    """Two phase charts do not describe the same tangent Lagrangian."""


class ConcatenationError(PreconditionError):
    """Path segments whose endpoints do not match span-wise."""
