"""Shared exception types.

Every failure mode that callers may want to distinguish gets its own class;
all of them derive from ValueError or RuntimeError so that generic handling
still works.
"""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ResonanceError(DomainError):
    """Qubit and resonator are (numerically) degenerate, |w_q - w_r| < guard."""


class DegenerateQubitError(DomainError):
    """Both bias and tunneling are zero; the qubit splitting vanishes."""


class ExtrapolationError(DomainError):
    """A tabulated spectral density was queried outside its grid."""


class UndefinedDerivativeError(DomainError):
    """The spectral function has a kink (T = 0) at the requested frequency."""


class MasingInstabilityError(RuntimeError):
    """Effective resonator linewidth is non-positive at zero detuning; the
    mean-field amplitude has no stable fixed point."""


class AmbiguousSteadyStateError(RuntimeError):
    """The Liouvillian null space has dimension > 1."""


class NotTracePreservingError(ValueError):
    """A superoperator or coefficient-matrix set violates trace conservation."""


class InvalidAMatrixError(ValueError):
    """Coefficient matrix is not symmetric (or otherwise malformed)."""


class UndefinedGainError(ValueError):
    """Reference amplitude is zero; gain is not defined."""


class ConfigError(ValueError):
    """Malformed, incomplete or over-specified run configuration."""
