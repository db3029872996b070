"""Exception types shared across the package."""


class ModpathError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(ModpathError):
    """Operands live on phase spaces of different dimension."""


class NotSiegel(ModpathError):
    """Matrix is not in the Siegel upper-half space (Im part not positive definite)."""


class TruncationInsufficient(ModpathError):
    """Certified tail bound cannot be met within the configured max radius."""


class BadAux(ModpathError):
    """Auxiliary data for a theta lemma check is invalid (non-unimodular A, odd-diagonal B, ...)."""


class TailTooLarge(ModpathError):
    """A lattice/Zak sum tail cannot be certified below tolerance for the given truncation."""


class GaugeMismatch(ModpathError):
    """Operation requires both wavefunctions in the same gauge."""


class LatticeMismatch(ModpathError):
    """Operation requires both wavefunctions on the same modular lattice."""


class CausticError(ModpathError):
    """Propagator evaluated at a caustic time (sin of the phase angle vanishes)."""


class ResonantTime(ModpathError):
    """Time interval resonant with the oscillator period; stationary-path forms singular."""


class BudgetExceeded(ModpathError):
    """Requested composition exceeds the configured evaluation budget."""


class UnsupportedDim(ModpathError):
    """Operation not defined at this phase-space dimension."""


class SingularM(ModpathError):
    """Hamiltonian matrix is singular or too ill-conditioned to invert."""


class ConfigError(ModpathError):
    """Invalid or inconsistent run configuration."""
