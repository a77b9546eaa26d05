"""Exception and warning types shared across the package."""


class UhlmannChernError(Exception):
    """Base class for every error this package raises on purpose."""


# --- linear algebra ---

class NonHermitianInput(UhlmannChernError):
    """A matrix tagged Hermitian failed the Hermiticity check."""


class ConvergenceFailure(UhlmannChernError):
    """The eigensolver did not converge within its iteration cap."""


class IndefiniteInput(UhlmannChernError):
    """A matrix required to be positive semidefinite has a negative
    eigenvalue below the clamping floor."""


class NonAntiHermitianInput(UhlmannChernError):
    """The generator of a unitary exponential is not anti-Hermitian."""


# --- models ---

class ManifoldMismatch(UhlmannChernError):
    """A parameter point does not live on the model's manifold."""


class UnsupportedDirection(UhlmannChernError):
    """A derivative direction index is out of range for the manifold."""


class TruncationTooSmall(UhlmannChernError):
    """The requested displacement exceeds what the Fock truncation
    can represent (|z|^2 must stay below fock_dim / 8)."""


# --- geometry ---

class DegenerateBand(UhlmannChernError):
    """A single-band operation was asked for a degenerate level."""


class NotMaximalCluster(UhlmannChernError):
    """The supplied index group is not a maximal degenerate cluster."""


class GapClosed(UhlmannChernError):
    """The spectral gap protecting the operation closed."""


class StepTooLarge(UhlmannChernError):
    """A finite-difference step exceeds a tenth of the coordinate scale."""


# --- integration / CLI ---

class DimensionMismatch(UhlmannChernError):
    """Grid, manifold, or operator dimensions are inconsistent."""


class NonIntegerPlaquetteSum(UhlmannChernError):
    """The plaquette phase sum is not close to an integer multiple of
    2*pi, signalling too coarse a grid or a closing gap."""


class ConfigError(UhlmannChernError):
    """A run configuration failed schema or semantic validation."""


# --- warnings ---

class VanishingDenominatorWarning(UserWarning):
    """Weight-sum denominators below threshold were dropped."""


class ResolutionTooLowWarning(UserWarning):
    """Grid resolution is below the recommended floor for converged
    second-order invariants."""


class TruncationWeightWarning(UserWarning):
    """Thermal weight has not decayed below 1e-12 by half the Fock
    truncation, so truncation artifacts may be visible."""
