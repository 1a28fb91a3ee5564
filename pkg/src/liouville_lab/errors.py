"""Error taxonomy shared across the laboratory modules.

Configuration and input errors derive from :class:`InputError`; failures of a
numerical procedure itself derive from :class:`NumericalError`.  The CLI maps
the former to exit code 1 and the latter to exit code 2.
"""


class InputError(ValueError):
    """Bad input: violates a documented precondition."""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its own quality contract."""


class NonUnitaryInput(InputError):
    """Matrix is not unitary within the documented tolerance."""


class OutOfRange(InputError):
    """Coordinates fall outside the canonical domain of a measure."""


class NearSingular(InputError):
    """Finite differencing requested too close to a coordinate singularity."""


class NotNormalized(InputError):
    """State vector or wavefunction norm deviates beyond tolerance."""


class NonHamiltonianSystem(InputError):
    """A symplectic-only routine was handed a dissipative system."""


class EmptyEnsemble(InputError):
    """Ensemble contains no sample points."""


class GridTooCoarse(InputError):
    """Wavefunction support reaches the grid boundary; aliasing would follow."""


class StabilityViolation(InputError):
    """Split-step stability bound dt * max|V| / hbar exceeded."""


class TooFewSamples(InputError):
    """Not enough orbit samples for a meaningful histogram."""


class NotConverged(NumericalError):
    """Running average failed its Cauchy tail-oscillation check."""
