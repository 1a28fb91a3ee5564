"""Numerical laboratory for measure-preserving dynamics.

Three regimes side by side: classical Hamiltonian flow conserves
phase-space volume but kneads distances; quasiprobability (Wigner)
flow is compressible whenever the potential has derivatives beyond
second order; unitary evolution on a compact group preserves both the
invariant measure and the metric.  Each subpackage exposes the checks
that make those statements falsifiable at desk scale.
"""

__version__ = "0.1.0"

from .errors import (
    EmptyEnsemble,
    GridTooCoarse,
    InputError,
    NearSingular,
    NonHamiltonianSystem,
    NonUnitaryInput,
    NotConverged,
    NotNormalized,
    NumericalError,
    OutOfRange,
    StabilityViolation,
    TooFewSamples,
)
from .groupspace import (
    EulerAngles,
    GroupCoordinates,
    GroupId,
    MeasureField,
    QuantumState,
    UnitaryOperator,
    build_unitary,
    compose_so3,
    decompose_unitary,
    group_distance,
    haar_density,
    so3_translation_jacobian,
    state_distance,
)
from .classical import (
    Ensemble,
    HamiltonianSpec,
    PhaseSpacePoint,
    divergence_field,
    exact_harmonic_flow,
    flow_jacobian,
    leapfrog_step,
    pair_distance_series,
    transport_density,
)
from .wigner import (
    PotentialSpec,
    WavefunctionGrid,
    WignerGrid,
    moyal_terms,
    schrodinger_evolve,
    wigner_compressibility,
    wigner_transform,
)
from .ergodic import (
    HaarHistogram,
    Orbit,
    OrbitRecord,
    haar_histogram,
    iterate_orbit,
    metric_series,
    non_invariant_control,
    orbit_angle_histogram,
)
from .pumping import (
    PumpingSeries,
    compare_average_to_closed_form,
    geometric_pumping_closed_form,
    orbit_average_oracle,
    pumping_series,
)

__all__ = [name for name in dir() if not name.startswith("_")]
