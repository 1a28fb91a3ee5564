"""Orbit equidistribution diagnostics on the unitary parameter space.

Iterating a fixed unitary U generates the orbit V_n = U^n W inside the
one-parameter subgroup circle through W (a coset of the closure of
{U^n}).  The orbit closure carries a unique invariant probability
measure: uniform in the circle parameter s when the step angle is an
irrational multiple of 2 pi, and uniform over the k atoms U^j W when
the step angle is rational with reduced denominator k.  Occupancy
histograms normalized by that closure measure flatten to unity as the
sample count grows; histograms of a non-invariant image (cosine of the
circle parameter) pile up at the turning points instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, OutOfRange, TooFewSamples
from .groupspace import (
    TWO_PI,
    GroupCoordinates,
    QuantumState,
    UnitaryOperator,
    closure_period,
    decompose_angles,
    fold_coordinates,
    group_distance,
    one_parameter_entries,
    rotation_angle,
    unitarity_defect,
    wrap_angle,
)

MAX_ORBIT_STEPS = 10_000_000
REUNITARIZE_EVERY = 1024
MIN_HISTOGRAM_SAMPLES = 1000
LOW_SAMPLE_FACTOR = 50
EDGE_SNAP = 1e-12
BIN_SNAP = 1e-9
QUADRATURE_POINTS = 1 << 21


def _as_matrix(u) -> np.ndarray:
    if isinstance(u, UnitaryOperator):
        return u.matrix
    return np.asarray(u, dtype=complex)


def _polar_project(m: np.ndarray) -> np.ndarray:
    """Nearest unitary in Frobenius norm (polar factor via SVD)."""
    w, _, vh = np.linalg.svd(m)
    return w @ vh


@dataclass(frozen=True)
class OrbitRecord:
    """Single orbit sample: step index, coordinates, evolved basis state."""

    n: int
    coords: GroupCoordinates
    state: np.ndarray


@dataclass
class Orbit:
    """Columnar record of V_n = U^n W for n = 0 .. n_max.

    `phi`, `theta`, `omega` hold canonical coordinates of each V_n;
    `states` holds V_n applied to the ground basis vector; `angles` is
    the circle parameter n * step_angle mod 2 pi.  `defect` is the
    largest unitarity defect observed across re-unitarization blocks.
    """

    generator: np.ndarray
    start: np.ndarray
    step_angle: float
    phi: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    states: np.ndarray
    defect: float
    period: int | None = field(default=None)

    def __len__(self) -> int:
        return self.phi.shape[0]

    @property
    def angles(self) -> np.ndarray:
        return np.mod(np.arange(len(self)) * self.step_angle, TWO_PI)

    def record(self, i: int) -> OrbitRecord:
        coords = GroupCoordinates.canonical(
            float(self.phi[i]), float(self.theta[i]), float(self.omega[i])
        )
        return OrbitRecord(n=i, coords=coords, state=self.states[i].copy())


def iterate_orbit(u, n_max: int, start=None, keep_states: bool = True) -> Orbit:
    """Generate the orbit U^n W for n = 0 .. n_max with drift control.

    Powers are accumulated in blocks of 1024; the running base point is
    re-projected onto the unitary group after every block so the
    unitarity defect stays at rounding level for millions of steps.
    """
    m = _as_matrix(u)
    if not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise InputError("n_max must be a non-negative integer")
    if n_max > MAX_ORBIT_STEPS:
        raise InputError(f"n_max exceeds the {MAX_ORBIT_STEPS} step cap")
    if unitarity_defect(m) > 1e-10:
        raise InputError("generator is not unitary within 1e-10")
    base = np.eye(2, dtype=complex) if start is None else _polar_project(_as_matrix(start))

    total = n_max + 1
    chunk = REUNITARIZE_EVERY
    pows = np.empty((chunk + 1, 2, 2), dtype=complex)
    pows[0] = np.eye(2)
    for j in range(chunk):
        pows[j + 1] = m @ pows[j]

    phi = np.empty(total)
    theta = np.empty(total)
    omega = np.empty(total)
    states = np.empty((total, 2), dtype=complex) if keep_states else np.empty((0, 2), dtype=complex)
    ground = np.array([1.0, 0.0], dtype=complex)
    worst = 0.0

    pos = 0
    while pos < total:
        span = min(chunk, total - pos)
        block = np.einsum("njk,kl->njl", pows[:span], base)
        sl = slice(pos, pos + span)
        phi[sl], theta[sl], omega[sl] = decompose_angles(block[:, 0, 0], block[:, 1, 0])
        if keep_states:
            states[sl] = np.einsum("njk,k->nj", block, ground)
        worst = max(worst, unitarity_defect(block[-1]))
        base = _polar_project(pows[chunk] @ base)
        pos += span

    alpha = rotation_angle(m)
    return Orbit(
        generator=m,
        start=np.eye(2, dtype=complex) if start is None else _polar_project(_as_matrix(start)),
        step_angle=alpha,
        phi=phi,
        theta=theta,
        omega=omega,
        states=states,
        defect=worst,
        period=closure_period(alpha),
    )


def _snap_wrap(x: np.ndarray) -> np.ndarray:
    """Wrap to [-pi, pi) and snap values a rounding error below pi onto -pi."""
    y = wrap_angle(np.asarray(x, dtype=float))
    return np.where(y > np.pi - EDGE_SNAP, -np.pi, y)


def _digitize(x: np.ndarray, lo: float, width: float, bins: int) -> np.ndarray:
    """Floor-binning with a small inward bias so edge-exact samples are stable."""
    idx = np.floor((np.asarray(x, dtype=float) - lo) / width + BIN_SNAP).astype(np.int64)
    return np.clip(idx, 0, bins - 1)


def _box_bin_indices(phi, theta, omega, bins: int):
    """Joint bin index on the folded coordinate box."""
    phi_f, theta_f, omega_f = fold_coordinates(phi, theta, omega)
    i = _digitize(_snap_wrap(phi_f), -np.pi, TWO_PI / bins, bins)
    j = _digitize(theta_f, 0.0, (np.pi / 2) / bins, bins)
    k = _digitize(_snap_wrap(omega_f), -np.pi, TWO_PI / bins, bins)
    return i, j, k


def _closure_mass(orbit: Orbit, bins: int) -> np.ndarray:
    """Closure-measure mass of each folded-box bin for the orbit's coset.

    Rational step angle: the closure is the finite set U^j W with equal
    atom weights 1/k.  Irrational: the closure is the full circle, and
    the invariant measure is uniform in the circle parameter; its
    pushforward onto the coordinate box is evaluated by midpoint
    quadrature along the circle.
    """
    col0 = orbit.start[:, 0]
    if orbit.period is not None:
        s = np.arange(orbit.period) * orbit.step_angle
        weight = 1.0 / orbit.period
    else:
        s = (np.arange(QUADRATURE_POINTS) + 0.5) * (TWO_PI / QUADRATURE_POINTS)
        weight = 1.0 / QUADRATURE_POINTS
    a, b = one_parameter_entries(orbit.generator, s, start_col0=col0)
    phi, theta, omega = decompose_angles(a, b)
    i, j, k = _box_bin_indices(phi, theta, omega, bins)
    flat = np.bincount((i * bins + j) * bins + k, minlength=bins**3).astype(float)
    return (flat * weight).reshape(bins, bins, bins)


@dataclass(frozen=True)
class HaarHistogram:
    """Counts and closure-measure-normalized occupancy on the folded box."""

    bins_per_axis: int
    samples: int
    counts: np.ndarray
    mass: np.ndarray
    achievable: np.ndarray
    occupancy: np.ndarray
    flatness: float


def haar_histogram(orbit: Orbit, bins: int = 20) -> HaarHistogram:
    """Occupancy of the folded box, normalized by the closure measure.

    Normalized occupancy of bin b is count_b / (N * mass_b) where
    mass_b is the invariant measure the orbit closure assigns to b.
    Flatness is the coefficient of variation over achievable bins
    (those actually visited); it vanishes exactly for a periodic orbit
    iterated over whole periods and decays as 1/sqrt(N) otherwise.
    """
    n = len(orbit)
    if n < MIN_HISTOGRAM_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_HISTOGRAM_SAMPLES} samples, got {n}")
    if bins < 2:
        raise InputError("bins must be at least 2")
    i, j, k = _box_bin_indices(orbit.phi, orbit.theta, orbit.omega, bins)
    flat = np.bincount((i * bins + j) * bins + k, minlength=bins**3)
    counts = flat.reshape(bins, bins, bins)
    mass = _closure_mass(orbit, bins)
    achievable = counts > 0
    occupancy = np.zeros_like(mass)
    occupancy[achievable] = counts[achievable] / (n * mass[achievable])
    vals = occupancy[achievable]
    mean = float(vals.mean())
    flatness = float(vals.std() / mean) if mean > 0 else 0.0
    return HaarHistogram(
        bins_per_axis=bins,
        samples=n,
        counts=counts,
        mass=mass,
        achievable=achievable,
        occupancy=occupancy,
        flatness=flatness,
    )


@dataclass(frozen=True)
class AngleHistogram:
    """Raw-count histogram of the circle parameter n * alpha mod 2 pi."""

    bins: int
    samples: int
    counts: np.ndarray
    flatness: float
    low_sample: bool


def orbit_angle_histogram(orbit: Orbit, bins: int = 20) -> AngleHistogram:
    """Uniform-bin histogram of the orbit's circle parameter.

    The closure measure is uniform in this parameter, so raw counts
    over visited bins are the measure-weighted occupancy; flatness is
    their coefficient of variation.  Runs shorter than 50 samples per
    bin are flagged low-sample rather than rejected.
    """
    if bins < 2:
        raise InputError("bins must be at least 2")
    a = orbit.angles
    a = np.where(a > TWO_PI - EDGE_SNAP, 0.0, a)
    idx = _digitize(a, 0.0, TWO_PI / bins, bins)
    counts = np.bincount(idx, minlength=bins)
    visited = counts > 0
    vals = counts[visited].astype(float)
    mean = float(vals.mean())
    flatness = float(vals.std() / mean) if mean > 0 else 0.0
    return AngleHistogram(
        bins=bins,
        samples=len(orbit),
        counts=counts,
        flatness=flatness,
        low_sample=len(orbit) < LOW_SAMPLE_FACTOR * bins,
    )


@dataclass(frozen=True)
class ControlHistogram:
    """Histogram of a non-invariant image of the orbit (cosine of the angle)."""

    bins: int
    samples: int
    counts: np.ndarray
    flatness: float
    corrected_flatness: float
    degenerate: bool


def non_invariant_control(orbit: Orbit, bins: int = 20) -> ControlHistogram:
    """Negative control: bin cos(angle) uniformly and watch the pile-up.

    The pushforward of the uniform circle measure under cosine is the
    arcsine law, so uniform-width bins on [-1, 1] are far from flat
    (flatness well above 0.5).  Re-weighting each bin by its arcsine
    mass restores flatness, confirming the distortion is purely the
    wrong reference measure.  A constant orbit lands in a single bin
    and is flagged degenerate.
    """
    if bins < 2:
        raise InputError("bins must be at least 2")
    x = np.cos(orbit.angles)
    width = 2.0 / bins
    idx = _digitize(x, -1.0, width, bins)
    counts = np.bincount(idx, minlength=bins)
    visited = counts > 0
    degenerate = int(visited.sum()) <= 1
    vals = counts[visited].astype(float)
    mean = float(vals.mean())
    flatness = float(vals.std() / mean) if mean > 0 else 0.0

    edges = np.linspace(-1.0, 1.0, bins + 1)
    arc = np.arcsin(np.clip(edges, -1.0, 1.0))
    mass = (arc[1:] - arc[:-1]) / np.pi
    corrected = counts[visited] / (len(orbit) * mass[visited])
    cmean = float(corrected.mean())
    corrected_flatness = float(corrected.std() / cmean) if cmean > 0 else 0.0
    return ControlHistogram(
        bins=bins,
        samples=len(orbit),
        counts=counts,
        flatness=flatness,
        corrected_flatness=corrected_flatness,
        degenerate=degenerate,
    )


def flatness_checkpoints(n_max: int) -> np.ndarray:
    """Logarithmic 1-2-5 checkpoint grid from 10^3 up to n_max."""
    marks = []
    decade = MIN_HISTOGRAM_SAMPLES
    while decade <= n_max:
        for mult in (1, 2, 5):
            value = decade * mult
            if value <= n_max:
                marks.append(value)
        decade *= 10
    if not marks or marks[-1] != n_max:
        marks.append(n_max)
    return np.array(marks, dtype=np.int64)


def flatness_series(orbit: Orbit, checkpoints=None, bins: int = 20):
    """Flatness of the angle histogram and raw control versus sample count.

    Returns (n, flatness_angle, flatness_control) arrays evaluated on
    truncations of the orbit; the angle flatness decays as 1/sqrt(n)
    while the control stays pinned near its arcsine limit.
    """
    if checkpoints is None:
        checkpoints = flatness_checkpoints(len(orbit) - 1)
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    if np.any(checkpoints < 1) or np.any(checkpoints > len(orbit) - 1):
        raise OutOfRange("checkpoints must lie in [1, n_max]")
    angles = orbit.angles
    a = np.where(angles > TWO_PI - EDGE_SNAP, 0.0, angles)
    idx_a = _digitize(a, 0.0, TWO_PI / bins, bins)
    idx_c = _digitize(np.cos(angles), -1.0, 2.0 / bins, bins)

    def _cv(idx, upto):
        counts = np.bincount(idx[:upto], minlength=bins)
        vals = counts[counts > 0].astype(float)
        mean = vals.mean()
        return float(vals.std() / mean) if mean > 0 else 0.0

    f_angle = np.array([_cv(idx_a, n + 1) for n in checkpoints])
    f_control = np.array([_cv(idx_c, n + 1) for n in checkpoints])
    return checkpoints, f_angle, f_control


def haar_flatness_series(orbit: Orbit, checkpoints=None, bins: int = 20):
    """Closure-normalized occupancy flatness of the 3D histogram versus n.

    Returns (n, flatness) where flatness at checkpoint n is the
    coefficient of variation of count / (n_samples * mass) over bins
    visited within the first n steps.  The closure mass is computed
    once for the whole orbit.
    """
    if checkpoints is None:
        checkpoints = flatness_checkpoints(len(orbit) - 1)
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    if np.any(checkpoints < 1) or np.any(checkpoints > len(orbit) - 1):
        raise OutOfRange("checkpoints must lie in [1, n_max]")
    i, j, k = _box_bin_indices(orbit.phi, orbit.theta, orbit.omega, bins)
    flat_idx = (i * bins + j) * bins + k
    mass = _closure_mass(orbit, bins).ravel()

    out = np.empty(checkpoints.shape[0])
    for pos, n in enumerate(checkpoints):
        counts = np.bincount(flat_idx[: n + 1], minlength=bins**3)
        visited = counts > 0
        vals = counts[visited] / ((n + 1) * mass[visited])
        mean = float(vals.mean())
        out[pos] = float(vals.std() / mean) if mean > 0 else 0.0
    return checkpoints, out


@dataclass(frozen=True)
class MetricSeries:
    """Pairwise distances along a joint evolution and their drift from t=0."""

    n: np.ndarray
    state_distance: np.ndarray
    group_distance: np.ndarray
    max_state_deviation: float
    max_group_deviation: float


def metric_series(u, state_a, state_b, w_a, w_b, n_max: int, stride: int = 1) -> MetricSeries:
    """Distances between co-evolved pairs, checked at every step.

    Left multiplication by U^n is an isometry of both the state overlap
    distance and the group trace distance, so both series should sit at
    their n = 0 value up to accumulated rounding.  The full-resolution
    maximum deviation is tracked even when the returned series is
    strided.
    """
    m = _as_matrix(u)
    if unitarity_defect(m) > 1e-10:
        raise InputError("generator is not unitary within 1e-10")
    if n_max < 0 or n_max > MAX_ORBIT_STEPS:
        raise InputError("n_max out of range")
    if stride < 1:
        raise InputError("stride must be positive")
    va = state_a.vector if isinstance(state_a, QuantumState) else np.asarray(state_a, dtype=complex)
    vb = state_b.vector if isinstance(state_b, QuantumState) else np.asarray(state_b, dtype=complex)
    ga = _as_matrix(w_a)
    gb = _as_matrix(w_b)

    chunk = REUNITARIZE_EVERY
    pows = np.empty((chunk + 1, 2, 2), dtype=complex)
    pows[0] = np.eye(2)
    for j in range(chunk):
        pows[j + 1] = m @ pows[j]

    total = n_max + 1
    kept = np.arange(0, total, stride)
    d_state = np.empty(kept.shape[0])
    d_group = np.empty(kept.shape[0])
    base = np.eye(2, dtype=complex)
    d_state0 = d_group0 = None
    max_sdev = max_gdev = 0.0
    pos = 0
    while pos < total:
        span = min(chunk, total - pos)
        block = np.einsum("njk,kl->njl", pows[:span], base)
        sa = np.einsum("njk,k->nj", block, va)
        sb = np.einsum("njk,k->nj", block, vb)
        overlap = np.abs(np.sum(sa.conj() * sb, axis=1))
        ds = np.arccos(np.clip(overlap, 0.0, 1.0))
        ba = np.einsum("njk,kl->njl", block, ga)
        bb = np.einsum("njk,kl->njl", block, gb)
        tr = np.abs(np.sum(ba.conj() * bb, axis=(1, 2)))
        dg = 2.0 * np.arccos(np.clip(tr / 2.0, 0.0, 1.0))
        if d_state0 is None:
            d_state0, d_group0 = float(ds[0]), float(dg[0])
        max_sdev = max(max_sdev, float(np.max(np.abs(ds - d_state0))))
        max_gdev = max(max_gdev, float(np.max(np.abs(dg - d_group0))))
        mask = (kept >= pos) & (kept < pos + span)
        d_state[mask] = ds[kept[mask] - pos]
        d_group[mask] = dg[kept[mask] - pos]
        base = _polar_project(pows[chunk] @ base)
        pos += span

    return MetricSeries(
        n=kept,
        state_distance=d_state,
        group_distance=d_group,
        max_state_deviation=max_sdev,
        max_group_deviation=max_gdev,
    )


def isometry_defect(u, w_a, w_b) -> float:
    """Single-step check |d(U A, U B) - d(A, B)| for explicit group elements."""
    m = _as_matrix(u)
    a = _as_matrix(w_a)
    b = _as_matrix(w_b)
    return abs(group_distance(m @ a, m @ b) - group_distance(a, b))
