"""Orbit equidistribution, closure-measure histograms, and isometry checks."""

import math

import numpy as np
import pytest

from liouville_lab.errors import InputError, TooFewSamples
from liouville_lab.ergodic import (
    Orbit,
    flatness_checkpoints,
    flatness_series,
    haar_flatness_series,
    haar_histogram,
    isometry_defect,
    iterate_orbit,
    metric_series,
    non_invariant_control,
    orbit_angle_histogram,
)
from liouville_lab.groupspace import (
    GroupCoordinates,
    UnitaryOperator,
    build_unitary,
    rotation_angle,
    rotation_axis,
    wrap_angle,
)

SEED = 20260826

PAPER_COORDS = GroupCoordinates.canonical(0.0, math.pi / 4, 0.0)
INCOMMENSURATE_COORDS = GroupCoordinates.canonical(0.0, 1.0, 0.0)


def circle_element(u, s: float) -> np.ndarray:
    """exp(s log U) built from the rotation axis, for translation tests."""
    nx, ny, nz = rotation_axis(u)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return math.cos(s) * np.eye(2) + 1j * math.sin(s) * (nx * sx + ny * sy + nz * sz)


def test_orbit_step_zero_is_identity():
    orbit = iterate_orbit(build_unitary(PAPER_COORDS), 10)
    rec = orbit.record(0)
    assert rec.coords.astuple() == (0.0, 0.0, 0.0)
    assert np.allclose(rec.state, [1.0, 0.0])


def test_orbit_matches_matrix_power_oracle():
    u = build_unitary(GroupCoordinates.canonical(0.4, 1.3, -0.9))
    orbit = iterate_orbit(u, 300)
    power = np.eye(2, dtype=complex)
    ground = np.array([1.0, 0.0], dtype=complex)
    from liouville_lab.groupspace import decompose_unitary

    for n in range(301):
        if n > 0:
            power = u.matrix @ power
        coords = decompose_unitary(power)
        assert abs(wrap_angle(orbit.phi[n] - coords.phi)) < 1e-9
        assert abs(orbit.theta[n] - coords.theta) < 1e-9
        assert abs(wrap_angle(orbit.omega[n] - coords.omega)) < 1e-9
        assert np.abs(orbit.states[n] - power @ ground).max() < 1e-9


def test_orbit_real_rotation_angle_fold():
    # real rotation by alpha per step: theta_n = 2 (n alpha mod pi) up to gauge
    u = build_unitary(INCOMMENSURATE_COORDS)
    alpha = rotation_angle(u)
    assert abs(alpha - 0.5) < 1e-12
    orbit = iterate_orbit(u, 500)
    for n in range(501):
        half = (n * alpha) % math.pi
        expect = 2.0 * min(half, math.pi - half)  # canonical theta in [0, pi]
        assert abs(orbit.theta[n] - expect) < 1e-9


def test_orbit_unitarity_defect_controlled():
    orbit = iterate_orbit(build_unitary(INCOMMENSURATE_COORDS), 100_000, keep_states=False)
    assert orbit.defect < 1e-10


def test_orbit_coset_start():
    u = build_unitary(GroupCoordinates.canonical(0.2, 0.9, 0.0))
    w = build_unitary(GroupCoordinates.canonical(-0.7, 1.7, 1.1))
    orbit = iterate_orbit(u, 50, start=w.matrix)
    power = w.matrix.copy()
    from liouville_lab.groupspace import decompose_unitary

    for n in range(51):
        if n > 0:
            power = u.matrix @ power
        coords = decompose_unitary(power)
        assert abs(orbit.theta[n] - coords.theta) < 1e-9


def test_orbit_input_validation():
    u = build_unitary(PAPER_COORDS)
    with pytest.raises(InputError):
        iterate_orbit(u, -1)
    with pytest.raises(InputError):
        iterate_orbit(u, 20_000_000)
    with pytest.raises(InputError):
        iterate_orbit(np.array([[1.0, 0.1], [0.0, 1.0]], dtype=complex), 10)


def test_haar_histogram_periodic_exact_flatness():
    # rational step angle: whole periods fill every achievable bin equally
    orbit = iterate_orbit(build_unitary(PAPER_COORDS), 16 * 200 - 1, keep_states=False)
    assert orbit.period == 16
    hist = haar_histogram(orbit, bins=20)
    assert hist.flatness < 1e-12
    assert hist.counts.sum() == len(orbit)
    occupied = hist.occupancy[hist.achievable]
    assert np.abs(occupied - 1.0).max() < 1e-12


def test_haar_histogram_identity_orbit():
    orbit = iterate_orbit(UnitaryOperator.identity(), 2000, keep_states=False)
    hist = haar_histogram(orbit, bins=20)
    assert int(hist.achievable.sum()) == 1
    assert hist.flatness == 0.0


def test_haar_histogram_incommensurate_flattens():
    orbit = iterate_orbit(build_unitary(INCOMMENSURATE_COORDS), 100_000, keep_states=False)
    hist = haar_histogram(orbit, bins=20)
    assert hist.flatness < 0.05
    assert hist.counts.sum() == len(orbit)


def test_haar_histogram_too_few_samples():
    orbit = iterate_orbit(build_unitary(PAPER_COORDS), 500, keep_states=False)
    with pytest.raises(TooFewSamples):
        haar_histogram(orbit, bins=20)


def test_measure_preserved_under_closure_translation():
    # translating the whole orbit along its closure moves samples across
    # bin boundaries only; occupancy stays flat and counts nearly match
    rng = np.random.default_rng(SEED)
    u = build_unitary(INCOMMENSURATE_COORDS)
    n = 50_000
    base = haar_histogram(iterate_orbit(u, n, keep_states=False), bins=20)
    for _ in range(3):
        w = circle_element(u.matrix, rng.uniform(0.0, 2.0 * math.pi))
        translated = haar_histogram(iterate_orbit(u, n, start=w, keep_states=False), bins=20)
        moved = np.abs(translated.counts - base.counts).sum() / 2
        assert moved <= 0.02 * (n + 1)
        assert translated.flatness < 0.05


def test_generic_translation_keeps_coset_occupancy_flat():
    # coset closures clip bin corners, so tiny-mass bins are noisy; the
    # right invariance check is the standardized deviation from unity,
    # with sigma_b = 1 / sqrt(n * mass_b) for per-bin counting noise
    rng = np.random.default_rng(SEED + 1)
    u = build_unitary(INCOMMENSURATE_COORDS)
    n = 50_000
    for _ in range(2):
        w = build_unitary(
            GroupCoordinates.canonical(
                rng.uniform(-math.pi, math.pi),
                rng.uniform(0.3, math.pi - 0.3),
                rng.uniform(-math.pi, math.pi),
            )
        )
        orbit = iterate_orbit(u, n, start=w.matrix, keep_states=False)
        hist = haar_histogram(orbit, bins=20)
        solid = hist.achievable & (hist.counts >= 5)
        z = (hist.occupancy[solid] - 1.0) * np.sqrt((n + 1) * hist.mass[solid])
        assert np.abs(z).max() < 5.0


def test_angle_histogram_rational_uniform():
    # alpha = 2 pi / 40 and 20 bins: every bin holds exactly two atoms
    coords = GroupCoordinates.canonical(0.0, 2.0 * (2.0 * math.pi / 40.0), 0.0)
    u = build_unitary(coords)
    orbit = iterate_orbit(u, 40 * 30 - 1, keep_states=False)
    assert orbit.period == 40
    hist = orbit_angle_histogram(orbit, bins=20)
    assert hist.flatness < 1e-12
    assert not hist.low_sample


def test_angle_histogram_irrational_flattens():
    orbit = iterate_orbit(build_unitary(INCOMMENSURATE_COORDS), 100_000, keep_states=False)
    hist = orbit_angle_histogram(orbit, bins=20)
    assert hist.flatness < 0.01


def test_angle_histogram_low_sample_flag():
    orbit = iterate_orbit(build_unitary(INCOMMENSURATE_COORDS), 19, keep_states=False)
    hist = orbit_angle_histogram(orbit, bins=20)
    assert hist.low_sample
    assert hist.flatness >= 0.0


def test_control_histogram_arcsine_pileup():
    orbit = iterate_orbit(build_unitary(INCOMMENSURATE_COORDS), 100_000, keep_states=False)
    control = non_invariant_control(orbit, bins=20)
    assert control.flatness > 0.5
    assert control.corrected_flatness < 0.05
    assert not control.degenerate
    # the contrast pair: naive binning at least 10x less flat
    assert control.flatness > 10.0 * control.corrected_flatness


def test_control_histogram_degenerate_orbit():
    orbit = iterate_orbit(UnitaryOperator.identity(), 1000, keep_states=False)
    control = non_invariant_control(orbit, bins=20)
    assert control.degenerate
    assert control.flatness == 0.0


def test_flatness_checkpoints_grid():
    marks = flatness_checkpoints(100_000)
    assert marks[0] == 1000
    assert marks[-1] == 100_000
    assert np.all(np.diff(marks) > 0)


def test_flatness_decays_like_sampling_noise():
    # coefficient of variation of normalized occupancy ~ n^(-1/2) or better
    orbit = iterate_orbit(build_unitary(INCOMMENSURATE_COORDS), 100_000, keep_states=False)
    ns, flat = haar_flatness_series(orbit)
    assert flat[-1] < flat[0]
    slope = np.polyfit(np.log(ns.astype(float)), np.log(flat), 1)[0]
    assert slope < -0.3


def test_flatness_series_control_stays_pinned():
    orbit = iterate_orbit(build_unitary(INCOMMENSURATE_COORDS), 100_000, keep_states=False)
    ns, f_angle, f_control = flatness_series(orbit)
    assert f_angle[-1] < 0.01
    assert np.all(f_control > 0.5)


def test_metric_series_invariance():
    u = build_unitary(GroupCoordinates.canonical(0.3, 1.1, -0.4)).matrix
    a = np.array([1.0, 0.0], dtype=complex)
    b = np.array([0.6, 0.8j], dtype=complex)
    w1 = build_unitary(GroupCoordinates.canonical(0.5, 0.7, 0.1)).matrix
    w2 = build_unitary(GroupCoordinates.canonical(-0.2, 2.2, 1.4)).matrix
    series = metric_series(u, a, b, w1, w2, 10_000, stride=100)
    assert series.max_state_deviation < 1e-12
    assert series.max_group_deviation < 1e-12
    assert series.n[0] == 0 and series.n[-1] == 10_000
    assert series.n.shape == series.state_distance.shape == series.group_distance.shape


def test_isometry_defect_exact():
    rng = np.random.default_rng(SEED + 2)
    for _ in range(50):
        coords = [
            GroupCoordinates.canonical(
                rng.uniform(-math.pi, math.pi),
                rng.uniform(0.0, math.pi),
                rng.uniform(-math.pi, math.pi),
            )
            for _ in range(3)
        ]
        u, wa, wb = (build_unitary(c).matrix for c in coords)
        assert isometry_defect(u, wa, wb) < 1e-12


def test_orbit_angles_property():
    orbit = iterate_orbit(build_unitary(INCOMMENSURATE_COORDS), 100, keep_states=False)
    assert np.allclose(orbit.angles, np.mod(np.arange(101) * 0.5, 2.0 * math.pi), atol=1e-12)
