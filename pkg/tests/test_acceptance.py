"""Acceptance gate: one test, and one printed PASS/FAIL line, per
primary verification criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the measured
values behind every line.  Each criterion is asserted at its stated
tolerance; runtime caps are asserted where the criterion carries one.
"""

import json
import math
import time

import numpy as np
import pytest

from liouville_lab import classical, ergodic, pumping, wigner
from liouville_lab.cli import ENV_OUT_DIR, main
from liouville_lab.experiments import _run_haar_check
from liouville_lab.groupspace import GroupCoordinates, build_unitary


def _criterion(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} [{name}] {detail}")
    assert ok, f"{name}: {detail}"


def test_classical_liouville_incompressibility():
    started = time.perf_counter()
    worst_det = 0.0
    worst_residual = 0.0
    for spec in (
        classical.HamiltonianSpec.harmonic(),
        classical.HamiltonianSpec.quartic(),
        classical.HamiltonianSpec.pendulum(),
    ):
        for t in (10.0, 100.0):
            jac = classical.flow_jacobian(spec, classical.PhaseSpacePoint(0.0, 1.0), t, 1e-3)
            worst_det = max(worst_det, abs(jac.det - 1.0))
        ens = classical.Ensemble.gaussian(np.random.default_rng(11), 256)
        report = classical.transport_density(ens, spec, 10.0, 1e-3)
        worst_residual = max(worst_residual, report.residual)
    elapsed = time.perf_counter() - started
    ok = worst_det < 1e-4 and worst_residual < 1e-3 and elapsed < 10.0
    _criterion(
        "classical-incompressibility",
        ok,
        f"max |det-1| = {worst_det:.3e} (tol 1e-4), "
        f"max density residual = {worst_residual:.3e} (tol 1e-3), {elapsed:.1f} s (cap 10)",
    )


def test_damped_negative_control():
    started = time.perf_counter()
    spec = classical.HamiltonianSpec.damped(gamma=0.5)
    worst_det = 0.0
    worst_rel = 0.0
    for t in (1.0, 2.0):
        jac = classical.flow_jacobian(spec, classical.PhaseSpacePoint(0.0, 1.0), t, 1e-3)
        worst_det = max(worst_det, abs(jac.det - math.exp(-0.5 * t)))
        ens = classical.Ensemble.gaussian(np.random.default_rng(12), 128)
        report = classical.transport_density(ens, spec, t, 1e-3)
        expected = math.exp(0.5 * t) - 1.0
        worst_rel = max(worst_rel, abs(report.residual - expected) / expected)
    elapsed = time.perf_counter() - started
    ok = worst_det < 1e-3 and worst_rel < 0.05 and elapsed < 5.0
    _criterion(
        "damped-control",
        ok,
        f"max |det - exp(-gamma t)| = {worst_det:.3e} (tol 1e-3), "
        f"residual vs exp(gamma t)-1 rel err = {worst_rel:.3e} (tol 0.05), {elapsed:.1f} s (cap 5)",
    )


def test_leapfrog_second_order():
    started = time.perf_counter()
    spec = classical.HamiltonianSpec.harmonic()
    x0 = classical.PhaseSpacePoint(0.9, 0.4)

    def max_err(dt: float) -> float:
        worst = 0.0
        x = x0
        for k in range(1, int(round(2.0 * math.pi / dt)) + 1):
            x = classical.leapfrog_step(spec, x, dt)
            ref = classical.exact_harmonic_flow(x0, k * dt)
            worst = max(worst, math.hypot(x.p - ref.p, x.q - ref.q))
        return worst

    ratio = max_err(2.0 * math.pi / 1000) / max_err(2.0 * math.pi / 2000)
    elapsed = time.perf_counter() - started
    ok = 3.6 < ratio < 4.4 and elapsed < 5.0
    _criterion(
        "leapfrog-order",
        ok,
        f"error ratio on dt halving = {ratio:.4f} (want 4 +- 10%), {elapsed:.1f} s (cap 5)",
    )


def test_wigner_compressibility_boundary():
    started = time.perf_counter()
    psi = wigner.coherent_state()
    free = wigner.wigner_compressibility(psi, wigner.PotentialSpec.free(), 0.5, 1e-3, snapshots=5)
    harm = wigner.wigner_compressibility(
        psi, wigner.PotentialSpec.harmonic(), 0.5, 1e-3, snapshots=5
    )
    quart = wigner.wigner_compressibility(
        psi, wigner.PotentialSpec.quartic(k2=1.0, k4=0.4), 0.2, 4e-5, snapshots=5
    )

    rho = wigner.wigner_transform(psi)
    pot = wigner.PotentialSpec.quartic(k2=1.0, k4=0.4)
    base = wigner.moyal_terms(rho, pot, 5)
    doubled = wigner.moyal_terms(rho, pot, 5, hbar=2.0)
    hbar_ratio = float(np.linalg.norm(doubled[3]) / np.linalg.norm(base[3]))

    dt = 1e-5
    rho_plus = wigner.wigner_transform(wigner.schrodinger_evolve(psi, pot, dt, dt))
    rho_minus = wigner.wigner_transform(wigner.schrodinger_evolve(psi, pot, -dt, -dt))
    fd = (rho_plus.values - rho_minus.values) / (2.0 * dt)
    model = wigner.transport_term(rho) + base[1] + base[3] + base[5]
    interior = (np.abs(rho.q) <= 6.0)[:, None] & (np.abs(rho.p) <= 6.0)[None, :]
    oracle_err = float(np.abs(fd - model)[interior].max() / np.abs(fd)[interior].max())

    elapsed = time.perf_counter() - started
    ok = (
        free.metric < 1e-10
        and harm.metric < 1e-10
        and quart.metric > 1e-3
        and abs(hbar_ratio - 4.0) < 0.2
        and oracle_err < 1e-3
        and elapsed < 60.0
    )
    _criterion(
        "wigner-compressibility-boundary",
        ok,
        f"free = {free.metric:.3e}, harmonic = {harm.metric:.3e} (tol 1e-10), "
        f"quartic = {quart.metric:.3e} (floor 1e-3), "
        f"hbar^2 ratio = {hbar_ratio:.4f} (want 4 +- 5%), "
        f"sum-vs-evolution sup err = {oracle_err:.3e} (tol 1e-3), {elapsed:.1f} s (cap 60)",
    )


def test_wigner_transform_anchors():
    ground = wigner.wigner_transform(wigner.harmonic_eigenstate(0))
    excited = wigner.wigner_transform(wigner.harmonic_eigenstate(1))
    iq = int(np.argmin(np.abs(ground.q)))
    ip = int(np.argmin(np.abs(ground.p)))
    ground_err = abs(ground.values[iq, ip] - 1.0 / math.pi)
    excited_err = abs(excited.values[iq, ip] + 1.0 / math.pi)

    psi = wigner.coherent_state(q0=1.0, p0=0.5)
    rho = wigner.wigner_transform(psi)
    q_err = float(np.abs(rho.q_marginal() - np.abs(psi.values) ** 2).max())
    p_err = float(
        np.abs(rho.p_marginal() - np.abs(wigner.momentum_representation(psi)) ** 2).max()
    )
    ok = ground_err < 1e-3 and excited_err < 1e-3 and q_err < 1e-6 and p_err < 1e-6
    _criterion(
        "wigner-anchors",
        ok,
        f"ground peak err = {ground_err:.3e}, excited peak err = {excited_err:.3e} (tol 1e-3), "
        f"marginal errs = {q_err:.3e}/{p_err:.3e} (tol 1e-6)",
    )


def test_rotation_group_invariant_density():
    started = time.perf_counter()
    result = _run_haar_check({"samples": 100, "step": 1e-5}, np.random.default_rng(13))
    worst = result.summary["max_rel_err"]
    elapsed = time.perf_counter() - started
    ok = worst < 1e-4 and elapsed < 5.0
    _criterion(
        "rotation-group-jacobians",
        ok,
        f"max relative error over 100 draws = {worst:.3e} (tol 1e-4), {elapsed:.1f} s (cap 5)",
    )


def test_quantum_orbit_uniformity():
    started = time.perf_counter()
    periodic = ergodic.iterate_orbit(
        build_unitary(GroupCoordinates.canonical(0.0, math.pi / 4.0, 0.0)),
        31_999,
        keep_states=False,
    )
    periodic_flatness = ergodic.haar_histogram(periodic, bins=20).flatness

    orbit = ergodic.iterate_orbit(
        build_unitary(GroupCoordinates.canonical(0.0, 1.0, 0.0)), 1_000_000, keep_states=False
    )
    flat = ergodic.haar_histogram(orbit, bins=20).flatness
    control = ergodic.non_invariant_control(orbit, bins=20).flatness
    elapsed = time.perf_counter() - started
    ok = periodic_flatness < 1e-12 and flat < 0.05 and control > 0.5 and elapsed < 60.0
    _criterion(
        "quantum-orbit-uniformity",
        ok,
        f"periodic flatness = {periodic_flatness:.3e} (tol 1e-12), "
        f"incommensurate flatness = {flat:.3e} (tol 0.05), "
        f"non-invariant control = {control:.3f} (floor 0.5), {elapsed:.1f} s (cap 60)",
    )


def test_metric_preservation_contrast():
    started = time.perf_counter()
    series = ergodic.metric_series(
        build_unitary(GroupCoordinates.canonical(0.0, 1.0, 0.0)).matrix,
        np.array([1.0, 0.0], dtype=complex),
        np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
        build_unitary(GroupCoordinates.canonical(0.3, 1.1, -2.0)).matrix,
        build_unitary(GroupCoordinates.canonical(-1.2, 0.7, 0.4)).matrix,
        n_max=1_000_000,
        stride=1000,
    )
    _, d_cl = classical.pair_distance_series(
        classical.HamiltonianSpec.quartic(),
        classical.PhaseSpacePoint(0.0, 1.0),
        classical.PhaseSpacePoint(0.0, 1.2),
        50.0,
        1e-3,
    )
    ratio = float(d_cl.max() / d_cl.min())
    elapsed = time.perf_counter() - started
    ok = (
        series.max_state_deviation < 1e-12
        and series.max_group_deviation < 1e-12
        and ratio > 1.1
        and elapsed < 30.0
    )
    _criterion(
        "metric-preservation",
        ok,
        f"state deviation = {series.max_state_deviation:.3e}, "
        f"group deviation = {series.max_group_deviation:.3e} (tol 1e-12 over 1e6 steps), "
        f"classical pair ratio = {ratio:.2f} (floor 1.1), {elapsed:.1f} s (cap 30)",
    )


def test_pumping_average():
    started = time.perf_counter()
    half = pumping.geometric_pumping_closed_form(math.pi)
    report = pumping.compare_average_to_closed_form(
        GroupCoordinates.canonical(2.0, 2.0, 2.0), 1_000_000
    )
    limit_err = abs(pumping.geometric_pumping_closed_form(1e-6) - 0.1)
    elapsed = time.perf_counter() - started
    ok = (
        half == 0.5
        and report.deviation_oracle < 1e-3
        and limit_err < 1e-9
        and elapsed < 30.0
    )
    _criterion(
        "pumping-average",
        ok,
        f"closed form at pi = {half!r} (want exactly 0.5), "
        f"1e6-step average vs oracle = {report.deviation_oracle:.3e} (tol 1e-3), "
        f"small-angle limit err = {limit_err:.3e} (tol 1e-9), {elapsed:.1f} s (cap 30)",
    )


def test_determinism(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_OUT_DIR, raising=False)
    invocations = {
        "haar-check": ["--samples", "10"],
        "classical": ["--t", "0.5", "--ensemble", "32"],
        "wigner": ["--t", "0.02", "--snapshots", "3", "--grid", "128"],
        "ergodic": ["--n", "2000", "--bins", "8"],
        "pumping": ["--n", "20000", "--stride", "500"],
        "metric": ["--t", "0.5"],
    }
    mismatched = []
    for name, args in invocations.items():
        dirs = [tmp_path / name / run for run in ("a", "b")]
        for d in dirs:
            assert main([name, *args, "--seed", "5", "--out-dir", str(d)]) == 0
        files = sorted(p.name for p in dirs[0].glob("*.csv"))
        assert files, name
        for stem in files:
            if (dirs[0] / stem).read_bytes() != (dirs[1] / stem).read_bytes():
                mismatched.append(f"{name}/{stem}")
    ok = not mismatched
    _criterion(
        "determinism",
        ok,
        "all six experiments byte-identical on rerun"
        if ok
        else f"mismatched files: {mismatched}",
    )
