"""Named experiments: validated parameter sets mapped to output tables.

Each experiment declares a flat parameter schema (name, type, default)
that the command-line driver turns into flags and config-file keys, and
a runner that returns deterministic rows for the documented CSV
schemas.  Randomness enters only through the generator handed to the
runner, which the driver seeds from (seed, experiment index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import classical, ergodic, pumping, wigner
from .errors import InputError, NearSingular
from .groupspace import (
    EulerAngles,
    GroupCoordinates,
    build_unitary,
    so3_translation_jacobian,
)

MAX_JACOBIAN_DRAWS = 10_000


@dataclass(frozen=True)
class Param:
    """One experiment parameter: flag name, value type, default, help text."""

    name: str
    kind: type
    default: object
    help: str
    choices: tuple = ()


@dataclass(frozen=True)
class Table:
    """Column names plus rows of plain numbers, ready for CSV or JSON."""

    columns: tuple
    rows: list


@dataclass(frozen=True)
class RunResult:
    """Output tables keyed by file stem, plus a scalar summary for the manifest."""

    tables: dict
    summary: dict


@dataclass(frozen=True)
class Experiment:
    name: str
    index: int
    description: str
    params: tuple
    runner: Callable


def _euler_draw(rng: np.random.Generator) -> EulerAngles:
    """Invariant-measure draw of Euler angles (theta from the sine density)."""
    phi = rng.uniform(-math.pi, math.pi)
    psi = rng.uniform(-math.pi, math.pi)
    theta = math.acos(rng.uniform(-1.0, 1.0))
    return EulerAngles(phi=phi, theta=theta, psi=psi)


def _run_haar_check(cfg: dict, rng: np.random.Generator) -> RunResult:
    """Finite-difference translation Jacobians versus the sine-ratio law."""
    samples = cfg["samples"]
    step = cfg["step"]
    if samples < 1:
        raise InputError("samples must be positive")
    rows = []
    worst = 0.0
    attempts = 0
    while len(rows) < samples:
        attempts += 1
        if attempts > MAX_JACOBIAN_DRAWS:
            raise InputError("could not draw enough non-degenerate angle pairs")
        fixed = _euler_draw(rng)
        at = _euler_draw(rng)
        try:
            report = so3_translation_jacobian(fixed, at, step=step)
        except NearSingular:
            continue
        rows.append(
            (
                len(rows),
                report.theta,
                report.theta_prime,
                report.det_fd,
                report.det_analytic,
                report.rel_err,
            )
        )
        worst = max(worst, report.rel_err)
    table = Table(
        columns=("sample_id", "theta", "theta_prime", "jacobian_fd", "jacobian_analytic", "rel_err"),
        rows=rows,
    )
    return RunResult(tables={"haar_check": table}, summary={"max_rel_err": worst, "samples": samples})


def _system_spec(cfg: dict) -> classical.HamiltonianSpec:
    kind = cfg["system"]
    if kind == "harmonic":
        return classical.HamiltonianSpec.harmonic(m=cfg["m"], omega=cfg["omega"])
    if kind == "quartic":
        return classical.HamiltonianSpec.quartic(m=cfg["m"], k2=cfg["k2"], k4=cfg["k4"])
    if kind == "pendulum":
        return classical.HamiltonianSpec.pendulum(m=cfg["m"], length=cfg["length"], g=cfg["g"])
    if kind == "damped":
        return classical.HamiltonianSpec.damped(m=cfg["m"], k=cfg["k"], gamma=cfg["gamma"])
    raise InputError(f"unknown system {kind!r}")


_FD_OFFSETS = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def _dets_from_seeds(seeds: np.ndarray, fd_step: float) -> np.ndarray:
    """Flow-map determinants from grouped 4-point central-difference seeds."""
    blocks = seeds.reshape(-1, 4, 2)
    col_p = (blocks[:, 0, :] - blocks[:, 1, :]) / (2.0 * fd_step)
    col_q = (blocks[:, 2, :] - blocks[:, 3, :]) / (2.0 * fd_step)
    return col_p[:, 0] * col_q[:, 1] - col_q[:, 0] * col_p[:, 1]


def _quantum_pair_distances(rows: int) -> np.ndarray:
    """State-overlap distance of a fixed pair after 0 .. rows-1 unitary steps."""
    u = build_unitary(GroupCoordinates.canonical(0.0, 1.0, 0.0)).matrix
    series = ergodic.metric_series(
        u,
        np.array([1.0, 0.0], dtype=complex),
        np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
        np.eye(2, dtype=complex),
        u,
        n_max=rows - 1,
        stride=1,
    )
    return series.state_distance


def _run_classical(cfg: dict, rng: np.random.Generator) -> RunResult:
    """Jacobian determinant and transported-density series plus the
    classical-versus-quantum pair-distance contrast."""
    spec = _system_spec(cfg)
    t, dt, stride = cfg["t"], cfg["dt"], cfg["stride"]
    fd_step = cfg["fd_step"]
    if t <= 0 or dt <= 0 or stride < 1:
        raise InputError("t, dt must be positive and stride at least 1")
    n_rows = int(round(t / (dt * stride))) + 1

    probe = np.array([0.0, 1.0])
    ens = classical.Ensemble.gaussian(rng, cfg["ensemble"], center=(0.0, 1.0), sigma=cfg["sigma"])
    pts = np.vstack([probe[None, :], ens.points])
    seeds = (pts[:, None, :] + fd_step * _FD_OFFSETS[None, :, :]).reshape(-1, 2)

    jac_rows = []
    for r in range(n_rows):
        if r > 0:
            seeds = classical.advance_ensemble(spec, seeds, stride * dt, dt)
        dets = _dets_from_seeds(seeds, fd_step)
        residual = float(np.abs(1.0 / np.abs(dets[1:]) - 1.0).max())
        jac_rows.append((r * stride * dt, float(dets[0]), residual))

    a = classical.PhaseSpacePoint(0.0, 1.0)
    b = classical.PhaseSpacePoint(0.0, 1.2)
    times, d_cl = classical.pair_distance_series(spec, a, b, t, dt, stride)
    d_q = _quantum_pair_distances(len(times))
    dist_rows = [(float(times[i]), float(d_cl[i]), float(d_q[i])) for i in range(len(times))]

    ratio = float(d_cl.max() / d_cl.min()) if d_cl.min() > 0 else math.inf
    return RunResult(
        tables={
            "classical_jacobian": Table(("t", "det_jacobian", "density_residual"), jac_rows),
            "distance_series": Table(("t", "distance_classical", "distance_quantum"), dist_rows),
        },
        summary={
            "system": cfg["system"],
            "final_det": jac_rows[-1][1],
            "final_density_residual": jac_rows[-1][2],
            "pair_distance_ratio": ratio,
        },
    )


def _run_wigner(cfg: dict, rng: np.random.Generator) -> RunResult:
    """Moyal-term norms and the compressibility ratio along an evolution."""
    kind = cfg["potential"]
    if kind == "free":
        pot = wigner.PotentialSpec.free()
    elif kind == "harmonic":
        pot = wigner.PotentialSpec.harmonic(m=cfg["m"], omega=cfg["omega"])
    elif kind == "quartic":
        pot = wigner.PotentialSpec.quartic(k2=cfg["k2"], k4=cfg["k4"])
    else:
        raise InputError(f"unknown potential {kind!r}")
    psi0 = wigner.coherent_state(
        q0=cfg["q0"], p0=cfg["p0"], n=cfg["grid"], hbar=cfg["hbar"]
    )
    result = wigner.wigner_compressibility(
        psi0, pot, cfg["t"], cfg["dt"], m=cfg["m"], snapshots=cfg["snapshots"]
    )
    rows = [
        (
            float(result.times[i]),
            float(result.lambda1_norms[i]),
            float(result.lambda3_norms[i]),
            float(result.lambda5_norms[i]),
            float(result.metrics[i]),
        )
        for i in range(result.times.shape[0])
    ]
    return RunResult(
        tables={
            "wigner_compressibility": Table(
                ("t", "lambda1_norm", "lambda3_norm", "lambda5_norm", "metric"), rows
            )
        },
        summary={"potential": kind, "metric": result.metric},
    )


def _run_ergodic(cfg: dict, rng: np.random.Generator) -> RunResult:
    """Orbit histograms on the folded box plus flatness-versus-n series."""
    coords = GroupCoordinates.canonical(cfg["phi"], cfg["theta"], cfg["omega"])
    u = build_unitary(coords)
    bins = cfg["bins"]
    orbit = ergodic.iterate_orbit(u, cfg["n"], keep_states=False)
    hist = ergodic.haar_histogram(orbit, bins)
    control = ergodic.non_invariant_control(orbit, bins)
    angle_hist = ergodic.orbit_angle_histogram(orbit, bins)

    hist_rows = []
    for i in range(bins):
        for j in range(bins):
            for k in range(bins):
                hist_rows.append(
                    (
                        i,
                        j,
                        k,
                        int(hist.counts[i, j, k]),
                        float(hist.mass[i, j, k]),
                        float(hist.occupancy[i, j, k]),
                    )
                )

    checkpoints, f_haar = ergodic.haar_flatness_series(orbit, bins=bins)
    _, _, f_control = ergodic.flatness_series(orbit, checkpoints, bins)
    flat_rows = [
        (int(checkpoints[i]), float(f_haar[i]), float(f_control[i]))
        for i in range(checkpoints.shape[0])
    ]

    return RunResult(
        tables={
            "ergodic_hist": Table(
                ("bin_phi", "bin_theta", "bin_omega", "count", "haar_mass", "normalized_occupancy"),
                hist_rows,
            ),
            "ergodic_flatness": Table(("n", "flatness_haar", "flatness_control"), flat_rows),
        },
        summary={
            "step_angle": orbit.step_angle,
            "period": orbit.period,
            "flatness_haar": hist.flatness,
            "flatness_angle": angle_hist.flatness,
            "flatness_control": control.flatness,
            "flatness_control_corrected": control.corrected_flatness,
            "achievable_bins": int(hist.achievable.sum()),
            "unitarity_defect": orbit.defect,
        },
    )


def _run_pumping(cfg: dict, rng: np.random.Generator) -> RunResult:
    """Transition-probability series, running average, and the closed form."""
    phi = cfg["phi"]
    theta = phi if cfg["theta"] is None else cfg["theta"]
    coords = GroupCoordinates.canonical(phi, theta, cfg["omega"])
    n, stride = cfg["n"], cfg["stride"]
    if stride < 1:
        raise InputError("stride must be at least 1")
    series = pumping.pumping_series(coords, n)
    closed = pumping.geometric_pumping_closed_form(coords.phi)
    oracle = pumping.orbit_average_oracle(coords)

    keep = np.unique(np.concatenate([np.arange(0, n, stride), [n - 1]]))
    rows = [
        (int(series.n[i]), float(series.p[i]), float(series.running_average[i]), closed)
        for i in keep
    ]
    summary = {
        "phi": coords.phi,
        "theta": coords.theta,
        "omega": coords.omega,
        "average": float(series.running_average[-1]),
        "closed_form": closed,
        "oracle": oracle,
        "deviation_oracle": abs(float(series.running_average[-1]) - oracle),
        "deviation_closed_form": abs(float(series.running_average[-1]) - closed),
    }
    if n >= pumping.MIN_CONVERGENCE_STEPS:
        report = pumping.compare_average_to_closed_form(coords, n)
        summary["tail_oscillation"] = report.tail_oscillation
    return RunResult(
        tables={"pumping": Table(("n", "p_n", "running_average", "p_G_closed_form"), rows)},
        summary=summary,
    )


def _run_metric(cfg: dict, rng: np.random.Generator) -> RunResult:
    """Distance contrast: kneading classical pair versus isometric quantum pair."""
    spec = _system_spec(cfg)
    t, dt, stride = cfg["t"], cfg["dt"], cfg["stride"]
    if t <= 0 or dt <= 0 or stride < 1:
        raise InputError("t, dt must be positive and stride at least 1")
    a = classical.PhaseSpacePoint(0.0, 1.0)
    b = classical.PhaseSpacePoint(0.0, 1.2)
    times, d_cl = classical.pair_distance_series(spec, a, b, t, dt, stride)

    u = build_unitary(
        GroupCoordinates.canonical(cfg["u_phi"], cfg["u_theta"], cfg["u_omega"])
    ).matrix
    q_series = ergodic.metric_series(
        u,
        np.array([1.0, 0.0], dtype=complex),
        np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
        build_unitary(GroupCoordinates.canonical(0.3, 1.1, -2.0)).matrix,
        build_unitary(GroupCoordinates.canonical(-1.2, 0.7, 0.4)).matrix,
        n_max=len(times) - 1,
        stride=1,
    )
    rows = [
        (float(times[i]), float(d_cl[i]), float(q_series.state_distance[i]))
        for i in range(len(times))
    ]
    ratio = float(d_cl.max() / d_cl.min()) if d_cl.min() > 0 else math.inf
    return RunResult(
        tables={"distance_series": Table(("t", "distance_classical", "distance_quantum"), rows)},
        summary={
            "pair_distance_ratio": ratio,
            "max_state_deviation": q_series.max_state_deviation,
            "max_group_deviation": q_series.max_group_deviation,
        },
    )


_CLASSICAL_PARAMS = (
    Param("system", str, "quartic", "potential family", ("harmonic", "quartic", "pendulum", "damped")),
    Param("t", float, 50.0, "total integration time"),
    Param("dt", float, 1e-3, "integrator step"),
    Param("stride", int, 100, "steps between output rows"),
    Param("m", float, 1.0, "mass"),
    Param("omega", float, 1.0, "harmonic angular frequency"),
    Param("k2", float, 1.0, "quadratic stiffness"),
    Param("k4", float, 0.4, "quartic stiffness"),
    Param("length", float, 1.0, "pendulum length"),
    Param("g", float, 1.0, "gravitational acceleration"),
    Param("k", float, 1.0, "damped-control stiffness"),
    Param("gamma", float, 0.5, "damping rate"),
    Param("ensemble", int, 256, "number of density probe points"),
    Param("sigma", float, 0.5, "probe cloud width"),
    Param("fd_step", float, 1e-5, "finite-difference step"),
)

EXPERIMENTS = {
    exp.name: exp
    for exp in (
        Experiment(
            name="haar-check",
            index=0,
            description="rotation-group translation Jacobians against the sine-ratio density",
            params=(
                Param("samples", int, 100, "number of random angle pairs"),
                Param("step", float, 1e-5, "finite-difference step in radians"),
            ),
            runner=_run_haar_check,
        ),
        Experiment(
            name="classical",
            index=1,
            description="phase-space volume conservation and pair-distance kneading",
            params=_CLASSICAL_PARAMS,
            runner=_run_classical,
        ),
        Experiment(
            name="wigner",
            index=2,
            description="quasiprobability flow compressibility along an evolution",
            params=(
                Param("potential", str, "quartic", "potential family", ("free", "harmonic", "quartic")),
                Param("t", float, 10.0, "total evolution time"),
                Param("dt", float, 4e-5, "split-step size"),
                Param("snapshots", int, 20, "number of sampled times"),
                Param("grid", int, 512, "position grid size (power of two)"),
                Param("q0", float, 1.0, "initial packet center"),
                Param("p0", float, 0.0, "initial packet momentum"),
                Param("hbar", float, 1.0, "action scale"),
                Param("m", float, 1.0, "mass"),
                Param("omega", float, 1.0, "harmonic angular frequency"),
                Param("k2", float, 1.0, "quadratic stiffness"),
                Param("k4", float, 0.4, "quartic stiffness"),
            ),
            runner=_run_wigner,
        ),
        Experiment(
            name="ergodic",
            index=3,
            description="orbit occupancy over the parameter box with invariant-measure weights",
            params=(
                Param("phi", float, 0.0, "phase angle of the generator"),
                Param("theta", float, 1.0, "polar angle of the generator"),
                Param("omega", float, 0.0, "relative phase of the generator"),
                Param("n", int, 1_000_000, "number of orbit steps"),
                Param("bins", int, 20, "bins per coordinate axis"),
            ),
            runner=_run_ergodic,
        ),
        Experiment(
            name="pumping",
            index=4,
            description="stepwise transition probabilities and their running average",
            params=(
                Param("phi", float, 2.0, "phase angle"),
                Param("theta", float, None, "polar angle; defaults to --phi (diagonal slice)"),
                Param("omega", float, 0.0, "relative phase"),
                Param("n", int, 100_000, "number of steps"),
                Param("stride", int, 10, "row subsampling stride"),
            ),
            runner=_run_pumping,
        ),
        Experiment(
            name="metric",
            index=5,
            description="classical distance kneading versus quantum isometry",
            params=_CLASSICAL_PARAMS[:12]
            + (
                Param("u_phi", float, 0.0, "quantum generator phase angle"),
                Param("u_theta", float, 1.0, "quantum generator polar angle"),
                Param("u_omega", float, 0.0, "quantum generator relative phase"),
            ),
            runner=_run_metric,
        ),
    )
}
