"""Classical phase-space transport on the (p, q) plane.

Hamiltonian systems evolve by a symplectic kick-drift-kick integrator, so the
numerical flow map preserves phase-space area to rounding error and local
densities obey rho(x(t), t) = rho_0(x_0) / |det J_t|.  A linearly damped
oscillator (pdot = -k q - gamma p) is included as the non-Hamiltonian negative
control: its velocity field has divergence -gamma and its flow Jacobian
contracts as e^{-gamma t}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyEnsemble, InputError, NonHamiltonianSystem


class SystemKind(enum.Enum):
    HARMONIC = "harmonic"
    QUARTIC = "quartic"
    PENDULUM = "pendulum"
    DAMPED_CONTROL = "damped_control"


@dataclass(frozen=True)
class HamiltonianSpec:
    """System selector with physical parameters (unused ones ignored)."""

    kind: SystemKind
    m: float = 1.0
    omega: float = 1.0
    k2: float = 1.0
    k4: float = 0.4
    length: float = 1.0
    g: float = 1.0
    k: float = 1.0
    gamma: float = 0.5

    def __post_init__(self):
        if self.m <= 0:
            raise InputError("mass must be positive")
        if self.kind is SystemKind.HARMONIC and self.omega <= 0:
            raise InputError("harmonic frequency must be positive")
        if self.kind is SystemKind.PENDULUM and self.length <= 0:
            raise InputError("pendulum length must be positive")
        if self.kind is SystemKind.DAMPED_CONTROL and self.gamma < 0:
            raise InputError("damping rate must be non-negative")

    @classmethod
    def harmonic(cls, m: float = 1.0, omega: float = 1.0) -> "HamiltonianSpec":
        return cls(SystemKind.HARMONIC, m=m, omega=omega)

    @classmethod
    def quartic(cls, m: float = 1.0, k2: float = 1.0, k4: float = 0.4) -> "HamiltonianSpec":
        return cls(SystemKind.QUARTIC, m=m, k2=k2, k4=k4)

    @classmethod
    def pendulum(cls, m: float = 1.0, length: float = 1.0, g: float = 1.0) -> "HamiltonianSpec":
        return cls(SystemKind.PENDULUM, m=m, length=length, g=g)

    @classmethod
    def damped(cls, m: float = 1.0, k: float = 1.0, gamma: float = 0.5) -> "HamiltonianSpec":
        return cls(SystemKind.DAMPED_CONTROL, m=m, k=k, gamma=gamma)

    @property
    def is_hamiltonian(self) -> bool:
        return self.kind is not SystemKind.DAMPED_CONTROL


@dataclass(frozen=True)
class PhaseSpacePoint:
    p: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise InputError("phase-space coordinates must be finite")


@dataclass(frozen=True)
class Ensemble:
    """Weighted sample points; weights double as initial density samples."""

    points: np.ndarray  # shape (N, 2), columns (p, q)
    weights: np.ndarray  # shape (N,)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if pts.shape[0] != w.shape[0] or pts.shape[1] != 2:
            raise InputError("points must be (N, 2) with matching weights")
        if pts.shape[0] == 0:
            raise EmptyEnsemble("ensemble has no points")
        if np.any(w < 0) or not np.all(np.isfinite(w)) or not np.all(np.isfinite(pts)):
            raise InputError("weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InputError("weights must sum to 1 within 1e-12")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def gaussian(cls, rng: np.random.Generator, n: int, center=(0.0, 1.0), sigma=0.5) -> "Ensemble":
        pts = rng.normal(loc=center, scale=sigma, size=(n, 2))
        return cls(pts, np.full(n, 1.0 / n))


# ---------------------------------------------------------------------------
# Vector fields
# ---------------------------------------------------------------------------


def _force(spec: HamiltonianSpec, mod):
    """Force on q (pdot for Hamiltonian kinds); `mod` is math or numpy."""
    if spec.kind is SystemKind.HARMONIC:
        c = spec.m * spec.omega**2
        return lambda q: -c * q
    if spec.kind is SystemKind.QUARTIC:
        k2, k4 = spec.k2, spec.k4
        return lambda q: -(k2 * q + k4 * q * q * q)
    if spec.kind is SystemKind.PENDULUM:
        c = spec.m * spec.g * spec.length
        sin = mod.sin
        return lambda q: -c * sin(q)
    raise NonHamiltonianSystem("damped control has no Hamiltonian force law")


def _inverse_effective_mass(spec: HamiltonianSpec) -> float:
    if spec.kind is SystemKind.PENDULUM:
        return 1.0 / (spec.m * spec.length**2)
    return 1.0 / spec.m


def energy(spec: HamiltonianSpec, x: PhaseSpacePoint) -> float:
    p, q = x.p, x.q
    if spec.kind is SystemKind.HARMONIC:
        return p * p / (2 * spec.m) + 0.5 * spec.m * spec.omega**2 * q * q
    if spec.kind is SystemKind.QUARTIC:
        return p * p / (2 * spec.m) + 0.5 * spec.k2 * q * q + 0.25 * spec.k4 * q**4
    if spec.kind is SystemKind.PENDULUM:
        return p * p / (2 * spec.m * spec.length**2) + spec.m * spec.g * spec.length * (
            1.0 - math.cos(q)
        )
    return p * p / (2 * spec.m) + 0.5 * spec.k * q * q


def divergence_field(spec: HamiltonianSpec, x: PhaseSpacePoint) -> float:
    """Phase-space divergence d(pdot)/dp + d(qdot)/dq, analytically."""
    if spec.is_hamiltonian:
        return 0.0
    return -spec.gamma


def exact_harmonic_flow(
    x0: PhaseSpacePoint, t: float, m: float = 1.0, omega: float = 1.0
) -> PhaseSpacePoint:
    """Closed-form harmonic flow consistent with qdot = p/m, pdot = -m w^2 q."""
    c, s = math.cos(omega * t), math.sin(omega * t)
    q = x0.q * c + x0.p * s / (m * omega)
    p = x0.p * c - m * omega * x0.q * s
    return PhaseSpacePoint(p, q)


# ---------------------------------------------------------------------------
# Integrators
# ---------------------------------------------------------------------------


def leapfrog_step(spec: HamiltonianSpec, x: PhaseSpacePoint, dt: float) -> PhaseSpacePoint:
    """One kick-drift-kick step; identity when dt = 0."""
    if not spec.is_hamiltonian:
        raise NonHamiltonianSystem("leapfrog requires a Hamiltonian system; use rk4_step")
    f = _force(spec, math)
    inv_m = _inverse_effective_mass(spec)
    p = x.p + 0.5 * dt * f(x.q)
    q = x.q + dt * p * inv_m
    p = p + 0.5 * dt * f(q)
    return PhaseSpacePoint(p, q)


def rk4_step(spec: HamiltonianSpec, x: PhaseSpacePoint, dt: float) -> PhaseSpacePoint:
    """Classic fourth-order step for the damped control (any kind accepted)."""
    p, q = _rk4_scalar(spec, x.p, x.q, dt, 1)
    return PhaseSpacePoint(p, q)


def _pq_dot(spec: HamiltonianSpec, mod):
    if spec.is_hamiltonian:
        f = _force(spec, mod)
        inv_m = _inverse_effective_mass(spec)
        return lambda p, q: (f(q), p * inv_m)
    k, gamma, inv_m = spec.k, spec.gamma, 1.0 / spec.m
    return lambda p, q: (-k * q - gamma * p, p * inv_m)


def _rk4_scalar(spec, p, q, dt, n_steps):
    deriv = _pq_dot(spec, math)
    h = dt
    for _ in range(n_steps):
        k1p, k1q = deriv(p, q)
        k2p, k2q = deriv(p + 0.5 * h * k1p, q + 0.5 * h * k1q)
        k3p, k3q = deriv(p + 0.5 * h * k2p, q + 0.5 * h * k2q)
        k4p, k4q = deriv(p + h * k3p, q + h * k3q)
        p += h * (k1p + 2 * k2p + 2 * k3p + k4p) / 6.0
        q += h * (k1q + 2 * k2q + 2 * k3q + k4q) / 6.0
    return p, q


def _leapfrog_scalar(spec, p, q, dt, n_steps):
    f = _force(spec, math)
    inv_m = _inverse_effective_mass(spec)
    half = 0.5 * dt
    for _ in range(n_steps):
        p += half * f(q)
        q += dt * p * inv_m
        p += half * f(q)
    return p, q


def integrate(spec: HamiltonianSpec, x0: PhaseSpacePoint, t: float, dt: float) -> PhaseSpacePoint:
    """Advance x0 by round(t / dt) fixed steps of size dt."""
    n_steps = int(round(t / dt)) if dt != 0 else 0
    if n_steps < 0:
        raise InputError("negative integration time not supported")
    if spec.is_hamiltonian:
        p, q = _leapfrog_scalar(spec, x0.p, x0.q, dt, n_steps)
    else:
        p, q = _rk4_scalar(spec, x0.p, x0.q, dt, n_steps)
    return PhaseSpacePoint(p, q)


def trajectory(
    spec: HamiltonianSpec, x0: PhaseSpacePoint, t: float, dt: float, stride: int = 100
):
    """Sampled trajectory: arrays (times, p, q) recorded every `stride` steps."""
    n_steps = int(round(t / dt))
    idx = np.arange(0, n_steps + 1, stride)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    ps = np.empty(idx.size)
    qs = np.empty(idx.size)
    p, q = x0.p, x0.q
    ps[0], qs[0] = p, q
    advance = _leapfrog_scalar if spec.is_hamiltonian else _rk4_scalar
    for j in range(1, idx.size):
        p, q = advance(spec, p, q, dt, int(idx[j] - idx[j - 1]))
        ps[j], qs[j] = p, q
    return idx * dt, ps, qs


def advance_ensemble(spec: HamiltonianSpec, pq: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Vectorized advance of an (N, 2) array of (p, q) rows."""
    n_steps = int(round(t / dt))
    p = pq[:, 0].copy()
    q = pq[:, 1].copy()
    if spec.is_hamiltonian:
        f = _force(spec, np)
        inv_m = _inverse_effective_mass(spec)
        half = 0.5 * dt
        for _ in range(n_steps):
            p += half * f(q)
            q += dt * p * inv_m
            p += half * f(q)
    else:
        deriv = _pq_dot(spec, np)
        for _ in range(n_steps):
            k1p, k1q = deriv(p, q)
            k2p, k2q = deriv(p + 0.5 * dt * k1p, q + 0.5 * dt * k1q)
            k3p, k3q = deriv(p + 0.5 * dt * k2p, q + 0.5 * dt * k2q)
            k4p, k4q = deriv(p + dt * k3p, q + dt * k3q)
            p += dt * (k1p + 2 * k2p + 2 * k3p + k4p) / 6.0
            q += dt * (k1q + 2 * k2q + 2 * k3q + k4q) / 6.0
    return np.column_stack([p, q])


# ---------------------------------------------------------------------------
# Jacobians and density transport
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowJacobian:
    matrix: np.ndarray
    det: float


def flow_jacobian(
    spec: HamiltonianSpec,
    x0: PhaseSpacePoint,
    t: float,
    dt: float,
    fd_step: float = 1e-5,
) -> FlowJacobian:
    """Central-difference Jacobian of the time-t flow map at x0."""
    seeds = np.array(
        [
            [x0.p + fd_step, x0.q],
            [x0.p - fd_step, x0.q],
            [x0.p, x0.q + fd_step],
            [x0.p, x0.q - fd_step],
        ]
    )
    out = advance_ensemble(spec, seeds, t, dt)
    col_p = (out[0] - out[1]) / (2.0 * fd_step)  # d(p_t, q_t)/dp_0
    col_q = (out[2] - out[3]) / (2.0 * fd_step)  # d(p_t, q_t)/dq_0
    jac = np.column_stack([col_p, col_q])
    return FlowJacobian(jac, float(np.linalg.det(jac)))


@dataclass(frozen=True)
class DensityReport:
    """Flow-Jacobian density transport for every probe point of an ensemble."""

    time: float
    dets: np.ndarray
    density_ratio: np.ndarray  # rho(x(t), t) / rho_0(x_0) = 1 / |det J|
    residual: float  # max |rho(x(t), t) - rho_0(x_0)| / rho_0
    knn_residual: float | None = None


def transport_density(
    ensemble: Ensemble,
    spec: HamiltonianSpec,
    t: float,
    dt: float,
    fd_step: float = 1e-5,
    knn_check: bool = False,
) -> DensityReport:
    """Advect every sample and report the transported local densities.

    Density along a trajectory follows rho_0 / |det J_t|; the residual
    compares it with the initial value, so incompressible flows give ~0 and
    the damped control gives e^{gamma t} - 1.
    """
    pts = ensemble.points
    n = pts.shape[0]
    offsets = np.array([[fd_step, 0.0], [-fd_step, 0.0], [0.0, fd_step], [0.0, -fd_step]])
    seeds = (pts[:, None, :] + offsets[None, :, :]).reshape(4 * n, 2)
    out = advance_ensemble(spec, seeds, t, dt).reshape(n, 4, 2)
    dpdp = (out[:, 0, 0] - out[:, 1, 0]) / (2 * fd_step)
    dqdp = (out[:, 0, 1] - out[:, 1, 1]) / (2 * fd_step)
    dpdq = (out[:, 2, 0] - out[:, 3, 0]) / (2 * fd_step)
    dqdq = (out[:, 2, 1] - out[:, 3, 1]) / (2 * fd_step)
    dets = dpdp * dqdq - dpdq * dqdp
    ratio = 1.0 / np.abs(dets)
    residual = float(np.abs(ratio - 1.0).max())

    knn_residual = None
    if knn_check:
        knn_residual = _knn_residual(spec, pts, t, dt, dets)
    return DensityReport(t, dets, ratio, residual, knn_residual)


def _knn_residual(spec, pts, t, dt, dets, k: int = 16) -> float:
    """Optional cross-check: k-nearest-neighbor density ratio vs 1/|det J|."""
    from scipy.spatial import cKDTree

    moved = advance_ensemble(spec, pts, t, dt)
    r0 = cKDTree(pts).query(pts, k=k + 1)[0][:, -1]
    rt = cKDTree(moved).query(moved, k=k + 1)[0][:, -1]
    est_ratio = (r0 / rt) ** 2  # area-based local density change
    return float(np.median(np.abs(est_ratio * np.abs(dets) - 1.0)))


def pair_distance_series(
    spec: HamiltonianSpec,
    a: PhaseSpacePoint,
    b: PhaseSpacePoint,
    t: float,
    dt: float,
    stride: int = 100,
):
    """Euclidean phase-space separation of two trajectories over time."""
    times, pa, qa = trajectory(spec, a, t, dt, stride)
    _, pb, qb = trajectory(spec, b, t, dt, stride)
    return times, np.hypot(pa - pb, qa - qb)
