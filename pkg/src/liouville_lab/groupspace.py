"""Coordinates, invariant measures, and metrics on SU(2) and SO(3).

A 2x2 special unitary is parameterized by three angles (phi, theta, omega):

    U = [[cos(theta/2) e^{-i phi},        -sin(theta/2) e^{-i(omega-phi)}],
         [sin(theta/2) e^{+i(omega-phi)},  cos(theta/2) e^{+i phi}      ]]

with canonical ranges phi in [-pi, pi), theta in [0, pi], omega in [-pi, pi).
At theta = 0 or pi one angle is pure gauge; the canonical form stores
omega = 0 there.  SO(3) elements use z-x-z Euler angles (phi, theta, psi),
R = Rz(phi) Rx(theta) Rz(psi), with invariant density sin(theta).

The model measure field on the unitary coordinates carries density
sin(2 theta) over the folded box theta in [0, pi/2], which integrates to
4 pi^2 over the canonical box.  Metrics: group distance is the projective
rotation angle of U^dagger V (bi-invariant); state distance is the Fubini
metric arccos |<a|b>|.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import NearSingular, NonUnitaryInput, NotNormalized, OutOfRange

TWO_PI = 2.0 * math.pi

# Tolerances fixed by the module contracts.
UNITARITY_TOL = 1e-12
DECOMPOSE_INPUT_TOL = 1e-10
GAUGE_THETA_TOL = 1e-8
EULER_POLE_TOL = 1e-7
STATE_NORM_TOL = 1e-12


def wrap_angle(x):
    """Wrap angle(s) into [-pi, pi)."""
    return (np.asarray(x) + math.pi) % TWO_PI - math.pi


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupCoordinates:
    """Canonical coordinate triple on the unitary group."""

    phi: float
    theta: float
    omega: float

    def __post_init__(self):
        for name in ("phi", "theta", "omega"):
            if not math.isfinite(getattr(self, name)):
                raise OutOfRange(f"non-finite coordinate {name}")

    @classmethod
    def canonical(cls, phi: float, theta: float, omega: float) -> "GroupCoordinates":
        """Wrap into canonical ranges and apply the polar gauge omega = 0."""
        theta = float(np.clip(theta, 0.0, math.pi))
        phi = float(wrap_angle(phi))
        if theta < GAUGE_THETA_TOL or theta > math.pi - GAUGE_THETA_TOL:
            omega = 0.0
        else:
            omega = float(wrap_angle(omega))
        return cls(phi, theta, omega)

    def astuple(self) -> tuple[float, float, float]:
        return (self.phi, self.theta, self.omega)


@dataclass(frozen=True)
class EulerAngles:
    """z-x-z Euler angles for SO(3); theta in [0, pi]."""

    phi: float
    theta: float
    psi: float
    gimbal_degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("phi", "theta", "psi"):
            if not math.isfinite(getattr(self, name)):
                raise OutOfRange(f"non-finite Euler angle {name}")
        if not -1e-12 <= self.theta <= math.pi + 1e-12:
            raise OutOfRange(f"theta = {self.theta} outside [0, pi]")


class GroupId(enum.Enum):
    SU2_MODEL = "su2_model"
    SO3 = "so3"
    SYMPLECTIC_2D = "symplectic_2d"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class MeasureField:
    """Invariant density on a parameter domain, selected by group id."""

    group_id: GroupId

    def density(self, coords) -> float:
        return haar_density(self, coords)


@dataclass(frozen=True)
class UnitaryOperator:
    """Validated 2x2 unitary with unimodular determinant."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise NonUnitaryInput(f"expected 2x2 matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)
        defect = unitarity_defect(m)
        if defect > UNITARITY_TOL:
            raise NonUnitaryInput(f"U^dag U deviates from identity by {defect:.3e}")
        if abs(abs(np.linalg.det(m)) - 1.0) > UNITARITY_TOL:
            raise NonUnitaryInput("determinant modulus deviates from 1")

    @classmethod
    def identity(cls) -> "UnitaryOperator":
        return cls(np.eye(2, dtype=complex))


@dataclass(frozen=True)
class QuantumState:
    """Normalized two-component complex state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(2)
        object.__setattr__(self, "amplitudes", a)
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise NotNormalized(f"state norm {norm} deviates from 1 beyond 1e-12")

    @classmethod
    def basis(cls, k: int) -> "QuantumState":
        v = np.zeros(2, dtype=complex)
        v[k] = 1.0
        return cls(v)


def unitarity_defect(m: np.ndarray) -> float:
    """Frobenius norm of U^dag U - I."""
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(2)))


# ---------------------------------------------------------------------------
# Build / decompose on the unitary side
# ---------------------------------------------------------------------------


def build_unitary(coords: GroupCoordinates) -> UnitaryOperator:
    """Assemble the 2x2 special unitary for a coordinate triple."""
    phi, theta, omega = coords.astuple()
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    chi = omega - phi
    m = np.array(
        [
            [c * np.exp(-1j * phi), -s * np.exp(-1j * chi)],
            [s * np.exp(1j * chi), c * np.exp(1j * phi)],
        ],
        dtype=complex,
    )
    return UnitaryOperator(m)


def decompose_angles(alpha, beta):
    """Vectorized inverse parameterization from matrix entries.

    `alpha` = U[0,0] and `beta` = U[1,0] of special unitaries.  Returns
    (phi, theta, omega) arrays in canonical ranges with the polar gauge
    omega = 0 applied near theta in {0, pi}.
    """
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    theta = 2.0 * np.arctan2(np.abs(beta), np.abs(alpha))
    phi = -np.angle(alpha)
    omega = wrap_angle(np.angle(beta) + phi)

    lo = theta < GAUGE_THETA_TOL
    hi = theta > math.pi - GAUGE_THETA_TOL
    if np.ndim(theta) == 0:
        if hi:
            phi = -np.angle(beta)
            omega = 0.0
        elif lo:
            omega = 0.0
    else:
        phi = np.where(hi, -np.angle(beta), phi)
        omega = np.where(lo | hi, 0.0, omega)
    phi = wrap_angle(phi)
    return phi, theta, omega


def decompose_unitary(u: UnitaryOperator | np.ndarray) -> GroupCoordinates:
    """Recover canonical coordinates of a unitary, up to global phase.

    Accepts any matrix unitary within 1e-10; a non-special determinant phase
    is divided out before inversion.
    """
    m = u.matrix if isinstance(u, UnitaryOperator) else np.asarray(u, dtype=complex)
    if m.shape != (2, 2):
        raise NonUnitaryInput(f"expected 2x2 matrix, got shape {m.shape}")
    if unitarity_defect(m) > DECOMPOSE_INPUT_TOL:
        raise NonUnitaryInput("matrix is not unitary within 1e-10")
    det = np.linalg.det(m)
    m = m / np.sqrt(det)
    phi, theta, omega = decompose_angles(m[0, 0], m[1, 0])
    return GroupCoordinates(float(phi), float(theta), float(omega))


# ---------------------------------------------------------------------------
# Invariant densities
# ---------------------------------------------------------------------------

# Canonical domain of the model measure: the folded box where sin(2 theta) is
# non-negative.
SU2_BOX = ((-math.pi, math.pi), (0.0, math.pi / 2.0), (-math.pi, math.pi))
SO3_BOX = ((-math.pi, math.pi), (0.0, math.pi), (-math.pi, math.pi))


def haar_density(measure: MeasureField, coords) -> float:
    """Invariant density at a coordinate point; raises OutOfRange off-domain."""
    if measure.group_id is GroupId.SU2_MODEL:
        vals = coords.astuple() if hasattr(coords, "astuple") else tuple(coords)
        _require_in_box(vals[:3], SU2_BOX)
        return math.sin(2.0 * vals[1])
    if measure.group_id is GroupId.SO3:
        if hasattr(coords, "psi"):
            vals = (coords.phi, coords.theta, coords.psi)
        else:
            vals = tuple(coords)
        _require_in_box(vals[:3], SO3_BOX)
        return math.sin(vals[1])
    # Flat fields: symplectic phase-space area and plain uniform measure.
    if coords is None:
        return 1.0
    vals = coords.astuple() if hasattr(coords, "astuple") else tuple(np.atleast_1d(coords))
    for v in vals:
        if not math.isfinite(v):
            raise OutOfRange("non-finite coordinate")
    return 1.0


def _require_in_box(vals, box):
    for v, (lo, hi) in zip(vals, box):
        if not (lo - 1e-12 <= v <= hi + 1e-12):
            raise OutOfRange(f"coordinate {v} outside [{lo}, {hi}]")


def su2_box_mass() -> float:
    """Adaptive quadrature of the model density over its canonical box."""
    val, _err = integrate.quad(lambda t: math.sin(2.0 * t), 0.0, math.pi / 2.0)
    return TWO_PI * TWO_PI * val


def fold_coordinates(phi, theta, omega):
    """Fold theta > pi/2 into the measure box via theta -> pi - theta.

    The fold shifts omega by pi so folded and unfolded sheets stay disjoint.
    Inputs may be arrays; outputs share their shape.
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    over = theta > math.pi / 2.0 + 1e-12
    theta_f = np.where(over, math.pi - theta, theta)
    omega_f = np.where(over, wrap_angle(omega + math.pi), omega)
    return phi, theta_f, omega_f


# ---------------------------------------------------------------------------
# SO(3) composition and the translation Jacobian
# ---------------------------------------------------------------------------


def so3_matrix(e: EulerAngles) -> np.ndarray:
    """Rotation matrix Rz(phi) Rx(theta) Rz(psi)."""
    cf, sf = math.cos(e.phi), math.sin(e.phi)
    ct, st = math.cos(e.theta), math.sin(e.theta)
    cp, sp = math.cos(e.psi), math.sin(e.psi)
    return np.array(
        [
            [cf * cp - sf * ct * sp, -cf * sp - sf * ct * cp, sf * st],
            [sf * cp + cf * ct * sp, -sf * sp + cf * ct * cp, -cf * st],
            [st * sp, st * cp, ct],
        ]
    )


def euler_from_matrix(r: np.ndarray) -> EulerAngles:
    """Extract z-x-z angles; flags (and gauges) the gimbal-degenerate poles."""
    r = np.asarray(r, dtype=float)
    # atan2 form stays well conditioned where acos(r22) loses half the digits
    st = math.hypot(r[2, 0], r[2, 1])
    theta = math.atan2(st, r[2, 2])
    if st < EULER_POLE_TOL:
        # Only phi -+ psi survives; store psi = 0.
        phi = math.atan2(r[1, 0], r[0, 0])
        return EulerAngles(phi, theta, 0.0, gimbal_degenerate=True)
    phi = math.atan2(r[0, 2], -r[1, 2])
    psi = math.atan2(r[2, 0], r[2, 1])
    return EulerAngles(phi, theta, psi)


def compose_so3(a: EulerAngles, b: EulerAngles) -> EulerAngles:
    """Euler angles of the product rotation R(a) R(b)."""
    return euler_from_matrix(so3_matrix(a) @ so3_matrix(b))


@dataclass(frozen=True)
class TranslationJacobian:
    """Finite-difference vs analytic volume distortion of a left translation."""

    theta: float
    theta_prime: float
    det_fd: float
    det_analytic: float

    @property
    def rel_err(self) -> float:
        return abs(self.det_fd - self.det_analytic) / abs(self.det_analytic)


def so3_translation_jacobian(
    fixed: EulerAngles, at: EulerAngles, step: float = 1e-5
) -> TranslationJacobian:
    """Jacobian determinant of g -> fixed * g in Euler coordinates at `at`.

    Central differences with the given step; the analytic value is
    sin(theta) / sin(theta'), where theta' belongs to the composed rotation.
    """
    if not 1e-6 <= step <= 1e-3:
        raise NearSingular(f"step {step} outside [1e-6, 1e-3]")
    center = compose_so3(fixed, at)
    s_at = math.sin(at.theta)
    s_out = math.sin(center.theta)
    if abs(s_at) < 1e-6 or abs(s_out) < 1e-6:
        raise NearSingular("sin(theta) below 1e-6 at evaluation or image point")

    base = np.array([at.phi, at.theta, at.psi])
    ref = np.array([center.phi, center.theta, center.psi])
    jac = np.empty((3, 3))
    for i in range(3):
        hp = base.copy()
        hm = base.copy()
        hp[i] += step
        hm[i] -= step
        fp = compose_so3(fixed, EulerAngles(*hp))
        fm = compose_so3(fixed, EulerAngles(*hm))
        vp = _unwrap_euler(fp, ref)
        vm = _unwrap_euler(fm, ref)
        jac[:, i] = (vp - vm) / (2.0 * step)
    det = float(abs(np.linalg.det(jac)))
    return TranslationJacobian(
        theta=at.theta, theta_prime=center.theta, det_fd=det, det_analytic=s_at / s_out
    )


def _unwrap_euler(e: EulerAngles, ref: np.ndarray) -> np.ndarray:
    """Shift periodic angles by 2 pi onto the branch nearest `ref`."""
    v = np.array([e.phi, e.theta, e.psi])
    for k in (0, 2):
        while v[k] - ref[k] > math.pi:
            v[k] -= TWO_PI
        while v[k] - ref[k] < -math.pi:
            v[k] += TWO_PI
    return v


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def group_distance(u: UnitaryOperator, v: UnitaryOperator) -> float:
    """Projective rotation angle of U^dag V; bi-invariant, d(I, -I) = 0."""
    mu = u.matrix if isinstance(u, UnitaryOperator) else np.asarray(u, dtype=complex)
    mv = v.matrix if isinstance(v, UnitaryOperator) else np.asarray(v, dtype=complex)
    if unitarity_defect(mu) > DECOMPOSE_INPUT_TOL or unitarity_defect(mv) > DECOMPOSE_INPUT_TOL:
        raise NonUnitaryInput("group distance needs unitary arguments")
    w = mu.conj().T @ mv
    half = abs(np.trace(w)) / (2.0 * math.sqrt(abs(np.linalg.det(w))))
    return 2.0 * math.acos(min(1.0, half))


def state_distance(a: QuantumState, b: QuantumState) -> float:
    """Fubini angle arccos |<a|b>| in [0, pi/2]."""
    va = a.amplitudes if isinstance(a, QuantumState) else np.asarray(a, dtype=complex)
    vb = b.amplitudes if isinstance(b, QuantumState) else np.asarray(b, dtype=complex)
    for v in (va, vb):
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise NotNormalized("state_distance requires normalized inputs")
    overlap = min(1.0, abs(np.vdot(va, vb)))
    return math.acos(overlap)


def rotation_angle(u: UnitaryOperator | np.ndarray) -> float:
    """Half-turn angle alpha in [0, pi] with tr U = 2 cos(alpha) e^{i 0}."""
    m = u.matrix if isinstance(u, UnitaryOperator) else np.asarray(u, dtype=complex)
    det = np.linalg.det(m)
    tr = np.trace(m / np.sqrt(det))
    return math.acos(float(np.clip(np.real(tr) / 2.0, -1.0, 1.0)))


def rotation_axis(u: UnitaryOperator | np.ndarray) -> np.ndarray:
    """Unit axis n with U = cos(alpha) I + i sin(alpha) (n . sigma)."""
    m = u.matrix if isinstance(u, UnitaryOperator) else np.asarray(u, dtype=complex)
    m = m / np.sqrt(np.linalg.det(m))
    k = (m - m.conj().T) / 2j  # equals sin(alpha) * (n . sigma)
    vec = np.array([np.real(k[1, 0]), np.imag(k[1, 0]), np.real(k[0, 0])])
    norm = float(np.linalg.norm(vec))
    if norm < 1e-15:
        return np.array([0.0, 0.0, 1.0])
    return vec / norm


def closure_period(alpha: float, max_denominator: int = 4096, tol: float = 1e-12) -> int | None:
    """Smallest k with k * alpha = 0 (mod 2 pi), or None if none below the cap."""
    from fractions import Fraction

    frac = Fraction(alpha / TWO_PI).limit_denominator(max_denominator)
    if abs(alpha / TWO_PI - float(frac)) < tol:
        return frac.denominator
    return None


def one_parameter_entries(u: UnitaryOperator | np.ndarray, s: np.ndarray, start_col0=None):
    """First-column entries of exp(s log U) * start along the closure circle.

    Returns (alpha(s), beta(s)) = column 0 of V(s) @ start, where
    V(s) = cos(s) I + i sin(s) (n . sigma) and `start_col0` is the first
    column of the start element (defaults to the identity's (1, 0)).
    """
    s = np.asarray(s, dtype=float)
    nx, ny, nz = rotation_axis(u)
    c, si = np.cos(s), np.sin(s)
    v00 = c + 1j * si * nz
    v01 = 1j * si * (nx - 1j * ny)
    v10 = 1j * si * (nx + 1j * ny)
    v11 = c - 1j * si * nz
    if start_col0 is None:
        return v00, v10
    w0, w1 = complex(start_col0[0]), complex(start_col0[1])
    return v00 * w0 + v01 * w1, v10 * w0 + v11 * w1
