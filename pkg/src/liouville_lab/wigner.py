"""Phase-space quasiprobability flow for one-dimensional quantum systems.

The quasiprobability density of a wavefunction phi on a uniform grid is

    rho_W(p, q) = (1/2 pi) Int dq' phi*(q - (hbar/2) q') e^{-i q' p}
                                   phi(q + (hbar/2) q'),

computed per q column: the integrand is sampled on a half-step offset lattice
(trigonometric interpolation, exact for band-limited data) and transformed
with one batched FFT; the p axis is the spectral conjugate with spacing
2 pi hbar / (n dq).  Its equation of motion splits into a classical transport
part and odd-order momentum-derivative corrections

    d rho_W/dt = -(p/m) d_q rho_W
                 + sum_{odd l} (hbar/2i)^{l-1}/l! (d^l V/dq^l)(d^l rho_W/dp^l),

which terminates at l = 5 for polynomial potentials of degree <= 6.  The
correction-to-transport ratio ||l>=3|| / ||l=1|| measures how far the flow is
from an incompressible characteristic flow: it vanishes for free and harmonic
systems and is finite for anharmonic ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import GridTooCoarse, InputError, NotNormalized, StabilityViolation

NORM_TOL = 1e-10
MASS_TOL = 1e-8
IMAG_TOL = 1e-10
EDGE_DENSITY_TOL = 1e-12
STABILITY_BOUND = 0.1


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WavefunctionGrid:
    """Complex wavefunction sampled on a uniform q grid."""

    q_min: float
    dq: float
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        n = v.size
        if n < 128 or (n & (n - 1)) != 0:
            raise InputError(f"grid size {n} must be a power of two >= 128")
        if self.dq <= 0 or self.hbar <= 0:
            raise InputError("dq and hbar must be positive")
        norm = float((np.abs(v) ** 2).sum() * self.dq)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"|psi|^2 integrates to {norm}, not 1 within 1e-10")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n)

    @property
    def dp(self) -> float:
        return 2.0 * math.pi * self.hbar / (self.n * self.dq)

    @property
    def p(self) -> np.ndarray:
        return self.dp * (np.arange(self.n) - self.n // 2)

    @classmethod
    def normalized(cls, q_min, dq, values, hbar=1.0) -> "WavefunctionGrid":
        v = np.asarray(values, dtype=complex)
        v = v / math.sqrt(float((np.abs(v) ** 2).sum() * dq))
        return cls(q_min, dq, v, hbar)


def default_grid_axis(n: int = 512, q_min: float = -12.0, q_max: float = 12.0):
    return q_min, (q_max - q_min) / n, n


def gaussian_packet(
    q0: float = 0.0,
    p0: float = 0.0,
    sigma: float = math.sqrt(0.5),
    n: int = 512,
    q_min: float = -12.0,
    q_max: float = 12.0,
    hbar: float = 1.0,
) -> WavefunctionGrid:
    """Gaussian with position standard deviation sigma, centered (q0, p0)."""
    q_min, dq, n = q_min, (q_max - q_min) / n, n
    q = q_min + dq * np.arange(n)
    values = np.exp(-((q - q0) ** 2) / (4.0 * sigma**2) + 1j * p0 * q / hbar)
    return WavefunctionGrid.normalized(q_min, dq, values, hbar)


def harmonic_eigenstate(
    level: int = 0, n: int = 512, q_min: float = -12.0, q_max: float = 12.0, hbar: float = 1.0
) -> WavefunctionGrid:
    """Oscillator eigenstate for m = omega = 1 (levels 0 and 1)."""
    q_min, dq, n = q_min, (q_max - q_min) / n, n
    q = q_min + dq * np.arange(n)
    x = q / math.sqrt(hbar)
    if level == 0:
        values = np.exp(-(x**2) / 2.0)
    elif level == 1:
        values = x * np.exp(-(x**2) / 2.0)
    else:
        raise InputError("only levels 0 and 1 are provided")
    return WavefunctionGrid.normalized(q_min, dq, values, hbar)


def coherent_state(
    q0: float = 1.0,
    p0: float = 0.0,
    n: int = 512,
    q_min: float = -12.0,
    q_max: float = 12.0,
    hbar: float = 1.0,
) -> WavefunctionGrid:
    """Displaced oscillator ground state (m = omega = 1)."""
    return gaussian_packet(q0, p0, math.sqrt(hbar / 2.0), n, q_min, q_max, hbar)


@dataclass(frozen=True)
class PotentialSpec:
    """Polynomial potential V(q) = sum c_k q^k with degree <= 6."""

    coefficients: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in self.coefficients)
        if len(c) > 7:
            raise InputError("potential degree must not exceed 6")
        c = c + (0.0,) * (7 - len(c))
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def free(cls) -> "PotentialSpec":
        return cls((0.0,))

    @classmethod
    def harmonic(cls, m: float = 1.0, omega: float = 1.0) -> "PotentialSpec":
        return cls((0.0, 0.0, 0.5 * m * omega**2))

    @classmethod
    def quartic(cls, k2: float = 1.0, k4: float = 0.4) -> "PotentialSpec":
        return cls((0.0, 0.0, 0.5 * k2, 0.0, 0.25 * k4))

    def values(self, q: np.ndarray) -> np.ndarray:
        return npoly.polyval(q, self.coefficients)

    def derivative_values(self, q: np.ndarray, order: int) -> np.ndarray:
        return npoly.polyval(q, npoly.polyder(self.coefficients, m=order))

    def derivative_is_zero(self, order: int) -> bool:
        return not np.any(npoly.polyder(self.coefficients, m=order))


@dataclass(frozen=True)
class WignerGrid:
    """Real quasiprobability field on the (q, p) grid; values[iq, ip]."""

    q_min: float
    dq: float
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        n = v.shape[0]
        if v.shape != (n, n):
            raise InputError("expected a square (n_q, n_p) field")
        mass = float(v.sum() * self.dq * self.dp)
        if abs(mass - 1.0) > MASS_TOL:
            raise NotNormalized(f"quasiprobability mass {mass} deviates from 1 beyond 1e-8")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n)

    @property
    def dp(self) -> float:
        return 2.0 * math.pi * self.hbar / (self.n * self.dq)

    @property
    def p(self) -> np.ndarray:
        return self.dp * (np.arange(self.n) - self.n // 2)

    def q_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.dp

    def p_marginal(self) -> np.ndarray:
        return self.values.sum(axis=0) * self.dq


# ---------------------------------------------------------------------------
# Transform
# ---------------------------------------------------------------------------


def _fine_interpolate(values: np.ndarray) -> np.ndarray:
    """Exact trigonometric upsampling onto the half-step lattice (2n points)."""
    n = values.size
    ft = np.fft.fft(values)
    ft2 = np.zeros(2 * n, dtype=complex)
    ft2[: n // 2] = ft[: n // 2]
    ft2[-(n // 2) + 1 :] = ft[-(n // 2) + 1 :]
    ft2[n // 2] = 0.5 * ft[n // 2]
    ft2[-(n // 2)] = 0.5 * ft[n // 2]
    return np.fft.ifft(ft2) * 2.0


def wigner_transform(psi: WavefunctionGrid) -> WignerGrid:
    """Quasiprobability field of a wavefunction; see module docstring.

    Raises GridTooCoarse when the state has appreciable weight at the grid
    boundary (the offset correlation would alias).  The imaginary residue of
    the transform is verified below 1e-10 and discarded.
    """
    n = psi.n
    edge_density = max(abs(psi.values[0]) ** 2, abs(psi.values[-1]) ** 2) * psi.dq
    if edge_density > EDGE_DENSITY_TOL:
        raise GridTooCoarse("support reaches the grid boundary; enlarge the box")

    fine = _fine_interpolate(psi.values)
    j = np.arange(-n, n)
    k2 = 2 * np.arange(n)
    idx_minus = k2[:, None] - j[None, :]
    idx_plus = k2[:, None] + j[None, :]
    valid = (idx_minus >= 0) & (idx_minus < 2 * n) & (idx_plus >= 0) & (idx_plus < 2 * n)
    corr = np.zeros((n, 2 * n), dtype=complex)
    corr[valid] = np.conj(fine[idx_minus[valid]]) * fine[idx_plus[valid]]

    spect = np.fft.fft(np.fft.ifftshift(corr, axes=1), axis=1)
    # Even output bins carry the conjugate momenta at spacing 2 pi hbar/(n dq).
    field = np.fft.fftshift(spect[:, ::2], axes=1) * (psi.dq / (2.0 * math.pi * psi.hbar))
    imag_residue = float(np.abs(field.imag).max())
    if imag_residue > IMAG_TOL:
        raise NotNormalized(f"imaginary residue {imag_residue:.3e} exceeds 1e-10")
    return WignerGrid(psi.q_min, psi.dq, field.real, psi.hbar)


def momentum_representation(psi: WavefunctionGrid) -> np.ndarray:
    """Momentum-space amplitudes on the centered p axis of the transform."""
    phase = np.exp(-1j * np.outer(psi.p, psi.q) / psi.hbar)
    return phase @ psi.values * psi.dq / math.sqrt(2.0 * math.pi * psi.hbar)


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------


def schrodinger_evolve(
    psi: WavefunctionGrid,
    potential: PotentialSpec,
    t: float,
    dt: float,
    m: float = 1.0,
) -> WavefunctionGrid:
    """Strang-split spectral evolution for round(t / dt) steps.

    Precondition: |dt| max|V| / hbar < 0.1 on the grid, else the potential
    phase advance per step is unresolved and StabilityViolation is raised.
    """
    n_steps = int(round(t / dt)) if dt != 0 else 0
    if n_steps < 0:
        raise InputError("negative step count")
    v_grid = potential.values(psi.q)
    vmax = float(np.abs(v_grid).max())
    if abs(dt) * vmax / psi.hbar >= STABILITY_BOUND:
        raise StabilityViolation(
            f"dt*max|V|/hbar = {abs(dt) * vmax / psi.hbar:.3f} >= {STABILITY_BOUND}"
        )
    if n_steps == 0:
        return WavefunctionGrid(psi.q_min, psi.dq, psi.values.copy(), psi.hbar)

    k = 2.0 * math.pi * psi.hbar * np.fft.fftfreq(psi.n, psi.dq)
    half_v = np.exp(-0.5j * v_grid * dt / psi.hbar)
    kinetic = np.exp(-0.5j * k**2 * dt / (m * psi.hbar))
    values = psi.values.copy()
    for _ in range(n_steps):
        values = half_v * values
        values = np.fft.ifft(kinetic * np.fft.fft(values))
        values = half_v * values
    return WavefunctionGrid(psi.q_min, psi.dq, values, psi.hbar)


# ---------------------------------------------------------------------------
# Equation-of-motion terms
# ---------------------------------------------------------------------------


def _spectral_derivative(field: np.ndarray, spacing: float, order: int, axis: int) -> np.ndarray:
    n = field.shape[axis]
    s = 2.0 * math.pi * np.fft.fftfreq(n, spacing)
    mult = (1j * s) ** order
    if order % 2 == 1:
        mult[n // 2] = 0.0  # odd derivative: drop the sign-ambiguous Nyquist mode
    shape = [1, 1]
    shape[axis] = n
    return np.real(np.fft.ifft(mult.reshape(shape) * np.fft.fft(field, axis=axis), axis=axis))


def transport_term(rho: WignerGrid, m: float = 1.0) -> np.ndarray:
    """Classical streaming contribution -(p/m) d_q rho."""
    drho_dq = _spectral_derivative(rho.values, rho.dq, 1, axis=0)
    return -(rho.p[None, :] / m) * drho_dq


def moyal_terms(
    rho: WignerGrid,
    potential: PotentialSpec,
    lambda_max: int = 5,
    hbar: float | None = None,
) -> dict[int, np.ndarray]:
    """Per-order force terms (hbar/2i)^{l-1}/l! V^(l)(q) d^l rho/dp^l.

    Odd orders l = 1, 3, 5; `hbar` overrides the grid value in the prefactor
    only (the field and axes are taken as given), which isolates the
    prefactor's hbar^{l-1} scaling.
    """
    if lambda_max not in (1, 3, 5):
        raise InputError("lambda_max must be one of 1, 3, 5")
    hb = rho.hbar if hbar is None else hbar
    q = rho.q
    terms: dict[int, np.ndarray] = {}
    for lam in range(1, lambda_max + 1, 2):
        if potential.derivative_is_zero(lam):
            terms[lam] = np.zeros_like(rho.values)
            continue
        v_l = potential.derivative_values(q, lam)
        d_l = _spectral_derivative(rho.values, rho.dp, lam, axis=1)
        prefactor = (-(hb**2) / 4.0) ** ((lam - 1) // 2) / math.factorial(lam)
        terms[lam] = prefactor * v_l[:, None] * d_l
    return terms


def _field_norm(x: np.ndarray, dq: float, dp: float) -> float:
    return float(math.sqrt((x**2).sum() * dq * dp))


@dataclass(frozen=True)
class CompressibilityResult:
    times: np.ndarray
    lambda1_norms: np.ndarray
    lambda3_norms: np.ndarray
    lambda5_norms: np.ndarray
    metrics: np.ndarray  # per-snapshot ||l>=3|| / ||l=1||
    metric: float  # max over snapshots


def wigner_compressibility(
    psi0: WavefunctionGrid,
    potential: PotentialSpec,
    t: float,
    dt: float,
    m: float = 1.0,
    snapshots: int = 20,
) -> CompressibilityResult:
    """Ratio of anharmonic force corrections to the classical force term.

    Evolves psi0, transforms snapshots, and reports per-snapshot L2 norms of
    the l = 1, 3, 5 terms plus the ratio ||l3 + l5|| / ||l1|| (zero when the
    corrections vanish identically, as for free and harmonic potentials).
    """
    if snapshots < 1:
        raise InputError("need at least one snapshot")
    n_steps = int(round(t / dt))
    counts = np.linspace(0, n_steps, snapshots + 1).round().astype(int)
    times = counts * dt
    l1 = np.empty(counts.size)
    l3 = np.empty(counts.size)
    l5 = np.empty(counts.size)
    ratio = np.empty(counts.size)
    psi = psi0
    done = 0
    for i, target in enumerate(counts):
        if target > done:
            psi = schrodinger_evolve(psi, potential, (target - done) * dt, dt, m)
            done = target
        rho = wigner_transform(psi)
        terms = moyal_terms(rho, potential, 5)
        l1[i] = _field_norm(terms[1], rho.dq, rho.dp)
        l3[i] = _field_norm(terms[3], rho.dq, rho.dp)
        l5[i] = _field_norm(terms[5], rho.dq, rho.dp)
        high = _field_norm(terms[3] + terms[5], rho.dq, rho.dp)
        ratio[i] = 0.0 if high == 0.0 else high / l1[i]
    return CompressibilityResult(times, l1, l3, l5, ratio, float(ratio.max()))
