"""Stepwise transition probabilities and their orbit averages.

Repeated application of a fixed unitary to the ground basis state
produces the sequence p_n = |<1| U^n |0>|^2.  Along the one-parameter
closure of the orbit the time average of p_n converges to the closure
average, which on the diagonal parameter slice (polar angle equal to
the phase angle) admits the closed form

    p_avg(phi) = sin^2(phi/2) / (2 (sin^2(phi/2) + cos^2(phi/2) sin^2(phi))),

with the removable limit 1/10 at phi = 0.  The running average is the
diagnostic: its tail oscillation certifies convergence and its distance
from the closed form is reported, never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotConverged
from .groupspace import (
    TWO_PI,
    GroupCoordinates,
    build_unitary,
    closure_period,
    one_parameter_entries,
    rotation_angle,
)

MAX_PUMP_STEPS = 10_000_000
RENORMALIZE_EVERY = 1024
MIN_CONVERGENCE_STEPS = 10_000
TAIL_OSCILLATION_BOUND = 1e-2
ORACLE_QUADRATURE_POINTS = 8192


@dataclass(frozen=True)
class PumpingSeries:
    """Transition probabilities p_n for n = 1 .. n_max and running averages."""

    coords: GroupCoordinates
    n: np.ndarray
    p: np.ndarray
    running_average: np.ndarray

    def __len__(self) -> int:
        return self.n.shape[0]


def pumping_series(coords: GroupCoordinates, n_max: int) -> PumpingSeries:
    """Iterate the unitary on the ground state and record |<1|U^n|0>|^2.

    The state is renormalized every 1024 applications so the recorded
    probabilities stay in [0, 1] to rounding accuracy over millions of
    steps.  p_1 equals sin^2(theta/2) by construction.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise InputError("n_max must be a positive integer")
    if n_max > MAX_PUMP_STEPS:
        raise InputError(f"n_max exceeds the {MAX_PUMP_STEPS} step cap")
    u = build_unitary(coords).matrix

    chunk = RENORMALIZE_EVERY
    pows = np.empty((chunk + 1, 2, 2), dtype=complex)
    pows[0] = np.eye(2)
    for j in range(chunk):
        pows[j + 1] = u @ pows[j]

    p = np.empty(n_max)
    base = np.array([1.0, 0.0], dtype=complex)
    pos = 1
    while pos <= n_max:
        span = min(chunk, n_max - pos + 1)
        # states U^pos v .. U^(pos+span-1) v via the power table on the base state
        states = np.einsum("njk,k->nj", pows[1 : span + 1], base)
        p[pos - 1 : pos - 1 + span] = np.abs(states[:, 1]) ** 2
        base = states[-1]
        base = base / np.linalg.norm(base)
        pos += span

    n = np.arange(1, n_max + 1, dtype=np.int64)
    running = np.cumsum(p) / n
    return PumpingSeries(coords=coords, n=n, p=p, running_average=running)


def transition_probability(coords: GroupCoordinates) -> float:
    """One-step probability p_1 = sin^2(theta / 2)."""
    return math.sin(coords.theta / 2.0) ** 2


def geometric_pumping_closed_form(phi: float) -> float:
    """Closure-averaged transition probability on the diagonal slice.

    Evaluated in the cancellation-free form
    s^2 / (2 (s^2 + c^2 sin^2 phi)) with s = sin(phi/2), c = cos(phi/2);
    even and 2 pi periodic in phi, with value exactly 1/10 at phi = 0
    (the removable limit) and 1/2 at phi = pi.
    """
    s = math.sin(phi / 2.0)
    c = math.cos(phi / 2.0)
    denom = s * s + c * c * math.sin(phi) ** 2
    if denom == 0.0:
        return 0.1
    return s * s / (2.0 * denom)


def orbit_average_oracle(coords: GroupCoordinates) -> float:
    """Closure average of |<1|V|0>|^2 by quadrature or atom enumeration.

    Rational step angle: average over the finitely many closure atoms.
    Irrational: midpoint quadrature along the closure circle, exact for
    the trigonometric polynomial integrand at 8192 points.
    """
    u = build_unitary(coords).matrix
    alpha = rotation_angle(u)
    k = closure_period(alpha)
    if k is not None:
        s = np.arange(k) * alpha
    else:
        s = (np.arange(ORACLE_QUADRATURE_POINTS) + 0.5) * (
            TWO_PI / ORACLE_QUADRATURE_POINTS
        )
    _, beta = one_parameter_entries(u, s)
    return float(np.mean(np.abs(beta) ** 2))


@dataclass(frozen=True)
class ConvergenceReport:
    """Running-average convergence versus the closed form and the oracle."""

    coords: GroupCoordinates
    n_max: int
    average: float
    closed_form: float
    oracle: float
    tail_oscillation: float
    deviation_closed_form: float
    deviation_oracle: float


def compare_average_to_closed_form(coords: GroupCoordinates, n_max: int) -> ConvergenceReport:
    """Run the series, certify tail convergence, report deviations.

    The tail oscillation is the spread of the running average over the
    final decade of steps; values above 1e-2 raise NotConverged.  The
    closed form applies on the diagonal slice phi = theta; off-slice
    the deviation field simply records the mismatch.
    """
    if n_max < MIN_CONVERGENCE_STEPS:
        raise InputError(f"need at least {MIN_CONVERGENCE_STEPS} steps for a tail estimate")
    series = pumping_series(coords, n_max)
    tail = series.running_average[n_max - n_max // 10 :]
    oscillation = float(tail.max() - tail.min())
    if oscillation > TAIL_OSCILLATION_BOUND:
        raise NotConverged(
            f"running average still oscillates by {oscillation:.3e} over the last decade"
        )
    average = float(series.running_average[-1])
    closed = geometric_pumping_closed_form(coords.phi)
    oracle = orbit_average_oracle(coords)
    return ConvergenceReport(
        coords=coords,
        n_max=n_max,
        average=average,
        closed_form=closed,
        oracle=oracle,
        tail_oscillation=oscillation,
        deviation_closed_form=abs(average - closed),
        deviation_oracle=abs(average - oracle),
    )
