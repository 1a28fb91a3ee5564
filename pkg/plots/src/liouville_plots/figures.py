"""Static figures from the laboratory's CSV tables.

Each figure kind is bound to one CSV schema; the header must match the
expected columns exactly and every row must parse as numbers.  Rendering
is a pure function of the CSV content and the figure spec: a fixed style
sheet, a fixed SVG hash salt, and scrubbed metadata make repeated runs
byte-identical.  The occupancy histogram draws a horizontal unity
reference so deviations from flatness are read directly off the bars.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import PlotsError, SchemaMismatch  # noqa: E402

# exact header each figure kind accepts
SCHEMAS: dict[str, tuple[str, ...]] = {
    "kneading": ("t", "distance_classical", "distance_quantum"),
    "isometry": ("t", "distance_classical", "distance_quantum"),
    "ergodic_hist": (
        "bin_phi",
        "bin_theta",
        "bin_omega",
        "count",
        "haar_mass",
        "normalized_occupancy",
    ),
    "wigner_metric": ("t", "lambda1_norm", "lambda3_norm", "lambda5_norm", "metric"),
    "pumping_convergence": ("n", "p_n", "running_average", "p_G_closed_form"),
    "ergodic_flatness": ("n", "flatness_haar", "flatness_control"),
}

OUT_SUFFIXES = (".png", ".svg")

# deterministic style: fixed geometry, fixed salt for SVG element ids
STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "liouville-plots",
}


@dataclass(frozen=True)
class FigureSpec:
    """One rendering request: source table, figure kind, output path."""

    input_csv: Path
    figure_kind: str
    out_path: Path

    def __post_init__(self) -> None:
        if self.figure_kind not in SCHEMAS:
            raise PlotsError(
                f"unknown figure kind {self.figure_kind!r}; choose from {sorted(SCHEMAS)}"
            )
        if self.out_path.suffix.lower() not in OUT_SUFFIXES:
            raise PlotsError(f"output must end in one of {OUT_SUFFIXES}")


def load_table(path: Path, figure_kind: str) -> np.ndarray:
    """Read a CSV against the kind's schema and return its rows as floats.

    The header must equal the expected column tuple; every row must have
    the same width and parse numerically; an empty body is rejected.
    """
    expected = SCHEMAS[figure_kind]
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = tuple(next(reader))
            except StopIteration:
                raise SchemaMismatch(f"{path} is empty") from None
            if header != expected:
                raise SchemaMismatch(
                    f"{path} header {header} does not match {expected} "
                    f"required by kind {figure_kind!r}"
                )
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(expected):
                    raise SchemaMismatch(f"{path} line {lineno} has {len(row)} fields")
                try:
                    rows.append([float(x) for x in row])
                except ValueError as exc:
                    raise SchemaMismatch(f"{path} line {lineno}: {exc}") from None
    except OSError as exc:
        raise PlotsError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaMismatch(f"{path} has a header but no data rows")
    return np.asarray(rows)


def _draw_kneading(ax, data: np.ndarray) -> None:
    t, d_classical, d_quantum = data[:, 0], data[:, 1], data[:, 2]
    ax.plot(t, d_classical, color="tab:red", label="classical pair")
    ax.plot(t, d_quantum, color="tab:blue", linestyle="--", label="quantum pair")
    ax.set_xlabel("time")
    ax.set_ylabel("pair distance")
    ax.legend()


def _draw_isometry(ax, data: np.ndarray) -> None:
    t, d_quantum = data[:, 0], data[:, 2]
    ax.plot(t, d_quantum, color="tab:blue", label="quantum pair distance")
    ax.axhline(d_quantum[0], color="0.4", linestyle=":", label="initial value")
    top = max(2.0 * float(d_quantum.max()), 1e-3)
    ax.set_ylim(0.0, top)
    ax.set_xlabel("time")
    ax.set_ylabel("pair distance")
    ax.legend()


def _draw_ergodic_hist(ax, data: np.ndarray) -> None:
    mass = data[:, 4]
    occupancy = data[:, 5]
    achievable = mass > 0.0
    values = occupancy[achievable]
    ax.bar(
        np.arange(values.size),
        values,
        width=1.0,
        color="tab:blue",
        edgecolor="none",
        label="normalized occupancy",
    )
    ax.axhline(1.0, color="tab:red", linestyle="--", linewidth=1.5, label="unity reference")
    ax.set_xlabel("achievable bin index")
    ax.set_ylabel("normalized occupancy")
    ax.legend()


def _draw_wigner_metric(ax, data: np.ndarray) -> None:
    t = data[:, 0]
    ax.plot(t, data[:, 1], color="tab:blue", label="transport-order norm")
    ax.plot(t, data[:, 2], color="tab:orange", label="third-order norm")
    ax.plot(t, data[:, 3], color="tab:green", label="fifth-order norm")
    ax.plot(t, data[:, 4], color="black", linestyle="--", label="correction ratio")
    ax.set_xlabel("time")
    ax.set_ylabel("term norm / ratio")
    ax.legend()


def _draw_pumping_convergence(ax, data: np.ndarray) -> None:
    n, running, closed = data[:, 0], data[:, 2], data[:, 3]
    ax.semilogx(n, running, color="tab:blue", label="running average")
    ax.axhline(closed[0], color="tab:red", linestyle="--", label="closed form")
    ax.set_xlabel("step n")
    ax.set_ylabel("average transition probability")
    ax.legend()


def _draw_ergodic_flatness(ax, data: np.ndarray) -> None:
    n = data[:, 0]
    ax.loglog(n, data[:, 1], color="tab:blue", marker="o", label="measure-normalized")
    ax.loglog(n, data[:, 2], color="tab:red", marker="s", label="non-invariant control")
    ax.set_xlabel("steps n")
    ax.set_ylabel("occupancy flatness (CV)")
    ax.legend()


_DRAWERS = {
    "kneading": _draw_kneading,
    "isometry": _draw_isometry,
    "ergodic_hist": _draw_ergodic_hist,
    "wigner_metric": _draw_wigner_metric,
    "pumping_convergence": _draw_pumping_convergence,
    "ergodic_flatness": _draw_ergodic_flatness,
}


def build_figure(spec: FigureSpec):
    """Load the table and return the finished matplotlib Figure."""
    data = load_table(spec.input_csv, spec.figure_kind)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        _DRAWERS[spec.figure_kind](ax, data)
        fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Write the figure file and return its path.

    SVG dates and PNG software stamps are scrubbed so identical inputs
    produce byte-identical files.
    """
    fig = build_figure(spec)
    suffix = spec.out_path.suffix.lower()
    metadata = {"Date": None} if suffix == ".svg" else {"Software": None}
    try:
        with plt.rc_context(STYLE):
            fig.savefig(spec.out_path, metadata=metadata)
    finally:
        plt.close(fig)
    return spec.out_path
