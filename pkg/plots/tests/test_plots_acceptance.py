"""Acceptance gate for the renderer: one printed PASS/FAIL line per
criterion, measured against the laboratory's real CSV outputs."""

import numpy as np

from liouville_plots import SCHEMAS, FigureSpec, build_figure, render

SPEC_KINDS = ("kneading", "isometry", "ergodic_hist", "wigner_metric", "pumping_convergence")


def _criterion(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} [{name}] {detail}")
    assert ok, f"{name}: {detail}"


def test_all_figure_kinds_render(fixture_dir, kind_sources, tmp_path):
    failures = []
    for kind in SPEC_KINDS:
        try:
            out = render(
                FigureSpec(fixture_dir / kind_sources[kind], kind, tmp_path / f"{kind}.svg")
            )
            if not out.is_file() or out.stat().st_size == 0:
                failures.append(kind)
        except Exception as exc:  # noqa: BLE001 - the criterion is "without error"
            failures.append(f"{kind}: {exc}")
    ok = not failures
    _criterion(
        "figure-kinds-render",
        ok,
        f"all {len(SPEC_KINDS)} figure kinds rendered" if ok else f"failed: {failures}",
    )
    assert set(SPEC_KINDS) <= set(SCHEMAS)


def test_occupancy_within_three_sigma_of_unity(fixture_dir, tmp_path):
    # per-bin counting noise: sigma_b = 1 / sqrt(expected count) with
    # expected count = total samples * closure mass of the bin
    data = np.loadtxt(fixture_dir / "ergodic_hist.csv", delimiter=",", skiprows=1)
    counts, mass, occupancy = data[:, 3], data[:, 4], data[:, 5]
    achievable = mass > 0.0
    total = counts.sum()
    z = (occupancy[achievable] - 1.0) * np.sqrt(total * mass[achievable])
    worst = float(np.abs(z).max())

    fig = build_figure(
        FigureSpec(fixture_dir / "ergodic_hist.csv", "ergodic_hist", tmp_path / "h.svg")
    )
    has_unity_line = any(
        np.all(np.asarray(line.get_ydata()) == 1.0) for line in fig.axes[0].get_lines()
    )
    ok = worst < 3.0 and has_unity_line
    _criterion(
        "occupancy-three-sigma",
        ok,
        f"max |occupancy - 1| = {worst:.2f} sigma over {int(achievable.sum())} achievable bins "
        f"(tol 3), unity reference line {'present' if has_unity_line else 'missing'}",
    )
