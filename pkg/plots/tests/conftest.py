"""Shared fixtures: real CSV tables produced by the laboratory CLI.

The renderer consumes the laboratory only through its documented CSV
files, so the fixtures are generated by invoking that CLI as a
subprocess once per session.
"""

import os
import subprocess
import sys

import pytest

# one laboratory run per schema family; seeds fixed so tables are stable
RUNS = (
    ["classical", "--t", "2.0", "--ensemble", "32"],
    ["wigner", "--t", "0.05", "--dt", "4e-5", "--snapshots", "5", "--grid", "128"],
    ["ergodic", "--n", "200000", "--bins", "20"],
    ["pumping", "--n", "20000", "--stride", "200"],
)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("lab_csv")
    env = {k: v for k, v in os.environ.items() if k != "LIOUVILLE_LAB_OUT"}
    for args in RUNS:
        proc = subprocess.run(
            [sys.executable, "-m", "liouville_lab.cli", *args, "--seed", "5", "--out-dir", str(out)],
            capture_output=True,
            text=True,
            env=env,
        )
        assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def kind_sources():
    """Figure kind -> fixture CSV able to feed it."""
    return {
        "kneading": "distance_series.csv",
        "isometry": "distance_series.csv",
        "ergodic_hist": "ergodic_hist.csv",
        "wigner_metric": "wigner_compressibility.csv",
        "pumping_convergence": "pumping.csv",
        "ergodic_flatness": "ergodic_flatness.csv",
    }
