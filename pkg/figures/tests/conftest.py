"""Fixtures generating input CSVs through the threatsim command line.

The figure package consumes only the CSV interface, so every fixture shells
out to the simulator CLI rather than importing it.
"""

import subprocess
import sys

import pytest


def threatsim(*args: str) -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "threatsim", *args],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("csv")

    threatsim("phase", "--variant", "pdc", "--grid", "30",
              "--out", str(root / "phase_pdc.csv"))
    threatsim("restpoints", "--variant", "pdc", "--grid", "12",
              "--out", str(root / "restpoints_pdc.csv"))
    threatsim("phase", "--variant", "threat3", "--grid", "20",
              "--out", str(root / "phase_threat3.csv"))
    threatsim("restpoints", "--variant", "threat3", "--grid", "10",
              "--out", str(root / "restpoints_threat3.csv"))
    threatsim("phase", "--variant", "threat4", "--grid", "8",
              "--out", str(root / "phase_threat4.csv"))
    threatsim("abm", "--variant", "threat4", "--q", "2", "--theta", "0.01",
              "--gens", "400", "--window", "100", "--runs", "2", "--seed", "9",
              "--out", str(root / "abm.csv"))
    threatsim("sweep", "--variant", "threat4", "--theta", "0.01",
              "--q", "0:2:0.5", "--runs", "3", "--gens", "500",
              "--window", "100", "--N", "50", "--seed", "5",
              "--out", str(root / "sweep_q.csv"))
    threatsim("sweep", "--variant", "threat4", "--theta", "0.01:1.01:0.5",
              "--q", "1:3:1", "--runs", "2", "--gens", "300",
              "--window", "100", "--N", "50", "--seed", "6",
              "--out", str(root / "sweep_theta_q.csv"))
    return root
