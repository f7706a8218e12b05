"""Make the standalone plotting script importable and provide fresh CSVs."""

import pathlib
import subprocess
import sys

import pytest

FIGURES_DIR = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(FIGURES_DIR))


def generate_sweep(out_path, *cli_args):
    """Produce a sweep CSV through the simulator's command-line interface.

    The plotting layer consumes only this CSV contract, so the fixture goes
    through the external interface rather than importing the engine.
    """
    cmd = [
        sys.executable,
        "-m",
        "hesim.cli",
        "ecp",
        "sweep",
        "--output",
        str(out_path),
        *cli_args,
    ]
    subprocess.run(cmd, check=True, capture_output=True, text=True)
    return out_path


@pytest.fixture(scope="session")
def line_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweeps") / "theta1.csv"
    return generate_sweep(path, "--axis", "theta1", "--points", "37")


@pytest.fixture(scope="session")
def grid_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("sweeps") / "grid.csv"
    return generate_sweep(
        path, "--axis", "theta1", "--axis2", "theta2",
        "--points", "13", "--alphas", "1",
    )
