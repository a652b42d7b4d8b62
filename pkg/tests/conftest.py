"""Shared fixtures: the two expensive sweep grids are built once per session
and reused by the unit and acceptance tests."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from annealgate import gates
from annealgate.state import drive_state

XROT_GRID = tuple(np.arange(-2.0, 2.0001, 0.25))
XROT_T = 2000.0
CNOT_GRID = tuple(np.arange(-1.0, 3.0001, 0.5))
CNOT_T = 20000.0
DT = 0.01


@pytest.fixture(scope="session")
def xrot_grid_runs():
    """(h_z -> PipelineReport) for the rotation gate from |+> at T=2000."""
    start = time.monotonic()
    with ThreadPoolExecutor(max_workers=2) as pool:
        reports = list(pool.map(
            lambda hz: gates.x_rotation(hz, XROT_T, DT, drive_state("+")), XROT_GRID))
    elapsed = time.monotonic() - start
    return {"h_z": XROT_GRID, "reports": reports, "elapsed": elapsed}


@pytest.fixture(scope="session")
def cnot_grid_runs():
    """((initial, h_z) -> PipelineReport) for the controlled-not at T=20000."""
    initials = ("++", "+-", "-+", "--")
    points = [(init, hz) for init in initials for hz in CNOT_GRID]

    def run(point):
        init, hz = point
        return point, gates.cnot(0.3, 0.5, hz, CNOT_T, DT, drive_state(init))

    start = time.monotonic()
    with ThreadPoolExecutor(max_workers=2) as pool:
        pairs = list(pool.map(run, points))
    elapsed = time.monotonic() - start
    return {"reports": dict(pairs), "initials": initials, "h_z": CNOT_GRID,
            "elapsed": elapsed}
