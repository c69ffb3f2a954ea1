import pytest

from headway import KinematicProfile, build_speed_ladder
from headway.reference import run_matrix, safety_matrix


@pytest.fixture(scope="session")
def table1_profile():
    """Constant 2 m/s^2 rates with a 32 m/s limit, the reference vehicle."""
    return KinematicProfile(accel_rate=2.0, brake_rate=2.0, limit_speed=32.0)


@pytest.fixture(scope="session")
def table1_ladder(table1_profile):
    """Eight evenly spaced levels up to the limit speed."""
    return build_speed_ladder(table1_profile, [4, 8, 12, 16, 20, 24, 28, 32])


# Published per-level distances for the eight-level reference ladder:
# (level speed, climb-step accelerating distance, stop distance, climb bound).
TABLE1_ROWS = [
    (4.0, 4.0, 4.0, 8.0),
    (8.0, 12.0, 16.0, 28.0),
    (12.0, 20.0, 36.0, 56.0),
    (16.0, 28.0, 64.0, 92.0),
    (20.0, 36.0, 100.0, 136.0),
    (24.0, 44.0, 144.0, 188.0),
    (28.0, 52.0, 196.0, 248.0),
    (32.0, 60.0, 256.0, 316.0),
]


@pytest.fixture(scope="session")
def safety_sweep_results():
    """The 96-run closed-loop sweep, shared by the acceptance criteria."""
    return run_matrix(safety_matrix())
