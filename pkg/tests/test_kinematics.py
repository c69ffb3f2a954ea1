"""Distance/time closed forms against independent integration oracles, and
the ladder table against its published values."""

import math
import random

import pytest
from hypothesis import given, strategies as st

from headway import (
    DomainError,
    KinematicProfile,
    LadderError,
    accel_distance,
    accel_time,
    brake_distance,
    brake_time,
    build_speed_ladder,
)
from tests.conftest import TABLE1_ROWS


def integrate_speed_change(start_speed, end_speed, rate, steps=200_000):
    """Oracle: midpoint-rule integration of the linear speed profile from
    ``start_speed`` to ``end_speed`` at constant signed ``rate``.

    Returns (distance, time). Independent of the closed forms under test.
    """
    duration = (end_speed - start_speed) / rate
    dt = duration / steps
    distance = 0.0
    for k in range(steps):
        mid_t = (k + 0.5) * dt
        distance += (start_speed + rate * mid_t) * dt
    return distance, duration


class TestBrakeDistance:
    def test_published_stop_distance(self, table1_profile):
        assert brake_distance(table1_profile, 4.0, 0.0) == 4.0

    def test_zero_change(self, table1_profile):
        assert brake_distance(table1_profile, 20.0, 20.0) == 0.0

    def test_partial_braking_matches_integration(self, table1_profile):
        oracle, _ = integrate_speed_change(8.0, 4.0, -2.0)
        value = brake_distance(table1_profile, 8.0, 4.0)
        assert value == pytest.approx(oracle, rel=1e-9)
        assert value == pytest.approx(12.0, abs=1e-9)
        # Additivity cross-check: B(8,4) = B(8,0) - B(4,0) = 16 - 4.
        assert value == pytest.approx(
            brake_distance(table1_profile, 8.0, 0.0) - brake_distance(table1_profile, 4.0, 0.0)
        )

    def test_domain_errors(self, table1_profile):
        with pytest.raises(DomainError):
            brake_distance(table1_profile, 4.0, 5.0)
        with pytest.raises(DomainError):
            brake_distance(table1_profile, 4.0, -0.1)
        with pytest.raises(DomainError):
            brake_distance(table1_profile, 33.0, 0.0)


class TestAccelDistance:
    def test_published_first_step(self, table1_profile):
        assert accel_distance(table1_profile, 0.0, 4.0) == 4.0

    def test_published_second_step(self, table1_profile):
        assert accel_distance(table1_profile, 4.0, 8.0) == 12.0

    def test_zero_change(self, table1_profile):
        assert accel_distance(table1_profile, 10.0, 10.0) == 0.0

    def test_matches_integration(self, table1_profile):
        oracle, _ = integrate_speed_change(4.0, 8.0, 2.0)
        assert accel_distance(table1_profile, 4.0, 8.0) == pytest.approx(oracle, rel=1e-9)

    def test_domain_errors(self, table1_profile):
        with pytest.raises(DomainError):
            accel_distance(table1_profile, 5.0, 4.0)
        with pytest.raises(DomainError):
            accel_distance(table1_profile, 0.0, 33.0)


class TestTimes:
    def test_brake_time(self, table1_profile):
        _, duration = integrate_speed_change(4.0, 0.0, -2.0)
        assert brake_time(table1_profile, 4.0, 0.0) == pytest.approx(duration)
        assert brake_time(table1_profile, 4.0, 0.0) == 2.0

    def test_accel_time(self, table1_profile):
        _, duration = integrate_speed_change(0.0, 4.0, 2.0)
        assert accel_time(table1_profile, 0.0, 4.0) == pytest.approx(duration)

    def test_zero(self, table1_profile):
        assert brake_time(table1_profile, 7.0, 7.0) == 0.0
        assert accel_time(table1_profile, 7.0, 7.0) == 0.0

    def test_domain_errors(self, table1_profile):
        with pytest.raises(DomainError):
            brake_time(table1_profile, 3.0, 4.0)
        with pytest.raises(DomainError):
            accel_time(table1_profile, 4.0, 3.0)


class TestProfileValidation:
    @pytest.mark.parametrize("bad", [(0.0, 2.0, 32.0), (2.0, -1.0, 32.0), (2.0, 2.0, 0.0)])
    def test_rejects_nonpositive(self, bad):
        with pytest.raises(DomainError):
            KinematicProfile(*bad)


class TestSpeedLadder:
    def test_full_published_table(self, table1_ladder):
        assert table1_ladder.levels[0] == 0.0
        for i, (speed, step_accel, stop, climb) in enumerate(TABLE1_ROWS, start=1):
            assert table1_ladder.levels[i] == speed
            assert table1_ladder.accel_distances[i] == step_accel
            assert table1_ladder.brake_distances[i] == stop
            assert table1_ladder.climb_distances[i] == climb

    def test_single_level(self, table1_profile):
        ladder = build_speed_ladder(table1_profile, [4])
        assert ladder.brake_distances[1] == 4.0
        assert ladder.climb_distances[1] == 8.0

    def test_rejects_non_monotone(self, table1_profile):
        with pytest.raises(LadderError):
            build_speed_ladder(table1_profile, [8, 4])

    def test_rejects_above_limit(self, table1_profile):
        with pytest.raises(LadderError):
            build_speed_ladder(table1_profile, [4, 40])

    def test_rejects_empty(self, table1_profile):
        with pytest.raises(LadderError):
            build_speed_ladder(table1_profile, [])

    def test_guard_band_validity(self, table1_ladder):
        # Climb bound of the next level always clears the stop distance of
        # the current one, otherwise the decision bands would overlap.
        for i in range(table1_ladder.top):
            assert table1_ladder.climb_distances[i + 1] > table1_ladder.brake_distances[i]

    def test_brake_distances_strictly_increase(self, table1_ladder):
        pairs = zip(table1_ladder.brake_distances, table1_ladder.brake_distances[1:])
        assert all(b > a for a, b in pairs)


# Randomized profiles keep rates and speeds in a physically plausible range.
profiles = st.builds(
    KinematicProfile,
    accel_rate=st.floats(0.1, 10.0),
    brake_rate=st.floats(0.1, 10.0),
    limit_speed=st.just(50.0),
)


@given(profiles, st.floats(0, 50), st.floats(0, 50), st.floats(0, 50))
def test_brake_additivity(profile, a, b, c):
    high, mid, low = sorted((a, b, c), reverse=True)
    split = brake_distance(profile, high, mid) + brake_distance(profile, mid, low)
    direct = brake_distance(profile, high, low)
    assert split == pytest.approx(direct, rel=1e-9, abs=1e-9)


@given(profiles, st.floats(0, 50), st.floats(0, 50), st.floats(0, 50))
def test_accel_additivity(profile, a, b, c):
    low, mid, high = sorted((a, b, c))
    split = accel_distance(profile, low, mid) + accel_distance(profile, mid, high)
    direct = accel_distance(profile, low, high)
    assert split == pytest.approx(direct, rel=1e-9, abs=1e-9)


@given(profiles, st.floats(0, 49), st.floats(0.01, 50), st.floats(0.01, 50))
def test_strict_monotonicity(profile, base, delta1, delta2):
    v1 = base + delta1
    v2 = v1 + delta2
    if v2 > profile.limit_speed:
        v2 = profile.limit_speed
        v1 = min(v1, v2 - 1e-6)
        if v1 <= base:
            return
    # Farther to brake to a lower target, and from a higher initial speed.
    assert brake_distance(profile, v2, base) > brake_distance(profile, v2, v1)
    assert brake_distance(profile, v2, base) > brake_distance(profile, v1, base)
    # Farther to accelerate to a higher target, and from a lower initial speed.
    assert accel_distance(profile, base, v1) < accel_distance(profile, base, v2)
    assert accel_distance(profile, base, v2) > accel_distance(profile, v1, v2)


def test_telescoping_along_ladder(table1_ladder):
    profile = table1_ladder.profile
    levels = table1_ladder.levels
    rng = random.Random(7)
    for _ in range(200):
        i = rng.randrange(1, len(levels))
        j = rng.randrange(0, i)
        total = brake_distance(profile, levels[i], levels[j])
        stepped = sum(
            brake_distance(profile, levels[k], levels[k - 1]) for k in range(i, j, -1)
        )
        assert math.isclose(total, stepped, rel_tol=1e-9, abs_tol=1e-12)
