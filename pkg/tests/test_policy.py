"""Safety predicate, best-target-speed closed form vs a bisection oracle,
ladder decisions, and the travel-time comparisons between driving policies."""

import math
import random

import pytest

from headway import (
    InfeasiblePolicyError,
    UnsafeStateError,
    accel_distance,
    brake_distance,
    build_speed_ladder,
    ideal_control,
    is_safe,
    ladder_traversal_time,
    max_target_speed,
    policy_travel_time,
)


def bisect_target_speed(profile, speed, free_distance, tol=1e-12):
    """Oracle: bisection over the monotone accelerate+stop distance.

    Finds the largest v with accel_distance(speed, v) + stop(v) <= F,
    capped at the limit speed. Independent of the closed form.
    """

    def used(v):
        return accel_distance(profile, speed, v) + brake_distance(profile, v, 0.0)

    if used(profile.limit_speed) <= free_distance:
        return profile.limit_speed
    lo, hi = speed, profile.limit_speed
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if used(mid) <= free_distance:
            lo = mid
        else:
            hi = mid
    return lo


class TestIsSafe:
    def test_boundary_is_safe(self, table1_profile):
        assert is_safe(table1_profile, 16.0, 64.0)

    def test_standstill(self, table1_profile):
        assert is_safe(table1_profile, 0.0, 0.0)

    def test_just_below_boundary(self, table1_profile):
        assert not is_safe(table1_profile, 16.0, 63.9)

    def test_rejects_negative_distance(self, table1_profile):
        with pytest.raises(ValueError):
            is_safe(table1_profile, 4.0, -1.0)


class TestMaxTargetSpeed:
    def test_first_climb_bound(self, table1_profile):
        assert max_target_speed(table1_profile, 0.0, 8.0) == pytest.approx(4.0)

    def test_caps_at_limit(self, table1_profile):
        assert max_target_speed(table1_profile, 0.0, 316.0) == 32.0

    def test_agrees_with_bisection(self, table1_profile):
        value = max_target_speed(table1_profile, 5.0, 100.0)
        oracle = bisect_target_speed(table1_profile, 5.0, 100.0)
        assert value == pytest.approx(oracle, abs=1e-6)

    def test_unsafe_input_rejected(self, table1_profile):
        with pytest.raises(UnsafeStateError):
            max_target_speed(table1_profile, 16.0, 10.0)

    def test_result_at_least_current_speed(self, table1_profile):
        rng = random.Random(3)
        for _ in range(100):
            speed = rng.uniform(0, 32)
            floor = brake_distance(table1_profile, speed, 0.0)
            free = floor + rng.uniform(0, 300)
            assert max_target_speed(table1_profile, speed, free) >= speed - 1e-12

    def test_consumes_budget_exactly_when_uncapped(self, table1_profile):
        rng = random.Random(4)
        for _ in range(200):
            speed = rng.uniform(0, 20)
            free = brake_distance(table1_profile, speed, 0.0) + rng.uniform(0, 100)
            peak = max_target_speed(table1_profile, speed, free)
            used = accel_distance(table1_profile, speed, peak) + brake_distance(
                table1_profile, peak, 0.0
            )
            assert used <= free * (1 + 1e-12) + 1e-9
            if peak < table1_profile.limit_speed:
                assert used == pytest.approx(free, rel=1e-6, abs=1e-6)


class TestIdealControl:
    def test_climb_from_rest_at_bound(self, table1_ladder):
        decision = ideal_control(table1_ladder, 0, 8.0)
        assert decision.action == "accelerate"
        assert decision.target_level == 1

    def test_hold_between_bounds(self, table1_ladder):
        decision = ideal_control(table1_ladder, 2, 20.0)
        assert decision.action == "hold"
        assert decision.target_level == 2

    def test_brake_at_stop_distance(self, table1_ladder):
        decision = ideal_control(table1_ladder, 1, 4.0)
        assert decision.action == "brake"
        assert decision.target_level == 0

    def test_no_climb_at_top(self, table1_ladder):
        decision = ideal_control(table1_ladder, 8, 10_000.0)
        assert decision.action == "hold"

    def test_never_climbs_into_unsafe_remainder(self, table1_ladder):
        # A climb decision must leave at least the stop distance of the next
        # level after spending the climb-step distance.
        rng = random.Random(5)
        for _ in range(500):
            level = rng.randrange(0, table1_ladder.top)
            free = rng.uniform(0, 400)
            decision = ideal_control(table1_ladder, level, free)
            if decision.action == "accelerate":
                nxt = decision.target_level
                remainder = free - table1_ladder.accel_distances[nxt]
                assert remainder >= table1_ladder.brake_distances[nxt] - 1e-12


class TestPolicyTravelTime:
    def test_accelerate_brake_from_rest(self, table1_profile):
        # 0 -> 4 m/s in 2 s plus 4 -> 0 in 2 s covers exactly 8 m.
        assert policy_travel_time(table1_profile, "ab", 0.0, 8.0) == pytest.approx(4.0)

    def test_pure_braking_constant_policy(self, table1_profile):
        assert policy_travel_time(table1_profile, "cb", 4.0, 4.0) == pytest.approx(2.0)

    def test_ordering_on_example(self, table1_profile):
        t_ab = policy_travel_time(table1_profile, "ab", 4.0, 20.0)
        t_cb = policy_travel_time(table1_profile, "cb", 4.0, 20.0)
        t_ba = policy_travel_time(table1_profile, "ba", 4.0, 20.0, low_speed=2.0)
        assert t_ab < t_cb < t_ba

    def test_constant_policy_stuck_at_rest(self, table1_profile):
        with pytest.raises(InfeasiblePolicyError):
            policy_travel_time(table1_profile, "cb", 0.0, 5.0)

    def test_brake_first_needs_low_speed(self, table1_profile):
        with pytest.raises(InfeasiblePolicyError):
            policy_travel_time(table1_profile, "ba", 4.0, 20.0)
        with pytest.raises(InfeasiblePolicyError):
            policy_travel_time(table1_profile, "ba", 4.0, 20.0, low_speed=5.0)

    def test_unsafe_state_rejected(self, table1_profile):
        with pytest.raises(UnsafeStateError):
            policy_travel_time(table1_profile, "ab", 16.0, 10.0)

    def test_capped_peak_adds_cruise_segment(self, table1_profile):
        # Far beyond the capped maneuver the surplus is covered at the limit
        # speed; the total must match the hand-built three-segment time.
        free = 1000.0
        t_ab = policy_travel_time(table1_profile, "ab", 0.0, free)
        accel = 32.0 / 2.0
        brake = 32.0 / 2.0
        cruise = (free - (256.0 + 256.0)) / 32.0
        assert t_ab == pytest.approx(accel + cruise + brake)


class TestLadderTraversal:
    def test_reference_ladder_400m(self, table1_ladder):
        # Climb 0..28 m/s (the 316 m bound for the top level is out of
        # reach), cruise 8 m at 28, brake 196 m to stop: 14 + 8/28 + 14 s.
        expected = 14.0 + 8.0 / 28.0 + 14.0
        assert ladder_traversal_time(table1_ladder, 400.0) == pytest.approx(expected)

    def test_granularity_ordering(self, table1_profile):
        times = {}
        for count in (2, 4, 6, 8):
            levels = [32.0 * k / count for k in range(1, count + 1)]
            ladder = build_speed_ladder(table1_profile, levels)
            times[count] = ladder_traversal_time(ladder, 400.0)
        assert times[8] <= times[6] <= times[4] <= times[2]
        assert times[8] < times[2]

    def test_too_short_to_move(self, table1_profile):
        ladder = build_speed_ladder(table1_profile, [4])
        with pytest.raises(InfeasiblePolicyError):
            ladder_traversal_time(ladder, 7.0)


def sample_safe_instance(rng, profile):
    speed = rng.uniform(0.5, profile.limit_speed)
    floor = brake_distance(profile, speed, 0.0)
    free = floor + rng.uniform(0.1, 400.0)
    return speed, free


def test_policy_ordering_randomized(table1_profile):
    """Accelerate-first beats constant-speed beats brake-first, strictly
    whenever the distinguishing segments are nonempty."""
    rng = random.Random(11)
    for _ in range(300):
        speed, free = sample_safe_instance(rng, table1_profile)
        low = rng.uniform(0.0, speed * 0.95)
        t_ab = policy_travel_time(table1_profile, "ab", speed, free)
        t_cb = policy_travel_time(table1_profile, "cb", speed, free)
        t_ba = policy_travel_time(table1_profile, "ba", speed, free, low_speed=low)
        assert t_ab < t_cb < t_ba


def test_policy_times_coincide_at_pure_braking(table1_profile):
    speed = 10.0
    free = brake_distance(table1_profile, speed, 0.0)
    t_ab = policy_travel_time(table1_profile, "ab", speed, free)
    t_cb = policy_travel_time(table1_profile, "cb", speed, free)
    t_ba = policy_travel_time(table1_profile, "ba", speed, free, low_speed=5.0)
    assert t_ab == pytest.approx(t_cb) == pytest.approx(t_ba)
    assert t_ab == pytest.approx(speed / table1_profile.brake_rate)
