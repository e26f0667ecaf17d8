"""Traditional and conditional handover state machines."""

import pytest

from ranloop import handover
from ranloop.errors import UnknownUe, ValidationError
from ranloop.handover import (
    HoParams, UeContext, advance, on_meas_event,
    MODE_CHO, MODE_TRADITIONAL,
    OUTCOME_FAIL_RACH, OUTCOME_FAIL_RLF, OUTCOME_SUCCESS,
    PHASE_CHO_ARMED, PHASE_CONNECTED, PHASE_EXECUTING, PHASE_RLF,
    PHASE_TRAD_IN_FLIGHT,
)
from ranloop.meas_events import MeasEvent

TRAD = HoParams(mode=MODE_TRADITIONAL, d_prep_s=0.2, d_exec_trad_s=0.8)
CHO = HoParams(mode=MODE_CHO, d_exec_cho_s=0.05)


def lookup(values):
    return lambda ue, cell: values[cell]


class TestParams:
    def test_cho_must_not_be_slower_than_traditional(self):
        with pytest.raises(ValidationError):
            HoParams(d_exec_cho_s=1.0, d_exec_trad_s=0.5)

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            HoParams(mode="blind")

    def test_negative_delay(self):
        with pytest.raises(ValidationError):
            HoParams(d_prep_s=-0.1)

    def test_capacity_floor(self):
        with pytest.raises(ValidationError):
            HoParams(armed_capacity=0)


class TestTraditional:
    def test_a3_schedules_prep_plus_exec(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), TRAD)
        assert ctx.phase == PHASE_TRAD_IN_FLIGHT
        assert ctx.pending.t_due_s == pytest.approx(2.0)

    def test_success_at_due_time(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), TRAD)
        strong = lookup({"a": -80.0, "b": -70.0})
        assert advance(ctx, 1.5, strong, TRAD) == (None, None)
        attempt, marker = advance(ctx, 2.0, strong, TRAD)
        assert marker is None
        assert attempt.outcome == OUTCOME_SUCCESS
        assert (attempt.t_trigger_s, attempt.t_execute_s) == (1.0, 2.0)
        assert ctx.serving_cell == "b"
        assert ctx.phase == PHASE_CONNECTED

    def test_rlf_mid_flight(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), TRAD)
        weak = lookup({"a": -95.1, "b": -70.0})
        attempt, _ = advance(ctx, 1.4, weak, TRAD)
        assert attempt.outcome == OUTCOME_FAIL_RLF
        assert attempt.t_execute_s == 1.4  # declared when the drop is seen
        assert ctx.phase == PHASE_RLF
        assert ctx.serving_cell == "a"  # no switch happened

    def test_rach_failure_leaves_serving_cell(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), TRAD)
        weak_target = lookup({"a": -80.0, "b": -110.0})
        attempt, _ = advance(ctx, 2.0, weak_target, TRAD)
        assert attempt.outcome == OUTCOME_FAIL_RACH
        assert ctx.serving_cell == "a"
        assert ctx.phase == PHASE_CONNECTED

    def test_rach_boundary_is_inclusive(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), TRAD)
        at_bar = lookup({"a": -80.0, "b": TRAD.q_rach_dBm})
        attempt, _ = advance(ctx, 2.0, at_bar, TRAD)
        assert attempt.outcome == OUTCOME_SUCCESS

    def test_events_ignored_while_in_flight(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), TRAD)
        on_meas_event(ctx, MeasEvent("A3", 1.2, "ue", "a", "c"), TRAD)
        assert ctx.pending.target == "b"

    def test_a4_is_a_no_op_in_traditional_mode(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A4", 1.0, "ue", "a", "b"), TRAD)
        assert ctx.phase == PHASE_CONNECTED
        assert not ctx.armed


class TestReattach:
    def test_reattach_after_timer(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), TRAD)
        weak = lookup({"a": -100.0, "b": -70.0})
        advance(ctx, 1.2, weak, TRAD)
        assert ctx.phase == PHASE_RLF
        assert advance(ctx, 1.9, weak, TRAD) == (None, None)
        attempt, marker = advance(ctx, 2.2, weak, TRAD)
        assert (attempt, marker) == (None, "reattach")
        assert ctx.phase == PHASE_CONNECTED

    def test_events_ignored_during_rlf(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), TRAD)
        advance(ctx, 1.2, lookup({"a": -100.0, "b": -70.0}), TRAD)
        on_meas_event(ctx, MeasEvent("A3", 1.4, "ue", "a", "b"), TRAD)
        assert ctx.pending is None


class TestCho:
    def test_a4_arms_candidate(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A4", 1.0, "ue", "a", "b"), CHO)
        assert ctx.phase == PHASE_CHO_ARMED
        assert ctx.armed == {"b": 1.0}

    def test_a3_without_arm_is_ignored(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), CHO)
        assert ctx.phase == PHASE_CONNECTED
        assert ctx.pending is None

    def test_a3_on_armed_candidate_executes_fast(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A4", 1.0, "ue", "a", "b"), CHO)
        on_meas_event(ctx, MeasEvent("A3", 2.0, "ue", "a", "b"), CHO)
        assert ctx.phase == PHASE_EXECUTING
        assert ctx.pending.t_due_s == pytest.approx(2.05)
        attempt, _ = advance(ctx, 2.05, lookup({"a": -80.0, "b": -70.0}), CHO)
        assert attempt.outcome == OUTCOME_SUCCESS
        assert attempt.mode == MODE_CHO
        assert ctx.serving_cell == "b"
        assert not ctx.armed  # cleared on completion

    def test_latest_arm_wins_at_capacity(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A4", 1.0, "ue", "a", "b"), CHO)
        on_meas_event(ctx, MeasEvent("A4", 2.0, "ue", "a", "c"), CHO)
        assert ctx.armed == {"c": 2.0}
        # The evicted candidate's A3 no longer triggers anything.
        on_meas_event(ctx, MeasEvent("A3", 3.0, "ue", "a", "b"), CHO)
        assert ctx.pending is None

    def test_capacity_two_keeps_both(self):
        params = HoParams(mode=MODE_CHO, armed_capacity=2)
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A4", 1.0, "ue", "a", "b"), params)
        on_meas_event(ctx, MeasEvent("A4", 2.0, "ue", "a", "c"), params)
        assert set(ctx.armed) == {"b", "c"}

    def test_rlf_during_execution(self):
        ctx = UeContext("ue", "a")
        on_meas_event(ctx, MeasEvent("A4", 1.0, "ue", "a", "b"), CHO)
        on_meas_event(ctx, MeasEvent("A3", 2.0, "ue", "a", "b"), CHO)
        attempt, _ = advance(ctx, 2.02, lookup({"a": -100.0, "b": -70.0}), CHO)
        assert attempt.outcome == OUTCOME_FAIL_RLF
        assert not ctx.armed


def test_event_for_wrong_ue_rejected():
    ctx = UeContext("ue", "a")
    with pytest.raises(UnknownUe):
        on_meas_event(ctx, MeasEvent("A3", 0.0, "other", "a", "b"), TRAD)


def test_speed_race_oracle():
    """The same trigger instant wins or loses purely on delivery delay.

    Serving decays 1 dB per step from -93; the q_out crossing happens 3
    steps after the trigger.  A traditional exchange due in 5 steps hits
    RLF; a conditional execution due in 1 step completes first.
    """
    decay = {t: {"a": -93.0 - (t - 1.0) / 0.2, "b": -70.0} for t in
             [round(1.0 + 0.2 * i, 10) for i in range(8)]}

    trad = HoParams(mode=MODE_TRADITIONAL, d_prep_s=0.2, d_exec_trad_s=0.8,
                    q_out_dBm=-95.0)
    ctx = UeContext("ue", "a")
    on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), trad)
    outcome = None
    for t in sorted(decay):
        attempt, _ = advance(ctx, t, lookup(decay[t]), trad)
        if attempt:
            outcome = attempt.outcome
            break
    assert outcome == OUTCOME_FAIL_RLF

    cho = HoParams(mode=MODE_CHO, d_exec_cho_s=0.2, q_out_dBm=-95.0)
    ctx = UeContext("ue", "a")
    on_meas_event(ctx, MeasEvent("A4", 0.8, "ue", "a", "b"), cho)
    on_meas_event(ctx, MeasEvent("A3", 1.0, "ue", "a", "b"), cho)
    outcome = None
    for t in sorted(decay):
        attempt, _ = advance(ctx, t, lookup(decay[t]), cho)
        if attempt:
            outcome = attempt.outcome
            break
    assert outcome == OUTCOME_SUCCESS
