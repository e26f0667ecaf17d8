"""Ping-pong detection windows, pair consumption, and offset stepping."""

import pytest

from ranloop.e2_bus import HandoverEvent
from ranloop.errors import ValidationError
from ranloop.xapp import PingPongXapp, XappConfig


def ho(t, source, target, outcome="Success", ue="ue1"):
    return HandoverEvent(t, ue, source, target, outcome)


def make(t_pp=10.0, step=1.0, cap=24.0):
    return PingPongXapp(XappConfig(t_pp_s=t_pp, step_dB=step, offset_cap_dB=cap))


class TestWindow:
    @pytest.mark.parametrize("delta,expected", [(9.9, True), (10.0, True), (10.1, False)])
    def test_inclusive_boundary(self, delta, expected):
        xapp = make(t_pp=10.0)
        assert xapp.on_indication(ho(0.0, "a", "b"), 5.0) is None
        directive = xapp.on_indication(ho(delta, "b", "a"), 5.0)
        assert (directive is not None) == expected

    def test_zero_window_admits_nothing(self):
        xapp = make(t_pp=0.0)
        xapp.on_indication(ho(1.0, "a", "b"), 5.0)
        assert xapp.on_indication(ho(1.0, "b", "a"), 5.0) is None

    def test_same_direction_is_not_pingpong(self):
        xapp = make()
        xapp.on_indication(ho(0.0, "a", "b"), 5.0)
        assert xapp.on_indication(ho(1.0, "b", "c"), 5.0) is None


class TestConsumption:
    def test_back_handover_cannot_open_next_pattern(self):
        xapp = make()
        xapp.on_indication(ho(0.0, "a", "b"), 5.0)
        assert xapp.on_indication(ho(1.0, "b", "a"), 5.0) is not None
        # a->b immediately after: would complete b-a-b if the pair were
        # still open, but detection consumed it.
        assert xapp.on_indication(ho(2.0, "a", "b"), 6.0) is None
        # The next back handover completes a fresh a-b-a pattern.
        assert xapp.on_indication(ho(3.0, "b", "a"), 6.0) is not None

    def test_strict_alternation_yields_half_the_handovers(self):
        xapp = make()
        t = 0.0
        detections = 0
        for i in range(10):
            src, dst = ("a", "b") if i % 2 == 0 else ("b", "a")
            if xapp.on_indication(ho(t, src, dst), 5.0) is not None:
                detections += 1
            t += 1.0
        assert detections == 5
        assert xapp.ping_pong_count() == 5


class TestOffsets:
    def test_directive_steps_current_offset(self):
        xapp = make(step=1.0)
        xapp.on_indication(ho(0.0, "a", "b"), 7.0)
        directive = xapp.on_indication(ho(1.0, "b", "a"), 7.0)
        assert directive.new_offset_dB == 8.0
        assert directive.pair == frozenset(("a", "b"))

    def test_cap_clamps_step(self):
        xapp = make(step=1.0, cap=24.0)
        xapp.on_indication(ho(0.0, "a", "b"), 23.5)
        directive = xapp.on_indication(ho(1.0, "b", "a"), 23.5)
        assert directive.new_offset_dB == 24.0

    def test_offset_trace_records_detections(self):
        xapp = make()
        xapp.on_indication(ho(0.0, "a", "b"), 5.0)
        xapp.on_indication(ho(1.0, "b", "a"), 5.0)
        assert xapp.offset_trace == [(1.0, frozenset(("a", "b")), 6.0)]


class TestFiltering:
    @pytest.mark.parametrize("outcome", ["FailRlf", "FailRach"])
    def test_failures_ignored(self, outcome):
        xapp = make()
        xapp.on_indication(ho(0.0, "a", "b"), 5.0)
        assert xapp.on_indication(ho(1.0, "b", "a", outcome=outcome), 5.0) is None
        # The failed attempt also never entered the ring.
        assert [r.t_s for r in xapp.ring_of("ue1")] == [0.0]

    def test_ues_tracked_independently(self):
        xapp = make()
        xapp.on_indication(ho(0.0, "a", "b", ue="u1"), 5.0)
        assert xapp.on_indication(ho(1.0, "b", "a", ue="u2"), 5.0) is None

    def test_ring_capacity_bounds_history(self):
        xapp = PingPongXapp(XappConfig(ring_capacity=2))
        for i in range(5):
            xapp.on_indication(ho(float(2 * i), "a", "b"), 5.0)
            xapp.on_indication(ho(float(2 * i) + 30.0, "b", "a"), 5.0)
        assert len(xapp.ring_of("ue1")) == 2


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValidationError):
            XappConfig(t_pp_s=-1.0)
        with pytest.raises(ValidationError):
            XappConfig(step_dB=0.0)
        with pytest.raises(ValidationError):
            XappConfig(ring_capacity=1)
