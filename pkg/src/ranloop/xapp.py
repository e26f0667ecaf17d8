"""Anti-ping-pong xApp.

Subscribes to handover indications, keeps a per-UE ring buffer of recent
successful handovers, and flags a ping-pong whenever two consecutive
handovers form an A-B-A pattern within the detection window.  On each
detection it emits a control directive raising the A3 offset for the
affected pair by one step; the detected pair is consumed, so the back
handover that completed one pattern cannot also open the next one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Optional, Tuple

from .e2_bus import ControlDirective, HandoverEvent
from .errors import ValidationError
from .meas_events import OFFSET_CAP_DB


@dataclass(frozen=True)
class XappConfig:
    t_pp_s: float = 10.0
    step_dB: float = 1.0
    ring_capacity: int = 8
    offset_cap_dB: float = OFFSET_CAP_DB

    def __post_init__(self):
        if not self.t_pp_s >= 0:
            raise ValidationError("t_pp_s must be >= 0")
        if not self.step_dB > 0:
            raise ValidationError("step_dB must be > 0")
        if self.ring_capacity < 2:
            raise ValidationError("ring_capacity must be >= 2")


@dataclass(frozen=True)
class HoRecord:
    t_s: float
    source: str
    target: str


class PingPongXapp:
    def __init__(self, config: XappConfig):
        self.config = config
        self._rings: Dict[str, Deque[HoRecord]] = {}
        # Last handover still eligible to open an A-B-A pattern, per UE.
        self._open: Dict[str, Optional[HoRecord]] = {}
        self.offset_trace: List[Tuple[float, frozenset, float]] = []

    def on_indication(
        self, ev: HandoverEvent, current_offset_dB: float
    ) -> Optional[ControlDirective]:
        """Process one handover indication; maybe emit a directive.

        ``current_offset_dB`` is the live A3 offset for the event's cell
        pair.  Only successful handovers enter the ring; a failed attempt
        does not change the serving cell so it cannot complete a pattern.
        """
        if ev.outcome != "Success":
            return None
        record = HoRecord(ev.t_s, ev.source_cell, ev.target_cell)
        ring = self._rings.setdefault(
            ev.ue_id, deque(maxlen=self.config.ring_capacity)
        )
        ring.append(record)
        prev = self._open.get(ev.ue_id)
        is_pingpong = (
            prev is not None
            and prev.source == record.target
            and prev.target == record.source
            and record.t_s - prev.t_s <= self.config.t_pp_s
            and record.t_s > prev.t_s  # zero window admits nothing
        )
        if not is_pingpong:
            self._open[ev.ue_id] = record
            return None
        # Consume the pair: the back handover cannot start the next pattern.
        self._open[ev.ue_id] = None
        new_offset = min(
            current_offset_dB + self.config.step_dB, self.config.offset_cap_dB
        )
        directive = ControlDirective(
            ev.t_s, ev.source_cell, ev.target_cell, new_offset
        )
        self.offset_trace.append((ev.t_s, directive.pair, new_offset))
        return directive

    def ring_of(self, ue_id: str) -> List[HoRecord]:
        return list(self._rings.get(ue_id, ()))

    def ping_pong_count(self) -> int:
        return len(self.offset_trace)
