"""In-process publish/subscribe bus for E2-style messages.

Two message kinds flow over it: handover indications (gNB -> xApp, INSERT
Style 3 / Indication ID 2) and A3-offset control directives (xApp -> gNB,
POLICY Style 3 / Action ID 2).  Delivery is deterministic: messages become
visible ``delivery_delay_s`` after publish, ordered by (delivery time,
publisher sequence).  Every delivered message is mirrored to a JSON-lines
log for audit.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, asdict
from typing import Dict, List, Optional, Tuple

from .errors import BusClosed

KIND_INDICATION = "indication"
KIND_CONTROL = "control"

E2SM_RC_STYLE = 3
HO_INDICATION_ID = 2
OFFSET_CONTROL_ACTION_ID = 2


@dataclass(frozen=True)
class HandoverEvent:
    t_s: float
    ue_id: str
    source_cell: str
    target_cell: str
    outcome: str
    style: int = E2SM_RC_STYLE
    indication_id: int = HO_INDICATION_ID


@dataclass(frozen=True)
class ControlDirective:
    t_s: float
    cell_a: str
    cell_b: str
    new_offset_dB: float
    style: int = E2SM_RC_STYLE
    action_id: int = OFFSET_CONTROL_ACTION_ID

    @property
    def pair(self):
        return frozenset((self.cell_a, self.cell_b))


class Subscription:
    def __init__(self, kind: str):
        self.kind = kind
        self._queue: List = []

    def drain(self) -> List:
        msgs, self._queue = self._queue, []
        return msgs


class Bus:
    def __init__(self, delivery_delay_s: float = 0.0):
        self.delivery_delay_s = delivery_delay_s
        self._subs: List[Subscription] = []
        self._pending: List[Tuple[float, int, str, object]] = []
        self._seq = 0
        self._open = True
        self.delivered_log: List[Tuple[float, str, object]] = []

    def close(self) -> None:
        self._open = False

    def subscribe(self, kind: str) -> Subscription:
        if not self._open:
            raise BusClosed("subscribe on closed bus")
        if kind not in (KIND_INDICATION, KIND_CONTROL):
            raise ValueError(f"unknown message kind {kind!r}")
        sub = Subscription(kind)
        self._subs.append(sub)
        return sub

    def publish(self, kind: str, msg, t_s: float) -> None:
        if not self._open:
            raise BusClosed("publish on closed bus")
        if kind not in (KIND_INDICATION, KIND_CONTROL):
            raise ValueError(f"unknown message kind {kind!r}")
        heapq.heappush(
            self._pending, (t_s + self.delivery_delay_s, self._seq, kind, msg)
        )
        self._seq += 1

    def deliver_due(self, t_s: float) -> int:
        """Deliver every message due at or before t_s; returns the count."""
        n = 0
        while self._pending and self._pending[0][0] <= t_s + 1e-12:
            due, _, kind, msg = heapq.heappop(self._pending)
            for sub in self._subs:
                if sub.kind == kind:
                    sub._queue.append(msg)
            self.delivered_log.append((max(due, t_s), kind, msg))
            n += 1
        return n

    def pending_count(self) -> int:
        return len(self._pending)


def message_log_records(bus: Bus) -> List[dict]:
    """Delivered-message mirror as JSON-serializable records."""
    out = []
    for t_s, kind, msg in bus.delivered_log:
        payload = asdict(msg) if hasattr(msg, "__dataclass_fields__") else msg
        out.append({"t_s": round(t_s, 6), "kind": kind, "payload": payload})
    return out
