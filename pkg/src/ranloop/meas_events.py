"""A3 / A4 measurement-event detection with hysteresis and time-to-trigger.

Entry conditions (cell-individual offsets fixed at zero):

    A3:  Mn > Mp + offset + hysteresis          (strict)
    A4:  Mn - hysteresis > threshold            (strict)

Each detector fires at most once per serving epoch; the entry condition
must hold continuously for >= ttt_s before the fire.  A lapse resets the
timer.  Offsets are kept per unordered cell pair in a shared table the
control loop mutates between steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .errors import MissingSample

OFFSET_CAP_DB = 24.0


def pair_key(cell_a: str, cell_b: str) -> FrozenSet[str]:
    return frozenset((cell_a, cell_b))


def a3_entry(mp_dBm: float, mn_dBm: float, offset_dB: float, hysteresis_dB: float) -> bool:
    return mn_dBm > mp_dBm + offset_dB + hysteresis_dB


def a4_entry(mn_dBm: float, threshold_dBm: float, hysteresis_dB: float) -> bool:
    return mn_dBm - hysteresis_dB > threshold_dBm


@dataclass(frozen=True)
class MeasEvent:
    kind: str  # "A3" | "A4"
    t_s: float
    ue_id: str
    serving_cell: str
    neighbor_cell: str

    def __post_init__(self):
        if self.neighbor_cell == self.serving_cell:
            raise ValueError("neighbor must differ from serving cell")


@dataclass
class _TriggerState:
    entered_since: Optional[float] = None
    fired: bool = False


class OffsetTable:
    """Per-pair A3 offsets, clamped to the NR cap; mutations are flagged."""

    def __init__(self, initial_offset_dB: float, cap_dB: float = OFFSET_CAP_DB):
        self._initial = initial_offset_dB
        self.cap_dB = cap_dB
        self._offsets: Dict[FrozenSet[str], float] = {}

    def get(self, cell_a: str, cell_b: str) -> float:
        return self._offsets.get(pair_key(cell_a, cell_b), self._initial)

    def set(self, cell_a: str, cell_b: str, offset_dB: float) -> Tuple[float, bool]:
        """Apply a new offset; returns (applied value, clamped?)."""
        clamped = offset_dB
        if clamped > self.cap_dB:
            clamped = self.cap_dB
        elif clamped < -self.cap_dB:
            clamped = -self.cap_dB
        self._offsets[pair_key(cell_a, cell_b)] = clamped
        return clamped, clamped != offset_dB

    def items(self):
        return self._offsets.items()


class EventDetector:
    """Per-UE A3/A4 trigger bookkeeping for one serving epoch at a time."""

    def __init__(
        self,
        offsets: OffsetTable,
        a3_hysteresis_dB: float,
        a3_ttt_s: float,
        a4_threshold_dBm: float,
        a4_hysteresis_dB: float = 0.0,
        a4_ttt_s: float = 0.0,
    ):
        self.offsets = offsets
        self.a3_hysteresis_dB = a3_hysteresis_dB
        self.a3_ttt_s = a3_ttt_s
        self.a4_threshold_dBm = a4_threshold_dBm
        self.a4_hysteresis_dB = a4_hysteresis_dB
        self.a4_ttt_s = a4_ttt_s
        self._serving: Dict[str, str] = {}
        self._a3: Dict[Tuple[str, str], _TriggerState] = {}
        self._a4: Dict[Tuple[str, str], _TriggerState] = {}

    def begin_epoch(self, ue_id: str, serving_cell: str) -> None:
        """Start a new serving epoch: clears fired flags and TTT timers."""
        self._serving[ue_id] = serving_cell
        for table in (self._a3, self._a4):
            for key in [k for k in table if k[0] == ue_id]:
                del table[key]

    def serving_of(self, ue_id: str) -> Optional[str]:
        return self._serving.get(ue_id)

    def step(
        self,
        t_s: float,
        samples: Dict[Tuple[str, str], float],
        a3_neighbors: Dict[str, Iterable[str]],
        a4_neighbors: Optional[Dict[str, Iterable[str]]] = None,
    ) -> List[MeasEvent]:
        """Evaluate one measurement instant.

        ``samples`` maps (ue_id, cell_id) to rsrp_dBm; ``a3_neighbors`` and
        ``a4_neighbors`` name the neighbor cells to evaluate per UE.
        """
        if a4_neighbors is None:
            a4_neighbors = a3_neighbors
        events: List[MeasEvent] = []
        for ue_id, serving in self._serving.items():
            mp = self._sample(samples, ue_id, serving, t_s)
            for neighbor in a4_neighbors.get(ue_id, ()):
                if neighbor == serving:
                    continue
                mn = self._sample(samples, ue_id, neighbor, t_s)
                entered = a4_entry(mn, self.a4_threshold_dBm, self.a4_hysteresis_dB)
                ev = self._advance(
                    self._a4, (ue_id, neighbor), entered, t_s, self.a4_ttt_s
                )
                if ev:
                    events.append(MeasEvent("A4", t_s, ue_id, serving, neighbor))
            for neighbor in a3_neighbors.get(ue_id, ()):
                if neighbor == serving:
                    continue
                mn = self._sample(samples, ue_id, neighbor, t_s)
                offset = self.offsets.get(serving, neighbor)
                entered = a3_entry(mp, mn, offset, self.a3_hysteresis_dB)
                ev = self._advance(
                    self._a3, (ue_id, neighbor), entered, t_s, self.a3_ttt_s
                )
                if ev:
                    events.append(MeasEvent("A3", t_s, ue_id, serving, neighbor))
        return events

    @staticmethod
    def _sample(samples, ue_id, cell_id, t_s) -> float:
        try:
            return samples[(ue_id, cell_id)]
        except KeyError:
            raise MissingSample(f"no sample for ({ue_id}, {cell_id}) at t={t_s}")

    @staticmethod
    def _advance(table, key, entered: bool, t_s: float, ttt_s: float) -> bool:
        state = table.get(key)
        if state is None:
            state = table[key] = _TriggerState()
        if state.fired:
            return False
        if not entered:
            state.entered_since = None
            return False
        if state.entered_since is None:
            state.entered_since = t_s
        if t_s - state.entered_since >= ttt_s - 1e-12:
            state.fired = True
            return True
        return False
