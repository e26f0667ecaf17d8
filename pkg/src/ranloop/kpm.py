"""RRC.ConnMean collector: Style-1 / Format-1 measurement semantics.

Counts RRC-connected UEs per cell at each sampling instant and reports
the arithmetic mean (rounded half-up to an integer) at the end of every
granularity period.  Sampling is left-closed: a transition at exactly t
is visible in the sample taken at t.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Set

from .errors import EmptyPeriod, InconsistentTransition, ValidationError

MEAS_NAME = "RRC.ConnMean"
REPORT_STYLE = 1
REPORT_FORMAT = 1


@dataclass(frozen=True)
class KpmParams:
    granularity_s: float = 10.0
    sampling_s: float = 1.0

    def __post_init__(self):
        if not self.sampling_s > 0 or not self.granularity_s > 0:
            raise ValidationError("sampling and granularity must be > 0")
        ratio = self.granularity_s / self.sampling_s
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValidationError(
                "granularity_s must be an integer multiple of sampling_s"
            )


@dataclass(frozen=True)
class KpmReport:
    period_end_t_s: float
    cell_id: str
    meas_name: str
    value: int


def round_half_up(x: float) -> int:
    """The one spot where mean-to-integer rounding is decided."""
    return int(x + 0.5)


class ConnMeanCollector:
    """Tracks the connected set per cell and aggregates per period."""

    def __init__(self, params: KpmParams):
        self.params = params
        self._connected: Dict[str, Set[str]] = {}
        self._cell_of: Dict[str, str] = {}
        self._period_samples: Dict[str, List[int]] = {}
        self._attaches = 0
        self._detaches = 0

    def record_transition(self, t_s: float, ue_id: str, kind: str, cell_id: str) -> None:
        if kind == "attach":
            if ue_id in self._cell_of:
                raise InconsistentTransition(
                    f"attach of already-attached UE {ue_id!r} at t={t_s}"
                )
            self._connected.setdefault(cell_id, set()).add(ue_id)
            self._cell_of[ue_id] = cell_id
            self._attaches += 1
        elif kind == "detach":
            if self._cell_of.get(ue_id) != cell_id:
                raise InconsistentTransition(
                    f"detach of UE {ue_id!r} not attached to {cell_id!r} at t={t_s}"
                )
            self._connected[cell_id].discard(ue_id)
            del self._cell_of[ue_id]
            self._detaches += 1
        else:
            raise ValueError(f"unknown transition kind {kind!r}")

    def move(self, t_s: float, ue_id: str, source: str, target: str) -> None:
        """Handover bookkeeping: detach from source, attach to target."""
        self.record_transition(t_s, ue_id, "detach", source)
        self.record_transition(t_s, ue_id, "attach", target)

    def sample(self, t_s: float, cell_id: str) -> int:
        count = len(self._connected.get(cell_id, ()))
        self._period_samples.setdefault(cell_id, []).append(count)
        return count

    def count(self, cell_id: str) -> int:
        return len(self._connected.get(cell_id, ()))

    def total_count(self) -> int:
        return len(self._cell_of)

    def net_transitions(self) -> int:
        return self._attaches - self._detaches

    def close_period(self, period_end_t_s: float, cell_id: str) -> KpmReport:
        samples = self._period_samples.get(cell_id)
        if not samples:
            raise EmptyPeriod(
                f"period ending {period_end_t_s} for {cell_id!r} has no samples"
            )
        mean = sum(samples) / len(samples)
        self._period_samples[cell_id] = []
        return KpmReport(period_end_t_s, cell_id, MEAS_NAME, round_half_up(mean))
