"""Traditional and conditional handover execution per UE.

Traditional mode: an A3 measurement report starts the network exchange;
the reconfiguration is delivered d_prep_s + d_exec_trad_s after the
report.  If the serving link drops below q_out_dBm while the exchange is
in flight the attempt fails with a radio-link failure.

CHO mode: an A4 report makes the network prepare and arm the candidate;
the later A3 trigger is evaluated locally by the UE, so only a short
d_exec_cho_s elapses before execution.  Arming takes effect from the next
measurement step, so the A4 arm always strictly precedes the A3 trigger
it enables.

Either way, success requires the target's RSRP at execution to clear
q_rach_dBm.  After an RLF the UE re-attaches to the strongest cell once
t_reattach_s has elapsed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Tuple

from .errors import UnknownUe, ValidationError
from .meas_events import MeasEvent

MODE_TRADITIONAL = "traditional"
MODE_CHO = "cho"

PHASE_CONNECTED = "Connected"
PHASE_TRAD_IN_FLIGHT = "TradHoInFlight"
PHASE_CHO_ARMED = "ChoArmed"
PHASE_EXECUTING = "Executing"
PHASE_RLF = "Rlf"

OUTCOME_SUCCESS = "Success"
OUTCOME_FAIL_RLF = "FailRlf"
OUTCOME_FAIL_RACH = "FailRach"


@dataclass(frozen=True)
class HoParams:
    mode: str = MODE_TRADITIONAL
    d_prep_s: float = 0.2
    d_exec_trad_s: float = 0.8
    d_exec_cho_s: float = 0.05
    q_out_dBm: float = -95.0
    q_rach_dBm: float = -105.0
    t_reattach_s: float = 1.0
    armed_capacity: int = 1

    def __post_init__(self):
        if self.mode not in (MODE_TRADITIONAL, MODE_CHO):
            raise ValidationError(f"unknown handover mode {self.mode!r}")
        for name in ("d_prep_s", "d_exec_trad_s", "d_exec_cho_s", "t_reattach_s"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if self.d_exec_cho_s > self.d_exec_trad_s:
            raise ValidationError("d_exec_cho_s must be <= d_exec_trad_s")
        if self.armed_capacity < 1:
            raise ValidationError("armed_capacity must be >= 1")


@dataclass(frozen=True)
class HoAttempt:
    ue_id: str
    source: str
    target: str
    mode: str
    t_trigger_s: float
    t_execute_s: float
    outcome: str


@dataclass
class Pending:
    target: str
    t_trigger_s: float
    t_due_s: float


@dataclass
class UeContext:
    ue_id: str
    serving_cell: str
    phase: str = PHASE_CONNECTED
    armed: Dict[str, float] = field(default_factory=dict)  # cell -> arm time
    pending: Optional[Pending] = None
    rlf_since: Optional[float] = None


def on_meas_event(ctx: UeContext, ev: MeasEvent, params: HoParams) -> None:
    """Feed one measurement event into the state machine (in place)."""
    if ev.ue_id != ctx.ue_id:
        raise UnknownUe(f"event for {ev.ue_id!r} fed to context {ctx.ue_id!r}")
    if ctx.phase in (PHASE_RLF, PHASE_EXECUTING, PHASE_TRAD_IN_FLIGHT):
        return
    if params.mode == MODE_TRADITIONAL:
        if ev.kind == "A3":
            ctx.pending = Pending(
                target=ev.neighbor_cell,
                t_trigger_s=ev.t_s,
                t_due_s=ev.t_s + params.d_prep_s + params.d_exec_trad_s,
            )
            ctx.phase = PHASE_TRAD_IN_FLIGHT
        return
    # CHO
    if ev.kind == "A4":
        if len(ctx.armed) >= params.armed_capacity:
            # Latest arm wins; drop the oldest entry.
            oldest = min(ctx.armed, key=lambda c: ctx.armed[c])
            del ctx.armed[oldest]
        ctx.armed[ev.neighbor_cell] = ev.t_s
        ctx.phase = PHASE_CHO_ARMED
    elif ev.kind == "A3" and ev.neighbor_cell in ctx.armed:
        ctx.pending = Pending(
            target=ev.neighbor_cell,
            t_trigger_s=ev.t_s,
            t_due_s=ev.t_s + params.d_exec_cho_s,
        )
        ctx.phase = PHASE_EXECUTING


def advance(
    ctx: UeContext,
    t_s: float,
    rsrp_lookup: Callable[[str, str], float],
    params: HoParams,
) -> Tuple[Optional[HoAttempt], Optional[str]]:
    """Advance one tick.  Returns (completed attempt, reattached cell).

    ``rsrp_lookup(ue_id, cell_id)`` returns the current held measurement.
    A successful attempt switches the serving cell and clears armed state;
    the caller resets the detector epoch and publishes the indication.
    """
    if ctx.phase in (PHASE_TRAD_IN_FLIGHT, PHASE_EXECUTING):
        pending = ctx.pending
        serving_rsrp = rsrp_lookup(ctx.ue_id, ctx.serving_cell)
        if serving_rsrp < params.q_out_dBm:
            attempt = HoAttempt(
                ctx.ue_id, ctx.serving_cell, pending.target, params.mode,
                pending.t_trigger_s, t_s, OUTCOME_FAIL_RLF,
            )
            ctx.phase = PHASE_RLF
            ctx.pending = None
            ctx.armed.clear()
            ctx.rlf_since = t_s
            return attempt, None
        if t_s >= pending.t_due_s - 1e-12:
            target_rsrp = rsrp_lookup(ctx.ue_id, pending.target)
            if target_rsrp >= params.q_rach_dBm:
                attempt = HoAttempt(
                    ctx.ue_id, ctx.serving_cell, pending.target, params.mode,
                    pending.t_trigger_s, t_s, OUTCOME_SUCCESS,
                )
                ctx.serving_cell = pending.target
                ctx.phase = PHASE_CONNECTED
            else:
                attempt = HoAttempt(
                    ctx.ue_id, ctx.serving_cell, pending.target, params.mode,
                    pending.t_trigger_s, t_s, OUTCOME_FAIL_RACH,
                )
                ctx.phase = PHASE_CONNECTED
            ctx.pending = None
            ctx.armed.clear()
            return attempt, None
        return None, None
    if ctx.phase == PHASE_RLF:
        if t_s - ctx.rlf_since >= params.t_reattach_s - 1e-12:
            ctx.phase = PHASE_CONNECTED
            ctx.rlf_since = None
            return None, "reattach"
        return None, None
    return None, None
