"""Deterministic tick loop wiring radio, mobility, detectors, handover,
bus, xApp, and KPM together.

Within a tick the processing order is fixed: pending control directives
are applied first (so directives received mid-tick take effect from the
next detector step), then mobility + radio sampling on the measurement
grid, scheduled attach/detach, detector step, event dispatch to the
handover machine, handover advance, bus delivery + xApp, and finally KPM
sampling.  Reordering-sensitive tests pin this order.

Randomness comes from one run-level seed split into fixed per-link
substreams, so results are stable across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import e2_bus, handover, hooks
from .errors import BlockedByPolicy
from .handover import HoAttempt, UeContext
from .kpm import ConnMeanCollector, KpmReport
from .meas_events import EventDetector, MeasEvent, OffsetTable
from .mobility import position_at
from .radio import RsrpSample, ShadowProcess, link_rng, rsrp_at
from .scenario import ScenarioConfig
from .xapp import PingPongXapp

MILESTONES = ("Initializing", "NgapConnected", "CellActive", "PrachReceived")


@dataclass
class RunArtifacts:
    scenario_name: str
    seed: int
    tier: str
    rsrp_trace: List[RsrpSample] = field(default_factory=list)
    meas_event_trace: List[MeasEvent] = field(default_factory=list)
    attempt_log: List[HoAttempt] = field(default_factory=list)
    message_log: List[dict] = field(default_factory=list)
    offset_trace: List[Tuple[float, str, str, float]] = field(default_factory=list)
    kpm_reports: List[KpmReport] = field(default_factory=list)
    milestone_log: Dict[str, List[Tuple[float, str]]] = field(default_factory=dict)
    audit_log: List[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def check_milestones(milestone_log: Dict[str, List[Tuple[float, str]]]) -> Tuple[str, Optional[str]]:
    """Every cell's milestone names must be a prefix of the canonical order."""
    for cell_id, entries in milestone_log.items():
        names = [name for _, name in entries]
        if names != list(MILESTONES[: len(names)]):
            return (
                "violation",
                f"cell {cell_id}: got {names}, expected a prefix of {list(MILESTONES)}",
            )
        times = [t for t, _ in entries]
        if times != sorted(times):
            return ("violation", f"cell {cell_id}: milestone times not monotone")
    return ("ok", None)


class Simulation:
    def __init__(self, config: ScenarioConfig, registry: Optional[hooks.HookRegistry] = None):
        self.config = config
        self.registry = registry if registry is not None else hooks.default_registry()
        self.cells = list(config.cells)  # sorted (id, position_m)
        self.cell_ids = [c for c, _ in self.cells]
        self.ue_ids = sorted(u.ue_id for u in config.ues)
        self.offsets = OffsetTable(config.a3.initial_offset_dB)
        self.detector = EventDetector(
            self.offsets,
            config.a3.hysteresis_dB,
            config.a3.ttt_s,
            config.a4.threshold_dBm,
            config.a4.hysteresis_dB,
            config.a4.ttt_s,
        )
        self.bus = e2_bus.Bus()
        self.xapp = PingPongXapp(config.xapp) if config.xapp else None
        self.kpm = ConnMeanCollector(config.kpm)
        self.contexts: Dict[str, UeContext] = {}
        self.held: Dict[Tuple[str, str], float] = {}
        self._shadows = {
            (ue, cell): ShadowProcess(config.radio, link_rng(config.seed, ui, ci))
            for ui, ue in enumerate(self.ue_ids)
            for ci, cell in enumerate(self.cell_ids)
        }
        self._pending_controls: List[e2_bus.ControlDirective] = []
        self._xapp_sub = self.bus.subscribe(e2_bus.KIND_INDICATION) if self.xapp else None
        self._ctrl_sub = self.bus.subscribe(e2_bus.KIND_CONTROL)
        self._prach_seen: set = set()
        self.artifacts = RunArtifacts(config.name, config.seed, config.tier)

    # -- helpers -------------------------------------------------------

    def _lookup(self, ue_id: str, cell_id: str) -> float:
        return self.held[(ue_id, cell_id)]

    def _strongest_cell(self, ue_id: str) -> str:
        return max(self.cell_ids, key=lambda c: (self.held[(ue_id, c)], c))

    def _milestone(self, cell_id: str, t_s: float, name: str) -> None:
        self.artifacts.milestone_log.setdefault(cell_id, []).append((t_s, name))
        self.registry.fire(
            hooks.KIND_NOTIFICATION, "milestone",
            {"cell_id": cell_id, "milestone": name}, t_s,
        )

    def _attach(self, ue_id: str, t_s: float) -> None:
        cell = self._strongest_cell(ue_id)
        self.contexts[ue_id] = UeContext(ue_id, cell)
        self.detector.begin_epoch(ue_id, cell)
        self.kpm.record_transition(t_s, ue_id, "attach", cell)
        if cell not in self._prach_seen:
            self._prach_seen.add(cell)
            self._milestone(cell, t_s, "PrachReceived")

    def _detach(self, ue_id: str, t_s: float) -> None:
        ctx = self.contexts.pop(ue_id)
        # A UE sitting in Rlf already left the connected set at RLF time.
        if ctx.phase != handover.PHASE_RLF:
            self.kpm.record_transition(t_s, ue_id, "detach", ctx.serving_cell)
        self.detector._serving.pop(ue_id, None)

    def _apply_control(self, directive: e2_bus.ControlDirective, t_s: float) -> None:
        payload = {
            "cell_a": directive.cell_a,
            "cell_b": directive.cell_b,
            "new_offset_dB": directive.new_offset_dB,
        }
        decision = self.registry.fire(
            hooks.KIND_PRE_ACTION, "apply_control", payload, t_s
        )
        if decision.blocked:
            raise BlockedByPolicy("apply_control", decision.reason)
        applied, _ = self.offsets.set(
            directive.cell_a, directive.cell_b, directive.new_offset_dB
        )
        a, b = sorted((directive.cell_a, directive.cell_b))
        self.artifacts.offset_trace.append((directive.t_s, a, b, applied))
        self.registry.fire(hooks.KIND_POST_ACTION, "apply_control", payload, t_s)

    # -- main loop -----------------------------------------------------

    def run(self) -> RunArtifacts:
        cfg = self.config
        tick = cfg.tick_s
        n_ticks = int(round(cfg.duration_s / tick))
        meas_stride = int(round(cfg.meas_period_s / tick))
        sample_stride = int(round(cfg.kpm.sampling_s / tick))
        gran_stride = int(round(cfg.kpm.granularity_s / cfg.kpm.sampling_s)) * sample_stride

        self.registry.fire(
            hooks.KIND_PROMPT_SUBMIT, "run_scenario",
            {"scenario": cfg.name, "seed": cfg.seed, "tier": cfg.tier}, 0.0,
        )
        # gNB bring-up milestone sequence, per cell at t=0.
        for cell_id in self.cell_ids:
            self._milestone(cell_id, 0.0, "Initializing")
            self._milestone(cell_id, 0.0, "NgapConnected")
            self._milestone(cell_id, 0.0, "CellActive")

        attach_at: Dict[int, List[str]] = {}
        detach_at: Dict[int, List[str]] = {}
        for ue in cfg.ues:
            attach_at.setdefault(int(round(ue.attach_s / tick)), []).append(ue.ue_id)
            if ue.detach_s is not None:
                detach_at.setdefault(int(round(ue.detach_s / tick)), []).append(ue.ue_id)
        trajectories = cfg.trajectories()
        cho = cfg.ho.mode == handover.MODE_CHO

        for k in range(n_ticks + 1):
            t = k * tick

            # 1) control directives queued last tick take effect now
            if self._pending_controls:
                pending, self._pending_controls = self._pending_controls, []
                for directive in pending:
                    self._apply_control(directive, t)

            # 2) mobility + radio on the measurement grid
            meas_tick = k % meas_stride == 0
            if meas_tick:
                for ue_id in self.ue_ids:
                    pos = position_at(trajectories[ue_id], t)
                    for cell_id, cell_pos in self.cells:
                        shadow = self._shadows[(ue_id, cell_id)].step(pos)
                        value = rsrp_at(cfg.radio, cell_pos, pos, shadow)
                        self.held[(ue_id, cell_id)] = value
                        self.artifacts.rsrp_trace.append(
                            RsrpSample(t, ue_id, cell_id, value)
                        )

            # 3) scheduled attach/detach
            for ue_id in detach_at.get(k, ()):
                if ue_id in self.contexts:
                    self._detach(ue_id, t)
            for ue_id in attach_at.get(k, ()):
                self._attach(ue_id, t)

            # 4) detectors + event dispatch
            if meas_tick and self.contexts:
                a3n: Dict[str, List[str]] = {}
                a4n: Dict[str, List[str]] = {}
                for ue_id, ctx in self.contexts.items():
                    others = [c for c in self.cell_ids if c != ctx.serving_cell]
                    if cho:
                        # The UE evaluates the A3 trigger only for candidates
                        # armed strictly before this step.
                        a3n[ue_id] = [c for c in others if ctx.armed.get(c, t) < t]
                        a4n[ue_id] = others
                    else:
                        a3n[ue_id] = others
                        a4n[ue_id] = []
                events = self.detector.step(t, self.held, a3n, a4n)
                for ev in events:
                    self.artifacts.meas_event_trace.append(ev)
                    handover.on_meas_event(self.contexts[ev.ue_id], ev, cfg.ho)

            # 5) handover advance
            for ue_id in self.ue_ids:
                ctx = self.contexts.get(ue_id)
                if ctx is None:
                    continue
                executing = (
                    ctx.pending is not None and t >= ctx.pending.t_due_s - 1e-12
                    and self.held[(ue_id, ctx.serving_cell)] >= cfg.ho.q_out_dBm
                )
                if executing:
                    payload = {
                        "ue_id": ue_id,
                        "source": ctx.serving_cell,
                        "target": ctx.pending.target,
                        "mode": cfg.ho.mode,
                    }
                    decision = self.registry.fire(
                        hooks.KIND_PRE_ACTION, "execute_handover", payload, t
                    )
                    if decision.blocked:
                        raise BlockedByPolicy("execute_handover", decision.reason)
                source = ctx.serving_cell
                attempt, marker = handover.advance(ctx, t, self._lookup, cfg.ho)
                if attempt is not None:
                    self.artifacts.attempt_log.append(attempt)
                    if attempt.outcome == handover.OUTCOME_SUCCESS:
                        self.kpm.move(t, ue_id, source, attempt.target)
                        self.detector.begin_epoch(ue_id, attempt.target)
                        if attempt.target not in self._prach_seen:
                            self._prach_seen.add(attempt.target)
                            self._milestone(attempt.target, t, "PrachReceived")
                    elif attempt.outcome == handover.OUTCOME_FAIL_RLF:
                        self.kpm.record_transition(t, ue_id, "detach", source)
                    self.bus.publish(
                        e2_bus.KIND_INDICATION,
                        e2_bus.HandoverEvent(
                            t, ue_id, attempt.source, attempt.target, attempt.outcome
                        ),
                        t,
                    )
                    if executing:
                        self.registry.fire(
                            hooks.KIND_POST_ACTION, "execute_handover",
                            {**payload, "outcome": attempt.outcome}, t,
                        )
                if marker == "reattach":
                    cell = self._strongest_cell(ue_id)
                    ctx.serving_cell = cell
                    self.detector.begin_epoch(ue_id, cell)
                    self.kpm.record_transition(t, ue_id, "attach", cell)
                    if cell not in self._prach_seen:
                        self._prach_seen.add(cell)
                        self._milestone(cell, t, "PrachReceived")

            # 6) bus delivery; 7) xApp; control lands next tick
            if self.bus.pending_count():
                self.bus.deliver_due(t)
                if self._xapp_sub is not None:
                    for ev in self._xapp_sub.drain():
                        current = self.offsets.get(ev.source_cell, ev.target_cell)
                        directive = self.xapp.on_indication(ev, current)
                        if directive is not None:
                            self.bus.publish(e2_bus.KIND_CONTROL, directive, t)
                    self.bus.deliver_due(t)
                self._pending_controls.extend(self._ctrl_sub.drain())

            # 8) KPM sampling and period close
            if k % sample_stride == 0:
                for cell_id in self.cell_ids:
                    self.kpm.sample(t, cell_id)
                if k > 0 and k % gran_stride == 0:
                    for cell_id in self.cell_ids:
                        self.artifacts.kpm_reports.append(
                            self.kpm.close_period(t, cell_id)
                        )

        self.registry.fire(
            hooks.KIND_STOP, "run_scenario", {"scenario": cfg.name}, n_ticks * tick
        )
        self.bus.close()
        self.artifacts.message_log = e2_bus.message_log_records(self.bus)
        self.artifacts.audit_log = self.registry.event_log_records()
        self.artifacts.summary = self._summary()
        return self.artifacts

    def _summary(self) -> dict:
        by_mode: Dict[str, Dict[str, int]] = {}
        for attempt in self.artifacts.attempt_log:
            row = by_mode.setdefault(
                attempt.mode, {"attempts": 0, "successes": 0, "failures": 0}
            )
            row["attempts"] += 1
            if attempt.outcome == handover.OUTCOME_SUCCESS:
                row["successes"] += 1
            else:
                row["failures"] += 1
        final_offsets = {
            "|".join(sorted(pair)): offset for pair, offset in self.offsets.items()
        }
        return {
            "scenario": self.config.name,
            "seed": self.config.seed,
            "by_mode": by_mode,
            "ping_pong_count": self.xapp.ping_pong_count() if self.xapp else 0,
            "final_offsets": final_offsets,
            "milestone_check": check_milestones(self.artifacts.milestone_log)[0],
        }


def run(config: ScenarioConfig, registry: Optional[hooks.HookRegistry] = None) -> RunArtifacts:
    """Simulate one scenario; pure function of (config, seed, registry)."""
    return Simulation(config, registry).run()
