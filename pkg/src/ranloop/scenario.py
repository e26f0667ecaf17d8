"""Scenario configuration: the experiment description the simulator runs.

Scenario files use the same indentation-based document format as the
inventory, wrapped in a single top-level ``scenario:`` block.  Unknown
keys are rejected so config typos fail loudly.  Speeds in files are
km/h and convert exactly (/ 3.6) to the m/s used internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from . import confdoc
from .confdoc import SeqItem
from .errors import ParseError, ValidationError
from .handover import HoParams
from .kpm import KpmParams
from .mobility import ShuttleLoop, Static, Trajectory, Wobble, kmh_to_mps
from .radio import RadioParams
from .xapp import XappConfig

TIERS = ("simulation", "emulation", "ota")


@dataclass(frozen=True)
class A3Params:
    initial_offset_dB: float = 5.0
    hysteresis_dB: float = 2.0
    ttt_s: float = 0.0

    def __post_init__(self):
        if self.hysteresis_dB < 0 or self.ttt_s < 0:
            raise ValidationError("a3 hysteresis and ttt must be >= 0")


@dataclass(frozen=True)
class A4Params:
    threshold_dBm: float = -75.0
    hysteresis_dB: float = 0.0
    ttt_s: float = 0.0

    def __post_init__(self):
        if self.hysteresis_dB < 0 or self.ttt_s < 0:
            raise ValidationError("a4 hysteresis and ttt must be >= 0")


@dataclass(frozen=True)
class UeConfig:
    ue_id: str
    trajectory: Trajectory
    attach_s: float = 0.0
    detach_s: Optional[float] = None


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    tier: str
    cells: Tuple[Tuple[str, float], ...]  # (id, position_m)
    radio: RadioParams
    ues: Tuple[UeConfig, ...]
    a3: A3Params
    a4: A4Params
    ho: HoParams
    kpm: KpmParams
    xapp: Optional[XappConfig]
    duration_s: float
    tick_s: float
    meas_period_s: float
    seed: int
    duration_legs: Optional[int] = None  # duration tracks trajectory speed

    def trajectories(self) -> Dict[str, Trajectory]:
        return {u.ue_id: u.trajectory for u in self.ues}


def _is_multiple(value: float, base: float, tol: float = 1e-9) -> bool:
    ratio = value / base
    return abs(ratio - round(ratio)) * base <= tol


def _take(mapping: dict, allowed: dict, what: str) -> dict:
    """Strict key check + defaults merge.  ``allowed`` maps key -> default
    (``...`` marks a required key)."""
    if not isinstance(mapping, dict):
        raise ValidationError(f"{what} must be a mapping block")
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ValidationError(f"{what}: unknown keys {sorted(unknown)}")
    out = {}
    for key, default in allowed.items():
        if key in mapping:
            out[key] = mapping[key]
        elif default is ...:
            raise ValidationError(f"{what}: missing required key {key!r}")
        else:
            out[key] = default
    return out


def _speed_mps(block: dict, what: str) -> float:
    has_kmh = "speed_kmh" in block and block["speed_kmh"] is not None
    has_mps = "speed_mps" in block and block["speed_mps"] is not None
    if has_kmh == has_mps:
        raise ValidationError(f"{what}: give exactly one of speed_kmh / speed_mps")
    return kmh_to_mps(block["speed_kmh"]) if has_kmh else float(block["speed_mps"])


def _build_trajectory(block: dict, what: str) -> Trajectory:
    kind = block.get("kind")
    if kind == "static":
        spec = _take(block, {"kind": ..., "x_m": ...}, what)
        return Static(float(spec["x_m"]))
    if kind == "wobble":
        spec = _take(
            block,
            {"kind": ..., "a_m": ..., "b_m": ..., "speed_kmh": None, "speed_mps": None},
            what,
        )
        return Wobble(float(spec["a_m"]), float(spec["b_m"]), _speed_mps(spec, what))
    if kind == "shuttle":
        spec = _take(
            block,
            {
                "kind": ...,
                "x0_m": ...,
                "x1_m": ...,
                "speed_kmh": None,
                "speed_mps": None,
                "dwell_s": 0.0,
            },
            what,
        )
        return ShuttleLoop(
            float(spec["x0_m"]), float(spec["x1_m"]),
            _speed_mps(spec, what), float(spec["dwell_s"]),
        )
    raise ValidationError(f"{what}: trajectory kind must be static/wobble/shuttle")


def load_scenario(text: str, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Parse, apply sweep overrides (speed_kmh / mode / seed), validate."""
    doc = confdoc.loads(text)
    if not isinstance(doc, dict) or set(doc) != {"scenario"}:
        raise ParseError("expected a single top-level 'scenario:' block")
    top = _take(
        doc["scenario"],
        {
            "name": ...,
            "tier": "simulation",
            "seed": 0,
            "duration_s": None,
            "duration_legs": None,
            "tick_s": 0.01,
            "meas_period_s": 0.2,
            "cells": ...,
            "radio": ...,
            "a3": {},
            "a4": {},
            "ho": {},
            "kpm": {},
            "xapp": None,
            "ues": ...,
        },
        "scenario",
    )
    overrides = dict(overrides or {})

    if top["tier"] not in TIERS:
        raise ValidationError(f"tier must be one of {TIERS}")

    cells: List[Tuple[str, float]] = []
    if not isinstance(top["cells"], list):
        raise ValidationError("cells must be a sequence of cell blocks")
    for item in top["cells"]:
        if not isinstance(item, SeqItem):
            raise ValidationError(f"bad cell entry {item!r}")
        body = _take(item.value, {"position_m": ...}, f"cell {item.tag}")
        cells.append((str(item.tag), float(body["position_m"])))
    if len({c for c, _ in cells}) != len(cells):
        raise ValidationError("duplicate cell ids")
    if len({p for _, p in cells}) != len(cells):
        raise ValidationError("cell positions must be distinct")

    radio = RadioParams(**{
        k: float(v) for k, v in _take(
            top["radio"],
            {
                "ref_power_dBm": ...,
                "exponent": ...,
                "shadowing_sigma_dB": 0.0,
                "min_distance_m": 1.0,
                "decorrelation_m": 25.0,
            },
            "radio",
        ).items()
    })

    a3 = A3Params(**{
        k: float(v)
        for k, v in _take(
            top["a3"],
            {"initial_offset_dB": 5.0, "hysteresis_dB": 2.0, "ttt_s": 0.0},
            "a3",
        ).items()
    })
    a4 = A4Params(**{
        k: float(v) for k, v in _take(
            top["a4"],
            {"threshold_dBm": -75.0, "hysteresis_dB": 0.0, "ttt_s": 0.0},
            "a4",
        ).items()
    })

    ho_spec = _take(
        top["ho"],
        {
            "mode": "traditional",
            "d_prep_s": 0.2,
            "d_exec_trad_s": 0.8,
            "d_exec_cho_s": 0.05,
            "q_out_dBm": -95.0,
            "q_rach_dBm": -105.0,
            "t_reattach_s": 1.0,
            "armed_capacity": 1,
        },
        "ho",
    )
    if "mode" in overrides:
        ho_spec["mode"] = overrides.pop("mode")
    ho = HoParams(
        mode=str(ho_spec["mode"]),
        d_prep_s=float(ho_spec["d_prep_s"]),
        d_exec_trad_s=float(ho_spec["d_exec_trad_s"]),
        d_exec_cho_s=float(ho_spec["d_exec_cho_s"]),
        q_out_dBm=float(ho_spec["q_out_dBm"]),
        q_rach_dBm=float(ho_spec["q_rach_dBm"]),
        t_reattach_s=float(ho_spec["t_reattach_s"]),
        armed_capacity=int(ho_spec["armed_capacity"]),
    )

    kpm_spec = _take(top["kpm"], {"granularity_s": 10.0, "sampling_s": 1.0}, "kpm")
    kpm = KpmParams(float(kpm_spec["granularity_s"]), float(kpm_spec["sampling_s"]))

    xapp_cfg = None
    if top["xapp"] is not None:
        xa = _take(
            top["xapp"],
            {
                "t_pp_s": 10.0,
                "step_dB": 1.0,
                "ring_capacity": 8,
                "offset_cap_dB": 24.0,
            },
            "xapp",
        )
        xapp_cfg = XappConfig(
            t_pp_s=float(xa["t_pp_s"]),
            step_dB=float(xa["step_dB"]),
            ring_capacity=int(xa["ring_capacity"]),
            offset_cap_dB=float(xa["offset_cap_dB"]),
        )

    speed_override = overrides.pop("speed_kmh", None)
    ues: List[UeConfig] = []
    if not isinstance(top["ues"], list):
        raise ValidationError("ues must be a sequence of UE blocks")
    for item in top["ues"]:
        if not isinstance(item, SeqItem):
            raise ValidationError(f"bad UE entry {item!r}")
        body = _take(
            item.value,
            {"trajectory": ..., "attach_s": 0.0, "detach_s": None},
            f"ue {item.tag}",
        )
        traj_block = dict(body["trajectory"])
        if speed_override is not None and traj_block.get("kind") != "static":
            traj_block["speed_kmh"] = speed_override
            traj_block.pop("speed_mps", None)
        traj = _build_trajectory(traj_block, f"ue {item.tag} trajectory")
        detach = body["detach_s"]
        ues.append(
            UeConfig(
                str(item.tag), traj, float(body["attach_s"]),
                None if detach is None else float(detach),
            )
        )
    if len({u.ue_id for u in ues}) != len(ues):
        raise ValidationError("duplicate UE ids")

    seed = int(overrides.pop("seed", top["seed"]))
    if seed < 0:
        raise ValidationError("seed must be a non-negative integer")
    if overrides:
        raise ValidationError(f"unknown overrides {sorted(overrides)}")

    tick = float(top["tick_s"])
    meas = float(top["meas_period_s"])
    if not tick > 0:
        raise ValidationError("tick_s must be > 0")
    if meas < tick or not _is_multiple(meas, tick):
        raise ValidationError("meas_period_s must be an integer multiple of tick_s")
    if not _is_multiple(kpm.sampling_s, tick):
        raise ValidationError("kpm sampling_s must be an integer multiple of tick_s")

    duration_legs = top["duration_legs"]
    if (top["duration_s"] is None) == (duration_legs is None):
        raise ValidationError("give exactly one of duration_s / duration_legs")
    if duration_legs is not None:
        duration_legs = int(duration_legs)
        if duration_legs < 1:
            raise ValidationError("duration_legs must be >= 1")
        legs = [
            u.trajectory for u in ues if isinstance(u.trajectory, (ShuttleLoop, Wobble))
        ]
        if not legs:
            raise ValidationError("duration_legs needs a moving trajectory")
        traj = legs[0]
        leg_s = (
            traj.leg_s + traj.dwell_s
            if isinstance(traj, ShuttleLoop)
            else traj.period_s / 2.0
        )
        # Round up to the tick grid, with slack for the last leg's delivery.
        ticks = -int(-(duration_legs * leg_s + 2.0) // tick)
        duration = ticks * tick
    else:
        duration = float(top["duration_s"])
    if not duration > 0:
        raise ValidationError("duration_s must be > 0")
    if not _is_multiple(duration, tick):
        raise ValidationError("duration_s must be a multiple of tick_s")

    min_spacing = min(
        (abs(p1 - p0) for i, (_, p0) in enumerate(cells) for (_, p1) in cells[i + 1:]),
        default=None,
    )
    if min_spacing is not None and radio.min_distance_m > min_spacing:
        raise ValidationError("min_distance_m exceeds the cell spacing")

    return ScenarioConfig(
        name=str(top["name"]),
        tier=str(top["tier"]),
        cells=tuple(sorted(cells)),
        radio=radio,
        ues=tuple(ues),
        a3=a3,
        a4=a4,
        ho=ho,
        kpm=kpm,
        xapp=xapp_cfg,
        duration_s=duration,
        tick_s=tick,
        meas_period_s=meas,
        seed=seed,
        duration_legs=duration_legs,
    )
