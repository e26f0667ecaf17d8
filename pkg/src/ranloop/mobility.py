"""Deterministic 1-D UE trajectories.

Three families: a triangle-wave wobble between two points, a shuttle loop
with optional dwell at the endpoints, and a static position.  All are pure
functions of time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import ValidationError

KMH_PER_MPS = 3.6


@dataclass(frozen=True)
class Wobble:
    a_m: float
    b_m: float
    speed_mps: float

    def __post_init__(self):
        if not self.a_m < self.b_m:
            raise ValidationError("wobble requires a_m < b_m")
        if not self.speed_mps > 0:
            raise ValidationError("wobble requires speed_mps > 0")

    @property
    def period_s(self) -> float:
        return 2.0 * (self.b_m - self.a_m) / self.speed_mps


@dataclass(frozen=True)
class ShuttleLoop:
    x0_m: float
    x1_m: float
    speed_mps: float
    dwell_s: float = 0.0

    def __post_init__(self):
        if not self.x0_m < self.x1_m:
            raise ValidationError("shuttle requires x0_m < x1_m")
        if not self.speed_mps > 0:
            raise ValidationError("shuttle requires speed_mps > 0")
        if self.dwell_s < 0:
            raise ValidationError("shuttle requires dwell_s >= 0")

    @property
    def leg_s(self) -> float:
        return (self.x1_m - self.x0_m) / self.speed_mps

    @property
    def period_s(self) -> float:
        return 2.0 * (self.leg_s + self.dwell_s)


@dataclass(frozen=True)
class Static:
    x_m: float


Trajectory = Union[Wobble, ShuttleLoop, Static]


def position_at(traj: Trajectory, t_s: float) -> float:
    """Position in metres at time t_s >= 0; continuous in t."""
    if t_s < 0:
        raise ValueError("t_s must be >= 0")
    if isinstance(traj, Static):
        return traj.x_m
    if isinstance(traj, Wobble):
        span = traj.b_m - traj.a_m
        phase = math.fmod(t_s, traj.period_s)
        d = traj.speed_mps * phase
        return traj.a_m + d if d <= span else traj.b_m - (d - span)
    if isinstance(traj, ShuttleLoop):
        phase = math.fmod(t_s, traj.period_s)
        leg = traj.leg_s
        if phase < leg:
            return traj.x0_m + traj.speed_mps * phase
        phase -= leg
        if phase < traj.dwell_s:
            return traj.x1_m
        phase -= traj.dwell_s
        if phase < leg:
            return traj.x1_m - traj.speed_mps * phase
        return traj.x0_m
    raise TypeError(f"unknown trajectory {traj!r}")


def speed_of(traj: Trajectory) -> float:
    return 0.0 if isinstance(traj, Static) else traj.speed_mps


def kmh_to_mps(speed_kmh: float) -> float:
    return speed_kmh / KMH_PER_MPS
