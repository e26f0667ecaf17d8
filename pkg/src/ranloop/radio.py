"""Log-distance path loss with spatially correlated log-normal shadowing.

RSRP(d) = ref_power_dBm - 10 * exponent * log10(max(d, min_distance_m)) + shadow

Shadowing per link is an AR(1) process over the measurement grid with an
exponential spatial autocorrelation: between two samples taken a distance
``delta`` apart, rho = exp(-delta / decorrelation_m).  With sigma = 0 the
output is fully deterministic and seed-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from . import mobility
from .errors import ValidationError


@dataclass(frozen=True)
class RadioParams:
    ref_power_dBm: float
    exponent: float
    shadowing_sigma_dB: float = 0.0
    min_distance_m: float = 1.0
    decorrelation_m: float = 25.0

    def __post_init__(self):
        if not self.exponent > 0:
            raise ValidationError("path-loss exponent must be > 0")
        if self.shadowing_sigma_dB < 0:
            raise ValidationError("shadowing sigma must be >= 0")
        if not self.min_distance_m > 0:
            raise ValidationError("min_distance_m must be > 0")
        if not self.decorrelation_m > 0:
            raise ValidationError("decorrelation_m must be > 0")


@dataclass(frozen=True)
class RsrpSample:
    t_s: float
    ue_id: str
    cell_id: str
    rsrp_dBm: float


def rsrp_at(
    params: RadioParams, cell_pos_m: float, ue_pos_m: float, shadow_dB: float = 0.0
) -> float:
    d = max(abs(ue_pos_m - cell_pos_m), params.min_distance_m)
    return params.ref_power_dBm - 10.0 * params.exponent * math.log10(d) + shadow_dB


class ShadowProcess:
    """Per-link correlated shadowing, stepped along the UE's path."""

    def __init__(self, params: RadioParams, rng: np.random.Generator):
        self._sigma = params.shadowing_sigma_dB
        self._decorr = params.decorrelation_m
        self._rng = rng
        self._value = None
        self._last_pos = None

    def step(self, ue_pos_m: float) -> float:
        if self._sigma == 0.0:
            return 0.0
        if self._value is None:
            self._value = self._sigma * self._rng.standard_normal()
        else:
            delta = abs(ue_pos_m - self._last_pos)
            rho = math.exp(-delta / self._decorr)
            self._value = rho * self._value + self._sigma * math.sqrt(
                1.0 - rho * rho
            ) * self._rng.standard_normal()
        self._last_pos = ue_pos_m
        return self._value


def link_rng(seed: int, ue_index: int, cell_index: int) -> np.random.Generator:
    """Deterministic per-link substream; fixed split so runs are stable
    across platforms and thread counts."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(
        entropy=seed, spawn_key=(ue_index, cell_index)
    )))


def sample_links(
    params: RadioParams,
    cells: Sequence[Tuple[str, float]],
    trajectories: Dict[str, mobility.Trajectory],
    meas_period_s: float,
    duration_s: float,
    seed: int = 0,
) -> List[RsrpSample]:
    """One sample per link per measurement period, merged in canonical
    (time, ue_id, cell_id) order."""
    n_steps = int(round(duration_s / meas_period_s)) + 1
    cells = sorted(cells)
    ue_ids = sorted(trajectories)
    shadows = {
        (ue, cell_id): ShadowProcess(params, link_rng(seed, ui, ci))
        for ui, ue in enumerate(ue_ids)
        for ci, (cell_id, _) in enumerate(cells)
    }
    out: List[RsrpSample] = []
    for k in range(n_steps):
        t = k * meas_period_s
        for ue in ue_ids:
            pos = mobility.position_at(trajectories[ue], t)
            for cell_id, cell_pos in cells:
                shadow = shadows[(ue, cell_id)].step(pos)
                out.append(RsrpSample(t, ue, cell_id, rsrp_at(params, cell_pos, pos, shadow)))
    return out
