"""Replication sweeps over one scenario axis, aggregated per row.

Replication i of every (axis value, mode) row runs with seed
base_seed + i, so any row is individually re-runnable and paired
mode comparisons share their sample streams.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from . import artifacts, scenario, sim
from .errors import RanloopError, ValidationError

SWEEP_TABLE = "success_table.csv"


@dataclass(frozen=True)
class SweepSpec:
    scenario_path: str
    axis_name: str
    axis_values: Tuple[float, ...]
    modes: Tuple[str, ...]
    replications: int
    base_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ValidationError("replications must be >= 1")
        if not self.modes:
            raise ValidationError("at least one mode required")
        if not self.axis_values:
            raise ValidationError("at least one axis value required")


@dataclass(frozen=True)
class SuccessRow:
    axis_value: float
    mode: str
    successes: int
    attempts: int
    aborted: int

    @property
    def rate_percent(self) -> float:
        return 100.0 * self.successes / self.attempts if self.attempts else 0.0


@dataclass
class SweepResult:
    rows: List[SuccessRow] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def any_aborted(self) -> bool:
        return bool(self.errors)


def run_label(axis_name: str, value: float, mode: str, rep: int) -> str:
    val = int(value) if float(value).is_integer() else value
    return f"{mode}_{axis_name}{val}_rep{rep}"


def _run_one(args) -> Tuple[str, int, int, Optional[str]]:
    text, overrides, run_dir = args
    try:
        config = scenario.load_scenario(text, overrides)
        result = sim.run(config)
        if run_dir:
            artifacts.write_run(result, run_dir)
        successes = sum(1 for a in result.attempt_log if a.outcome == "Success")
        return (run_dir, successes, len(result.attempt_log), None)
    except RanloopError as exc:
        return (run_dir, 0, 0, f"{type(exc).__name__}: {exc}")


def run_sweep(
    spec: SweepSpec,
    out_dir: Optional[str] = None,
    workers: int = 1,
    write_runs: bool = True,
) -> SweepResult:
    with open(spec.scenario_path) as f:
        text = f.read()

    tasks = []
    index = []
    for value in spec.axis_values:
        for mode in spec.modes:
            for rep in range(spec.replications):
                overrides = {
                    spec.axis_name: value,
                    "mode": mode,
                    "seed": spec.base_seed + rep,
                }
                run_dir = ""
                if out_dir and write_runs:
                    run_dir = os.path.join(
                        out_dir, "runs", run_label(spec.axis_name, value, mode, rep)
                    )
                tasks.append((text, overrides, run_dir))
                index.append((value, mode))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, tasks))
    else:
        outcomes = [_run_one(task) for task in tasks]

    result = SweepResult()
    for value in spec.axis_values:
        for mode in spec.modes:
            successes = attempts = aborted = 0
            for (v, m), (run_dir, s, a, err) in zip(index, outcomes):
                if (v, m) != (value, mode):
                    continue
                if err is not None:
                    aborted += 1
                    result.errors.append(f"{run_label(spec.axis_name, v, m, 0)}: {err}")
                else:
                    successes += s
                    attempts += a
            result.rows.append(SuccessRow(value, mode, successes, attempts, aborted))

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        write_table(result.rows, os.path.join(out_dir, SWEEP_TABLE))
    return result


def write_table(rows: Sequence[SuccessRow], path: str) -> None:
    with open(path, "w") as f:
        f.write("axis_value,mode,successes,attempts,rate_percent\n")
        for row in rows:
            val = int(row.axis_value) if float(row.axis_value).is_integer() else row.axis_value
            f.write(
                f"{val},{row.mode},{row.successes},{row.attempts},"
                f"{row.rate_percent:.1f}\n"
            )
