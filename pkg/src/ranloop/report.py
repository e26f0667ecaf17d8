"""Render figures from an artifact directory, next to the CSVs.

Figures are derived strictly from the delimited output, so a report can
be regenerated from any archived run or sweep directory.
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import artifacts as af
from .sweep import SWEEP_TABLE


def _read_csv(path: str) -> List[dict]:
    with open(path) as f:
        return list(csv.DictReader(f))


def render_run(run_dir: str, out_dir: str) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    rsrp_rows = _read_csv(os.path.join(run_dir, af.RSRP_TRACE))
    if rsrp_rows:
        fig, ax = plt.subplots(figsize=(8, 4))
        by_link: Dict[str, List] = defaultdict(list)
        for row in rsrp_rows:
            by_link[f"{row['ue_id']} / {row['cell_id']}"].append(
                (float(row["t_s"]), float(row["rsrp_dBm"]))
            )
        for label, points in sorted(by_link.items()):
            ax.plot([p[0] for p in points], [p[1] for p in points], label=label, lw=1)
        for row in _read_csv(os.path.join(run_dir, af.MEAS_EVENTS)):
            color = "tab:green" if row["kind"] == "A4" else "tab:orange"
            ax.axvline(float(row["t_s"]), color=color, alpha=0.3, lw=0.8)
        for row in _read_csv(os.path.join(run_dir, af.ATTEMPTS)):
            color = "tab:blue" if row["outcome"] == "Success" else "tab:red"
            ax.axvline(float(row["t_s_exec"] if "t_s_exec" in row else row["t_execute_s"]),
                       color=color, alpha=0.6, lw=1.0, ls="--")
        ax.set_xlabel("time (s)")
        ax.set_ylabel("RSRP (dBm)")
        ax.legend(fontsize=7)
        fig.tight_layout()
        path = os.path.join(out_dir, "rsrp_timeline.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    offset_rows = _read_csv(os.path.join(run_dir, af.OFFSET_TRACE))
    if offset_rows:
        fig, ax = plt.subplots(figsize=(6, 3))
        times = [float(r["t_s"]) for r in offset_rows]
        values = [float(r["offset_dB"]) for r in offset_rows]
        ax.step([0.0] + times, [values[0] - 1.0] + values, where="post")
        ax.set_xlabel("time (s)")
        ax.set_ylabel("A3 offset (dB)")
        ax.grid(alpha=0.3)
        fig.tight_layout()
        path = os.path.join(out_dir, "offset_walk.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    kpm_rows = _read_csv(os.path.join(run_dir, af.KPM_REPORTS))
    if kpm_rows:
        fig, ax = plt.subplots(figsize=(6, 3))
        by_cell: Dict[str, List] = defaultdict(list)
        for row in kpm_rows:
            by_cell[row["cell_id"]].append(
                (float(row["period_end_t_s"]), int(row["value"]))
            )
        for cell, points in sorted(by_cell.items()):
            ax.step([p[0] for p in points], [p[1] for p in points],
                    where="post", label=cell)
        ax.set_xlabel("period end (s)")
        ax.set_ylabel("RRC.ConnMean")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        fig.tight_layout()
        path = os.path.join(out_dir, "kpm_connmean.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    return written


def render_sweep(sweep_dir: str, out_dir: str) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    rows = _read_csv(os.path.join(sweep_dir, SWEEP_TABLE))
    if not rows:
        return []
    modes = sorted({r["mode"] for r in rows})
    values = sorted({float(r["axis_value"]) for r in rows})
    fig, ax = plt.subplots(figsize=(6, 3.5))
    width = 0.8 / len(modes)
    for mi, mode in enumerate(modes):
        rates = []
        for value in values:
            match = [
                r for r in rows
                if r["mode"] == mode and float(r["axis_value"]) == value
            ]
            rates.append(float(match[0]["rate_percent"]) if match else 0.0)
        positions = [i + (mi - (len(modes) - 1) / 2.0) * width for i in range(len(values))]
        ax.bar(positions, rates, width=width, label=mode)
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels([str(int(v)) if v.is_integer() else str(v) for v in values])
    ax.set_xlabel("axis value")
    ax.set_ylabel("success rate (%)")
    ax.set_ylim(0, 105)
    ax.legend()
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    path = os.path.join(out_dir, "success_rate.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]
