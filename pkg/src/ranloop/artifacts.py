"""Writing a run's artifact bundle to disk and verifying against goldens.

All files use canonical formatting (fixed decimal places, fixed column
order), so two runs of the same (scenario, seed) produce byte-identical
directories and verification can be a plain byte comparison.
"""

from __future__ import annotations

import json
import os
from typing import List, Tuple

from .kpm import REPORT_FORMAT, REPORT_STYLE
from .sim import RunArtifacts

RSRP_TRACE = "rsrp_trace.csv"
MEAS_EVENTS = "meas_events.csv"
ATTEMPTS = "attempts.csv"
MESSAGES = "messages.jsonl"
OFFSET_TRACE = "offset_trace.csv"
KPM_REPORTS = "kpm_reports.csv"
MILESTONES = "milestones.csv"
AUDIT = "audit.jsonl"
SUMMARY = "summary.json"

ARTIFACT_FILES = (
    RSRP_TRACE,
    MEAS_EVENTS,
    ATTEMPTS,
    MESSAGES,
    OFFSET_TRACE,
    KPM_REPORTS,
    MILESTONES,
    AUDIT,
    SUMMARY,
)


def _t(value: float) -> str:
    return f"{value:.3f}"


def write_run(artifacts: RunArtifacts, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)

    def path(name):
        return os.path.join(out_dir, name)

    with open(path(RSRP_TRACE), "w") as f:
        f.write("t_s,ue_id,cell_id,rsrp_dBm\n")
        for s in artifacts.rsrp_trace:
            f.write(f"{_t(s.t_s)},{s.ue_id},{s.cell_id},{s.rsrp_dBm:.2f}\n")

    with open(path(MEAS_EVENTS), "w") as f:
        f.write("t_s,kind,ue_id,serving,neighbor\n")
        for e in artifacts.meas_event_trace:
            f.write(
                f"{_t(e.t_s)},{e.kind},{e.ue_id},{e.serving_cell},{e.neighbor_cell}\n"
            )

    with open(path(ATTEMPTS), "w") as f:
        f.write("ue_id,source,target,mode,t_trigger_s,t_execute_s,outcome\n")
        for a in artifacts.attempt_log:
            f.write(
                f"{a.ue_id},{a.source},{a.target},{a.mode},"
                f"{_t(a.t_trigger_s)},{_t(a.t_execute_s)},{a.outcome}\n"
            )

    with open(path(MESSAGES), "w") as f:
        for record in artifacts.message_log:
            f.write(json.dumps(record, sort_keys=True) + "\n")

    with open(path(OFFSET_TRACE), "w") as f:
        f.write("t_s,cell_a,cell_b,offset_dB\n")
        for t_s, cell_a, cell_b, offset in artifacts.offset_trace:
            f.write(f"{_t(t_s)},{cell_a},{cell_b},{offset:.1f}\n")

    with open(path(KPM_REPORTS), "w") as f:
        f.write("period_end_t_s,cell_id,meas_name,value,style,format\n")
        for r in artifacts.kpm_reports:
            f.write(
                f"{_t(r.period_end_t_s)},{r.cell_id},{r.meas_name},{r.value},"
                f"{REPORT_STYLE},{REPORT_FORMAT}\n"
            )

    with open(path(MILESTONES), "w") as f:
        f.write("cell_id,t_s,milestone\n")
        for cell_id in sorted(artifacts.milestone_log):
            for t_s, name in artifacts.milestone_log[cell_id]:
                f.write(f"{cell_id},{_t(t_s)},{name}\n")

    with open(path(AUDIT), "w") as f:
        for record in artifacts.audit_log:
            f.write(json.dumps(record, sort_keys=True) + "\n")

    with open(path(SUMMARY), "w") as f:
        json.dump(artifacts.summary, f, indent=2, sort_keys=True)
        f.write("\n")


def verify_dirs(golden_dir: str, candidate_dir: str) -> Tuple[bool, List[str]]:
    """Byte-compare the artifact bundles; returns (identical, diff lines)."""
    diffs: List[str] = []
    for name in ARTIFACT_FILES:
        golden_path = os.path.join(golden_dir, name)
        cand_path = os.path.join(candidate_dir, name)
        golden_exists = os.path.exists(golden_path)
        cand_exists = os.path.exists(cand_path)
        if not golden_exists or not cand_exists:
            missing = golden_path if not golden_exists else cand_path
            raise FileNotFoundError(missing)
        with open(golden_path, "rb") as f:
            golden = f.read()
        with open(cand_path, "rb") as f:
            cand = f.read()
        if golden == cand:
            continue
        golden_lines = golden.decode(errors="replace").splitlines()
        cand_lines = cand.decode(errors="replace").splitlines()
        for i, (g, c) in enumerate(zip(golden_lines, cand_lines), start=1):
            if g != c:
                diffs.append(f"{name}: line {i}: {g!r} != {c!r}")
                break
        else:
            diffs.append(
                f"{name}: line count differs "
                f"({len(golden_lines)} vs {len(cand_lines)})"
            )
    return (not diffs, diffs)
