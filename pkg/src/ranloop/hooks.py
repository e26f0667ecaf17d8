"""Pre/post-action hook plane: observability, policy gates, and audit.

Five event kinds cover the campaign runner's lifecycle.  PreAction hooks
may block the guarded action (first block wins, consulted in registration
order); the other kinds only observe.  Every fire appends one audit
record with a SHA-256 digest of the canonical payload serialization, and
one line to the event log.  Policies are in-process predicates; a policy
exception converts to a block so the gate fails closed.
"""

from __future__ import annotations

import fnmatch
import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, List, Optional

from .errors import DuplicateRegistration

KIND_PROMPT_SUBMIT = "PromptSubmit"
KIND_PRE_ACTION = "PreAction"
KIND_POST_ACTION = "PostAction"
KIND_NOTIFICATION = "Notification"
KIND_STOP = "Stop"

EVENT_KINDS = (
    KIND_PROMPT_SUBMIT,
    KIND_PRE_ACTION,
    KIND_POST_ACTION,
    KIND_NOTIFICATION,
    KIND_STOP,
)

VERDICT_ALLOW = "allow"
VERDICT_BLOCK = "block"


@dataclass(frozen=True)
class HookDecision:
    verdict: str
    reason: Optional[str] = None

    def __post_init__(self):
        if self.verdict == VERDICT_BLOCK and not self.reason:
            raise ValueError("block decisions must carry a reason")

    @property
    def blocked(self) -> bool:
        return self.verdict == VERDICT_BLOCK


ALLOW = HookDecision(VERDICT_ALLOW)


@dataclass(frozen=True)
class AuditRecord:
    seq: int
    t_s: float
    kind: str
    action_name: str
    payload_digest: str
    decision: HookDecision


def payload_digest(payload) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class _Registration:
    kind: str
    matcher: str
    policy: Callable[[dict], HookDecision]


class HookRegistry:
    def __init__(self):
        self._registrations: List[_Registration] = []
        self.audit: List[AuditRecord] = []
        self._seq = 0

    def register(
        self, kind: str, matcher: str, policy: Callable[[dict], HookDecision]
    ) -> None:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown hook kind {kind!r}")
        reg = _Registration(kind, matcher, policy)
        if reg in self._registrations:
            raise DuplicateRegistration(
                f"hook ({kind}, {matcher!r}, {policy!r}) already registered"
            )
        self._registrations.append(reg)

    def fire(self, kind: str, action_name: str, payload: dict, t_s: float = 0.0) -> HookDecision:
        decision = ALLOW
        if kind == KIND_PRE_ACTION:
            for reg in self._registrations:
                if reg.kind != kind:
                    continue
                if not fnmatch.fnmatchcase(action_name, reg.matcher):
                    continue
                try:
                    verdict = reg.policy(payload)
                except Exception as exc:  # fail closed
                    verdict = HookDecision(VERDICT_BLOCK, f"policy error: {exc}")
                if verdict is not None and verdict.blocked:
                    decision = verdict
                    break
        self._seq += 1
        self.audit.append(
            AuditRecord(
                self._seq, t_s, kind, action_name, payload_digest(payload), decision
            )
        )
        return decision

    def event_log_records(self) -> List[dict]:
        out = []
        for rec in self.audit:
            line = {
                "seq": rec.seq,
                "t_s": round(rec.t_s, 6),
                "kind": rec.kind,
                "action": rec.action_name,
                "digest": rec.payload_digest,
                "verdict": rec.decision.verdict,
            }
            if rec.decision.reason:
                line["reason"] = rec.decision.reason
            out.append(line)
        return out


def offset_cap_policy(cap_dB: float = 24.0) -> Callable[[dict], HookDecision]:
    """Blocks control directives whose offset exceeds the NR value range."""

    def policy(payload: dict) -> HookDecision:
        offset = payload.get("new_offset_dB", 0.0)
        if abs(offset) > cap_dB:
            return HookDecision(
                VERDICT_BLOCK, f"offset {offset} dB exceeds +/-{cap_dB} dB cap"
            )
        return ALLOW

    return policy


def default_registry() -> HookRegistry:
    registry = HookRegistry()
    registry.register(KIND_PRE_ACTION, "apply_control", offset_cap_policy())
    return registry
