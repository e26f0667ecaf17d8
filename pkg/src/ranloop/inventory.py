"""Inventory-as-code: declared UEs, cells, and measured link qualities.

The file format is the testbed distance matrix: one block per UE, holding
its PLMN and one sub-block per reachable cell with the link's distance
class, average RSRP, and RU attenuation.  An optional top-level ``cells:``
sequence declares cells explicitly; otherwise cells are derived from the
link blocks in declaration order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import confdoc
from .confdoc import SeqItem
from .errors import EmptyInventory, ParseError, ValidationError

# Valid NR RSRP report range (dBm).
RSRP_MIN_DBM = -156.0
RSRP_MAX_DBM = -31.0

DISTANCE_CLASSES = ("close", "far")

_PLMN_RE = re.compile(r"^\d{5,6}$")

_LINK_KEYS = {"distance", "avg_rsrp_dBm", "ru_attn_dB"}


@dataclass(frozen=True)
class UeDecl:
    id: str
    plmn: Optional[str] = None


@dataclass(frozen=True)
class CellDecl:
    id: str


@dataclass(frozen=True)
class LinkDecl:
    ue_id: str
    cell_id: str
    distance_class: str
    avg_rsrp_dBm: float
    ru_attn_dB: float


@dataclass(frozen=True)
class Inventory:
    plmn: Optional[str]
    ues: Tuple[UeDecl, ...]
    cells: Tuple[CellDecl, ...]
    links: Tuple[LinkDecl, ...]
    explicit_cells: bool = False


def _require_number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{what} must be a number, got {value!r}")
    return float(value)


def _build_link(ue_id: str, cell_id: str, body) -> LinkDecl:
    if not isinstance(body, dict):
        raise ValidationError(f"link {ue_id}/{cell_id} must be a mapping block")
    unknown = set(body) - _LINK_KEYS
    if unknown:
        raise ValidationError(
            f"link {ue_id}/{cell_id}: unknown keys {sorted(unknown)}"
        )
    missing = _LINK_KEYS - set(body)
    if missing:
        raise ValidationError(
            f"link {ue_id}/{cell_id}: missing keys {sorted(missing)}"
        )
    distance = body["distance"]
    if distance not in DISTANCE_CLASSES:
        raise ValidationError(
            f"link {ue_id}/{cell_id}: distance must be one of {DISTANCE_CLASSES}"
        )
    rsrp = _require_number(body["avg_rsrp_dBm"], "avg_rsrp_dBm")
    if not RSRP_MIN_DBM <= rsrp <= RSRP_MAX_DBM:
        raise ValidationError(
            f"link {ue_id}/{cell_id}: avg_rsrp_dBm {rsrp} outside "
            f"[{RSRP_MIN_DBM}, {RSRP_MAX_DBM}]"
        )
    attn = _require_number(body["ru_attn_dB"], "ru_attn_dB")
    if attn < 0:
        raise ValidationError(f"link {ue_id}/{cell_id}: ru_attn_dB must be >= 0")
    return LinkDecl(ue_id, cell_id, distance, rsrp, attn)


def load_inventory(text: str) -> Inventory:
    """Parse and validate an inventory document."""
    doc = confdoc.loads(text)
    if isinstance(doc, dict) and not doc:
        doc = []
    if not isinstance(doc, list):
        raise ParseError("inventory must be a top-level sequence of UE blocks")

    ues: List[UeDecl] = []
    links: List[LinkDecl] = []
    declared_cells: List[str] = []
    explicit_cells = False
    plmns = []

    for item in doc:
        if not isinstance(item, SeqItem) or not isinstance(item.tag, str):
            raise ValidationError(f"unexpected top-level entry {item!r}")
        if item.tag == "cells":
            if not isinstance(item.value, list):
                raise ValidationError("cells block must be a sequence")
            explicit_cells = True
            for cell in item.value:
                cid = cell.tag if isinstance(cell, SeqItem) else cell
                if not isinstance(cid, str):
                    raise ValidationError(f"cell id must be a string: {cid!r}")
                if cid in declared_cells:
                    raise ValidationError(f"duplicate cell declaration {cid!r}")
                declared_cells.append(cid)
            continue
        ue_id = item.tag
        if any(u.id == ue_id for u in ues):
            raise ValidationError(f"duplicate UE declaration {ue_id!r}")
        plmn = None
        entries = item.value if item.value is not None else []
        if isinstance(entries, dict):
            raise ValidationError(f"UE {ue_id}: expected '- key' entries")
        for entry in entries:
            if not isinstance(entry, SeqItem):
                raise ValidationError(f"UE {ue_id}: unexpected entry {entry!r}")
            if entry.tag == "plmn":
                plmn = str(entry.value)
                if not _PLMN_RE.match(plmn):
                    raise ValidationError(
                        f"UE {ue_id}: plmn must be 5-6 digits, got {plmn!r}"
                    )
                plmns.append(plmn)
            else:
                links.append(_build_link(ue_id, str(entry.tag), entry.value))
        ues.append(UeDecl(ue_id, plmn))

    if len(set(plmns)) > 1:
        raise ValidationError(f"conflicting PLMNs declared: {sorted(set(plmns))}")

    if not explicit_cells:
        for link in links:
            if link.cell_id not in declared_cells:
                declared_cells.append(link.cell_id)

    ue_ids = {u.id for u in ues}
    seen_pairs = set()
    for link in links:
        if link.ue_id not in ue_ids:
            raise ValidationError(f"link references undeclared UE {link.ue_id!r}")
        if link.cell_id not in declared_cells:
            raise ValidationError(
                f"link references undeclared cell {link.cell_id!r}"
            )
        pair = (link.ue_id, link.cell_id)
        if pair in seen_pairs:
            raise ValidationError(f"duplicate link {pair}")
        seen_pairs.add(pair)

    return Inventory(
        plmn=plmns[0] if plmns else None,
        ues=tuple(ues),
        cells=tuple(CellDecl(c) for c in declared_cells),
        links=tuple(links),
        explicit_cells=explicit_cells,
    )


def serialize(inv: Inventory) -> str:
    """Render an Inventory back to document text (round-trips by value)."""
    doc: List[SeqItem] = []
    if inv.explicit_cells:
        doc.append(SeqItem("cells", [SeqItem(c.id) for c in inv.cells]))
    for ue in inv.ues:
        entries: List[SeqItem] = []
        if ue.plmn is not None:
            entries.append(SeqItem("plmn", ue.plmn))
        for link in inv.links:
            if link.ue_id != ue.id:
                continue
            entries.append(
                SeqItem(
                    link.cell_id,
                    {
                        "distance": link.distance_class,
                        "avg_rsrp_dBm": _num(link.avg_rsrp_dBm),
                        "ru_attn_dB": _num(link.ru_attn_dB),
                    },
                )
            )
        doc.append(SeqItem(ue.id, entries if entries else None))
    return confdoc.dumps(doc)


def _num(x: float):
    # Ints render without a trailing .0 so round-trips stay tidy.
    return int(x) if float(x).is_integer() else float(x)


def select_pair(inv: Inventory, policy: str = "strongest") -> Tuple[str, str]:
    """Pick the (ue_id, cell_id) link with extreme average RSRP.

    Ties break toward the lexicographically smaller (ue_id, cell_id).
    """
    if policy not in ("strongest", "weakest"):
        raise ValueError(f"unknown policy {policy!r}")
    if not inv.links:
        raise EmptyInventory("inventory declares no links")
    sign = -1.0 if policy == "strongest" else 1.0
    best = min(inv.links, key=lambda l: (sign * l.avg_rsrp_dBm, l.ue_id, l.cell_id))
    return (best.ue_id, best.cell_id)
