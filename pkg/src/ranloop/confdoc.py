"""Indentation-based configuration document parser and serializer.

The format is the one used by the testbed inventory files: nested blocks
introduced by indentation, ``key: value`` pairs, and ``- item`` sequences
whose items may carry their own nested block, e.g.::

    - sierra_ue
        - plmn: "00105"
        - foxconn01:
              distance: close
              avg_rsrp_dBm: -75

Parsed documents are plain Python values: mappings become dicts, sequences
become lists of :class:`SeqItem`, leaves become str/int/float/bool.  Quoted
strings stay strings even when they look numeric ("00105").
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

from .errors import ParseError

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class SeqItem:
    """One ``- ...`` entry: a scalar tag plus an optional nested value."""

    tag: Any
    value: Any = None


def parse_scalar(text: str) -> Any:
    text = text.strip()
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        return text[1:-1]
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return []
        return [parse_scalar(part) for part in inner.split(",")]
    if text == "true":
        return True
    if text == "false":
        return False
    if _INT_RE.match(text):
        return int(text)
    if _FLOAT_RE.match(text):
        return float(text)
    return text


def _scalar_to_text(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(_scalar_to_text(v) for v in value) + "]"
    text = str(value)
    # Quote anything that would not reparse to the same string.
    if parse_scalar(text) != text or ":" in text or text != text.strip():
        return '"' + text + '"'
    return text


def _logical_lines(text: str) -> List[Tuple[int, int, str]]:
    """Yield (lineno, indent, content), skipping blanks and comments."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if "\t" in raw:
            raise ParseError("tabs are not allowed; indent with spaces", lineno)
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        out.append((lineno, indent, stripped))
    return out


class _Parser:
    def __init__(self, lines: List[Tuple[int, int, str]]):
        self.lines = lines
        self.pos = 0

    def peek(self) -> Optional[Tuple[int, int, str]]:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def parse_block(self, min_indent: int) -> Any:
        first = self.peek()
        if first is None or first[1] < min_indent:
            return {}
        indent = first[1]
        if first[2].startswith("- ") or first[2] == "-":
            return self._parse_sequence(indent)
        return self._parse_mapping(indent)

    def _child_block(self, parent_indent: int) -> Optional[Any]:
        nxt = self.peek()
        if nxt is not None and nxt[1] > parent_indent:
            return self.parse_block(nxt[1])
        return None

    def _parse_sequence(self, indent: int) -> List[SeqItem]:
        items: List[SeqItem] = []
        while True:
            line = self.peek()
            if line is None or line[1] < indent:
                break
            lineno, line_indent, content = line
            if line_indent != indent:
                raise ParseError("inconsistent indentation in sequence", lineno)
            if not (content.startswith("- ") or content == "-"):
                raise ParseError("expected '- item' at this indentation", lineno)
            self.pos += 1
            body = content[2:].strip() if content != "-" else ""
            if not body:
                raise ParseError("empty sequence item", lineno)
            if body.endswith(":") and '"' not in body:
                tag = body[:-1].strip()
                child = self._child_block(indent)
                items.append(SeqItem(tag, child if child is not None else {}))
            elif ":" in body and not body.startswith('"'):
                key, _, value = body.partition(":")
                if not value.strip():
                    raise ParseError("missing value after ':'", lineno)
                items.append(SeqItem(key.strip(), parse_scalar(value)))
            else:
                child = self._child_block(indent)
                items.append(SeqItem(parse_scalar(body), child))
        return items

    def _parse_mapping(self, indent: int) -> dict:
        mapping: dict = {}
        while True:
            line = self.peek()
            if line is None or line[1] < indent:
                break
            lineno, line_indent, content = line
            if line_indent != indent:
                raise ParseError("inconsistent indentation in mapping", lineno)
            if content.startswith("- "):
                raise ParseError("sequence item inside a mapping", lineno)
            key, sep, value = content.partition(":")
            if not sep:
                raise ParseError(f"expected 'key: value', got {content!r}", lineno)
            key = key.strip()
            if key in mapping:
                raise ParseError(f"duplicate key {key!r}", lineno)
            self.pos += 1
            if value.strip():
                mapping[key] = parse_scalar(value)
            else:
                child = self._child_block(indent)
                mapping[key] = child if child is not None else {}
        return mapping


def loads(text: str) -> Any:
    """Parse a document into nested dicts / SeqItem lists / scalars."""
    parser = _Parser(_logical_lines(text))
    result = parser.parse_block(0)
    if parser.peek() is not None:
        lineno = parser.peek()[0]
        raise ParseError("unexpected content after top-level block", lineno)
    return result


def dumps(node: Any, indent_step: int = 4) -> str:
    """Serialize a parsed document back to text (reparses to an equal value)."""
    lines: List[str] = []
    _dump(node, 0, indent_step, lines)
    return "\n".join(lines) + "\n"


def _is_block(value: Any) -> bool:
    return isinstance(value, dict) or (
        isinstance(value, list) and any(isinstance(v, SeqItem) for v in value)
    )


def _dump(node: Any, indent: int, step: int, lines: List[str]) -> None:
    pad = " " * indent
    if isinstance(node, dict):
        for key, value in node.items():
            if _is_block(value):
                lines.append(f"{pad}{key}:")
                _dump(value, indent + step, step, lines)
            else:
                lines.append(f"{pad}{key}: {_scalar_to_text(value)}")
    elif isinstance(node, list):
        for item in node:
            if not isinstance(item, SeqItem):
                lines.append(f"{pad}- {_scalar_to_text(item)}")
            elif item.value is None:
                lines.append(f"{pad}- {_scalar_to_text(item.tag)}")
            elif _is_block(item.value):
                suffix = ":" if isinstance(item.value, dict) else ""
                lines.append(f"{pad}- {_scalar_to_text(item.tag)}{suffix}")
                _dump(item.value, indent + step, step, lines)
            else:
                lines.append(
                    f"{pad}- {item.tag}: {_scalar_to_text(item.value)}"
                )
    else:
        lines.append(f"{pad}{_scalar_to_text(node)}")
