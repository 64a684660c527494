"""Deterministic JSON Lines traces."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any


def _scalar(value: Any):
    if isinstance(value, bool) or isinstance(value, (int, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return ",".join(str(_scalar(v)) for v in items)
    if isinstance(value, float):
        raise TypeError("floats are not allowed in traces")
    return str(value)


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    stage: int
    module: str
    event: str
    payload: dict

    def to_json(self) -> str:
        record = {
            "seq": self.seq,
            "stage": self.stage,
            "module": self.module,
            "event": self.event,
            "payload": {k: _scalar(v) for k, v in self.payload.items()},
        }
        return json.dumps(record, sort_keys=True, separators=(",", ":"))


@dataclass
class Trace:
    events: list[TraceEvent] = field(default_factory=list)

    def emit(self, stage: int, module: str, event: str, **payload) -> TraceEvent:
        ev = TraceEvent(len(self.events), stage, module, event, payload)
        self.events.append(ev)
        return ev

    def to_jsonl(self) -> str:
        return "".join(ev.to_json() + "\n" for ev in self.events)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())

    def of(self, event: str) -> list[TraceEvent]:
        return [ev for ev in self.events if ev.event == event]


def read_jsonl(path: str | Path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line]
