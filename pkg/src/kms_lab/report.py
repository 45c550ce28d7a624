"""Structured run reports: per-check records, JSON with sorted keys, CSV tables."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

STATUSES = ("pass", "fail", "heuristic")


def _plain(value):
    """JSON-safe, deterministic rendering of numbers and nested containers."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    try:
        x = float(value)
    except (TypeError, ValueError):
        return str(value)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return x


@dataclass
class Record:
    name: str
    status: str
    invariant: str
    deviation: object = None
    bound: object = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @classmethod
    def check(cls, name: str, invariant: str, deviation, bound, **detail) -> "Record":
        """pass iff deviation <= bound."""
        ok = deviation is not None and float(deviation) <= float(bound)
        return cls(name, "pass" if ok else "fail", invariant, deviation, bound, detail)

    @classmethod
    def flag(cls, name: str, invariant: str, ok: bool, **detail) -> "Record":
        return cls(name, "pass" if ok else "fail", invariant, None, None, detail)

    def to_json(self) -> dict:
        return _plain({"name": self.name, "status": self.status, "invariant": self.invariant,
                       "deviation": self.deviation, "bound": self.bound, "detail": self.detail})


def config_hash(config: dict) -> str:
    text = json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class Report:
    command: str
    config: dict
    records: list[Record] = field(default_factory=list)
    timing: float = 0.0

    def add(self, record: Record) -> Record:
        self.records.append(record)
        return record

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.records)

    def to_json(self, with_timing: bool = True) -> dict:
        out = {"command": self.command, "config": _plain(self.config),
               "config_hash": config_hash(self.config),
               "records": [r.to_json() for r in sorted(self.records, key=lambda r: r.name)],
               "summary": {s: sum(r.status == s for r in self.records) for s in STATUSES}}
        if with_timing:
            out["timing"] = round(self.timing, 3)
        return out

    def dumps(self, with_timing: bool = True) -> str:
        return json.dumps(self.to_json(with_timing), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def lines(self) -> list[str]:
        return [f"{r.status.upper():9s} {r.name}" for r in sorted(self.records, key=lambda r: r.name)]


def to_csv(header, rows) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_plain(v) for v in row])
    return out.getvalue()
