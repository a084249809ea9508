"""Run reports: tables of (name, value, bound, ok) rows."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field


@dataclass
class Row:
    name: str
    value: float
    bound: float
    ok: bool

    def to_json(self) -> dict:
        return {"name": self.name, "value": _num(self.value), "bound": _num(self.bound), "ok": bool(self.ok)}


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _unnum(x):
    if x is None:
        return math.nan
    return float(x)


def digest(payload) -> str:
    """sha256 of the canonical JSON form of ``payload``."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class RunReport:
    command: str
    inputs: str = ""
    rows: list = field(default_factory=list)
    timing: float = 0.0
    notes: list = field(default_factory=list)

    def add(self, name: str, value, bound, ok) -> Row:
        row = Row(name, float(value), float(bound), bool(ok))
        self.rows.append(row)
        return row

    def extend(self, rows):
        self.rows.extend(rows)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_json(self, timing: bool = True) -> dict:
        out = {"command": self.command, "inputs": self.inputs,
               "rows": [r.to_json() for r in self.rows], "ok": self.ok, "notes": list(self.notes)}
        if timing:
            out["timing"] = self.timing
        return out

    @classmethod
    def from_json(cls, d: dict) -> "RunReport":
        rows = [Row(r["name"], _unnum(r["value"]), _unnum(r["bound"]), bool(r["ok"])) for r in d["rows"]]
        return cls(d["command"], d.get("inputs", ""), rows, float(d.get("timing", 0.0)), list(d.get("notes", [])))

    def fingerprint(self) -> str:
        """Digest of everything except the wall-clock timing."""
        return digest(self.to_json(timing=False))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "value", "bound", "ok"])
        for r in self.rows:
            w.writerow([r.name, repr(r.value), repr(r.bound), "true" if r.ok else "false"])
        return buf.getvalue()

    def render(self) -> str:
        width = max([len(r.name) for r in self.rows] + [4])
        lines = [f"# {self.command}"]
        for r in self.rows:
            mark = "ok  " if r.ok else "FAIL"
            lines.append(f"{mark} {r.name:<{width}}  value={r.value:.6g}  bound={r.bound:.6g}")
        lines.extend(f"note: {n}" for n in self.notes)
        lines.append(f"{sum(r.ok for r in self.rows)}/{len(self.rows)} ok")
        return "\n".join(lines)
