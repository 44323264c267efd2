"""Condition results and the JSON report format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Condition:
    name: str
    passed: bool
    checked: int = 0
    witness: dict | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "status": "PASS" if self.passed else "FAIL",
                               "checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class ConditionReport:
    conditions: list[Condition] = field(default_factory=list)
    dims: dict[str, int] = field(default_factory=dict)

    def add(self, cond: Condition) -> Condition:
        self.conditions.append(cond)
        return cond

    def extend(self, other: ConditionReport):
        self.conditions.extend(other.conditions)
        self.dims.update(other.dims)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.conditions)

    def to_dict(self) -> dict:
        return {"conditions": [c.to_dict() for c in self.conditions],
                "dims": dict(sorted(self.dims.items()))}


class Report:
    """Machine-readable run report; JSON text with sorted keys round-trips exactly."""

    def __init__(self, data: dict):
        self.data = data

    @property
    def exit_code(self) -> int:
        return 0 if self.data.get("status") == "PASS" else 1

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls(json.loads(text))

    def to_human(self, elapsed: float | None = None) -> str:
        d = self.data
        lines = [f"scenario: {d.get('scenario')}  mode: {d.get('mode')}  status: {d.get('status')}"]
        for c in d.get("conditions", []):
            line = f"  [{c['status']}] {c['name']} ({c['checked']} checked)"
            if c.get("detail"):
                line += f" - {c['detail']}"
            lines.append(line)
            if c.get("witness"):
                for k, v in c["witness"].items():
                    lines.append(f"      {k}: {v}")
        if d.get("dims"):
            lines.append("  dims: " + ", ".join(f"{k}={v}" for k, v in d["dims"].items()))
        for key in ("reduced_bivector", "structure", "jordan_structure", "lie_structure"):
            if d.get(key):
                lines.append(f"  {key}:")
                val = d[key]
                if isinstance(val, dict):
                    for k, v in val.items():
                        lines.append(f"    {k}: {v}")
                else:
                    for v in val:
                        lines.append(f"    {v}")
        if elapsed is not None:
            lines.append(f"  elapsed: {elapsed:.3f}s")
        return "\n".join(lines) + "\n"
