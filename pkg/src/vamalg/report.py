"""Structured pass/fail reports produced by validators and verifiers."""

from dataclasses import dataclass, field
from typing import Any

from .errors import ValidationError


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: Any = None

    def to_json(self):
        out = {"check": self.name, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        return out


def _jsonable(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return repr(obj)


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail="", witness=None):
        self.checks.append(Check(name, bool(passed), detail, witness))
        return bool(passed)

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail, c.witness))

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def failed(self, name):
        """True if some check whose name starts with ``name`` failed."""
        return any(c.name.startswith(name) and not c.passed for c in self.checks)

    def require(self):
        if not self.ok:
            first = self.failures[0]
            raise ValidationError(f"{self.title}: {first.name} failed {first.detail}".rstrip(), self)
        return self

    def to_json(self):
        return {"title": self.title, "ok": self.ok, "checks": [c.to_json() for c in self.checks]}

    def __str__(self):
        lines = [f"{self.title}: {'PASS' if self.ok else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}" + (f" -- {c.detail}" if c.detail else ""))
        return "\n".join(lines)
