"""Structured audit verdicts.

An AuditEntry records one checked inequality or identity: the two sides,
the margin (rhs side of slack, positive means pass with room) and a verdict
in {"pass", "fail", "hypothesis-failed", "unverified"}.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .exactlog import ExactLog

PASS = "pass"
FAIL = "fail"
HYPOTHESIS_FAILED = "hypothesis-failed"
UNVERIFIED = "unverified"


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, ExactLog):
        return float(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) or isinstance(x, int) or x is None:
        return x
    return str(x)


class AuditEntry:
    __slots__ = ("id", "lhs", "rhs", "margin", "verdict", "detail")

    def __init__(self, id, lhs, rhs, margin, verdict, detail=None):
        self.id = id
        self.lhs = lhs
        self.rhs = rhs
        self.margin = margin
        self.verdict = verdict
        self.detail = detail

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "margin": _jsonable(self.margin),
            "verdict": self.verdict,
        }
        if self.detail is not None:
            d["detail"] = _jsonable(self.detail)
        return d

    def __repr__(self):
        return f"AuditEntry({self.id}: {self.verdict}, margin={self.margin})"


class AuditReport:
    """Ordered collection of audit entries."""

    def __init__(self, entries=()):
        self.entries = list(entries)

    def add(self, entry: AuditEntry) -> None:
        self.entries.append(entry)

    def extend(self, other: "AuditReport") -> None:
        self.entries.extend(other.entries)

    @property
    def all_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def any_unverified(self) -> bool:
        return any(e.verdict == UNVERIFIED for e in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, key):
        if isinstance(key, str):
            for e in self.entries:
                if e.id == key:
                    return e
            raise KeyError(key)
        return self.entries[key]

    def to_json(self, indent=None) -> str:
        return json.dumps([e.to_dict() for e in self.entries], indent=indent)

    def __repr__(self):
        summary = ", ".join(f"{e.id}:{e.verdict}" for e in self.entries)
        return f"AuditReport([{summary}])"
