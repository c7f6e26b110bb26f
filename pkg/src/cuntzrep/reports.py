"""Structured pass/fail reports: every failure carries a witness."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: str | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


class Report:
    """An ordered collection of named checks."""

    def __init__(self, title: str):
        self.title = title
        self.checks: list[Check] = []

    def add(self, name: str, passed: bool, witness: str | None = None) -> None:
        self.checks.append(Check(name, bool(passed), None if passed else witness))

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }

    def __repr__(self):
        status = "pass" if self.passed else "FAIL"
        return f"Report({self.title}: {status}, {len(self.checks)} checks)"
