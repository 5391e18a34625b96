"""Structured pass/fail reports shared by all validators and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckEntry:
    """One verified condition: a name, a measured residual, a verdict."""

    name: str
    passed: bool
    residual: float
    location: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": float(self.residual),
            "location": self.location,
        }


@dataclass
class Report:
    """An ordered list of check entries plus optional provenance.

    ``command`` and ``digest`` are filled in by the CLI; library callers
    usually leave them empty and only look at ``passed`` / ``entries``.
    """

    command: str = ""
    digest: str = ""
    entries: list[CheckEntry] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name, passed, residual, location=""):
        entry = CheckEntry(name, bool(passed), float(residual), location)
        self.entries.append(entry)
        return entry

    def note(self, text):
        self.notes.append(text)

    def extend(self, other: "Report", prefix=""):
        for entry in other.entries:
            name = f"{prefix}{entry.name}" if prefix else entry.name
            self.entries.append(CheckEntry(name, entry.passed, entry.residual, entry.location))
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def worst_residual(self) -> float:
        return max((entry.residual for entry in self.entries), default=0.0)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def failures(self):
        return [entry for entry in self.entries if not entry.passed]

    def to_dict(self):
        return {
            "command": self.command,
            "inputs_digest": self.digest,
            "entries": [entry.to_dict() for entry in self.entries],
            "notes": list(self.notes),
            "passed": self.passed,
            "exit_status": self.exit_status,
        }
