"""Uniform result objects for the verification-style operations."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of a structural check: a name, a verdict, and any violations."""

    name: str
    passed: bool
    violations: tuple[str, ...] = ()
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "violations": list(self.violations),
            "details": {k: self.details[k] for k in sorted(self.details)},
        }


class SchemaError(Exception):
    """A malformed input document, pointing at the offending path."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")

    def to_json(self) -> dict:
        return {"error": {"path": self.path, "message": self.message}}
