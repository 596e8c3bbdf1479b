"""Small report object shared by every checker in the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

Detail = Union[str, Callable[[], str]]

# stop recording after this many failures; the count keeps going
MAX_RECORDED = 200


@dataclass
class Report:
    title: str
    checked: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def check(self, cond: bool, detail: Detail) -> bool:
        self.checked += 1
        if not cond:
            self.fail(detail)
        return cond

    def fail(self, detail: Detail) -> None:
        self.failed += 1
        if len(self.failures) < MAX_RECORDED:
            self.failures.append(detail() if callable(detail) else detail)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def merge(self, other: "Report", prefix: str = "", notes: bool = True) -> None:
        self.checked += other.checked
        self.failed += other.failed
        for f in other.failures:
            if len(self.failures) < MAX_RECORDED:
                self.failures.append(prefix + f)
        if notes:
            self.notes.extend(prefix + n for n in other.notes)

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None

    def lines(self, limit: int = 20) -> list[str]:
        verdict = "PASS" if self.ok else "FAIL"
        out = [f"{self.title}: {verdict} ({self.checked} checks, {self.failed} failed)"]
        out.extend(f"  note: {n}" for n in self.notes)
        out.extend(f"  witness: {f}" for f in self.failures[:limit])
        if len(self.failures) > limit:
            out.append(f"  ... {self.failed - limit} more")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())
