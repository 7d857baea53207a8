"""Validation reports: a flat list of named checks with numeric defects."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckEntry:
    check: str
    location: str
    defect: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.defect <= self.tolerance

    def __str__(self) -> str:
        status = "ok" if self.ok else "VIOLATED"
        return f"{self.check} @ {self.location}: defect={self.defect:.3e} tol={self.tolerance:.1e} [{status}]"


@dataclass
class ValidationReport:
    entries: list[CheckEntry] = field(default_factory=list)

    def add(self, check: str, location: str, defect: float, tolerance: float) -> None:
        self.entries.append(CheckEntry(check, location, float(defect), tolerance))

    @property
    def violations(self) -> list[CheckEntry]:
        return [e for e in self.entries if not e.ok]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def max_defect(self) -> float:
        return max((e.defect for e in self.entries), default=0.0)

    def __str__(self) -> str:
        if self.ok:
            return f"valid ({len(self.entries)} checks, max defect {self.max_defect:.3e})"
        lines = [str(e) for e in self.violations]
        return "\n".join([f"INVALID ({len(self.violations)} violations)"] + lines)
