"""JSON-serialisable check records and run reports."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field


def _clean(value):
    """Make floats JSON-safe (NaN and infinities become strings)."""
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return value
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return _clean(value.item())
    return value


@dataclass
class CheckRecord:
    """One verified claim.

    ``anchor`` is a short statement of the claim being checked and
    ``tolerance`` a human-readable acceptance condition.  Records with
    ``asserted=False`` are informational and do not affect the verdict.
    """

    claim_id: str
    anchor: str
    measured: object
    tolerance: str
    passed: bool
    alpha_provenance: str | None = None
    asserted: bool = True
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _clean(asdict(self))


@dataclass
class RunReport:
    scenario: str
    config: dict
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def add(self, record: CheckRecord) -> CheckRecord:
        if any(c.claim_id == record.claim_id for c in self.checks):
            raise ValueError(f"duplicate check {record.claim_id!r}")
        self.checks.append(record)
        return record

    @property
    def passed(self) -> bool:
        return not self.errors and all(c.passed for c in self.checks if c.asserted)

    def to_dict(self) -> dict:
        return _clean({
            "scenario": self.scenario,
            "passed": self.passed,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "timings": self.timings,
            "artifacts": self.artifacts,
            "errors": self.errors,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)
