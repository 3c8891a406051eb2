from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class CheckResult(BaseModel):
    """One verified claim, with the operation that produced the number."""

    name: str
    passed: bool
    value: Any = None
    tolerance: Optional[float] = None
    producer: str

    def display_info(self) -> str:
        mark = "ok" if self.passed else "FAIL"
        return f"[{mark}] {self.name} ({self.producer})"


class StageResult(BaseModel):
    stage: str
    checks: List[CheckResult] = Field(default_factory=list)
    data: Dict[str, Any] = Field(default_factory=dict)
    series: Dict[str, Dict[str, List[float]]] = Field(default_factory=dict)
    error: Optional[str] = None
    seconds: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, producer: str, value: Any = None, tolerance: Optional[float] = None) -> bool:
        self.checks.append(CheckResult(name=name, passed=bool(passed), value=value, tolerance=tolerance, producer=producer))
        return bool(passed)


class RunReport(BaseModel):
    """Outcome of one pipeline run."""

    example: str
    seed: int
    stages: List[StageResult] = Field(default_factory=list)
    settings: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    def stage(self, name: str) -> Optional[StageResult]:
        return next((s for s in self.stages if s.stage == name), None)
