#src/states/schemas.py
from pydantic import BaseModel, Field, computed_field
from typing import List, Dict
from colorama import Fore, Style


# ===== Define the structure of a single check =====
class CheckResult(BaseModel):
    """One named identity checked exactly, with its residual when it fails"""
    name: str = Field(description="The name of the identity being checked")
    passed: bool = Field(default=True, description="Whether the residual vanished")
    witness: str = Field(default="", description="Rendered nonzero residual for a failing check")
    detail: str = Field(default="", description="Optional context such as the sections used")

    def __str__(self) -> str:
        if self.passed:
            return f"✅ {self.name}"
        check_str = [f"❌ {self.name}"]
        if self.witness:
            check_str.append(f"[Witness: {self.witness}]")
        if self.detail:
            check_str.append(f"[{self.detail}]")
        return " ".join(check_str)

    def colored(self, color: bool = True) -> str:
        if not color:
            return str(self)
        return (Fore.GREEN if self.passed else Fore.RED) + str(self) + Style.RESET_ALL


def check(name: str, residual, detail: str = "") -> CheckResult:
    """CheckResult from a residual that is zero exactly when the identity holds."""
    is_zero = residual.is_zero() if hasattr(residual, "is_zero") else not residual
    witness = "" if is_zero else (residual.render() if hasattr(residual, "render") else str(residual))
    return CheckResult(name=name, passed=is_zero, witness=witness, detail=detail)


# ===== Define the structure of a battery of checks =====
class StructureReport(BaseModel):
    """Named checks run against one structure"""
    title: str = Field(default="", description="What was checked")
    checks: List[CheckResult] = Field(default_factory=list, description="Checks in their fixed order")

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def __str__(self) -> str:
        report_str = [f"📋 {self.title}"] if self.title else []
        report_str.extend(f"  {c}" for c in self.checks)
        return "\n".join(report_str)


# ===== Define the structure of a CLI report =====
class Report(BaseModel):
    """Result of one CLI command; serialized deterministically"""
    command: str = Field(description="The command that was run")
    model: str = Field(default="", description="Model file name")
    kind: str = Field(default="", description="Model kind")
    seed: int | None = Field(default=None, description="Random seed used by randomized checks")
    values: Dict[str, str] = Field(default_factory=dict, description="Rendered results by name")
    checks: List[CheckResult] = Field(default_factory=list, description="Checks in their fixed order")
    exit_code: int = Field(default=0, description="0 = all checks pass, 1 = a check failed")

    def model_post_init(self, __context) -> None:
        self.values = dict(sorted(self.values.items()))

    def add_value(self, name: str, value) -> None:
        rendered = value.render() if hasattr(value, "render") else str(value)
        self.values = dict(sorted({**self.values, name: rendered}.items()))

    def add_checks(self, checks: List[CheckResult]) -> None:
        self.checks = [*self.checks, *checks]
        if any(not c.passed for c in self.checks):
            self.exit_code = 1

    def render_machine(self) -> str:
        return self.model_dump_json(indent=2)

    def render_human(self, color: bool = True) -> str:
        def paint(text: str, tone: str) -> str:
            return tone + text + Style.RESET_ALL if color else text

        report_str = [paint(f"🚀 {self.command} {self.model}".rstrip(), Fore.GREEN)]
        if self.kind:
            report_str.append(f"📝 Kind: {self.kind}")
        for name, value in self.values.items():
            report_str.append(f"🔸 {name}: {value}")
        for c in self.checks:
            report_str.append(c.colored(color))
        status = "all checks passed" if self.exit_code == 0 else "some checks failed"
        report_str.append(paint(f"{'✅' if self.exit_code == 0 else '❌'} {status}", Fore.GREEN if self.exit_code == 0 else Fore.RED))
        return "\n".join(report_str)

    def __str__(self) -> str:
        return self.render_human(color=False)
