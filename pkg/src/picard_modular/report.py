"""Check results and verification reports shared by the validators and the CLI."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"
    INFO = "info"


@dataclass(frozen=True)
class CheckResult:
    id: str
    status: Status
    detail: str = ""
    witness: Any = None

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_json(self) -> dict:
        out = {"id": self.id, "status": self.status.value, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    @classmethod
    def from_json(cls, d: dict) -> "CheckResult":
        return cls(d["id"], Status(d["status"]), d.get("detail", ""), d.get("witness"))


def check(check_id: str, ok: bool, detail: str = "", witness: Any = None) -> CheckResult:
    return CheckResult(check_id, Status.PASS if ok else Status.FAIL, detail, witness)


@dataclass
class Report:
    version: str
    config: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> None:
        if any(c.id == result.id for c in self.checks):
            raise ValueError(f"duplicate check id {result.id!r}")
        self.checks.append(result)

    def extend(self, results: Iterable[CheckResult]) -> None:
        for r in results:
            self.add(r)

    def summary(self) -> dict[str, int]:
        counts = {s.value: 0 for s in Status}
        for c in self.checks:
            counts[c.status.value] += 1
        return counts

    @property
    def failed(self) -> bool:
        return any(c.status is Status.FAIL for c in self.checks)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
            "summary": self.summary(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, d: dict) -> "Report":
        rep = cls(d["version"], dict(d.get("config", {})))
        rep.extend(CheckResult.from_json(c) for c in d["checks"])
        if rep.summary() != d.get("summary", rep.summary()):
            raise ValueError("summary counts disagree with the check list")
        return rep

    def to_markdown(self) -> str:
        lines = [f"# Verification report (version {self.version})", ""]
        if self.config:
            lines.append("Config: " + ", ".join(f"{k}={v}" for k, v in sorted(self.config.items())))
            lines.append("")
        lines.append("| id | status | detail |")
        lines.append("|---|---|---|")
        for c in self.checks:
            detail = c.detail.replace("|", "\\|").replace("\n", " ")
            lines.append(f"| {c.id} | {c.status.value} | {detail} |")
        s = self.summary()
        lines.append("")
        lines.append(f"pass {s['pass']}, fail {s['fail']}, skipped {s['skipped']}, info {s['info']}")
        return "\n".join(lines)
