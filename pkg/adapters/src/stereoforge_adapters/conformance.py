"""Adapter conformance: run the pipeline's own backend contract suite.

The checks are delegated to the primary CLI (`stereoforge backends check`),
so adapters are held to exactly the contracts builtin backends pass.
"""

from __future__ import annotations

import json
import subprocess
import sys
from dataclasses import dataclass, field


@dataclass
class ConformanceReport:
    command: str
    kind: str
    passed: bool
    checks: list = field(default_factory=list)  # dicts: check/passed/detail

    def failures(self):
        return [c for c in self.checks if not c["passed"]]


def conformance_check(command: str, kind: str, timeout_s: float = 60.0) -> ConformanceReport:
    """Run the pipeline's contract suite against `command` as a <kind> backend."""
    proc = subprocess.run(
        [sys.executable, "-m", "stereoforge.cli", "backends", "check",
         f"--{kind}", f"external:{command}", "--timeout-s", str(timeout_s), "--json"],
        capture_output=True, text=True)
    if proc.returncode not in (0, 2):
        raise RuntimeError(f"backend checker failed to run: {proc.stderr.strip()}")
    checks = [{"check": entry["check"], "passed": entry["passed"],
               "detail": entry["detail"]}
              for entry in json.loads(proc.stdout)]
    return ConformanceReport(command=command, kind=kind,
                             passed=all(c["passed"] for c in checks),
                             checks=checks)


def format_report(report: ConformanceReport) -> str:
    lines = [f"{'PASS' if report.passed else 'FAIL'} {report.kind}: {report.command}"]
    for check in report.checks:
        mark = "ok " if check["passed"] else "FAIL"
        detail = f" — {check['detail']}" if check["detail"] else ""
        lines.append(f"  [{mark}] {check['check']}{detail}")
    return "\n".join(lines)
