"""Verification reports and data files."""

import csv
import json
import time
from collections.abc import Iterable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from slag.logger import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


def _plain(value: Any) -> Any:
    """JSON-ready copy with numpy scalars and arrays unwrapped."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def statistics(values: Iterable[float]) -> dict:
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        return {"count": 0}
    return {
        "count": int(values.size),
        "min": float(values.min()),
        "median": float(np.median(values)),
        "max": float(values.max()),
    }


@dataclass
class CheckResult:
    """Outcome of one named check."""

    name: str
    passed: bool
    mandatory: bool = True
    detail: str = ""
    statistics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "mandatory": bool(self.mandatory),
            "detail": self.detail,
            "statistics": _plain(self.statistics),
        }


@dataclass
class Report:
    """Result of one command run; fails iff a mandatory check fails."""

    command: str
    config: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    label: str = ""

    @property
    def status(self) -> str:
        failed = any(check.mandatory and not check.passed for check in self.checks)
        return "fail" if failed else "pass"

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if c.mandatory and not c.passed]

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        outcome = "PASS" if check.passed else "FAIL"
        if check.passed or not check.mandatory:
            logger.info(f"[{self.command}] {check.name}: {outcome}")
        else:
            logger.error(f"[{self.command}] {check.name}: {outcome}")
        return check

    @contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[stage] = time.perf_counter() - start

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "status": self.status,
            "label": self.label,
            "config": _plain(self.config),
            "checks": [check.to_dict() for check in self.checks],
            "timings": _plain(self.timings),
        }

    def write_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path

    def summary(self) -> str:
        label = f" ({self.label})" if self.label else ""
        lines = [f"{self.command}: {self.status.upper()}{label}"]
        for check in self.checks:
            mark = "PASS" if check.passed else "FAIL"
            suffix = "" if check.mandatory else " [informational]"
            detail = f" - {check.detail}" if check.detail else ""
            lines.append(f"  {mark} {check.name}{suffix}{detail}")
        return "\n".join(lines)


def write_locus_csv(points: Sequence, path: str | Path) -> Path:
    """One row of six eta coordinates per locus point."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([f"eta{i}" for i in range(6)])
        for point in points:
            writer.writerow([format_float(e) for e in point.eta])
    return path


def write_locus_records(points: Sequence, path: str | Path) -> Path:
    """JSON lines: frame, eta and residuals per point."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for index, point in enumerate(points):
            f.write(json.dumps(point.to_record(index), sort_keys=True) + "\n")
    return path


def write_fibers_csv(rows: Iterable[tuple[int, float, Any]], path: str | Path) -> Path:
    """Rows of (base id, theta, frame) as base_id, theta, x0..x3, x'0..x'3."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(
            ["base_id", "theta"] + [f"x{i}" for i in range(4)] + [f"xp{i}" for i in range(4)]
        )
        for base_id, theta, frame in rows:
            coordinates = list(frame.u) + list(frame.u_prime)
            writer.writerow([base_id, format_float(theta)] + [format_float(x) for x in coordinates])
    return path
