"""Experiment run reports and their on-disk layout."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..io import read_json, write_json


@dataclass
class ExperimentReport:
    experiment: str
    recovered_params: list
    objective_trace: list
    final_constraint_forces: list
    error_metrics: dict
    hessian_condition: float | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentReport":
        return cls(**payload)

    def save(self, path) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path) -> "ExperimentReport":
        return cls.from_dict(read_json(path))


def run_directory(output_dir, experiment: str) -> Path:
    """out/<experiment>/<utc timestamp>/, suffixed if the second rolls over."""
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    base = Path(output_dir) / experiment
    path = base / stamp
    k = 1
    while path.exists():
        path = base / f"{stamp}-{k}"
        k += 1
    path.mkdir(parents=True)
    return path


class Stopwatch:
    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self._start
        return False
