"""Trials, the append-only study record and its JSONL form."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from graspforge.transmission import DESIGN_NAMES, DesignParams


class StudyFormatError(ValueError):
    def __init__(self, path, line: int, reason: str):
        super().__init__(f"{path}:{line}: {reason}")
        self.path = path
        self.line = line


@dataclass(frozen=True)
class Trial:
    index: int
    params: DesignParams
    score: float
    per_object_h: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    wall_ms: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValueError(f"trial {self.index}: score must be finite, got {self.score}")

    def to_json(self) -> dict:
        # wall_ms last so runs can be compared byte-for-byte up to the timing field
        return {
            "index": self.index,
            "params": {k: getattr(self.params, k) for k in DESIGN_NAMES},
            "per_object_h": dict(self.per_object_h),
            "score": self.score,
            "seed": self.seed,
            "wall_ms": self.wall_ms,
        }

    def to_line(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, d: dict) -> "Trial":
        params = d["params"]
        missing = [k for k in DESIGN_NAMES if k not in params]
        if missing:
            raise KeyError(f"params missing {missing}")
        return cls(
            index=int(d["index"]),
            params=DesignParams(**{k: float(params[k]) for k in DESIGN_NAMES}),
            score=float(d["score"]),
            per_object_h={str(k): float(v) for k, v in d.get("per_object_h", {}).items()},
            seed=int(d["seed"]),
            wall_ms=float(d.get("wall_ms", 0.0)),
        )


@dataclass
class StudyRecord:
    trials: list[Trial] = field(default_factory=list)
    best_index: int | None = None

    def __len__(self) -> int:
        return len(self.trials)

    @property
    def best(self) -> Trial | None:
        return None if self.best_index is None else self.trials[self.best_index]

    def tell(self, trial: Trial) -> "StudyRecord":
        if trial.index != len(self.trials):
            raise IndexError(f"expected trial {len(self.trials)}, got {trial.index}")
        self.trials.append(trial)
        if self.best is None or trial.score > self.best.score:
            self.best_index = trial.index
        return self

    def best_so_far(self) -> list[float]:
        out, best = [], -math.inf
        for t in self.trials:
            best = max(best, t.score)
            out.append(best)
        return out

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w") as f:
            for t in self.trials:
                f.write(t.to_line())

    @classmethod
    def read_jsonl(cls, path: str | Path) -> "StudyRecord":
        """Load a study log; a truncated final line (crash mid-write) is dropped."""
        study = cls()
        lines = Path(path).read_text().splitlines(keepends=True)
        for n, raw in enumerate(lines, start=1):
            if not raw.strip():
                continue
            try:
                trial = Trial.from_json(json.loads(raw))
            except (ValueError, KeyError, TypeError) as exc:
                if n == len(lines) and not raw.endswith("\n"):
                    break
                raise StudyFormatError(path, n, str(exc)) from exc
            try:
                study.tell(trial)
            except IndexError as exc:
                raise StudyFormatError(path, n, str(exc)) from exc
        return study


class StudyLog:
    """Appends one flushed line per trial."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def truncate_to(self, study: StudyRecord) -> None:
        # drops a partial trailing line left by a crash
        self.path.write_text("".join(t.to_line() for t in study.trials))

    def __call__(self, trial: Trial) -> None:
        with open(self.path, "a") as f:
            f.write(trial.to_line())
            f.flush()
