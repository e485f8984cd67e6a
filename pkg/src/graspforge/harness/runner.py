"""Running, resuming and reporting a design study on disk."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from graspforge.dynamics.world import GeometryError, WorldConfig
from graspforge.harness.config import ConfigError, StudyConfig, params_to_table
from graspforge.objects import ObjectSpec
from graspforge.optimizer import StudyLog, StudyRecord, optimize
from graspforge.scenario import Evaluation, ProtocolConfig, evaluate, measure_grasp_force
from graspforge.transmission import DesignParams, TransmissionConfig

STUDY_FILE = "study.jsonl"
BEST_FILE = "best.json"
REPORT_FILE = "report.csv"
CONFIG_FILE = "config.json"
FORCE_FILE = "grasp_force.csv"
FORCE_WIDTHS_MM = (10, 20, 30, 50, 70)


class StudyExistsError(FileExistsError):
    pass


@dataclass(frozen=True)
class GraspObjective:
    """Picklable objective: run the catalog ``m`` times and return the aggregate."""

    objects: tuple[ObjectSpec, ...]
    m: int
    protocol: ProtocolConfig
    world: WorldConfig
    transmission: TransmissionConfig

    @classmethod
    def from_config(cls, cfg: StudyConfig) -> "GraspObjective":
        return cls(tuple(cfg.objects), cfg.m, cfg.protocol, cfg.world, cfg.transmission)

    def __call__(self, params: DesignParams, seed: int) -> Evaluation:
        return evaluate(params, self.objects, self.m, seed=seed, cfg=self.protocol,
                        world_cfg=self.world, tcfg=self.transmission)


def best_payload(study: StudyRecord) -> dict:
    best = study.best
    return {
        "index": best.index,
        "score": best.score,
        "params": best.params.as_dict(),
        "params_table": params_to_table(best.params),
        "per_object_h": best.per_object_h,
        "seed": best.seed,
    }


def write_best(study: StudyRecord, out: Path) -> None:
    (out / BEST_FILE).write_text(json.dumps(best_payload(study), indent=2) + "\n")


def run_study(cfg: StudyConfig, out: str | Path, resume: bool = False, objective=None) -> StudyRecord:
    """Run or continue a study in ``out``; every trial is flushed to study.jsonl as it finishes."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / STUDY_FILE
    log = StudyLog(path)
    if path.exists() and not resume:
        raise StudyExistsError(f"{path} already exists; pass --resume to continue it")
    study = StudyRecord()
    if path.exists():
        _check_resumable(cfg, out / CONFIG_FILE)
        study = StudyRecord.read_jsonl(path)
    log.truncate_to(study)
    (out / CONFIG_FILE).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    objective = objective or GraspObjective.from_config(cfg)
    try:
        optimize(objective, cfg.space, cfg.n_iter, cfg.seed, cfg.parallelism, cfg.tpe,
                 study=study, on_trial=log)
    finally:
        if len(study):
            write_best(study, out)
            write_report(study, out / REPORT_FILE)
    return study


# fields that may change between a run and its resumption
_RESUME_FREE = ("n_iter", "parallelism", "out")


def _check_resumable(cfg: StudyConfig, saved_path: Path) -> None:
    if not saved_path.exists():
        return
    saved = StudyConfig.from_dict(json.loads(saved_path.read_text())).to_dict()
    current = cfg.to_dict()
    changed = sorted(k for k in current if k not in _RESUME_FREE and current[k] != saved[k])
    if changed:
        raise ConfigError(f"cannot resume: {', '.join(changed)} differ from {saved_path}")


def write_report(study: StudyRecord, path: Path) -> None:
    """One row per trial: iteration, score, best-so-far, then per-object mean lifts."""
    names = sorted({k for t in study.trials for k in t.per_object_h})
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "score", "best_so_far", *(f"h_{n}_m" for n in names)])
        for t, best in zip(study.trials, study.best_so_far()):
            w.writerow([t.index, repr(t.score), repr(best),
                        *(repr(t.per_object_h[n]) if n in t.per_object_h else "" for n in names)])


def grasp_force_rows(params: DesignParams, cfg: StudyConfig,
                     widths_mm: Sequence[int] = FORCE_WIDTHS_MM) -> list[tuple[int, float]]:
    rows = []
    for w in widths_mm:
        try:
            force = measure_grasp_force(params, w * 1e-3, cfg=cfg.protocol, world_cfg=cfg.world,
                                        tcfg=cfg.transmission)
        except GeometryError:
            force = math.nan
        rows.append((w, force))
    return rows


def write_grasp_force(rows, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["width_mm", "force_N"])
        for width, force in rows:
            w.writerow([width, f"{force:.6g}"])


def summary_lines(study: StudyRecord) -> list[str]:
    best = study.best
    lines = [f"trials: {len(study)}  best score: {best.score:.6g} (trial {best.index})", "best design:"]
    lines += [f"  {k:<16}{v:10.4g}" for k, v in params_to_table(best.params).items()]
    if best.per_object_h:
        lines.append("mean lift per object [m]:")
        lines += [f"  {k:<16}{v:10.4g}" for k, v in best.per_object_h.items()]
    return lines


def load_study(study_dir: str | Path) -> StudyRecord:
    return StudyRecord.read_jsonl(Path(study_dir) / STUDY_FILE)

