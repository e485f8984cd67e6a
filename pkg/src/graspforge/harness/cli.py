"""Command line entry point: ``graspforge optimize | simulate | report``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from graspforge.dynamics.render import write_frame
from graspforge.dynamics.world import GeometryError
from graspforge.harness.config import ConfigError, StudyConfig, load_params
from graspforge.harness.runner import (
    CONFIG_FILE,
    FORCE_FILE,
    REPORT_FILE,
    grasp_force_rows,
    load_study,
    run_study,
    summary_lines,
    write_grasp_force,
    write_report,
)
from graspforge.objects import CATALOG_BY_NAME
from graspforge.optimizer import StudyFormatError
from graspforge.scenario import Termination, TraceRecorder, run_grasp_trial

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_INTERRUPTED = 3
EXIT_UNSTABLE = 4

THREADS_ENV = "GRASPFORGE_THREADS"
FRAME_EVERY = 50  # steps between rendered frames
TRACE_EVERY = 10  # steps between trace rows


def _err(msg: str) -> None:
    print(f"graspforge: {msg}", file=sys.stderr)


def _load_config(path: str | None) -> StudyConfig:
    return StudyConfig.load(path) if path else StudyConfig()


def _parallelism(flag: int | None) -> int | None:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise ConfigError(f"{THREADS_ENV} must be at least 1")
        return value
    return flag


def cmd_optimize(args) -> int:
    try:
        cfg = _load_config(args.config).with_overrides(
            n_iter=args.iters, seed=args.seed, parallelism=_parallelism(args.parallel), out=args.out,
        )
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    try:
        study = run_study(cfg, cfg.out, resume=args.resume)
    except KeyboardInterrupt:
        _err(f"interrupted; resume with --resume --out {cfg.out}")
        return EXIT_INTERRUPTED
    except (ConfigError, StudyFormatError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    print("\n".join(summary_lines(study)))
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        params = load_params(args.params)
        cfg = _load_config(args.config)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    if args.object not in CATALOG_BY_NAME:
        _err(f"unknown object {args.object!r}; choose from: {', '.join(CATALOG_BY_NAME)}")
        return EXIT_CONFIG
    recorder = None
    frames = None
    if args.render:
        frames = Path(args.render) / "frames"
        try:
            frames.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            _err(str(exc))
            return EXIT_IO
        recorder = TraceRecorder(every=TRACE_EVERY, frame_every=FRAME_EVERY,
                                 on_frame=lambda world, i: write_frame(world, frames, i))
    try:
        result = run_grasp_trial(params, CATALOG_BY_NAME[args.object], args.seed, cfg.protocol, cfg.world,
                                 cfg.transmission, recorder)
    except GeometryError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    print(json.dumps(result.to_json(), indent=2))
    if recorder is not None:
        recorder.write_csv(Path(args.render) / "trace.csv")
    return EXIT_UNSTABLE if result.termination == Termination.UNSTABLE else EXIT_OK


def cmd_report(args) -> int:
    study_dir = Path(args.study)
    try:
        study = load_study(study_dir)
    except FileNotFoundError:
        _err(f"no study log in {study_dir}")
        return EXIT_CONFIG
    except StudyFormatError as exc:
        _err(f"corrupt study record: {exc}")
        return EXIT_CONFIG
    if not len(study):
        _err(f"{study_dir} holds an empty study")
        return EXIT_CONFIG
    write_report(study, study_dir / REPORT_FILE)
    print("\n".join(summary_lines(study)))
    if args.grasp_force:
        cfg_path = study_dir / CONFIG_FILE
        try:
            cfg = StudyConfig.load(cfg_path) if cfg_path.exists() else StudyConfig()
        except ConfigError as exc:
            _err(str(exc))
            return EXIT_CONFIG
        rows = grasp_force_rows(study.best.params, cfg)
        write_grasp_force(rows, study_dir / FORCE_FILE)
        print("grasp force at best design:")
        for width, force in rows:
            print(f"  {width:3d} mm  {force:8.2f} N")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graspforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run or resume a design study")
    p.add_argument("--config", help="study config (JSON)")
    p.add_argument("--iters", type=int, help="total number of trials")
    p.add_argument("--seed", type=int)
    p.add_argument("--parallel", type=int, help=f"evaluations in flight (overridden by {THREADS_ENV})")
    p.add_argument("--out", help="output directory")
    p.add_argument("--resume", action="store_true", help="continue an existing study.jsonl")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="run one grasp trial")
    p.add_argument("--params", required=True, help="best.json or a table-unit design file")
    p.add_argument("--object", required=True, help="catalog object name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--render", help="directory for SVG frames and trace.csv")
    p.add_argument("--config", help="study config supplying protocol/world/transmission overrides")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="score curve and optional grasp-force sweep from a study")
    p.add_argument("--study", required=True, help="study directory")
    p.add_argument("--grasp-force", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
