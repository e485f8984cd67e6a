"""Grasp-trial protocol, robustness score and grasp-force measurement."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from graspforge.dynamics import kernel as K
from graspforge.dynamics.world import (
    DivergenceError,
    GeometryError,
    SimulationError,
    DP1,
    PP1,
    World,
    WorldConfig,
    build_world,
)
from graspforge.objects import CATALOG, CATALOG_BY_NAME, ObjectSpec, lookup
from graspforge.transmission import DesignParams, Mode, TransmissionConfig

__all__ = [
    "CATALOG",
    "CATALOG_BY_NAME",
    "Evaluation",
    "GeometryError",
    "ModeEvent",
    "ObjectSpec",
    "ProtocolConfig",
    "SimulationError",
    "Termination",
    "TraceRecorder",
    "TrialResult",
    "aggregate_score",
    "derive_seed",
    "evaluate",
    "lookup",
    "measure_grasp_force",
    "run_grasp_trial",
]


class Termination(str, Enum):
    DROPPED = "Dropped"
    MAX_HEIGHT = "MaxHeight"
    TIMEOUT = "Timeout"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class ProtocolConfig:
    T_m_max: float = 100.0
    ramp_duration: float = 2.0
    lift_speed: float = 0.1
    disturbance_period: float = 0.1
    k_F: float = 50.0  # N per metre of lift
    k_T: float = 1.0  # N m per metre of lift
    max_lift: float = 2.0
    drop_window: float = 0.2
    timeout: float = 30.0
    # fingertip-height servo and settle detection
    palm_gain: float = 200.0
    palm_speed_limit: float = 0.5
    settle_speed: float = 0.01
    settle_window: float = 0.1
    settle_timeout: float = 3.0
    sink_guard: float = 0.02  # palm lift above which sinking counts as a drop

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "T_m_max":
                if value < 0:
                    raise ValueError("T_m_max must be non-negative")
            elif not value > 0:
                raise ValueError(f"{f.name} must be positive")


@dataclass(frozen=True)
class ModeEvent:
    time: float
    mode: Mode
    phase: str  # "close" or "lift"


@dataclass
class TrialResult:
    h: float
    termination: Termination
    mode_trace: list[ModeEvent] = field(default_factory=list)
    final_contacts: int = 0
    lift_start: float | None = None
    duration: float = 0.0
    disturbances: list[tuple[float, float, float, float, float]] = field(default_factory=list)
    error: str = ""

    @property
    def modes_visited(self) -> list[Mode]:
        out: list[Mode] = []
        for ev in self.mode_trace:
            if not out or out[-1] != ev.mode:
                out.append(ev.mode)
        return out

    def reached_power_grasp_in_order(self) -> bool:
        """True when the closing phase passes Parallel, PullIn and PowerGrasp in that order."""
        firsts = {}
        for ev in self.mode_trace:
            if ev.phase == "close":
                firsts.setdefault(ev.mode, ev.time)
        if len(firsts) < 3:
            return False
        return firsts[Mode.PARALLEL] <= firsts[Mode.PULL_IN] <= firsts[Mode.POWER_GRASP]

    def to_json(self) -> dict:
        return {
            "h": self.h,
            "termination": self.termination.value,
            "mode_trace": [{"time": round(e.time, 6), "mode": e.mode.label, "phase": e.phase}
                           for e in self.mode_trace],
            "final_contacts": self.final_contacts,
            "lift_start": None if self.lift_start is None else round(self.lift_start, 6),
            "duration": round(self.duration, 6),
            "error": self.error,
        }


class TraceRecorder:
    """Collects per-step rows (time, mode, x_s, T_s, h) and optional frame callbacks."""

    def __init__(self, every: int = 1, on_frame: Callable[[World, int], None] | None = None,
                 frame_every: int = 50):
        self.every = every
        self.rows: list[tuple[float, str, float, float, float]] = []
        self.on_frame = on_frame
        self.frame_every = frame_every
        self._frames = 0

    def __call__(self, world: World, lift: float):
        if world.steps % self.every == 0:
            x_t, x_s, T_s, mode = world.slider
            self.rows.append((world.time, mode.label, x_s, T_s, lift))
        if self.on_frame is not None and world.steps % self.frame_every == 0:
            self.on_frame(world, self._frames)
            self._frames += 1

    def write_csv(self, path: str | Path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "mode", "x_s_m", "T_s_N", "h_m"])
            for t, mode, x_s, T_s, h in self.rows:
                w.writerow([f"{t:.3f}", mode, f"{x_s:.9g}", f"{T_s:.9g}", f"{h:.9g}"])


def derive_seed(*indices: int) -> int:
    """Stable 63-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(i) for i in indices]).generate_state(2, np.uint64)[0] >> np.uint64(1))


class _TimedOut(Exception):
    pass


class _Closer:
    """Shared closing phase: tension ramp with fingertip-height servo until the joints settle."""

    def __init__(self, world: World, cfg: ProtocolConfig, T_m_max: float, recorder=None):
        self.world = world
        self.cfg = cfg
        self.T_m_max = T_m_max
        self.recorder = recorder
        self.target = world.tip_height()
        self.trace: list[ModeEvent] = []
        self._last_mode: Mode | None = None

    def tension(self, t: float) -> float:
        return self.T_m_max * min(1.0, t / self.cfg.ramp_duration)

    def track_mode(self, phase: str):
        mode = self.world.slider[3]
        if mode != self._last_mode:
            self.trace.append(ModeEvent(self.world.time, mode, phase))
            self._last_mode = mode

    def run(self) -> None:
        w, cfg = self.world, self.cfg
        dt = w.cfg.timestep
        need = int(round(cfg.settle_window / dt))
        quiet = 0
        t_end = min(cfg.ramp_duration + cfg.settle_timeout, cfg.timeout)
        while w.time < t_end - 0.5 * dt:
            vy = cfg.palm_gain * (self.target - w.tip_height())
            vy = max(-cfg.palm_speed_limit, min(cfg.palm_speed_limit, vy))
            w.step(self.tension(w.time), vy)
            self.track_mode("close")
            if self.recorder is not None:
                self.recorder(w, 0.0)
            if np.all(np.abs(w.v[:4]) < cfg.settle_speed):
                quiet += 1
            else:
                quiet = 0
            if w.time >= cfg.ramp_duration - 0.5 * dt and quiet >= need:
                break


def run_grasp_trial(params: DesignParams, obj: ObjectSpec, seed: int, cfg: ProtocolConfig | None = None,
                    world_cfg: WorldConfig | None = None, tcfg: TransmissionConfig | None = None,
                    recorder: TraceRecorder | None = None) -> TrialResult:
    """Close, lift under growing disturbance, and score by the lift held before the drop.

    ``h`` is the palm lift at the last instant the object was held (touching the hand and
    clear of the ground), so an object that is never picked up scores 0.
    """
    cfg = cfg or ProtocolConfig()
    world = build_world(params, obj, world_cfg, tcfg)
    rng = np.random.default_rng(seed)
    closer = _Closer(world, cfg, cfg.T_m_max, recorder)
    dt = world.cfg.timestep
    result = TrialResult(h=0.0, termination=Termination.TIMEOUT)
    start_y = world.body_pose(0)[1]
    h_held = 0.0
    try:
        closer.run()
        if world.time >= cfg.timeout - 0.5 * dt:
            raise _TimedOut
        palm0 = world.palm_y
        result.lift_start = world.time
        period = int(round(cfg.disturbance_period / dt))
        drop_steps = int(round(cfg.drop_window / dt))
        no_touch = 0
        k = 0
        wrench = (0.0, 0.0, 0.0)
        while True:
            lift = world.palm_y - palm0
            if k % period == 0:
                ang = rng.uniform(0.0, 2.0 * math.pi)
                sign = 1.0 if rng.random() < 0.5 else -1.0
                fmag = cfg.k_F * lift
                wrench = (fmag * math.cos(ang), fmag * math.sin(ang), sign * cfg.k_T * lift)
                result.disturbances.append((world.time, lift, *wrench))
            # the disturbance acts on the object only while the hand still holds it
            if no_touch == 0:
                world.set_external_wrench(0, *wrench)
            else:
                world.set_external_wrench(0, 0.0, 0.0, 0.0)
            world.step(cfg.T_m_max, cfg.lift_speed)
            k += 1
            closer.track_mode("lift")
            lift = world.palm_y - palm0
            if recorder is not None:
                recorder(world, lift)
            n_hand, n_static, _ = world.object_contacts(0)
            if n_hand > 0 and n_static == 0:
                h_held = lift
            no_touch = no_touch + 1 if n_hand == 0 else 0
            sunk = lift > cfg.sink_guard and world.body_pose(0)[1] <= start_y
            if no_touch >= drop_steps or sunk:
                result.termination = Termination.DROPPED
                break
            if lift >= cfg.max_lift - 1e-12:
                result.termination = Termination.MAX_HEIGHT
                h_held = cfg.max_lift if n_hand > 0 and n_static == 0 else h_held
                break
            if world.time >= cfg.timeout - 0.5 * dt:
                break
    except _TimedOut:
        pass
    except DivergenceError as exc:
        result.termination = Termination.UNSTABLE
        result.error = str(exc)
        h_held = 0.0
    result.h = float(min(max(h_held, 0.0), cfg.max_lift))
    result.mode_trace = closer.trace
    result.final_contacts = world.object_contacts(0)[0]
    result.duration = world.time
    return result


def aggregate_score(per_object_means: Iterable[float]) -> float:
    """Product over objects of (1 + mean lift)."""
    score = 1.0
    for h in per_object_means:
        score *= 1.0 + float(h)
    return score


@dataclass(frozen=True)
class Evaluation:
    per_object_h: dict[str, float]
    score: float
    trial_h: dict[str, list[float]] = field(default_factory=dict)
    seeds: dict[str, list[int]] = field(default_factory=dict)


def _trial_h(args) -> float:
    params, obj, seed, cfg, world_cfg, tcfg = args
    try:
        return run_grasp_trial(params, obj, seed, cfg, world_cfg, tcfg).h
    except (SimulationError, GeometryError, FloatingPointError, np.linalg.LinAlgError):
        return 0.0


def evaluate(params: DesignParams, catalog: Sequence[ObjectSpec] = CATALOG, m: int = 4, seed: int = 0,
             candidate: int = 0, cfg: ProtocolConfig | None = None, world_cfg: WorldConfig | None = None,
             tcfg: TransmissionConfig | None = None, map_fn: Callable = map) -> Evaluation:
    """Run ``m`` trials per object and combine the per-object mean lifts.

    ``map_fn`` may be a pool's ``map``; results are reduced in index order.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if not catalog:
        raise ValueError("catalog must not be empty")
    jobs, keys = [], []
    for i, obj in enumerate(catalog):
        for j in range(m):
            s = derive_seed(seed, candidate, i, j)
            jobs.append((params, obj, s, cfg, world_cfg, tcfg))
            keys.append((obj.name or f"object_{i}", s))
    hs = list(map_fn(_trial_h, jobs))
    trial_h: dict[str, list[float]] = {}
    seeds: dict[str, list[int]] = {}
    for (name, s), h in zip(keys, hs):
        trial_h.setdefault(name, []).append(h)
        seeds.setdefault(name, []).append(s)
    means = {name: float(np.mean(v)) for name, v in trial_h.items()}
    return Evaluation(means, aggregate_score(means.values()), trial_h, seeds)


def measure_grasp_force(params: DesignParams, spacer_width: float, T_m: float = 100.0,
                        spacer_height: float = 0.03, cfg: ProtocolConfig | None = None,
                        world_cfg: WorldConfig | None = None, tcfg: TransmissionConfig | None = None,
                        average: float = 0.2) -> float:
    """Steady squeeze force [N] on the finger-1 face of a fixed spacer at tension ``T_m``."""
    cfg = cfg or ProtocolConfig()
    world_cfg = world_cfg or WorldConfig()
    reach = params.l_M + 2 * (params.l_P + params.l_D)
    if spacer_width >= reach:
        raise GeometryError(f"spacer width {spacer_width:g} m exceeds the hand's reach {reach:g} m")
    world = World(world_cfg)
    world.add_ground()
    world.add_hand(params, tcfg)
    spacer_geoms = [world.add_static_box((0.0, spacer_height / 2), spacer_width, spacer_height, tag="spacer")]
    closer = _Closer(world, cfg, T_m)
    closer.run()
    n = max(1, int(round(average / world.cfg.timestep)))
    total = 0.0
    for _ in range(n):
        world.step(T_m, 0.0)
        total += _squeeze_force(world, spacer_geoms)
    return total / n


def _squeeze_force(world: World, spacer_geoms: list[int]) -> float:
    dt = world.cfg.timestep
    f = 0.0
    for row in world.cout[: world.n_contacts]:
        ga, gb = int(row[K.C_GA]), int(row[K.C_GB])
        if ga in spacer_geoms and world.glink[gb] in (PP1, DP1):
            f += row[K.C_LN] / dt * abs(row[K.C_NX])
    return f
