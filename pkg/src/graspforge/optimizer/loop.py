"""The ask/evaluate/tell loop, sequential or with several evaluations in flight."""
from __future__ import annotations

import time
from concurrent.futures import FIRST_COMPLETED, Executor, ProcessPoolExecutor, wait
from typing import Callable, NamedTuple

import numpy as np

from graspforge.optimizer.space import SearchSpace
from graspforge.optimizer.study import StudyRecord, Trial
from graspforge.optimizer.tpe import TpeConfig, ask, ask_random
from graspforge.transmission import DesignParams

FAILURE_SCORE = 1.0  # same as a design that drops every object

_ASK_STREAM = 1
_EVAL_STREAM = 2


class _Lie(NamedTuple):
    params: DesignParams
    score: float


def trial_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([_EVAL_STREAM, seed, index]).generate_state(1, np.uint64)[0] >> 1)


def ask_rng(seed: int, index: int) -> np.random.Generator:
    # one stream per trial index, so a resumed study asks exactly what a fresh one would
    return np.random.default_rng([_ASK_STREAM, seed, index])


def _outcome(value) -> tuple[float, dict[str, float]]:
    if hasattr(value, "score"):
        return float(value.score), dict(getattr(value, "per_object_h", {}) or {})
    return float(value), {}


def run_objective(objective: Callable, params: DesignParams, seed: int) -> tuple[float, dict[str, float], float]:
    """Score, per-object means and wall time in ms; any exception scores the floor."""
    t0 = time.perf_counter()
    try:
        score, per_object = _outcome(objective(params, seed))
        if not np.isfinite(score):
            score, per_object = FAILURE_SCORE, {}
    except Exception:
        score, per_object = FAILURE_SCORE, {}
    return score, per_object, round((time.perf_counter() - t0) * 1e3, 3)


def optimize(
    objective: Callable,
    space: SearchSpace | None = None,
    n_iter: int = 2000,
    seed: int = 0,
    parallelism: int = 1,
    cfg: TpeConfig | None = None,
    sampler: str = "tpe",
    study: StudyRecord | None = None,
    on_trial: Callable[[Trial], None] | None = None,
    executor: Executor | None = None,
) -> StudyRecord:
    """Maximize ``objective(params, seed)`` for ``n_iter`` trials in total.

    The objective returns a float or anything with ``score`` (and optionally
    ``per_object_h``).  Passing an existing ``study`` resumes it.  With
    ``parallelism > 1`` the objective must be picklable unless an
    ``executor`` is supplied.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be at least 1")
    if parallelism < 1:
        raise ValueError("parallelism must be at least 1")
    if sampler not in ("tpe", "random"):
        raise ValueError(f"unknown sampler {sampler!r}")
    space = space or SearchSpace()
    cfg = cfg or TpeConfig()
    study = study if study is not None else StudyRecord()

    def propose(history, index: int) -> DesignParams:
        rng = ask_rng(seed, index)
        if sampler == "random":
            return ask_random(space, rng)
        return ask(history, space, cfg, rng)

    def record(index, params, outcome):
        score, per_object, wall_ms = outcome
        trial = Trial(index, params, score, per_object, trial_seed(seed, index), wall_ms)
        study.tell(trial)
        if on_trial is not None:
            on_trial(trial)

    if parallelism == 1 and executor is None:
        for i in range(len(study), n_iter):
            params = propose(study.trials, i)
            record(i, params, run_objective(objective, params, trial_seed(seed, i)))
        return study

    own = executor is None
    pool = executor or ProcessPoolExecutor(max_workers=parallelism)
    try:
        _run_parallel(objective, study, n_iter, seed, parallelism, pool, propose, record)
    finally:
        if own:
            pool.shutdown(wait=True, cancel_futures=True)
    return study


def _run_parallel(objective, study, n_iter, seed, parallelism, pool, propose, record):
    pending = {}  # future -> (index, params)
    finished: dict[int, tuple] = {}  # results waiting for their turn to be told
    next_index = len(study)
    while len(study) < n_iter:
        while len(pending) < parallelism and next_index < n_iter:
            known = study.trials + [_Lie(p, o[0]) for _, (p, o) in sorted(finished.items())]
            history = []
            if known:  # constant liar: in-flight designs count as median results
                lie = float(np.median([t.score for t in known]))
                history = known + [_Lie(p, lie) for _, p in pending.values()]
            params = propose(history, next_index)
            fut = pool.submit(run_objective, objective, params, trial_seed(seed, next_index))
            pending[fut] = (next_index, params)
            next_index += 1
        done, _ = wait(pending, return_when=FIRST_COMPLETED)
        for fut in done:
            index, params = pending.pop(fut)
            finished[index] = (params, fut.result())
        while len(study) in finished:
            index = len(study)
            params, outcome = finished.pop(index)
            record(index, params, outcome)
