from graspforge.optimizer.loop import FAILURE_SCORE, optimize, run_objective, trial_seed
from graspforge.optimizer.space import SearchSpace
from graspforge.optimizer.study import StudyFormatError, StudyLog, StudyRecord, Trial
from graspforge.optimizer.tpe import ParzenEstimator, TpeConfig, ask, ask_random

__all__ = [
    "FAILURE_SCORE",
    "ParzenEstimator",
    "SearchSpace",
    "StudyFormatError",
    "StudyLog",
    "StudyRecord",
    "TpeConfig",
    "Trial",
    "ask",
    "ask_random",
    "optimize",
    "run_objective",
    "trial_seed",
]
