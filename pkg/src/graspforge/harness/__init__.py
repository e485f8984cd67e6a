from graspforge.harness.config import ConfigError, StudyConfig, load_params
from graspforge.harness.runner import GraspObjective, run_study

__all__ = ["ConfigError", "GraspObjective", "StudyConfig", "load_params", "run_study"]
