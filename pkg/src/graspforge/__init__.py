"""Simulation-based design optimization of a single-actuator crawler gripper."""
from graspforge.transmission import (
    DesignParams,
    HandState,
    JointTorques,
    Mode,
    SliderState,
    TransmissionConfig,
)

__all__ = [
    "DesignParams",
    "HandState",
    "JointTorques",
    "Mode",
    "SliderState",
    "TransmissionConfig",
]
__version__ = "0.1.0"
