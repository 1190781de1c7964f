"""Safe normal-force control of an aerial manipulator.

``simulate`` takes a preset name (``"exp1"``, ``"exp3-inclined"``, ...) or a
scenario JSON string and returns the trajectory as numpy arrays together with
the audit verdicts.
"""

from ._core import (
    ConfigError,
    ContractViolation,
    control,
    forward_kinematics,
    preset_json,
    presets,
    simulate,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "control",
    "forward_kinematics",
    "preset_json",
    "presets",
    "simulate",
]
