# SPDX-License-Identifier: GPL-2.0-or-later

from .arm import ArmSpec, ThresholdPolicy, StationaryDist, CostSplit, DegenerateGapError
from .composite import SystemConfig, AoIState, Assignment, SizeLimitError
from .tabular import TabularModel

__all__ = ["ArmSpec", "ThresholdPolicy", "StationaryDist", "CostSplit", "DegenerateGapError",
           "SystemConfig", "AoIState", "Assignment", "SizeLimitError", "TabularModel"]
