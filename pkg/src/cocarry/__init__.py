"""2D human-robot co-transportation simulator with haptic obstacle warnings."""

__version__ = "0.1.0"

from .geometry import Polygon, Pose2D, PoseSE3, Vec2, point_set_min_pair, wrap_angle
from .warning import Region, VibrationCommand, WarningModule

__all__ = [
    "Polygon",
    "Pose2D",
    "PoseSE3",
    "Vec2",
    "point_set_min_pair",
    "wrap_angle",
    "Region",
    "VibrationCommand",
    "WarningModule",
    "__version__",
]
