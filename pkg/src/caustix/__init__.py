"""Off-center reflections of the circle: map, caustics, orbits and mode-locking."""

__version__ = "0.1.0"

from .circle_map import (  # noqa: E402
    DomainError,
    MapClass,
    MapParams,
    Variant,
    critical_points,
    incident_angle,
    iterate_lift,
    map_class,
    map_jet,
    map_lift,
    reflection,
)
from .caustics import CuspKind, caustic_curve, caustic_point, find_cusps  # noqa: E402
from .locking import resonance_interval, rotation_number, staircase  # noqa: E402

__all__ = [
    "__version__",
    "CuspKind",
    "DomainError",
    "MapClass",
    "MapParams",
    "Variant",
    "caustic_curve",
    "caustic_point",
    "critical_points",
    "find_cusps",
    "incident_angle",
    "iterate_lift",
    "map_class",
    "map_jet",
    "map_lift",
    "reflection",
    "resonance_interval",
    "rotation_number",
    "staircase",
]
