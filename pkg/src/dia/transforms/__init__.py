from .dissolve import (
    DissolveConfig,
    at_resolution,
    build_dissolver,
    heuristic_dissolve,
)
from .nonshift import (
    NonShiftConfig,
    NonShiftSpec,
    apply_nonshift,
    sample_nonshift_spec,
)
from .shifts import ShiftSet, make_shift_set
from .views import ViewBatch, compose_views

__all__ = [
    "DissolveConfig",
    "NonShiftConfig",
    "NonShiftSpec",
    "ShiftSet",
    "ViewBatch",
    "apply_nonshift",
    "at_resolution",
    "build_dissolver",
    "compose_views",
    "heuristic_dissolve",
    "make_shift_set",
    "sample_nonshift_spec",
]
