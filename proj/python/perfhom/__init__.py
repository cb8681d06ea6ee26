"""Perforated-domain homogenization toolkit."""

from ._core import (
    PerfhomError,
    assumption_quantities,
    capacity_ball,
    capacity_extrapolate,
    capacity_variational,
    cell_average_field,
    construct_holes,
    hminus1_norm,
    radius_for_capacity,
    run_study,
    set_num_threads,
    sphere_area,
)

__all__ = [
    "PerfhomError",
    "assumption_quantities",
    "capacity_ball",
    "capacity_extrapolate",
    "capacity_variational",
    "cell_average_field",
    "construct_holes",
    "hminus1_norm",
    "radius_for_capacity",
    "run_study",
    "set_num_threads",
    "sphere_area",
]
