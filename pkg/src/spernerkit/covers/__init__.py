"""Box covers of [0,1]^N, the colouring/cover reductions, order witnesses and
the finite replay of the inductive construction."""

from .boxes import (
    BoxCover,
    RationalBox,
    box_diameter,
    label_key,
    region_contains,
    region_contains_box,
    region_diameter,
    region_intersection,
)
from .emulation import EmulationConfig, Trace, audit_trace, emulate_inductive_search
from .reductions import (
    choose_grid_scale,
    colouring_to_cover,
    cover_to_colouring,
    g_sigma,
    grid_image,
    grid_interval,
    grid_point,
    infimum_cube_recovery,
    rich_cube_via_cover,
)
from .witness import (
    covers_unit_cube,
    max_multiplicity_point,
    multiplicity_grid,
    random_open_cover,
    uncovered_point,
)

__all__ = [
    "BoxCover", "RationalBox", "box_diameter", "label_key", "region_contains",
    "region_contains_box", "region_diameter", "region_intersection",
    "EmulationConfig", "Trace", "audit_trace", "emulate_inductive_search",
    "choose_grid_scale", "colouring_to_cover", "cover_to_colouring", "g_sigma", "grid_image", "grid_interval",
    "grid_point", "infimum_cube_recovery", "rich_cube_via_cover",
    "covers_unit_cube", "max_multiplicity_point", "multiplicity_grid",
    "random_open_cover", "uncovered_point",
]
