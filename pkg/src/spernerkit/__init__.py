"""Finite Sperner-type combinatorics: grid colourings, box covers, dyadic
subdivision, nerve chains and sign-colouring fixed-point search."""

from .lattice import (
    AKFunction,
    CoordSet,
    GridSet,
    Index,
    ball,
    hat_ball,
    local_lebesgue,
    positive_cube,
    property_M,
    property_M_report,
    sup_distance,
    truncated_add,
)
from .labelings import (
    Colouring,
    SimplicialColouring,
    SimplicialComplexK,
    boundedness_check,
    check_cubical_sperner,
    find_fully_labeled_cell,
    find_rich_cube,
    max_colours_per_cube,
    random_simplicial_labeling,
    random_sperner_colouring,
)

__version__ = "0.1.0"
