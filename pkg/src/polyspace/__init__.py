"""Exact classification of polygon- and chain-space chambers from edge lengths."""

from .combinatorics import (
    EPS_EARLY,
    EPS_LATE,
    LONG,
    SHORT,
    DomainError,
    GeneticCode,
    LengthVector,
    NongenericError,
    SubsetMask,
    UnsortedError,
    compare_subset_sums,
    down_closure,
    full_short_family,
    genetic_code,
    hook_leq,
    is_generic,
)
from .chambers import (
    PRACTICAL_M,
    BoundExceeded,
    Chamber,
    WallCrossing,
    a_min,
    adjacent_by_pair,
    enumerate_chambers,
    realizable,
    surgery_indices,
    tiny_edge,
    tiny_edge_reduce,
)
from .morse import (
    CheckResult,
    ConnectivityReport,
    EmptyChamber,
    MorseInventory,
    UnknownDescription,
    connectivity,
    euler_boundary_check,
    exceptional_code,
    mdot2_code,
    morse_inventory,
)
from .topology import (
    SpaceExpr,
    SpaceQuery,
    coverage,
    describe,
    equivalent,
    euler_char,
    known_diffeos,
    lineage_order,
    normalize,
    parse,
    render,
    substitute_d,
    table_rows,
)

__version__ = "1.0.0"

__all__ = [
    "EPS_EARLY",
    "EPS_LATE",
    "LONG",
    "SHORT",
    "DomainError",
    "GeneticCode",
    "LengthVector",
    "NongenericError",
    "SubsetMask",
    "UnsortedError",
    "compare_subset_sums",
    "down_closure",
    "full_short_family",
    "genetic_code",
    "hook_leq",
    "is_generic",
    "PRACTICAL_M",
    "BoundExceeded",
    "Chamber",
    "WallCrossing",
    "a_min",
    "adjacent_by_pair",
    "enumerate_chambers",
    "realizable",
    "surgery_indices",
    "tiny_edge",
    "tiny_edge_reduce",
    "CheckResult",
    "ConnectivityReport",
    "EmptyChamber",
    "MorseInventory",
    "UnknownDescription",
    "connectivity",
    "euler_boundary_check",
    "exceptional_code",
    "mdot2_code",
    "morse_inventory",
    "SpaceExpr",
    "SpaceQuery",
    "coverage",
    "describe",
    "equivalent",
    "euler_char",
    "known_diffeos",
    "lineage_order",
    "normalize",
    "parse",
    "render",
    "substitute_d",
    "table_rows",
]
