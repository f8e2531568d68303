"""Morse bookkeeping on the bounded manifold V_d(a).

The restriction of f(z) = -|sum a_i z_i| to V_d(a) has one critical point
p_J per J in S_m(a), of index (d-1)(|J|-1).  Inventories are computed from
genetic codes via the down-closure, so they are chamber-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .combinatorics import DomainError, GeneticCode, SubsetMask, down_closure


class EmptyChamber(ValueError):
    """The empty chamber has no chain or polygon space to reason about."""


class UnknownDescription(ValueError):
    """The symbolic engine has no description to cross-validate against."""


def exceptional_code(m: int) -> GeneticCode:
    """<{m, m-3, ..., 1}>: the only chamber with a short set of size m-2."""
    return GeneticCode.from_genes(m, [[m] + list(range(1, m - 2))])


def mdot2_code(m: int) -> GeneticCode:
    """<{m, m-3, ..., 2}>: reached from the exceptional chamber by one wall."""
    return GeneticCode.from_genes(m, [[m] + list(range(2, m - 2))])


@dataclass(frozen=True)
class MorseInventory:
    m: int
    d: int
    critical_points: Tuple[Tuple[SubsetMask, int], ...]
    euler_V: int
    histogram: Tuple[Tuple[int, int], ...]  # (index, count), index ascending

    def histogram_dict(self) -> Dict[int, int]:
        return dict(self.histogram)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "points": [
                {"J": sorted(J.elements()), "index": idx} for J, idx in self.critical_points
            ],
            "eulerV": self.euler_V,
            "histogram": {str(k): v for k, v in self.histogram},
        }


def morse_inventory(code: GeneticCode, d: int) -> MorseInventory:
    if d < 2:
        raise DomainError("d must be at least 2")
    points = []
    hist: Dict[int, int] = {}
    euler = 0
    for J in sorted(down_closure(code), key=lambda s: (s.card(), s.bits)):
        idx = (d - 1) * (J.card() - 1)
        points.append((J, idx))
        hist[idx] = hist.get(idx, 0) + 1
        euler += (-1) ** idx
    return MorseInventory(
        code.m, d, tuple(points), euler, tuple(sorted(hist.items()))
    )


@dataclass(frozen=True)
class ConnectivityReport:
    m: int
    d: int
    components: int
    connected_through: Optional[int]  # k: pi_i = 0 for i <= k (None if disconnected)
    note: str = ""


def connectivity(code: GeneticCode, d: int) -> ConnectivityReport:
    """Chain spaces are (d-2)-connected except for the exceptional chamber."""
    if d < 2:
        raise DomainError("d must be at least 2")
    if not code.genes:
        raise EmptyChamber("the trivial chamber has empty spaces")
    m = code.m
    if code == exceptional_code(m):
        if d == 2:
            return ConnectivityReport(m, d, 2, None, "exceptional chamber: two components")
        return ConnectivityReport(
            m, d, 1, d - 3, f"exceptional chamber: pi_{d - 2} = Z from the S^{d - 2} factor"
        )
    return ConnectivityReport(m, d, 1, d - 2, "")


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    chi_boundary: int
    chi_double: int
    detail: str = ""


def euler_boundary_check(code: GeneticCode) -> CheckResult:
    """chi(Ch^2) must be 2*chi(V_2) for odd m and 0 for even m.

    V_2 is a compact (2m-4)-manifold with boundary Ch^2; the classical
    identity chi(boundary W) = 2 chi(W) (odd-dimensional W) or 0 (even) is
    used purely as a cross-check of the symbolic description.
    """
    from . import topology

    expr = topology.describe(code, topology.SpaceQuery.planar())
    chi = topology.euler_char(expr)
    if chi is None:
        raise UnknownDescription(f"no planar description for {code}")
    inv = morse_inventory(code, 2)
    if code.m % 2 == 1:
        expected = 2 * inv.euler_V
        return CheckResult(chi == expected, chi, expected, f"odd m: chi={chi} vs 2*chi(V)={expected}")
    return CheckResult(chi == 0, chi, 0, f"even m: chi={chi} vs 0")
