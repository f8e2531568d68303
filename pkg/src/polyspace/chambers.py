"""Chamber realizability, enumeration, minimal representatives, wall adjacency.

Chambers of the sorted cone are keyed by genetic codes.  Realizability is
decided by an exact rational phase-1 simplex over the wall inequalities,
with every strict inequality replaced by a unit slack (valid because the
system is homogeneous).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

from .combinatorics import (
    DomainError,
    GeneticCode,
    LengthVector,
    SubsetMask,
    _gene_sort_key,
    _hook_leq_bits,
    down_closure,
)

PRACTICAL_M = 9
WORKERS_ENV = "POLYSPACE_WORKERS"


class BoundExceeded(ValueError):
    """Enumeration requested beyond the supported edge count."""


def _feasible(cons: List[Tuple[List[Fraction], Fraction]], n: int) -> Optional[List[Fraction]]:
    """Exact phase-1 simplex for {x >= 0, row . x >= rhs}; returns a point or None."""
    rows = []
    for coeffs, rhs in cons:
        c = [Fraction(x) for x in coeffs]
        r = Fraction(rhs)
        if r < 0:
            c = [-x for x in c]
            r = -r
            slack = 1  # flipped to <=: Ax + s = b
        else:
            slack = -1  # Ax - s = b
        rows.append((c, r, slack))
    mr = len(rows)
    nv = n + mr + mr  # x, slacks, artificials
    T = []
    basis = []
    for i, (c, r, slack) in enumerate(rows):
        row = c + [Fraction(0)] * (mr + mr) + [r]
        row[n + i] = Fraction(slack)
        row[n + mr + i] = Fraction(1)
        T.append(row)
        basis.append(n + mr + i)
    obj = [Fraction(0)] * (nv + 1)
    for row in T:  # minimize sum of artificials: objective = -sum(rows)
        for j in range(nv + 1):
            obj[j] -= row[j]
    for j in range(n + mr, nv):
        obj[j] += Fraction(1)
    while True:
        # Bland's rule: smallest index with negative reduced cost
        pivot_col = next((j for j in range(nv) if obj[j] < 0), None)
        if pivot_col is None:
            break
        pivot_row = None
        best = None
        for i, row in enumerate(T):
            if row[pivot_col] > 0:
                ratio = row[nv] / row[pivot_col]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[pivot_row]):
                    best = ratio
                    pivot_row = i
        if pivot_row is None:
            return None  # unbounded phase-1 cannot happen; defensive
        piv = T[pivot_row][pivot_col]
        T[pivot_row] = [v / piv for v in T[pivot_row]]
        for i in range(mr):
            if i != pivot_row and T[i][pivot_col] != 0:
                f = T[i][pivot_col]
                T[i] = [a - f * b for a, b in zip(T[i], T[pivot_row])]
        if obj[pivot_col] != 0:
            f = obj[pivot_col]
            obj = [a - f * b for a, b in zip(obj, T[pivot_row])]
        basis[pivot_row] = pivot_col
    if -obj[nv] != 0:  # leftover artificial mass: infeasible
        return None
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = T[i][nv]
    return x


def _wall_row(bits: int, m: int) -> List[Fraction]:
    # coefficients of 2*sum_J - total
    return [Fraction(2 if bits >> i & 1 else 0) - 1 for i in range(m)]


def _hook_minimal_nonmembers(closure_bits: frozenset, m: int) -> List[int]:
    mbit = 1 << (m - 1)
    nonmembers = [b for b in range(1, 1 << m) if b & mbit and b not in closure_bits]
    return [
        b
        for b in nonmembers
        if not any(t != b and _hook_leq_bits(t, b) for t in nonmembers)
    ]


def _realizable_bits(gene_bits: Tuple[int, ...], m: int) -> Optional[List[Fraction]]:
    closure = frozenset(
        b
        for b in range(1, 1 << m)
        if b & (1 << (m - 1)) and any(_hook_leq_bits(b, g) for g in gene_bits)
    )
    cons = []
    row = [Fraction(0)] * m
    row[0] = Fraction(1)
    cons.append((row, Fraction(1)))  # a_1 >= 1 fixes the scale
    for i in range(m - 1):
        row = [Fraction(0)] * m
        row[i], row[i + 1] = Fraction(-1), Fraction(1)
        cons.append((row, Fraction(0)))
    for g in gene_bits:
        cons.append(([-c for c in _wall_row(g, m)], Fraction(1)))  # strictly short
    for b in _hook_minimal_nonmembers(closure, m):
        cons.append((_wall_row(b, m), Fraction(1)))  # strictly long
    return _feasible(cons, m)


def realizable(code: GeneticCode) -> Optional[LengthVector]:
    """A strictly positive sorted rational witness of the chamber, or None."""
    point = _realizable_bits(tuple(g.bits for g in code.genes), code.m)
    return None if point is None else LengthVector(tuple(point))


@dataclass(frozen=True)
class Chamber:
    code: GeneticCode
    m: int
    witness: LengthVector
    _a_min_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def a_min(self) -> LengthVector:
        if "v" not in self._a_min_cache:
            self._a_min_cache["v"] = a_min(self.code)
        return self._a_min_cache["v"]

    def to_line(self) -> str:
        return f"{self.code} m={self.m} a_min={','.join(str(e) for e in self.a_min.entries)}"

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "genes": [sorted(g.elements(), reverse=True) for g in self.code.genes],
            "aMin": [str(e) for e in self.a_min.entries],
            "witness": [str(e) for e in self.witness.entries],
        }


@dataclass(frozen=True)
class WallCrossing:
    from_code: GeneticCode
    to_code: GeneticCode
    J: SubsetMask

    def indices(self, d: int) -> Tuple[int, int]:
        return surgery_indices(self.J, self.from_code.m, d)


def _antichain_candidates(m: int) -> Iterator[Tuple[int, ...]]:
    """Grow hook antichains of subsets containing m, in canonical order.

    Prunes by the antichain property and by the necessary condition that no
    gene's complement is hook-below a gene (else some subset would need to
    be both short and long).
    """
    mbit = 1 << (m - 1)
    full = (1 << m) - 1
    pool = sorted((b for b in range(1, 1 << m) if b & mbit), key=_gene_sort_key)
    yield ()

    def extend(prefix: Tuple[int, ...], start: int):
        for idx in range(start, len(pool)):
            cand = pool[idx]
            if any(_hook_leq_bits(cand, g) or _hook_leq_bits(g, cand) for g in prefix):
                continue
            genes = prefix + (cand,)
            if any(
                _hook_leq_bits(full ^ g, h) for g in genes for h in genes
            ):
                continue
            yield genes
            yield from extend(genes, idx + 1)

    yield from extend((), 0)


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _confirm(args):
    genes, m = args
    point = _realizable_bits(genes, m)
    return genes, point


@lru_cache(maxsize=None)
def _enumerate_cached(m: int) -> Tuple[Chamber, ...]:
    jobs = [(genes, m) for genes in _antichain_candidates(m)]
    workers = _worker_count()
    if workers > 1 and len(jobs) > 64:
        import multiprocessing

        with multiprocessing.Pool(workers) as pool:
            results = pool.map(_confirm, jobs)
    else:
        results = [_confirm(j) for j in jobs]
    chambers = []
    for genes, point in results:
        if point is None:
            continue
        code = GeneticCode.from_bits(m, genes)
        chambers.append(Chamber(code, m, LengthVector(tuple(point))))
    chambers.sort(key=lambda c: c.code.sort_key())
    return tuple(chambers)


def enumerate_chambers(m: int, unsafe_large_m: bool = False) -> List[Chamber]:
    """All chambers of the sorted cone for m edges, in canonical code order."""
    if m < 3:
        raise DomainError("m must be at least 3")
    if m > PRACTICAL_M and not unsafe_large_m:
        raise BoundExceeded(f"m={m} beyond the practical bound {PRACTICAL_M}")
    return list(_enumerate_cached(m))


def _nondecreasing_vectors(m: int, total: int) -> Iterator[Tuple[int, ...]]:
    def rec(prefix, minv, rem, slots):
        if slots == 0:
            if rem == 0:
                yield tuple(prefix)
            return
        v = minv
        while v * slots <= rem:
            prefix.append(v)
            yield from rec(prefix, v, rem - v, slots - 1)
            prefix.pop()
            v += 1

    yield from rec([], 0, total, m)


def integral_code(vec: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
    """Gene bitmasks of an integer vector, or None if it lies on any wall.

    Zeros count as exact zeros here: a usable integral representative may not
    produce a single subset-sum tie (conventional-representative rule; the
    genetic code is then unambiguous and eps-free).
    """
    m = len(vec)
    total = sum(vec)
    if total == 0:
        return None
    mbit = 1 << (m - 1)
    short_m = []
    for bits in range(1, 1 << m):
        s = 0
        b = bits
        i = 0
        while b:
            if b & 1:
                s += vec[i]
            b >>= 1
            i += 1
        if 2 * s == total:
            return None
        if bits & mbit and 2 * s < total:
            short_m.append(bits)
    return tuple(
        sorted(
            (s for s in short_m if not any(t != s and _hook_leq_bits(s, t) for t in short_m)),
            key=_gene_sort_key,
        )
    )


def a_min(code: GeneticCode) -> LengthVector:
    """Minimal integral representative: smallest total sum, then lex order.

    Scans nondecreasing integer vectors (leading zeros allowed, standing for
    tiny values); a candidate is accepted when it avoids every wall and its
    genetic code equals the input.
    """
    m = code.m
    want = tuple(sorted((g.bits for g in code.genes), key=_gene_sort_key))
    total = 1
    while True:
        for vec in _nondecreasing_vectors(m, total):
            if integral_code(vec) == want:
                return LengthVector(tuple(Fraction(v) for v in vec))
        total += 1
        if total > 16 * m * m:  # witness clearing denominators bounds the search
            raise RuntimeError(f"no integral representative found for {code}")


def tiny_edge(code: GeneticCode) -> GeneticCode:
    """The + map: increment every gene element and adjoin 1 to each gene."""
    m = code.m
    new_genes = []
    for g in code.genes:
        new_genes.append([e + 1 for e in g.elements()] + [1])
    return GeneticCode.from_genes(m + 1, new_genes)


def tiny_edge_reduce(code: GeneticCode) -> Optional[GeneticCode]:
    """Left inverse of tiny_edge: defined when every gene contains 1."""
    if not code.genes:
        return None
    if any(not g.contains(1) for g in code.genes):
        return None
    reduced = [[e - 1 for e in g.elements() if e > 1] for g in code.genes]
    return GeneticCode.from_genes(code.m - 1, reduced)


def adjacent_by_pair(from_code: GeneticCode, to_code: GeneticCode) -> Optional[SubsetMask]:
    """J with S_m(to) = S_m(from) + {J}, if the closures differ by one set."""
    if from_code.m != to_code.m:
        raise DomainError("codes live on different m")
    A = down_closure(from_code)
    B = down_closure(to_code)
    if A < B and len(B - A) == 1:
        (J,) = B - A
        return J
    return None


def surgery_indices(J: SubsetMask, m: int, d: int) -> Tuple[int, int]:
    """(A, B) with A = (d-1)(|J|-1)-1 and B = (m-1-|J|)(d-1)."""
    k = J.card()
    if not J.contains(m):
        raise DomainError("wall subset must contain m")
    if not 2 <= k <= m - 2:
        raise DomainError(f"|J|={k} outside 2..{m - 2}")
    if d < 2:
        raise DomainError("d must be at least 2")
    return (d - 1) * (k - 1) - 1, (m - 1 - k) * (d - 1)
