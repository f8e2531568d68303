"""Exact arithmetic on length vectors, short subsets, the hook order, genetic codes.

A length vector a = (a_1, ..., a_m) is nondecreasing with exact rational
entries.  An entry equal to 0 stands for a symbolic tiny positive value
eps_i (indexed by its position), with eps_1 << eps_2 << ... << every
positive rational gap.  All comparisons are exact; no floats anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

SHORT = "Short"
LONG = "Long"

# How ties between epsilon sets with equal rational part and equal count are
# resolved.  "late": the side holding the largest differing eps index is the
# larger side (later-introduced tiny edges dominate).  "early" is the flipped
# rule, kept only so tests can check the choice never matters.
EPS_LATE = "late"
EPS_EARLY = "early"


class NongenericError(ValueError):
    """Raised when a length vector lies on a wall H_J."""

    def __init__(self, wall):
        self.wall = wall
        super().__init__(f"nongeneric: lies on wall H_{set(wall.elements())}")


class UnsortedError(ValueError):
    """Raised when an operation requires a nondecreasing length vector."""


class DomainError(ValueError):
    """Raised on violated numeric preconditions (e.g. d < 2)."""


@dataclass(frozen=True)
class SubsetMask:
    """A subset J of {1..m}, encoded in the low m bits of a machine word."""

    bits: int
    m: int

    def __post_init__(self):
        if self.bits >> self.m:
            raise DomainError(f"mask 0b{self.bits:b} has bits above position {self.m}")

    @classmethod
    def of(cls, elements: Iterable[int], m: int) -> "SubsetMask":
        bits = 0
        for e in elements:
            if not 1 <= e <= m:
                raise DomainError(f"element {e} outside 1..{m}")
            bits |= 1 << (e - 1)
        return cls(bits, m)

    def elements(self) -> Iterator[int]:
        b = self.bits
        while b:
            low = b & -b
            yield low.bit_length()
            b ^= low

    def card(self) -> int:
        return bin(self.bits).count("1")

    def contains(self, e: int) -> bool:
        return bool(self.bits >> (e - 1) & 1)

    def complement(self) -> "SubsetMask":
        return SubsetMask(((1 << self.m) - 1) ^ self.bits, self.m)

    def digits(self) -> str:
        """Digit-string abbreviation, descending (paper convention, m <= 9)."""
        if self.m > 9:
            return "{" + ",".join(str(e) for e in sorted(self.elements(), reverse=True)) + "}"
        return "".join(str(e) for e in sorted(self.elements(), reverse=True))

    def __iter__(self):
        return self.elements()


@dataclass(frozen=True)
class LengthVector:
    """Exact nonnegative rational edge lengths; zeros denote tiny eps values."""

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))
        if self.m < 3:
            raise DomainError("need at least 3 edges")
        if any(e < 0 for e in self.entries):
            raise DomainError("entries must be nonnegative")
        if sum(1 for e in self.entries if e >= 0) < 3:
            raise DomainError("need at least three edges")

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def sorted(self) -> bool:
        return all(self.entries[i] <= self.entries[i + 1] for i in range(self.m - 1))

    @classmethod
    def parse(cls, text: str) -> "LengthVector":
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError("empty length vector")
        try:
            return cls(tuple(Fraction(p) for p in parts))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse length vector {text!r}: {exc}") from None

    def sort(self) -> "LengthVector":
        return LengthVector(tuple(sorted(self.entries)))

    def scale(self, c) -> "LengthVector":
        c = Fraction(c)
        if c <= 0:
            raise DomainError("scale factor must be positive")
        return LengthVector(tuple(c * e for e in self.entries))

    def __str__(self):
        return "(" + ",".join(str(e) for e in self.entries) + ")"


def _side_sum(a: LengthVector, bits: int):
    """Rational part plus sorted eps positions of one side of a wall."""
    rat = Fraction(0)
    eps = []
    for i in range(a.m):
        if bits >> i & 1:
            if a.entries[i] == 0:
                eps.append(i + 1)
            else:
                rat += a.entries[i]
    return rat, eps


def compare_subset_sums(a: LengthVector, J: SubsetMask, tie_break: str = EPS_LATE) -> str:
    """Short iff sum over J < sum over the complement, under the eps convention."""
    if J.m != a.m:
        raise DomainError("subset and vector sizes differ")
    rj, ej = _side_sum(a, J.bits)
    rc, ec = _side_sum(a, J.complement().bits)
    if rj != rc:
        return SHORT if rj < rc else LONG
    if len(ej) != len(ec):
        # fewer tiny values => smaller side (eps sum < any rational gap)
        return SHORT if len(ej) < len(ec) else LONG
    diff = set(ej) ^ set(ec)
    if not diff:  # both sides eps-free: exactly on the wall
        raise NongenericError(J)
    top = max(diff)
    j_holds_top = top in ej
    if tie_break == EPS_EARLY:
        j_holds_top = not j_holds_top
    return LONG if j_holds_top else SHORT


def is_generic(a: LengthVector, tie_break: str = EPS_LATE) -> bool:
    """No subset sum equals its complement's sum (exhaustive over 2^(m-1) walls)."""
    for bits in range(1, 1 << (a.m - 1)):  # one representative per complementary pair
        try:
            compare_subset_sums(a, SubsetMask(bits, a.m), tie_break)
        except NongenericError:
            return False
    return True


def hook_leq(A: SubsetMask, B: SubsetMask) -> bool:
    """A is hook-below B: the i-th largest of A is <= the i-th largest of B.

    Injective reading of the paper's nondecreasing map phi: A -> B, phi(x) >= x.
    """
    if A.card() > B.card():
        return False
    xs = sorted(A.elements(), reverse=True)
    ys = sorted(B.elements(), reverse=True)
    return all(x <= y for x, y in zip(xs, ys))


def _hook_leq_bits(a: int, b: int) -> bool:
    # bitmask fast path used by the enumeration inner loops
    if bin(a).count("1") > bin(b).count("1"):
        return False
    xs = []
    ys = []
    i = 0
    aa, bb = a, b
    while aa or bb:
        if aa & 1:
            xs.append(i)
        if bb & 1:
            ys.append(i)
        aa >>= 1
        bb >>= 1
        i += 1
    xs.reverse()
    ys.reverse()
    return all(x <= y for x, y in zip(xs, ys))


def _gene_sort_key(bits: int):
    # canonical order: cardinality descending, then descending lex of the
    # descending digit sequence (e.g. <621,64>, <7421,761>)
    digits = []
    i = bits.bit_length()
    while i > 0:
        if bits >> (i - 1) & 1:
            digits.append(i)
        i -= 1
    return (-len(digits), tuple(-d for d in digits))


@dataclass(frozen=True)
class GeneticCode:
    """The hook-maximal short subsets containing m, in canonical order."""

    m: int
    genes: tuple  # tuple[SubsetMask, ...]

    def __post_init__(self):
        for g in self.genes:
            if g.m != self.m:
                raise DomainError("gene ambient size mismatch")
            if not g.contains(self.m):
                raise DomainError(f"gene {g.digits()} does not contain {self.m}")
        for g in self.genes:
            for h in self.genes:
                if g is not h and hook_leq(g, h):
                    raise DomainError("genes must form a hook antichain")
        want = tuple(sorted(self.genes, key=lambda g: _gene_sort_key(g.bits)))
        if self.genes != want:
            raise DomainError("genes not in canonical order")

    @classmethod
    def from_genes(cls, m: int, gene_sets: Iterable[Iterable[int]]) -> "GeneticCode":
        masks = [SubsetMask.of(g, m) for g in gene_sets]
        return cls(m, tuple(sorted(masks, key=lambda g: _gene_sort_key(g.bits))))

    @classmethod
    def from_bits(cls, m: int, gene_bits: Iterable[int]) -> "GeneticCode":
        masks = [SubsetMask(b, m) for b in gene_bits]
        return cls(m, tuple(sorted(masks, key=lambda g: _gene_sort_key(g.bits))))

    @classmethod
    def parse(cls, text: str, m: Optional[int] = None) -> "GeneticCode":
        """Parse "<621,64>" (angle brackets optional).  m defaults to the top digit."""
        body = text.strip()
        body = re.sub(r"^[<⟨]|[>⟩]$", "", body).strip()
        if not body:
            if m is None:
                raise ValueError("empty code needs an explicit m")
            return cls(m, ())
        genes = []
        for chunk in body.split(","):
            chunk = chunk.strip()
            if not chunk.isdigit():
                raise ValueError(f"bad gene {chunk!r}")
            genes.append([int(ch) for ch in chunk])
        top = max(max(g) for g in genes)
        if m is None:
            m = top
        return cls.from_genes(m, genes)

    def sort_key(self):
        return tuple(tuple(sorted(g.elements(), reverse=True)) for g in self.genes)

    def __str__(self):
        return "⟨" + ",".join(g.digits() for g in self.genes) + "⟩"


def genetic_code(a: LengthVector, tie_break: str = EPS_LATE) -> GeneticCode:
    """Hook-maximal short sets containing m.  Requires a sorted and generic."""
    if not a.sorted:
        raise UnsortedError(f"{a} is not nondecreasing")
    m = a.m
    mbit = 1 << (m - 1)
    short_m = []
    for bits in range(1, 1 << m):
        if bits & mbit:
            if compare_subset_sums(a, SubsetMask(bits, m), tie_break) == SHORT:
                short_m.append(bits)
    # force full genericity, not just on the walls through m
    for bits in range(1, 1 << (m - 1)):
        compare_subset_sums(a, SubsetMask(bits, m), tie_break)
    genes = [s for s in short_m if not any(t != s and _hook_leq_bits(s, t) for t in short_m)]
    return GeneticCode.from_bits(m, genes)


def down_closure(code: GeneticCode) -> frozenset:
    """S_m(alpha): every J containing m hook-below some gene."""
    m = code.m
    mbit = 1 << (m - 1)
    gene_bits = [g.bits for g in code.genes]
    out = set()
    for bits in range(1, 1 << m):
        if bits & mbit and any(_hook_leq_bits(bits, g) for g in gene_bits):
            out.add(SubsetMask(bits, m))
    return frozenset(out)


def full_short_family(code: GeneticCode) -> frozenset:
    """S(alpha): S_m plus every m-free J whose complement is not in S_m."""
    m = code.m
    sm = down_closure(code)
    sm_bits = {J.bits for J in sm}
    full = (1 << m) - 1
    out = set(sm)
    mbit = 1 << (m - 1)
    for bits in range(0, 1 << m):
        if not bits & mbit and (full ^ bits) not in sm_bits:
            out.add(SubsetMask(bits, m))
    return frozenset(out)
