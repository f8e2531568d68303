"""Symbolic manifold expressions and the chamber description engine.

Expressions carry dimensions as linear forms k*(d-1)+c, so chain-space
formulas stay symbolic in d; planar (d=2) and numeric chain queries are
obtained by substitution.  The engine assigns descriptions by breadth-first
propagation from the base-case chambers through the two rewrite rules
(adding a tiny edge; crossing a wall H_J with |J| = 2).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

from .chambers import (
    BoundExceeded,
    adjacent_by_pair,
    enumerate_chambers,
    tiny_edge,
    tiny_edge_reduce,
)
from .combinatorics import DomainError, GeneticCode, down_closure
from .morse import exceptional_code, mdot2_code

# ---------------------------------------------------------------------------
# expression nodes; dimensions are pairs (k, c) meaning k*(d-1)+c


class SpaceExpr:
    def dim(self) -> Optional[Tuple[int, int]]:
        raise NotImplementedError


@dataclass(frozen=True)
class Empty(SpaceExpr):
    def dim(self):
        return None


@dataclass(frozen=True)
class Point(SpaceExpr):
    def dim(self):
        return (0, 0)


@dataclass(frozen=True)
class Sphere(SpaceExpr):
    k: int
    c: int

    @classmethod
    def num(cls, n: int) -> "Sphere":
        return cls(0, n)

    def dim(self):
        return (self.k, self.c)


@dataclass(frozen=True)
class Torus(SpaceExpr):
    n: int

    def dim(self):
        return (0, self.n)


@dataclass(frozen=True)
class Surface(SpaceExpr):
    genus: int

    def dim(self):
        return (0, 2)


@dataclass(frozen=True)
class CP(SpaceExpr):
    n: int

    def dim(self):
        return (0, 2 * self.n)


@dataclass(frozen=True)
class CPbar(SpaceExpr):
    """Orientation-reversed CP^n; only meaningful as a connected-sum summand."""

    n: int

    def dim(self):
        return (0, 2 * self.n)


@dataclass(frozen=True)
class Product(SpaceExpr):
    children: tuple

    def dim(self):
        total = (0, 0)
        for ch in self.children:
            d = ch.dim()
            if d is None:
                return None
            total = (total[0] + d[0], total[1] + d[1])
        return total


@dataclass(frozen=True)
class ConnSum(SpaceExpr):
    children: tuple

    def dim(self):
        return self.children[0].dim() if self.children else None


@dataclass(frozen=True)
class Disjoint(SpaceExpr):
    children: tuple

    def dim(self):
        return self.children[0].dim() if self.children else None


@dataclass(frozen=True)
class TwistedS2(SpaceExpr):
    """S^2 x_{S^1} X for a free-circle-action space X (= double of the
    associated disk bundle).  quotient_chi memoizes chi(X / S^1) when the
    engine knows it; it is bookkeeping only and ignored by equality."""

    inner: SpaceExpr
    quotient_chi: Optional[int] = field(default=None, compare=False)

    def dim(self):
        d = self.inner.dim()
        return None if d is None else (d[0], d[1] + 1)


@dataclass(frozen=True)
class OpaqueB3(SpaceExpr):
    """The surgered product of the <{m,m-3,...,2}> chain space:
    [((S^{d-1})^{m-3} \\ B) x S^{d-2}] u_{dB x S^{d-2}} (dB x D^{d-1})."""

    m: int
    d: Optional[int] = None  # None = symbolic d

    def dim(self):
        if self.d is None:
            return (self.m - 2, -1)
        return (0, (self.m - 2) * (self.d - 1) - 1)


@dataclass(frozen=True)
class Unknown(SpaceExpr):
    reason: str = field(default="", compare=False)

    def dim(self):
        return None


# ---------------------------------------------------------------------------
# structural ordering key (deterministic, independent of rendering)


def _key(x: SpaceExpr):
    if isinstance(x, Empty):
        return ("A-empty",)
    if isinstance(x, Point):
        return ("B-pt",)
    if isinstance(x, Sphere):
        return ("S", x.k, -x.c if x.k else x.c)
    if isinstance(x, Torus):
        return ("T", x.n)
    if isinstance(x, Surface):
        return ("Sg", x.genus)
    if isinstance(x, CP):
        return ("CP", x.n)
    if isinstance(x, CPbar):
        return ("CPbar", x.n)
    if isinstance(x, Product):
        return ("P",) + tuple(_key(c) for c in x.children)
    if isinstance(x, ConnSum):
        return ("CS",) + tuple(_key(c) for c in x.children)
    if isinstance(x, Disjoint):
        return ("D",) + tuple(_key(c) for c in x.children)
    if isinstance(x, TwistedS2):
        return ("TW", _key(x.inner))
    if isinstance(x, OpaqueB3):
        return ("B3", x.m, -1 if x.d is None else x.d)
    return ("U",)


def _product_group(x: SpaceExpr) -> int:
    # product factor order: CP/torus/surface, then spheres, then sum-like tails
    if isinstance(x, (CP, Torus, Surface, CPbar, Point)):
        return 0
    if isinstance(x, Sphere):
        return 1
    return 2


def _sum_rank(x: SpaceExpr) -> int:
    # connected-sum summand order, tuned to the printed tables
    if isinstance(x, CP):
        return 0
    if isinstance(x, (Torus, Surface)):
        return 1
    if isinstance(x, TwistedS2):
        return 2
    if isinstance(x, OpaqueB3):
        return 3
    if isinstance(x, Product):
        return 4 if any(not isinstance(c, Sphere) for c in x.children) else 5
    if isinstance(x, Sphere):
        return 6
    if isinstance(x, CPbar):
        return 9
    return 7


# ---------------------------------------------------------------------------
# normalization


def normalize(x: SpaceExpr) -> SpaceExpr:
    if isinstance(x, Product):
        return _norm_product([normalize(c) for c in x.children])
    if isinstance(x, ConnSum):
        return _norm_connsum([normalize(c) for c in x.children])
    if isinstance(x, Disjoint):
        kids = []
        for c in x.children:
            c = normalize(c)
            if isinstance(c, Disjoint):
                kids.extend(c.children)
            elif not isinstance(c, Empty):
                kids.append(c)
        if not kids:
            return Empty()
        if len(kids) == 1:
            return kids[0]
        return Disjoint(tuple(sorted(kids, key=_key)))
    if isinstance(x, TwistedS2):
        return TwistedS2(normalize(x.inner), x.quotient_chi)
    if isinstance(x, Torus):
        return Sphere.num(1) if x.n == 1 else x
    if isinstance(x, Surface):
        if x.genus == 0:
            return Sphere.num(2)
        if x.genus == 1:
            return Torus(2)
        return x
    if isinstance(x, CP) and x.n == 0:
        return Point()
    if isinstance(x, OpaqueB3) and x.d == 2:
        return _norm_connsum([Torus(x.m - 3), Torus(x.m - 3)]) if x.m >= 5 else _b3_small(x.m)
    return x


def _b3_small(m: int) -> SpaceExpr:
    # m=4 degenerates to the <m> chamber: B3(4,2) = S^1 # S^1 = S^1
    return Sphere.num(1)


def _norm_product(kids: List[SpaceExpr]) -> SpaceExpr:
    flat: List[SpaceExpr] = []
    for c in kids:
        if isinstance(c, Product):
            flat.extend(c.children)
        elif isinstance(c, Point):
            continue
        else:
            flat.append(c)
    if any(isinstance(c, Empty) for c in flat):
        return Empty()
    if any(isinstance(c, Unknown) for c in flat):
        return Unknown()
    for i, c in enumerate(flat):  # distribute over disjoint unions
        if isinstance(c, Disjoint):
            rest = flat[:i] + flat[i + 1 :]
            return normalize(
                Disjoint(tuple(Product(tuple(rest + [piece])) for piece in c.children))
            )
    for i, c in enumerate(flat):  # X x S^0 = X u X
        if isinstance(c, Sphere) and (c.k, c.c) == (0, 0):
            rest = flat[:i] + flat[i + 1 :]
            if not rest:
                return c
            dup = Product(tuple(rest))
            return normalize(Disjoint((dup, dup)))
    circles = 0
    others: List[SpaceExpr] = []
    for c in flat:
        if isinstance(c, Sphere) and (c.k, c.c) == (0, 1):
            circles += 1
        elif isinstance(c, Torus):
            circles += c.n
        else:
            others.append(c)
    if circles >= 2:
        others.append(Torus(circles))
    elif circles == 1:
        others.append(Sphere.num(1))
    if not others:
        return Point()
    if len(others) == 1:
        return others[0]
    others.sort(key=lambda f: (_product_group(f), _key(f)))
    return Product(tuple(others))


def _norm_connsum(kids: List[SpaceExpr]) -> SpaceExpr:
    flat: List[SpaceExpr] = []
    for c in kids:
        if isinstance(c, ConnSum):
            flat.extend(c.children)
        else:
            flat.append(c)
    if any(isinstance(c, Unknown) for c in flat):
        return Unknown()
    # CP^1 and its reversal are 2-spheres once they sit inside a sum
    flat = [
        Sphere.num(2) if isinstance(c, (CP, CPbar)) and c.n == 1 else c for c in flat
    ]
    if not flat:
        raise DomainError("empty connected sum")
    dims = {c.dim() for c in flat}
    if len(dims) != 1 or None in dims:
        raise DomainError(f"connected sum of mismatched dimensions: {dims}")
    (dim,) = dims
    if dim == (0, 2):  # surfaces: genus arithmetic
        genus = 0
        for c in flat:
            if isinstance(c, Sphere):
                continue
            if isinstance(c, Torus) and c.n == 2:
                genus += 1
            elif isinstance(c, Surface):
                genus += c.genus
            else:
                raise DomainError(f"non-surface summand in dimension 2: {c}")
        return normalize(Surface(genus))
    solid = [c for c in flat if not isinstance(c, Sphere)]
    if not solid:
        return Sphere(*dim)
    if len(solid) == 1:
        return solid[0]
    solid.sort(key=lambda c: (_sum_rank(c), _key(c)))
    return ConnSum(tuple(solid))


def substitute_d(x: SpaceExpr, d: int) -> SpaceExpr:
    """Evaluate all symbolic dimensions at a numeric d >= 2 and renormalize."""
    if d < 2:
        raise DomainError("d must be at least 2")

    def sub(y: SpaceExpr) -> SpaceExpr:
        if isinstance(y, Sphere):
            return Sphere.num(y.k * (d - 1) + y.c)
        if isinstance(y, Product):
            return Product(tuple(sub(c) for c in y.children))
        if isinstance(y, ConnSum):
            return ConnSum(tuple(sub(c) for c in y.children))
        if isinstance(y, Disjoint):
            return Disjoint(tuple(sub(c) for c in y.children))
        if isinstance(y, TwistedS2):
            return TwistedS2(sub(y.inner), y.quotient_chi)
        if isinstance(y, OpaqueB3) and y.d is None:
            return OpaqueB3(y.m, d)
        return y

    return normalize(sub(x))


# ---------------------------------------------------------------------------
# Euler characteristic calculus


def _sphere_chi(dim: Tuple[int, int]) -> Optional[int]:
    k, c = dim
    if k % 2 == 0:  # k(d-1) even for every d only when k is even
        return 1 + (-1) ** (c % 2)
    return None


def euler_char(x: SpaceExpr) -> Optional[int]:
    if isinstance(x, Empty):
        return 0
    if isinstance(x, Point):
        return 1
    if isinstance(x, Sphere):
        return _sphere_chi((x.k, x.c))
    if isinstance(x, Torus):
        return 0
    if isinstance(x, Surface):
        return 2 - 2 * x.genus
    if isinstance(x, (CP, CPbar)):
        return x.n + 1
    if isinstance(x, Product):
        vals = [euler_char(c) for c in x.children]
        if any(v == 0 for v in vals):
            return 0
        if any(v is None for v in vals):
            return None
        out = 1
        for v in vals:
            out *= v
        return out
    if isinstance(x, Disjoint):
        vals = [euler_char(c) for c in x.children]
        return None if any(v is None for v in vals) else sum(vals)
    if isinstance(x, ConnSum):
        vals = [euler_char(c) for c in x.children]
        sphere = _sphere_chi(x.dim())
        if any(v is None for v in vals) or sphere is None:
            return None
        return sum(vals) - (len(vals) - 1) * sphere
    if isinstance(x, TwistedS2):
        # the double of the disk bundle over the quotient; the boundary
        # (the inner space) is odd-dimensional in every engine use
        return None if x.quotient_chi is None else 2 * x.quotient_chi
    if isinstance(x, OpaqueB3):
        if x.d is None:
            return None
        n, d = x.m - 3, x.d
        chi_X = _sphere_chi((0, d - 1)) ** n  # chi((S^{d-1})^{m-3})
        chi_bB = _sphere_chi((0, n * (d - 1) - 1))
        chi_S2 = _sphere_chi((0, d - 2))
        # glue [(X \ B) x S^{d-2}] and [bB x D^{d-1}] along bB x S^{d-2}
        return (chi_X - 1 + chi_bB) * chi_S2 + chi_bB - chi_bB * chi_S2
    return None


# ---------------------------------------------------------------------------
# rendering


def _dim_str(k: int, c: int) -> str:
    if k == 0:
        return str(c)
    head = "d-1" if k == 1 else f"{k}(d-1)"
    if c == 0:
        return head
    if k == 1 and c == -1:
        return "d-2"
    return f"{head}{c:+d}"


_ATOM, _PROD, _SUM, _DISJ = 3, 2, 1, 0


def _render(x: SpaceExpr) -> Tuple[str, int]:
    if isinstance(x, Empty):
        return "empty", _ATOM
    if isinstance(x, Point):
        return "pt", _ATOM
    if isinstance(x, Unknown):
        return "?", _ATOM
    if isinstance(x, Sphere):
        if x.k == 0:
            return f"S^{x.c}", _ATOM
        return "S^{" + _dim_str(x.k, x.c) + "}", _ATOM
    if isinstance(x, Torus):
        return f"T^{x.n}", _ATOM
    if isinstance(x, Surface):
        return f"Sigma_{x.genus}", _ATOM
    if isinstance(x, CP):
        return f"CP^{x.n}", _ATOM
    if isinstance(x, CPbar):
        return f"~CP^{x.n}", _ATOM
    if isinstance(x, OpaqueB3):
        return f"B3({x.m},{'d' if x.d is None else x.d})", _ATOM
    if isinstance(x, TwistedS2):
        inner, _ = _render(x.inner)
        return "S2x_{S1}(" + inner + ")", _ATOM
    if isinstance(x, Product):
        parts = []
        i = 0
        kids = list(x.children)
        while i < len(kids):
            j = i
            while j < len(kids) and kids[j] == kids[i]:
                j += 1
            s, lvl = _render(kids[i])
            if j - i >= 2:
                parts.append(f"({s})^{j - i}")
            else:
                parts.append(s if lvl >= _ATOM else f"({s})")
            i = j
        if len(parts) == 1:  # a single power group "(X)^k" is self-delimiting
            return parts[0], _ATOM
        return " x ".join(parts), _PROD
    if isinstance(x, ConnSum):
        parts = []
        i = 0
        kids = list(x.children)
        while i < len(kids):
            j = i
            while j < len(kids) and kids[j] == kids[i]:
                j += 1
            s, lvl = _render(kids[i])
            if j - i >= 2:
                parts.append(f"{j - i}({s})")
            else:
                parts.append(s if lvl >= _ATOM else f"({s})")
            i = j
        if len(parts) == 1:
            return parts[0], _ATOM
        return " # ".join(parts), _SUM
    if isinstance(x, Disjoint):
        parts = []
        for c in x.children:
            s, lvl = _render(c)
            parts.append(s if lvl >= _SUM else f"({s})")
        return " u ".join(parts), _DISJ
    raise DomainError(f"cannot render {x!r}")


_UNICODE_SUBS = [(" x ", " × "), (" # ", " ♯ "), (" u ", " ⊔ "), ("Sigma_", "Σ_"), ("~CP", "C̄P")]


def render(x: SpaceExpr, style: str = "ascii") -> str:
    s, _ = _render(x)
    if style == "unicode":
        for a, b in _UNICODE_SUBS:
            s = s.replace(a, b)
    elif style != "ascii":
        raise DomainError(f"unknown style {style!r}")
    return s


# ---------------------------------------------------------------------------
# parsing (inverse of ascii render, up to normalization)

_TOKEN_RE = re.compile(
    r"""\s*(
        S2x_\{S1\}\(      |
        S\^\{[^}]*\}      |
        S\^\d+            |
        T\^\d+            |
        Sigma_\d+         |
        ~CP\^\d+          |
        CP\^\d+           |
        B3\(\d+,(?:d|\d+)\) |
        pt | empty | \?   |
        \d+\(             |
        \^\d+             |
        [()#xu]
    )""",
    re.VERBOSE,
)


def _parse_dim(text: str) -> Tuple[int, int]:
    text = text.strip()
    if re.fullmatch(r"-?\d+", text):
        return (0, int(text))
    m = re.fullmatch(r"(?:(\d+)\()?d-1\)?([+-]\d+)?", text)
    if m and (m.group(1) is None) == ("(" not in text):
        k = int(m.group(1)) if m.group(1) else 1
        return (k, int(m.group(2) or 0))
    if text == "d-2":
        return (1, -1)
    raise ValueError(f"cannot parse dimension {text!r}")


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ValueError(f"cannot tokenize {text[pos:]!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise ValueError(f"expected {expect!r}, got {tok!r}")
        self.i += 1
        return tok

    def expr(self) -> SpaceExpr:
        parts = [self.sum()]
        while self.peek() == "u":
            self.take("u")
            parts.append(self.sum())
        return parts[0] if len(parts) == 1 else Disjoint(tuple(parts))

    def sum(self) -> SpaceExpr:
        parts = [self.prod()]
        while self.peek() == "#":
            self.take("#")
            parts.append(self.prod())
        return parts[0] if len(parts) == 1 else ConnSum(tuple(parts))

    def prod(self) -> SpaceExpr:
        parts = [self.postfix()]
        while self.peek() == "x":
            self.take("x")
            parts.append(self.postfix())
        return parts[0] if len(parts) == 1 else Product(tuple(parts))

    def postfix(self) -> SpaceExpr:
        base = self.primary()
        tok = self.peek()
        if tok and tok.startswith("^"):
            self.take()
            return Product(tuple([base] * int(tok[1:])))
        return base

    def primary(self) -> SpaceExpr:
        tok = self.take()
        if tok == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if tok.endswith("(") and tok[:-1].isdigit():  # k-fold connected sum
            k = int(tok[:-1])
            inner = self.expr()
            self.take(")")
            return ConnSum(tuple([inner] * k)) if k > 1 else inner
        if tok == "S2x_{S1}(":
            inner = self.expr()
            self.take(")")
            return TwistedS2(inner)
        if tok.startswith("S^{"):
            return Sphere(*_parse_dim(tok[3:-1]))
        if tok.startswith("S^"):
            return Sphere.num(int(tok[2:]))
        if tok.startswith("T^"):
            return Torus(int(tok[2:]))
        if tok.startswith("Sigma_"):
            return Surface(int(tok[6:]))
        if tok.startswith("~CP^"):
            return CPbar(int(tok[4:]))
        if tok.startswith("CP^"):
            return CP(int(tok[3:]))
        if tok.startswith("B3("):
            m_str, d_str = tok[3:-1].split(",")
            return OpaqueB3(int(m_str), None if d_str == "d" else int(d_str))
        if tok == "pt":
            return Point()
        if tok == "empty":
            return Empty()
        if tok == "?":
            return Unknown()
        raise ValueError(f"unexpected token {tok!r}")


def parse(text: str) -> SpaceExpr:
    p = _Parser(text)
    out = p.expr()
    if p.peek() is not None:
        raise ValueError(f"trailing input at token {p.peek()!r}")
    return normalize(out)


# ---------------------------------------------------------------------------
# registered diffeomorphism rewrites


def _rewrites_at(x: SpaceExpr) -> Iterator[SpaceExpr]:
    # Hirzebruch: S^2 x_{S^1} S^{2k-1}  <->  CP^k # ~CP^k
    if isinstance(x, TwistedS2) and isinstance(x.inner, Sphere) and x.inner.k == 0:
        n = x.inner.c
        if n >= 1 and n % 2 == 1:
            k = (n + 1) // 2
            yield ConnSum((CP(k), CPbar(k)))
    if isinstance(x, ConnSum):
        kids = list(x.children)
        for k in range(1, 5):
            if CP(k) in kids and CPbar(k) in kids:
                rest = list(kids)
                rest.remove(CP(k))
                rest.remove(CPbar(k))
                yield ConnSum(tuple(rest + [TwistedS2(Sphere.num(2 * k - 1))]))
        # (S^2 x S^2) # ~CP^2  <->  CP^2 # 2 ~CP^2
        s2s2 = Product((Sphere.num(2), Sphere.num(2)))
        if s2s2 in kids and CPbar(2) in kids:
            rest = list(kids)
            rest.remove(s2s2)
            yield ConnSum(tuple(rest + [CP(2), CPbar(2)]))
        if CP(2) in kids and kids.count(CPbar(2)) >= 2:
            rest = list(kids)
            rest.remove(CP(2))
            rest.remove(CPbar(2))
            rest.remove(CPbar(2))
            yield ConnSum(tuple(rest + [s2s2, CPbar(2)]))
    # untwisting a free circle factor: S^2 x_{S^1} (Y x S^1) <-> Y x S^2
    if isinstance(x, TwistedS2) and isinstance(x.inner, Product):
        kids = list(x.inner.children)
        for i, c in enumerate(kids):
            if isinstance(c, Sphere) and (c.k, c.c) == (0, 1):
                yield Product(tuple(kids[:i] + kids[i + 1 :] + [Sphere.num(2)]))
                break
            if isinstance(c, Torus):
                rest = kids[:i] + kids[i + 1 :]
                reduced = [Sphere.num(1)] * (c.n - 1)
                yield Product(tuple(rest + reduced + [Sphere.num(2)]))
                break
    if isinstance(x, Product):
        kids = list(x.children)
        for i, c in enumerate(kids):
            if isinstance(c, Sphere) and (c.k, c.c) == (0, 2):
                inner = Product(tuple(kids[:i] + kids[i + 1 :] + [Sphere.num(1)]))
                yield TwistedS2(normalize(inner))
                break


def _one_step_rewrites(x: SpaceExpr) -> Iterator[SpaceExpr]:
    yield from _rewrites_at(x)
    children = getattr(x, "children", None)
    if children is not None:
        for i, c in enumerate(children):
            for alt in _one_step_rewrites(c):
                kids = list(children)
                kids[i] = alt
                yield type(x)(tuple(kids))
    if isinstance(x, TwistedS2):
        for alt in _one_step_rewrites(x.inner):
            yield TwistedS2(alt, x.quotient_chi)


def known_diffeos(x: SpaceExpr) -> List[SpaceExpr]:
    """x together with every form reachable by one registered rewrite."""
    x = normalize(x)
    seen = [x]
    for alt in _one_step_rewrites(x):
        alt = normalize(alt)
        if alt not in seen:
            seen.append(alt)
    return seen


def equivalent(a: SpaceExpr, b: SpaceExpr) -> bool:
    """Equal after normalization, possibly modulo one registered rewrite."""
    a, b = normalize(a), normalize(b)
    if a == b:
        return True
    ea, eb = known_diffeos(a), known_diffeos(b)
    return any(u in eb for u in ea)


# ---------------------------------------------------------------------------
# the description engine


@dataclass(frozen=True)
class SpaceQuery:
    target: str  # chain | planar | spatial
    d: Optional[int] = None  # chain only; None = symbolic

    @classmethod
    def chain(cls, d: Optional[int] = None) -> "SpaceQuery":
        if d is not None and d < 2:
            raise DomainError("d must be at least 2")
        return cls("chain", d)

    @classmethod
    def planar(cls) -> "SpaceQuery":
        return cls("planar")

    @classmethod
    def spatial(cls) -> "SpaceQuery":
        return cls("spatial")


@dataclass
class _Derivation:
    rule: str
    source: Optional[GeneticCode]
    chain: SpaceExpr
    spatial: SpaceExpr


@dataclass
class _EngineState:
    m: int
    chain: Dict[GeneticCode, SpaceExpr]
    spatial: Dict[GeneticCode, SpaceExpr]
    primary: Dict[GeneticCode, _Derivation]
    alternatives: Dict[GeneticCode, List[_Derivation]]
    rsum_steps: List[Tuple[GeneticCode, GeneticCode]]  # (source, target)


def _rsum_exprs(m: int, chain_src: SpaceExpr, spatial_src: SpaceExpr):
    summand = Product((Sphere(1, 0), Sphere(m - 3, -1)))
    chain = normalize(ConnSum((chain_src, summand)))
    spatial = normalize(ConnSum((spatial_src, CPbar(m - 3))))
    return chain, spatial


def _rtiny_exprs(prev: _EngineState, reduced: GeneticCode):
    chain = normalize(Product((Sphere(1, 0), prev.chain[reduced])))
    q_chi = euler_char(prev.spatial[reduced])
    spatial = normalize(TwistedS2(substitute_d(prev.chain[reduced], 3), q_chi))
    return chain, spatial


@lru_cache(maxsize=None)
def _engine(m: int) -> _EngineState:
    state = _EngineState(m, {}, {}, {}, {}, [])
    codes = [ch.code for ch in enumerate_chambers(m)]

    def set_desc(code, chain, spatial, rule, source=None):
        state.chain[code] = normalize(chain)
        state.spatial[code] = normalize(spatial)
        state.primary[code] = _Derivation(rule, source, state.chain[code], state.spatial[code])

    empty = GeneticCode(m, ())
    if empty in codes:
        set_desc(empty, Empty(), Empty(), "base-empty")
    base = GeneticCode.from_genes(m, [[m]])
    set_desc(base, Sphere(m - 2, -1), CP(m - 3), "base-m")
    if m == 3:
        return state
    prev = _engine(m - 1)
    exc = exceptional_code(m)
    set_desc(
        exc,
        Product(tuple([Sphere(1, 0)] * (m - 3) + [Sphere(1, -1)])),
        Product(tuple([Sphere.num(2)] * (m - 3))),
        "base-111",
    )
    mdot2 = mdot2_code(m)
    closures = {code: frozenset(J.bits for J in down_closure(code)) for code in codes}
    by_closure = {cl: code for code, cl in closures.items()}

    def pair_pred(code):
        # a chamber has at most one gene of size 2; removing it gives the
        # unique candidate wall-crossing predecessor
        for g in code.genes:
            if g.card() == 2:
                pred = by_closure.get(closures[code] - {g.bits})
                if pred is not None:
                    return pred, g
        return None, None

    changed = True
    while changed:
        changed = False
        moved = True
        while moved:  # wall-crossing chains first: matches the printed tables
            moved = False
            for code in codes:
                if code in state.chain:
                    continue
                pred, _ = pair_pred(code)
                if pred is not None and pred in state.chain and pred != exc:
                    chain, spatial = _rsum_exprs(m, state.chain[pred], state.spatial[pred])
                    set_desc(code, chain, spatial, "R-sum", pred)
                    state.rsum_steps.append((pred, code))
                    moved = changed = True
        if mdot2 in codes and mdot2 not in state.chain:
            set_desc(
                mdot2,
                OpaqueB3(m),
                ConnSum((Product(tuple([Sphere.num(2)] * (m - 3))), CPbar(m - 3))),
                "base-mdot2",
            )
            changed = True
        for code in codes:
            if code in state.chain:
                continue
            reduced = tiny_edge_reduce(code)
            if reduced is not None and reduced in prev.chain:
                chain, spatial = _rtiny_exprs(prev, reduced)
                set_desc(code, chain, spatial, "R-tiny", reduced)
                changed = True
    for code in codes:
        if code not in state.chain:
            unknown = Unknown("unreachable by implemented rules")
            state.chain[code] = unknown
            state.spatial[code] = unknown

    # every rule application that could also have produced the chamber,
    # for path-independence cross-checks (the mdot2 base case is recorded
    # only when it was actually used: its chain form is opaque by design)
    for code in codes:
        alts: List[_Derivation] = []
        prim = state.primary.get(code)
        if prim is not None:
            alts.append(prim)
        if code == base and (prim is None or prim.rule != "base-m"):
            alts.append(_Derivation("base-m", None, Sphere(m - 2, -1), CP(m - 3)))
        if code == exc and (prim is None or prim.rule != "base-111"):
            alts.append(
                _Derivation(
                    "base-111",
                    None,
                    normalize(Product(tuple([Sphere(1, 0)] * (m - 3) + [Sphere(1, -1)]))),
                    normalize(Product(tuple([Sphere.num(2)] * (m - 3)))),
                )
            )
        pred, _ = pair_pred(code)
        if (
            pred is not None
            and pred != exc
            and pred in state.primary
            and (prim is None or prim.rule != "R-sum" or prim.source != pred)
        ):
            chain, spatial = _rsum_exprs(m, state.chain[pred], state.spatial[pred])
            alts.append(_Derivation("R-sum", pred, chain, spatial))
        reduced = tiny_edge_reduce(code)
        if (
            reduced is not None
            and reduced in prev.chain
            and not isinstance(prev.chain[reduced], Unknown)
            and (prim is None or prim.rule != "R-tiny")
        ):
            chain, spatial = _rtiny_exprs(prev, reduced)
            alts.append(_Derivation("R-tiny", reduced, chain, spatial))
        state.alternatives[code] = alts
    return state


def describe(code: GeneticCode, q: SpaceQuery) -> SpaceExpr:
    state = _engine(code.m)
    if code not in state.chain:
        raise DomainError(f"{code} is not a chamber")
    if q.target == "spatial":
        return state.spatial[code]
    expr = state.chain[code]
    if isinstance(expr, Unknown):
        return expr
    if q.target == "planar":
        return substitute_d(expr, 2)
    if q.d is not None:
        return substitute_d(expr, q.d)
    return expr


def derivations(m: int) -> Dict[GeneticCode, List[_Derivation]]:
    return dict(_engine(m).alternatives)


def rsum_steps(m: int) -> List[Tuple[GeneticCode, GeneticCode]]:
    return list(_engine(m).rsum_steps)


def coverage(m: int, q: SpaceQuery, unsafe_large_m: bool = False) -> Tuple[int, int]:
    if m > 7 and not unsafe_large_m:
        raise BoundExceeded("coverage supported up to m=7 without the override")
    codes = [ch.code for ch in enumerate_chambers(m, unsafe_large_m)]
    described = sum(1 for c in codes if not isinstance(describe(c, q), Unknown))
    return described, len(codes)


# ---------------------------------------------------------------------------
# table row order (block structure of the printed tables)


def lineage_order(m: int) -> List[GeneticCode]:
    """Chambers in the tables' row order: the <m> wall-crossing chain, then
    one block per previous-table line (its tiny-edge lift and that lift's
    wall-crossing chain), with the exceptional block last; anything never
    visited (m >= 7) is appended in canonical code order."""
    codes = [ch.code for ch in enumerate_chambers(m)]
    if m == 3:
        return sorted(codes, key=lambda c: c.sort_key())
    closures = {code: frozenset(J.bits for J in down_closure(code)) for code in codes}
    by_closure = {cl: code for code, cl in closures.items()}

    def chain_block(start):
        out = [start]
        cur = start
        while True:
            nxt = None
            for p in range(1, m):
                bits = (1 << (m - 1)) | (1 << (p - 1))
                if bits in closures[cur]:
                    continue
                cand = by_closure.get(closures[cur] | {bits})
                if cand is not None:
                    nxt = cand
                    break
            if nxt is None:
                return out
            out.append(nxt)
            cur = nxt

    order: List[GeneticCode] = []
    seen = set()

    def emit(block):
        for c in block:
            if c not in seen:
                seen.add(c)
                order.append(c)

    empty = GeneticCode(m, ())
    emit([empty])
    emit(chain_block(GeneticCode.from_genes(m, [[m]])))
    exc = exceptional_code(m)
    for prev_code in lineage_order(m - 1):
        if not prev_code.genes:
            continue
        lift = tiny_edge(prev_code)
        if lift in seen:
            continue
        if lift == exc:
            emit([exc])
            mdot2 = mdot2_code(m)
            if mdot2 in closures:
                emit(chain_block(mdot2))
            continue
        if lift in closures:
            emit(chain_block(lift))
    for code in sorted(codes, key=lambda c: c.sort_key()):
        if code not in seen:
            seen.add(code)
            order.append(code)
    return order


def table_rows(m: int) -> List[str]:
    """Rows "<code> (a_min) N2 / N3 / Ch^d" in the printed tables' order."""
    from .chambers import a_min

    rows = []
    for code in lineage_order(m):
        vec = a_min(code)
        n2 = render(describe(code, SpaceQuery.planar()))
        n3 = render(describe(code, SpaceQuery.spatial()))
        chd = render(describe(code, SpaceQuery.chain()))
        amin = ",".join(str(e) for e in vec.entries)
        rows.append(f"{code} ({amin}) {n2} / {n3} / {chd}")
    return rows
