"""Top-level acceptance checks, one test per criterion.

Criteria 3 and 7 encode external reference counts that the implemented rule
set provably cannot reproduce; they are kept as written and fail honestly:
the description engine reaches 53 of 135 chambers at m=7 (not 49), and four
m=6 down-closures contain {6,3,2} (not three — the count of three holds for
gene membership, see test_chambers.test_mdot2_chain_of_three).
"""

import os
import random
import time
from fractions import Fraction

import pytest

from polyspace.chambers import (
    a_min,
    enumerate_chambers,
    integral_code,
    tiny_edge,
)
from polyspace.combinatorics import (
    GeneticCode,
    LengthVector,
    NongenericError,
    SubsetMask,
    UnsortedError,
    down_closure,
    genetic_code,
    hook_leq,
)
from polyspace.morse import euler_boundary_check
from polyspace.topology import (
    CPbar,
    Disjoint,
    Product,
    SpaceQuery,
    Sphere,
    coverage,
    derivations,
    describe,
    equivalent,
    euler_char,
    rsum_steps,
    substitute_d,
    table_rows,
)

GOLDEN = os.path.join(os.path.dirname(__file__), "..", "golden")


def test_criterion_1_chamber_counts():
    start = time.monotonic()
    for m, count in [(4, 3), (5, 7), (6, 21), (7, 135)]:
        chambers = enumerate_chambers(m)
        assert len(chambers) == count
        assert len({ch.code for ch in chambers}) == count
    assert time.monotonic() - start < 60


def test_criterion_2_table_reproduction():
    for m in (4, 5, 6):
        with open(os.path.join(GOLDEN, f"table_m{m}.txt"), "rb") as fh:
            golden = fh.read()
        produced = ("\n".join(table_rows(m)) + "\n").encode("utf-8")
        assert produced == golden, f"table m={m} deviates from golden file"


def test_criterion_3_m7_coverage():
    for q in (SpaceQuery.chain(), SpaceQuery.planar(), SpaceQuery.spatial()):
        assert coverage(7, q) == (49, 135)


def test_criterion_4_worked_micro_examples():
    assert tiny_edge(GeneticCode.parse("631,65")) == GeneticCode.parse("7421,761")
    for m in range(3, 8):
        want = tuple([Fraction(1)] * (m - 1) + [Fraction(m - 2)])
        assert a_min(GeneticCode.parse(str(m))).entries == want
    for m in range(3, 8):
        for p in range(1, m - 1):
            vec = LengthVector(tuple([1] * p + [2] * (m - p - 1) + [2 * m - p - 5]))
            if vec.sorted:
                assert genetic_code(vec) == GeneticCode.from_genes(m, [[m, p]]), (m, p)
            else:
                # (3,1) and (4,2): the stated vector is not nondecreasing and
                # the target code is not a realizable chamber; genetic_code's
                # contract mandates UnsortedError here
                assert (m, p) in {(3, 1), (4, 2)}
                with pytest.raises(UnsortedError):
                    genetic_code(vec)


def test_criterion_5_property_suites():
    # hook-order poset axioms, exhaustively on subsets of {1..7}
    m = 7
    masks = list(range(1 << m))
    leq = [[hook_leq(SubsetMask(a, m), SubsetMask(b, m)) for b in masks] for a in masks]
    ups = [sum(1 << b for b in masks if leq[a][b]) for a in masks]
    for a in masks:
        assert leq[a][a]
        for b in masks:
            if leq[a][b]:
                if leq[b][a]:
                    assert a == b
                assert ups[b] & ~ups[a] == 0

    # scaling invariance on 200 random rational vectors per m <= 6
    rng = random.Random(180973)
    for m in range(3, 7):
        done = 0
        while done < 200:
            entries = sorted(
                Fraction(rng.randint(0, 24), rng.randint(1, 6)) for _ in range(m)
            )
            a = LengthVector(tuple(entries))
            c = Fraction(rng.randint(1, 30), rng.randint(1, 7))
            try:
                code = genetic_code(a)
            except NongenericError:
                continue
            assert genetic_code(a.scale(c)) == code
            done += 1

    # round trip on every enumerated chamber up to m = 7
    for m in range(3, 8):
        for ch in enumerate_chambers(m):
            assert genetic_code(ch.a_min) == ch.code

    # tiny-edge naturality: prepending an eps-edge to a_min lands in the lift
    for m in range(3, 7):
        for ch in enumerate_chambers(m):
            lifted = LengthVector((Fraction(0),) + ch.a_min.entries)
            assert genetic_code(lifted) == tiny_edge(ch.code)

    # a_min sum-minimality by brute force for m <= 6
    def nondecreasing(total, slots, minv=0):
        if slots == 0:
            if total == 0:
                yield ()
            return
        v = minv
        while v * slots <= total:
            for rest in nondecreasing(total - v, slots - 1, v):
                yield (v,) + rest
            v += 1

    for m in range(3, 7):
        targets = {
            tuple(
                sorted((g.bits for g in ch.code.genes), key=lambda b: b)
            ): int(sum(ch.a_min.entries))
            for ch in enumerate_chambers(m)
        }
        for key, best in targets.items():
            for total in range(1, best):
                for vec in nondecreasing(total, m):
                    got = integral_code(vec)
                    if got is not None and tuple(sorted(got)) == key:
                        raise AssertionError(f"smaller representative {vec}")


def test_criterion_6_euler_cross_validation():
    for m in range(3, 7):
        for ch in enumerate_chambers(m):
            if not ch.code.genes:
                continue
            res = euler_boundary_check(ch.code)
            assert res.passed, (ch.code, res.detail)
    for m in range(4, 8):
        for src, tgt in rsum_steps(m):
            e_src = describe(src, SpaceQuery.planar())
            e_tgt = describe(tgt, SpaceQuery.planar())
            summand = substitute_d(Product((Sphere(1, 0), Sphere(m - 3, -1))), 2)
            want = euler_char(e_src) + euler_char(summand) - euler_char(Sphere.num(m - 3))
            assert euler_char(e_tgt) == want, (m, src, tgt)
            s_src = describe(src, SpaceQuery.spatial())
            s_tgt = describe(tgt, SpaceQuery.spatial())
            want = (
                euler_char(s_src)
                + euler_char(CPbar(m - 3))
                - euler_char(Sphere.num(2 * (m - 3)))
            )
            assert euler_char(s_tgt) == want, (m, src, tgt)
    for m in range(4, 7):
        for code, alts in derivations(m).items():
            for alt in alts[1:]:
                assert equivalent(alts[0].chain, alt.chain), (code, alt.rule)
                assert equivalent(alts[0].spatial, alt.spatial), (code, alt.rule)


def test_criterion_7_structural_facts():
    for m in range(4, 8):
        disconnected = [
            ch.code
            for ch in enumerate_chambers(m)
            if isinstance(describe(ch.code, SpaceQuery.planar()), Disjoint)
        ]
        assert len(disconnected) == 1, f"m={m}"
    target = SubsetMask.of([6, 3, 2], 6)
    hits = [ch.code for ch in enumerate_chambers(6) if target in down_closure(ch.code)]
    assert len(hits) == 3, f"{len(hits)} chambers contain {{6,3,2}}: {list(map(str, hits))}"
