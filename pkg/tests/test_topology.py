import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyspace.chambers import enumerate_chambers
from polyspace.combinatorics import GeneticCode
from polyspace.morse import exceptional_code
from polyspace.topology import (
    CP,
    ConnSum,
    CPbar,
    Disjoint,
    Empty,
    OpaqueB3,
    Product,
    Sphere,
    SpaceQuery,
    Surface,
    Torus,
    TwistedS2,
    Unknown,
    coverage,
    describe,
    equivalent,
    euler_char,
    known_diffeos,
    lineage_order,
    normalize,
    parse,
    render,
    rsum_steps,
    substitute_d,
    table_rows,
    derivations,
)


def _all_described_exprs(max_m=6):
    out = []
    for m in range(3, max_m + 1):
        for code in lineage_order(m):
            for q in (SpaceQuery.planar(), SpaceQuery.spatial(), SpaceQuery.chain()):
                e = describe(code, q)
                if not isinstance(e, Unknown):
                    out.append(e)
    return out


def test_normalize_idempotent_on_corpus():
    for e in _all_described_exprs():
        assert normalize(e) == e


def test_normalize_rules():
    s2 = Sphere.num(2)
    assert normalize(Product((Sphere.num(1), Sphere.num(1)))) == Torus(2)
    assert normalize(Product((s2, Empty()))) == Empty()
    assert normalize(ConnSum((Torus(2), Torus(2)))) == Surface(2)
    assert normalize(ConnSum((s2, s2))) == s2
    assert normalize(ConnSum((CP(1), CPbar(1)))) == s2
    assert normalize(Surface(0)) == s2
    assert normalize(Torus(1)) == Sphere.num(1)
    # S^0 factor doubles the rest
    got = normalize(Product((Sphere.num(1), Sphere.num(0))))
    assert got == Disjoint((Sphere.num(1), Sphere.num(1)))
    # B3 degenerates to a surface sum at d=2
    assert normalize(OpaqueB3(5, 2)) == Surface(2)
    assert normalize(OpaqueB3(6, 2)) == ConnSum((Torus(3), Torus(3)))


def test_render_parse_roundtrip_on_corpus():
    for e in _all_described_exprs():
        assert parse(render(e)) == e


def test_render_examples():
    assert render(Sphere(2, -1)) == "S^{2(d-1)-1}"
    assert render(Sphere(1, -1)) == "S^{d-2}"
    assert render(Sphere(1, 0)) == "S^{d-1}"
    assert render(Sphere.num(3)) == "S^3"
    assert render(normalize(ConnSum((CP(3), CPbar(3), CPbar(3))))) == "CP^3 # 2(~CP^3)"
    assert render(OpaqueB3(6)) == "B3(6,d)"
    assert render(Empty()) == "empty"
    assert render(Unknown()) == "?"
    uni = render(normalize(Product((Surface(2), Sphere.num(1)))), style="unicode")
    assert uni == "Σ_2 × S^1"


def test_substitute_d_matches_planar():
    for m in range(3, 7):
        for code in lineage_order(m):
            chain = describe(code, SpaceQuery.chain())
            if isinstance(chain, Unknown):
                continue
            assert describe(code, SpaceQuery.chain(2)) == describe(code, SpaceQuery.planar())
            assert substitute_d(chain, 2) == describe(code, SpaceQuery.planar())


def test_euler_char_basics():
    assert euler_char(Torus(3)) == 0
    assert euler_char(CP(3)) == 4
    assert euler_char(Surface(2)) == -2
    assert euler_char(Sphere.num(4)) == 2
    assert euler_char(Sphere.num(3)) == 0
    assert euler_char(Sphere(2, -1)) == 0  # 2(d-1)-1 is odd for every d
    assert euler_char(Sphere(1, 0)) is None  # parity of d-1 depends on d
    assert euler_char(Sphere(2, 0)) == 2
    assert euler_char(normalize(ConnSum((CP(2), CPbar(2))))) == 4  # 3+3-2
    assert euler_char(Product((Torus(2), Unknown()))) == 0  # zero absorbs
    assert euler_char(Disjoint((Torus(2), Sphere.num(2)))) == 2
    assert euler_char(TwistedS2(Sphere.num(3), quotient_chi=3)) == 6
    assert euler_char(TwistedS2(Sphere.num(3))) is None
    assert euler_char(OpaqueB3(6, 2)) == 0
    assert euler_char(OpaqueB3(6, 3)) == 0
    assert euler_char(OpaqueB3(6)) is None


def test_dimension_bookkeeping():
    for m in range(3, 7):
        for code in lineage_order(m):
            if not code.genes:
                continue
            for d in (2, 3):
                e = describe(code, SpaceQuery.chain(d))
                if isinstance(e, Unknown):
                    continue
                assert e.dim() == (0, (m - 2) * (d - 1) - 1), (code, d)


def test_known_diffeos_hirzebruch():
    a = TwistedS2(Sphere.num(3))
    b = ConnSum((CP(2), CPbar(2)))
    assert equivalent(a, b)
    assert normalize(b) in known_diffeos(a)


def test_known_diffeos_connected_sum_trade():
    a = ConnSum((Product((Sphere.num(2), Sphere.num(2))), CPbar(2)))
    b = ConnSum((CP(2), CPbar(2), CPbar(2)))
    assert equivalent(a, b)
    assert not equivalent(a, ConnSum((CP(2), CPbar(2))))


def test_known_diffeos_untwist_circle():
    a = TwistedS2(Product((Sphere.num(2), Sphere.num(2), Sphere.num(1))))
    b = Product((Sphere.num(2), Sphere.num(2), Sphere.num(2)))
    assert equivalent(a, b)


@pytest.mark.parametrize("m", [4, 5, 6])
def test_path_independence(m):
    for code, alts in derivations(m).items():
        for alt in alts[1:]:
            assert equivalent(alts[0].chain, alt.chain), (code, alt.rule)
            assert equivalent(alts[0].spatial, alt.spatial), (code, alt.rule)


def test_coverage_small_m_complete():
    for m in range(3, 7):
        n = len(enumerate_chambers(m))
        for q in (SpaceQuery.planar(), SpaceQuery.spatial(), SpaceQuery.chain()):
            assert coverage(m, q) == (n, n)


def test_coverage_m7():
    # 53 of the 135 chambers are reached by the implemented rules
    for q in (SpaceQuery.planar(), SpaceQuery.spatial(), SpaceQuery.chain()):
        assert coverage(7, q) == (53, 135)


def test_rsum_euler_bookkeeping():
    for m in (5, 6, 7):
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


def test_exceptional_planar_disconnected_unique():
    for m in range(4, 8):
        disconnected = []
        for ch in enumerate_chambers(m):
            e = describe(ch.code, SpaceQuery.planar())
            if isinstance(e, Disjoint):
                disconnected.append(ch.code)
        assert disconnected == [exceptional_code(m)]


def test_lineage_order_covers_all_chambers():
    for m in range(3, 8):
        order = lineage_order(m)
        assert len(order) == len(set(order)) == len(enumerate_chambers(m))


def test_table_known_cells():
    rows = {r.split(" ", 1)[0]: r for r in table_rows(6)}
    assert rows["⟨61⟩"].endswith("S^1 x S^2 / CP^3 # ~CP^3 / S^{d-1} x S^{3(d-1)-1}")
    assert rows["⟨632⟩"].endswith("2(T^3) / (S^2)^3 # ~CP^3 / B3(6,d)")
    assert (
        "T^3 # 2(S^1 x S^2) / S2x_{S1}(S^2 x S^3) # 2(~CP^3)" in rows["⟨621,64⟩"]
    )
    assert rows["⟨6321⟩"].startswith("⟨6321⟩ (0,0,0,1,1,1) T^3 u T^3 / (S^2)^3")


def test_describe_unknown_for_unreached_m7():
    code = GeneticCode.parse("732")
    assert code in {ch.code for ch in enumerate_chambers(7)}
    assert isinstance(describe(code, SpaceQuery.chain()), Unknown)


_ATOMS = st.sampled_from(
    [Sphere.num(1), Sphere.num(2), Sphere.num(3), Torus(2), Surface(2), CP(2)]
)


@settings(max_examples=100, deadline=None)
@given(st.lists(_ATOMS, min_size=1, max_size=4))
def test_product_roundtrip_random(factors):
    e = normalize(Product(tuple(factors)))
    assert parse(render(e)) == e
    assert normalize(e) == e
