from pytest import mark, raises

from brachy.common import ParseError, ResourceLimitError, UsageError
from brachy.finstruct import jacobson_radical
from brachy.ringzoo import BATTERY, ZooSpec, build, default_battery, matrix_entries, parse_spec, zmod


def test_parse_nested_expression():
    spec = parse_spec("matring(zmod(2), 2)")
    assert spec == ZooSpec("matring", (ZooSpec("zmod", (2,)), 2))
    assert str(spec) == "matring(zmod(2),2)"
    assert str(parse_spec("monoidring(zmod(2),[[0,1],[1,1]])")) == "monoidring(zmod(2),[[0,1],[1,1]])"


@mark.parametrize("text", ["matring(zmod(2)", "3", "zmod(n=2)", "zmod(2.5)", ""])
def test_bad_expressions_are_parse_errors(text):
    with raises(ParseError):
        parse_spec(text)


@mark.parametrize("text", ["field(2)", "zmod(2,3)", "zmod(0)", "triangular(zmod(2),2,middle)"])
def test_bad_constructions_are_usage_errors(text):
    with raises(UsageError):
        build(text)


def test_build_names_the_structure():
    S = build("zmod(5)")
    assert S.name == "zmod(5)" and S.order == 5
    assert S.classification.is_commutative_ring


def test_matrix_ring_over_f2():
    S = build("matring(zmod(2),2)")
    assert S.order == 16
    assert S.is_ring and not S.classification.mul_commutative
    assert matrix_entries(S)[S.one] == (("1", "0"), ("0", "1"))
    with raises(UsageError):
        matrix_entries(zmod(2))


def test_construction_cap():
    with raises(ResourceLimitError) as info:
        build("matring(zmod(2),3)", cap=100)
    assert info.value.cap == 100


def test_matrix_rings_need_commutative_coefficients():
    with raises(UsageError):
        build("matring(matring(zmod(2),2),2)")


@mark.parametrize("side", ["lower", "upper"])
def test_triangular_rings(side):
    S = build(f"triangular(zmod(2),2,{side})")
    assert S.order == 8
    assert S.is_ring and not S.classification.mul_commutative
    assert len(jacobson_radical(S)) == 2


def test_quotient_rings():
    F4 = build("quotientpoly(zmod(2),[1,1,1])")
    assert F4.order == 4 and len(F4.units) == 3
    assert jacobson_radical(F4) == frozenset({F4.zero})
    D = build("quotientpoly(zmod(2),[0,0,1])")
    x = D.index("x")
    assert D.mul[x, x] == D.zero
    assert jacobson_radical(D) == frozenset({D.zero, x})


@mark.parametrize("text", ["quotientpoly(zmod(2),[1,1,0])", "quotientpoly(zmod(2),[1])"])
def test_quotient_modulus_must_be_monic_of_positive_degree(text):
    with raises(UsageError):
        build(text)


def test_monoid_rings():
    S = build("monoidring(zmod(2),[[0,1],[1,1]])")
    assert S.order == 4 and S.classification.is_commutative_ring
    with raises(UsageError):
        build("monoidring(zmod(2),[[0,0],[0,0]])")


def test_products_are_componentwise():
    S = build("product(zmod(2),zmod(3))")
    assert S.order == 6
    assert S.label(S.one) == "(1,1)"
    assert S.add[S.index("(1,2)"), S.index("(1,1)")] == S.index("(0,0)")


def test_default_battery():
    battery = default_battery()
    assert [S.name for S in battery] == list(BATTERY)
    assert all(S.is_ring for S in battery)
    assert default_battery()[0] is battery[0]
    assert any(not S.classification.mul_commutative for S in battery)
