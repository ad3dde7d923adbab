import hypothesis.strategies as st
from hypothesis import given, settings
from hypothesis.strategies import composite
from pytest import mark, raises

from brachy.common import ParseError, UsageError
from brachy.polycore import (
    NCPoly,
    commutator,
    cpoly_ring,
    parse_poly,
    poly_combine,
    poly_substitute,
    weyl_normal_form,
    weyl_step,
)


@composite
def ncpolys(draw, alphabet=("x", "y", "z"), max_terms=4, max_length=3):
    n = draw(st.integers(0, max_terms))
    mapping = {}
    for _ in range(n):
        word = tuple(draw(st.lists(st.sampled_from(alphabet), max_size=max_length)))
        mapping[word] = mapping.get(word, 0) + draw(st.integers(-3, 3))
    return NCPoly.from_dict(mapping)


weyl_polys = ncpolys(alphabet=("x", "y"), max_terms=3, max_length=4)


def test_parse_juxtaposition_and_powers():
    assert parse_poly("xzy") == NCPoly.word("xzy")
    assert parse_poly("x^2 y") == NCPoly.word(("x", "x", "y"))
    assert parse_poly("a12 b") == NCPoly.word(("a12", "b"))
    assert str(parse_poly("(1+x)(1+y)")) == "1 + x + y + x*y"
    assert str(parse_poly("x y - y x")) == "x*y - y*x"


def test_parse_reports_position():
    with raises(ParseError) as info:
        parse_poly("x+$")
    assert info.value.position == 2
    with raises(ParseError):
        parse_poly("(x + y")
    with raises(ParseError):
        parse_poly("")


def test_canonical_form_is_structural():
    assert parse_poly("x + y - x") == parse_poly("y")
    assert parse_poly("x y - y x").is_zero is False
    assert (parse_poly("x y") - parse_poly("x y")).is_zero


def test_printing_runs_of_letters():
    assert str(parse_poly("2 x x y")) == "2*x^2*y"
    assert str(NCPoly()) == "0"
    assert str(parse_poly("-x + 3")) == "3 - x"


@given(p=ncpolys(), q=ncpolys(), r=ncpolys())
@settings(max_examples=50)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p + q) * r == p * r + q * r
    assert p - p == NCPoly()
    assert p * 1 == p


@given(p=ncpolys(), q=ncpolys())
@settings(max_examples=50)
def test_printing_parses_back(p, q):
    assert parse_poly(str(p * q)) == p * q


def test_commutator_shift():
    x, z = NCPoly.var("x"), NCPoly.var("z")
    assert commutator(x, z) == commutator(x, 1 + z)
    assert commutator(x, x).is_zero


def test_substitution_is_simultaneous():
    p = parse_poly("x y")
    assert poly_substitute(p, {"x": "y", "y": "x"}) == parse_poly("y x")
    assert poly_substitute(parse_poly("x z"), {"z": "x + y"}) == parse_poly("x x + x y")


def test_combine_checks_flavors():
    R, (a, b) = cpoly_ring(("a", "b"))
    assert poly_combine("mul", a + b, a - b) == a ** 2 - b ** 2
    assert poly_combine("add", parse_poly("x"), parse_poly("y")) == parse_poly("x + y")
    with raises(UsageError):
        poly_combine("add", parse_poly("x"), a)
    with raises(UsageError):
        poly_combine("div", parse_poly("x"), parse_poly("y"))


def test_commutative_ring_is_cached():
    assert cpoly_ring(("a", "b"))[0] is cpoly_ring(("a", "b"))[0]


@mark.parametrize("m", [2, 3, 5])
def test_weyl_central_power(m):
    p = parse_poly(f"x^{m} y - y x^{m}")
    assert weyl_normal_form(p) == m * parse_poly(f"x^{m - 1}")
    assert weyl_normal_form(p, m).is_zero


def test_weyl_rejects_other_variables():
    with raises(UsageError):
        weyl_normal_form(parse_poly("x z"))
    with raises(UsageError):
        weyl_normal_form(parse_poly("x"), -1)


@given(p=weyl_polys)
@settings(max_examples=40)
def test_weyl_normal_form_agrees_with_single_steps(p):
    q = p
    for _ in range(10_000):
        nxt = weyl_step(q)
        if nxt is None:
            break
        q = nxt
    assert q == weyl_normal_form(p)
    assert weyl_step(q) is None


@given(p=weyl_polys, q=weyl_polys)
@settings(max_examples=30)
def test_weyl_normal_form_is_linear_and_idempotent(p, q):
    assert weyl_normal_form(p + q) == weyl_normal_form(p) + weyl_normal_form(q)
    assert weyl_normal_form(weyl_normal_form(p)) == weyl_normal_form(p)


def test_weyl_relation():
    assert weyl_normal_form(parse_poly("y x")) == parse_poly("x y - 1")


@given(p=ncpolys(), q=ncpolys(), u=ncpolys(max_terms=2, max_length=2), v=ncpolys(max_terms=2, max_length=2))
@settings(max_examples=30, deadline=None)
def test_substitution_is_a_ring_homomorphism(p, q, u, v):
    bindings = dict(x=u, y=v)
    assert poly_substitute(p + q, bindings) == poly_substitute(p, bindings) + poly_substitute(q, bindings)
    assert poly_substitute(p * q, bindings) == poly_substitute(p, bindings) * poly_substitute(q, bindings)
    assert poly_substitute(NCPoly.constant(1), bindings) == NCPoly.constant(1)


@given(p=ncpolys(), q=ncpolys())
@settings(max_examples=40)
def test_commutator_is_antisymmetric(p, q):
    assert commutator(p, q) == -commutator(q, p)
    assert commutator(p, p).is_zero


def test_alphabet_order():
    p = parse_poly("x + y + y x + x y")
    assert [w for w, _ in p.terms] == [("x",), ("y",), ("x", "y"), ("y", "x")]
    assert [w for w, _ in p.ordered_terms(("y", "x"))] == [("y",), ("x",), ("y", "x"), ("x", "y")]
    assert p.format(("y", "x")) == "y + x + y*x + x*y"
    assert parse_poly(p.format(("y", "x"))) == p
    assert [w for w, _ in parse_poly("z + x").ordered_terms(("x",))] == [("x",), ("z",)]
