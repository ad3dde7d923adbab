import itertools

import hypothesis.strategies as st
import numpy as np
from hypothesis import given, settings
from pytest import fixture, mark, raises
from sympy import primefactors

from brachy.common import NotARingError, UsageError
from brachy.finstruct import (
    FiniteStruct,
    Monoid,
    alpha_hierarchy,
    element_profile,
    engel_index,
    jacobson_radical,
    load_struct,
    maximal_left_ideals,
    save_struct,
    struct_from_dict,
    struct_to_dict,
    sums_of_units,
    validate_structure,
)
from brachy.polycore import parse_poly
from brachy.ringzoo import BATTERY, build, zmod


@fixture
def boolean():
    return FiniteStruct(add=[[0, 1], [1, 1]], mul=[[0, 0], [0, 1]], name="boolean")


@fixture(scope="module")
def m2():
    return build("matring(zmod(2),2)")


def test_integers_mod_n_are_commutative_rings():
    c = zmod(6).classification
    assert c.is_commutative_ring
    assert c.add_cancellative and c.mul_zero_absorbs
    assert c.is_right_nearring


def test_boolean_semiring_is_not_a_ring(boolean):
    c = boolean.classification
    assert c.is_commutative_semiring
    assert not c.additive_group
    assert not c.is_ring
    assert not c.add_cancellative
    assert boolean.neg[1] == -1
    with raises(NotARingError):
        boolean.require_ring()
    with raises(NotARingError):
        jacobson_radical(boolean)
    with raises(NotARingError):
        boolean.nmul(-1, 1)


def test_flags_cover_every_class(boolean):
    flags = boolean.classification.flags()
    assert flags["is_semiring"] and not flags["is_ring"]
    assert flags["right_zero_law"]


def test_designated_elements_that_are_not_identities_clear_flags():
    c = validate_structure([[0, 1], [1, 0]], [[0, 0], [0, 1]], zero=1, one=0)
    assert not c.has_zero and not c.has_one
    assert c.add_associative and c.mul_associative


@mark.parametrize(
    "add, mul",
    [
        ([[0, 2], [1, 0]], [[0, 0], [0, 1]]),
        ([[0, 1, 0]], [[0]]),
        ([[0, 1], [1, 0]], [[0, 0, 0], [0, 1, 0], [0, 0, 0]]),
        ("ab", "cd"),
    ],
)
def test_malformed_tables_are_usage_errors(add, mul):
    with raises(UsageError):
        FiniteStruct(add=add, mul=mul)


def test_labels_must_be_distinct():
    with raises(UsageError):
        FiniteStruct(add=[[0, 1], [1, 0]], mul=[[0, 0], [0, 1]], labels=["a", "a"])


def test_tables_are_read_only():
    S = zmod(3)
    with raises(ValueError):
        S.add[0, 0] = 1


def test_labels_and_indices(m2):
    assert m2.label(m2.one) == "[1 0;0 1]"
    assert m2.index("[1 0;0 1]") == m2.one
    with raises(UsageError):
        m2.index("[2 0;0 1]")
    assert str(m2) == "matring(zmod(2),2) (order 16)"


def test_polynomial_evaluation():
    S = zmod(5)
    assert S.evaluate(parse_poly("x y + 2"), dict(x=2, y=3)) == 3
    assert S.evaluate(parse_poly("x - y"), dict(x=1, y=3)) == 3
    with raises(UsageError):
        S.evaluate(parse_poly("x z"), dict(x=1))


def test_element_profile_of_z4():
    profiles = {p.element: p for p in element_profile(zmod(4))}
    two = profiles[2]
    assert not two.is_unit and not two.is_regular
    assert two.nilpotency_index == 2
    assert two.pi_regular_exponent == 2 and two.is_pi_regular
    assert two.is_central
    assert profiles[3].is_unit and profiles[3].inverse == 3
    assert profiles[1].is_idempotent and profiles[0].nilpotency_index == 1
    assert profiles[1].nilpotency_index == 0


def test_z6_is_von_neumann_regular():
    profiles = element_profile(zmod(6))
    assert all(p.is_regular for p in profiles)
    assert {p.element for p in profiles if p.is_idempotent} == {0, 1, 3, 4}
    for p in profiles:
        S = zmod(6)
        x, t = p.element, p.quasi_inverse
        assert S.mul[S.mul[x, t], x] == x


def test_jacobson_radical_of_z4():
    assert jacobson_radical(zmod(4)) == frozenset({0, 2})


@given(n=st.integers(1, 24))
@settings(max_examples=24, deadline=None)
def test_jacobson_radical_of_integers_mod_n(n):
    radical = 1
    for p in primefactors(n):
        radical *= p
    assert jacobson_radical(zmod(n)) == frozenset(x for x in range(n) if x % radical == 0)


def test_jacobson_radical_of_matrix_rings(m2):
    assert jacobson_radical(m2) == frozenset({m2.zero})
    T = build("triangular(zmod(2),2,lower)")
    assert jacobson_radical(T) == frozenset({T.zero, T.index("[0 0;1 0]")})


def test_maximal_left_ideals_of_z6():
    assert maximal_left_ideals(zmod(6)) == [frozenset({0, 2, 4}), frozenset({0, 3})]


def test_engel_index(m2):
    assert engel_index(zmod(8)) == 1
    assert engel_index(m2) is None


def test_sums_of_units():
    assert sums_of_units(zmod(4)) == [0, 1, 2, 1]
    assert sums_of_units(build("quotientpoly(zmod(2),[0,0,1])"))[0] == 0


def test_units_of_the_matrix_ring(m2):
    assert len(m2.units) == 6
    assert m2.center == frozenset({m2.zero, m2.one})


def test_commutative_alpha_chain_is_immediate():
    chain = alpha_hierarchy(zmod(6))
    assert chain.levels == [frozenset(range(6))]
    assert chain.exhausts


def test_alpha_chain_grows(m2):
    chain = alpha_hierarchy(m2)
    assert chain.levels[0] == m2.center
    assert all(a <= b for a, b in zip(chain.levels, chain.levels[1:]))
    assert chain.exhausts


def test_monoid_validation():
    assert Monoid([[0, 1], [1, 1]], 0).order == 2
    with raises(UsageError):
        Monoid([[0, 1], [1, 1]], 1)
    with raises(UsageError):
        Monoid([[0, 1, 2], [1, 2, 0], [2, 2, 2]], 0)


def test_cayley_tables_show_both_operations():
    text = zmod(2).cayley_tables()
    assert "+" in text and "*" in text


def test_structure_files_round_trip(tmp_path, m2):
    path = tmp_path / "m2.struct"
    save_struct(m2, path)
    loaded = load_struct(path)
    assert loaded.same_tables(m2)
    assert loaded.labels == m2.labels
    assert loaded.name == m2.name
    anonymous = struct_from_dict({k: v for k, v in struct_to_dict(zmod(3)).items() if k != "name"}, "three")
    assert anonymous.name == "three"


def test_structure_files_report_problems(tmp_path):
    with raises(UsageError):
        load_struct(tmp_path / "missing.struct")
    bad = tmp_path / "bad.struct"
    bad.write_text("order: 2\nzero: 0\n")
    with raises(UsageError):
        load_struct(bad)
    flat = tmp_path / "flat.struct"
    flat.write_text("order: 2\nzero: 0\none: 1\nadd: [0, 1, 1, 0]\nmul: [0, 0, 0, 1]\n")
    assert load_struct(flat).same_tables(zmod(2))


@given(a=st.integers(1, 5), b=st.integers(1, 5))
@settings(max_examples=20, deadline=None)
def test_products_of_integer_rings(a, b):
    S = build(f"product(zmod({a}),zmod({b}))")
    assert S.order == a * b
    assert S.classification.is_commutative_ring
    assert np.array_equal(S.succ, S.add[S.one])


@mark.parametrize("spec", BATTERY)
def test_jacobson_radical_is_an_ideal_of_quasi_units(spec):
    R = build(spec)
    J = jacobson_radical(R)
    assert R.zero in J
    for x, y in itertools.product(J, repeat=2):
        assert int(R.add[x, y]) in J
    for x in J:
        assert int(R.neg[x]) in J
        assert int(R.succ[x]) in R.units
        for r in R.elements:
            assert int(R.mul[r, x]) in J and int(R.mul[x, r]) in J


def _transformation_monoid(n):
    maps = list(itertools.product(range(n), repeat=n))
    index = {f: i for i, f in enumerate(maps)}
    table = [[index[tuple(g[f[i]] for i in range(n))] for g in maps] for f in maps]
    return Monoid(table, index[tuple(range(n))])


@mark.parametrize("spec", BATTERY)
def test_alpha_chain_is_monotone_and_short(spec):
    R = build(spec)
    chain = alpha_hierarchy(R)
    assert chain.levels[0] == R.center
    assert all(a < b for a, b in zip(chain.levels, chain.levels[1:]))
    assert len(chain.levels) <= R.order
    assert alpha_hierarchy(Monoid.from_struct(R)).levels == chain.levels


@mark.parametrize("n", [2, 3])
def test_alpha_chain_of_transformation_monoids(n):
    M = _transformation_monoid(n)
    chain = alpha_hierarchy(M)
    assert M.identity in chain.levels[0]
    assert all(a < b for a, b in zip(chain.levels, chain.levels[1:]))
    assert len(chain.levels) <= M.order
