import hypothesis.strategies as st
from hypothesis import given, settings
from pytest import fixture, mark, raises

from brachy.common import UsageError
from brachy.identity_suite import (
    builtin_cases,
    load_cases,
    perturb,
    rename_case,
    run_builtin_suite,
    verify_identity,
    weyl_check,
)
from brachy.polycore import NCPoly, parse_poly


@fixture(scope="module")
def cases():
    return builtin_cases()


def test_builtin_suite_holds(cases):
    reports = run_builtin_suite()
    assert len(reports) == len(cases) == 14
    assert all(r.holds for r in reports), [r.name for r in reports if not r.holds]
    assert all(r.difference.is_zero for r in reports)


def test_case_names_are_unique(cases):
    names = [c.name for c in cases]
    assert len(set(names)) == len(names)
    assert {"tilde-p1-q1", "tilde-p2-q2", "one-plus-product-at-sum"} <= set(names)


def test_substitutions_are_applied(cases):
    (case,) = [c for c in cases if c.name == "one-plus-product-at-sum"]
    assert case.substitutions == [{"z": parse_poly("x + y")}]
    assert not verify_identity(case.__class__(case.name, case.lhs, case.rhs)).holds


@mark.parametrize("index", [0, 3, 7, 13])
def test_perturbing_one_case_fails_exactly_that_case(cases, index):
    perturbed = list(cases)
    perturbed[index] = perturb(cases[index], "x y", 2)
    reports = run_builtin_suite(perturbed)
    assert [r.name for r in reports if not r.holds] == [cases[index].name]
    assert not reports[index].holds


@given(word=st.text(alphabet="xyz", max_size=4), delta=st.integers(1, 5))
@settings(max_examples=30)
def test_perturbation_difference(cases, word, delta):
    report = verify_identity(perturb(cases[0], " ".join(word), -delta))
    assert not report.holds
    assert report.difference == NCPoly.word(tuple(word), delta)


def test_renaming_variables_keeps_identities(cases):
    mapping = dict(x="u", y="v", z="w")
    for case in cases:
        renamed = rename_case(case, mapping)
        assert verify_identity(renamed).holds
        assert not set(renamed.lhs.variables) & {"x", "y", "z"}
    (case,) = [c for c in cases if c.name == "one-plus-product-at-sum"]
    assert list(rename_case(case, mapping).substitutions[0].keys()) == ["w"]


def test_loading_cases(tmp_path):
    path = tmp_path / "cases.yaml"
    path.write_text("- name: square\n  lhs: '(x + 1)(x + 1)'\n  rhs: 'x x + 2 x + 1'\n")
    (case,) = load_cases(path)
    assert case.name == "square" and case.citation == ""
    assert verify_identity(case).holds


@mark.parametrize(
    "text",
    [
        "- name: broken\n  lhs: 'x'\n",
        "identities: 3\n",
        "- name: bad\n  lhs: 'x +'\n  rhs: 'x'\n",
    ],
)
def test_malformed_case_files(tmp_path, text):
    path = tmp_path / "cases.yaml"
    path.write_text(text)
    with raises(UsageError):
        load_cases(path)


def test_missing_case_file(tmp_path):
    with raises(UsageError):
        load_cases(tmp_path / "missing.yaml")


@mark.parametrize("m", [2, 3, 5, 7])
def test_weyl_power_identity(m):
    report = weyl_check(m)
    assert report.holds
    assert report.normal_form == m * parse_poly(f"x^{m - 1}")
    assert report.reduced.is_zero


def test_weyl_needs_m_at_least_two():
    with raises(UsageError):
        weyl_check(1)
