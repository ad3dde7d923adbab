import hypothesis.strategies as st
import numpy as np
from hypothesis import assume, given, settings
from pytest import fixture, mark, raises

from brachy.common import ResourceLimitError, UsageError
from brachy.matrixlab import (
    AuditSpec,
    NumMatrixRing,
    det_brachy_audit,
    default_audit_specs,
    instantiate,
    load_audit_specs,
    pairing,
    symbolic_char_poly,
    symbolic_matrices,
    vandermonde,
    verify_matrix_suite,
)
from brachy.ringzoo import build, zmod


@fixture(scope="module")
def z101():
    return zmod(101)


@fixture(scope="module")
def audits():
    return {spec.name: det_brachy_audit(spec) for spec in default_audit_specs() if spec.name != "full-3"}


def test_char_poly_of_two_by_two():
    _, (a,), _ = symbolic_matrices(2, ("a",), ("t",))
    cp = symbolic_char_poly(2)
    assert cp.taus == [a.trace()]
    assert cp.det == a.det()
    assert cp.coefficient(0) == a.ring.one
    assert cp.coefficient(2) == cp.det


def test_char_poly_coefficients_are_principal_minor_sums():
    _, (a,), _ = symbolic_matrices(3, ("a",), ("t",))
    cp = symbolic_char_poly(3)
    for k in range(4):
        assert cp.coefficient(k) == a.tau(k)


@mark.parametrize("n", [0, 5])
def test_symbolic_order_cap(n):
    with raises(UsageError):
        symbolic_char_poly(n)


def test_pairing_is_symmetric():
    _, (a, b), _ = symbolic_matrices(3, ("a", "b"))
    assert pairing(a, b) == pairing(b, a)
    assert a.trace() * b.trace() == (a * b).trace() + pairing(a, b)


def test_vandermonde():
    V, product = vandermonde(3)
    assert V.det() == product


def test_scalar_matrices():
    _, (a,), _ = symbolic_matrices(2, ("a",))
    assert (a - a).is_zero()
    assert (a ** 0).is_scalar()
    assert not a.is_scalar()
    assert (2 * a).equals(a + a)


def test_matrix_suite_up_to_three():
    reports = verify_matrix_suite(nmax=3, audits=[])
    assert all(r.holds for r in reports), [r for r in reports if not r.holds]
    assert {r.name for r in reports} == {"charpoly", "m1", "m2", "m3", "m4", "m5", "m6"}
    (m6,) = [r for r in reports if r.name == "m6"]
    assert m6.detail == "no audit ring satisfies the premise"


@mark.slow
def test_full_matrix_suite():
    reports = verify_matrix_suite()
    assert all(r.holds for r in reports)
    assert any(r.name == "m6" and "unitriangular-3" in r.detail for r in reports)
    assert max(r.n for r in reports) == 4


def test_instantiate():
    _, (a,), _ = symbolic_matrices(2, ("a",))
    values = dict(a11=2, a12=3, a21=4, a22=1)
    assert instantiate(a.det(), values, 5) == (2 * 1 - 3 * 4) % 5


@given(entries=st.lists(st.integers(0, 4), min_size=9, max_size=9))
@settings(max_examples=30, deadline=None)
def test_numeric_minors_agree_with_symbolic_ones(entries):
    M = NumMatrixRing(zmod(5), 3)
    X = np.array(entries, dtype=np.int64).reshape(3, 3)
    _, (a,), _ = symbolic_matrices(3, ("a",))
    values = {f"a{i + 1}{j + 1}": int(X[i, j]) for i in range(3) for j in range(3)}
    assert int(M.det(X)) == instantiate(a.det(), values, 5)
    for k in range(4):
        assert int(M.tau(X, k)) == instantiate(a.tau(k), values, 5)


def test_codes_match_the_matrix_ring_constructor():
    M = NumMatrixRing(zmod(2), 2)
    S = build("matring(zmod(2),2)")
    E = M.decode(np.arange(16))
    assert [M.label(_) for _ in E] == list(S.labels)
    assert np.array_equal(M.encode(M.mul(E[:, None], E[None, :])), S.mul)
    assert np.array_equal(M.encode(M.add(E[:, None], E[None, :])), S.add)
    assert M.as_struct(E).same_tables(S)


def test_subring_closure():
    M = NumMatrixRing(zmod(2), 2)
    E = M.closure([M.matrix([[0, 1], [0, 0]])])
    assert len(E) == 4
    R = M.as_struct(E, "dual numbers")
    assert R.is_ring and R.classification.mul_commutative
    with raises(ResourceLimitError):
        M.closure([M.matrix([[0, 1], [0, 0]])], cap=3)


def test_numeric_matrix_ring_validation():
    with raises(UsageError):
        NumMatrixRing(build("matring(zmod(2),2)"), 2)
    with raises(UsageError):
        NumMatrixRing(zmod(2), 0)
    with raises(UsageError):
        NumMatrixRing(zmod(2), 2).matrix([[0, 1, 0]])
    with raises(UsageError):
        AuditSpec(n=4)


def test_unitriangular_three_by_three(audits):
    audit = audits["unitriangular-3"]
    assert audit.order == 16
    assert audit.premise_holds and audit.conclusion_holds
    assert audit.scalars is None and audit.central_holds is None
    assert audit.chain == dict(tau2_equals_tau1=True, two_tau1_zero=True, pairing_zero=True, delta_zero=True)
    assert audit.passed


def test_scalar_ring_fails_the_premise(audits):
    audit = audits["scalars-3"]
    assert audit.order == 5
    assert not audit.premise_holds and audit.premise_counterexample is not None
    assert audit.conclusion_holds is None and audit.chain is None
    assert audit.scalars == ("0", "1", "2")


def test_unitriangular_two_by_two(audits):
    audit = audits["unitriangular-2"]
    assert audit.order == 4
    assert audit.premise_holds and audit.conclusion_holds
    assert audit.scalars == ("0", "1") and audit.central_holds
    assert audit.chain is None


@mark.slow
def test_full_matrix_ring_fails_the_premise():
    (spec,) = [_ for _ in default_audit_specs() if _.name == "full-3"]
    audit = det_brachy_audit(spec)
    assert audit.order == 512
    assert not audit.premise_holds


def test_loading_audit_specs(tmp_path):
    path = tmp_path / "audit.yaml"
    path.write_text("name: single\nbase: zmod(3)\nn: 2\ngenerators: []\n")
    (spec,) = load_audit_specs(path)
    assert (spec.name, spec.base, spec.n) == ("single", "zmod(3)", 2)
    assert det_brachy_audit(spec).order == 3
    path.write_text("audits:\n  - name: x\n    size: 3\n")
    with raises(UsageError):
        load_audit_specs(path)


@mark.parametrize("n", [2, 3])
def test_pairing_is_biadditive(n):
    _, (a, b, c), _ = symbolic_matrices(n, ("a", "b", "c"))
    assert pairing(a + c, b) == pairing(a, b) + pairing(c, b)
    assert pairing(a, b + c) == pairing(a, b) + pairing(a, c)


def _matrices(n, modulus, count):
    return st.lists(
        st.lists(st.integers(0, modulus - 1), min_size=n * n, max_size=n * n), min_size=count, max_size=count
    ).map(lambda rows: [np.array(_, dtype=np.int64).reshape(n, n) for _ in rows])


@given(pair=_matrices(3, 7, 2))
@settings(max_examples=30, deadline=None)
def test_trace_is_additive_and_cyclic_mod_seven(pair):
    M = NumMatrixRing(zmod(7), 3)
    X, Y = pair
    assert int(M.tau(M.add(X, Y), 1)) == (int(M.tau(X, 1)) + int(M.tau(Y, 1))) % 7
    assert int(M.tau(M.mul(X, Y), 1)) == int(M.tau(M.mul(Y, X), 1))


@given(pair=_matrices(2, 7, 2))
@settings(max_examples=40, deadline=None)
def test_coefficients_are_similarity_invariant_mod_seven(pair):
    M = NumMatrixRing(zmod(7), 2)
    X, P = pair
    d = int(M.det(P))
    assume(d != 0)
    inverse = (pow(d, 5, 7) * np.array([[P[1, 1], -P[0, 1]], [-P[1, 0], P[0, 0]]])) % 7
    assert np.array_equal(M.mul(P, inverse), M.identity)
    conjugate = M.mul(M.mul(P, X), inverse)
    for k in range(3):
        assert int(M.tau(conjugate, k)) == int(M.tau(X, k))


@given(matrices=_matrices(3, 101, 2))
@settings(max_examples=15, deadline=None)
def test_suite_identities_hold_mod_101(z101, matrices):
    p = 101
    M = NumMatrixRing(z101, 3)
    a, b = matrices

    def t1(X):
        return int(M.tau(X, 1))

    def t2(X):
        return int(M.tau(X, 2))

    def det(X):
        return int(M.det(X))

    s, ab = M.add(a, b), M.mul(a, b)
    assert (t1(a) * t1(b)) % p == (t1(ab) + t2(s) - t2(a) - t2(b)) % p
    rhs = (
        det(a)
        + det(b)
        - t1(ab) * t1(s)
        + t1(a) * t2(b)
        + t2(a) * t1(b)
        + t1(M.mul(M.mul(a, a), b))
        + t1(M.mul(ab, b))
    )
    assert det(s) == rhs % p
    cayley_hamilton = M.add(
        M.add(M.power(a, 3), M.mul(M.scalar((-t1(a)) % p), M.power(a, 2))),
        M.add(M.mul(M.scalar(t2(a)), a), M.scalar((-det(a)) % p)),
    )
    assert (cayley_hamilton == 0).all()


@given(matrices=_matrices(2, 101, 2))
@settings(max_examples=15, deadline=None)
def test_hall_identity_mod_101(z101, matrices):
    M = NumMatrixRing(z101, 2)
    a, b = matrices
    c = M.add(M.mul(a, b), M.neg(M.mul(b, a)))
    assert np.array_equal(M.mul(c, c), M.scalar((-int(M.det(c))) % 101))
