"""
Matrix identities: symbolic verification over generic matrices and determinant audits over
finite matrix rings.

Symbolic entries are sympy polynomials over the integers in the variables a11, a12, ... (and b11, ...
for a second matrix). Numeric matrices over a finite commutative ring K are integer arrays of element
indices of K, so that whole batches of matrices are handled at once with K's tables.
"""
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from sympy.polys.rings import PolyRing

from .common import DEFAULT_CLOSURE_CAP, SYMBOLIC_ORDER_CAP, BrachyError, ResourceLimitError, UsageError
from .finstruct import FiniteStruct
from .helpers import get_logger
from .polycore import CPoly, cpoly_ring
from .ringzoo import build

__all__ = [
    "SymMatrix",
    "CharPoly",
    "MatrixCaseReport",
    "NumMatrixRing",
    "AuditSpec",
    "DetAudit",
    "symbolic_matrices",
    "symbolic_char_poly",
    "pairing",
    "vandermonde",
    "instantiate",
    "verify_matrix_suite",
    "det_brachy_audit",
    "load_audit_specs",
    "default_audit_specs",
]


def _permutations(n: int):
    """(permutation, sign) pairs"""
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        yield perm, -1 if inversions % 2 else 1


def _check_order(n: int) -> None:
    if not 1 <= n <= SYMBOLIC_ORDER_CAP:
        raise UsageError(f"symbolic work is limited to orders 1..{SYMBOLIC_ORDER_CAP} (got {n})")


@dataclass(eq=False)
class SymMatrix:
    """A square matrix of integer polynomials sharing one ring"""

    entries: np.ndarray
    """n x n object array of ring elements"""
    ring: PolyRing

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, n: int, ring: PolyRing) -> "SymMatrix":
        return cls.scalar(n, ring.one, ring)

    @classmethod
    def scalar(cls, n: int, value: Union[CPoly, int], ring: PolyRing) -> "SymMatrix":
        entries = np.empty((n, n), dtype=object)
        for i, j in itertools.product(range(n), repeat=2):
            entries[i, j] = ring(value) if i == j else ring.zero
        return cls(entries, ring)

    def _wrap(self, f) -> "SymMatrix":
        entries = np.empty((self.n, self.n), dtype=object)
        for i, j in itertools.product(range(self.n), repeat=2):
            entries[i, j] = f(i, j)
        return SymMatrix(entries, self.ring)

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        return self._wrap(lambda i, j: self.entries[i, j] + other.entries[i, j])

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return self._wrap(lambda i, j: self.entries[i, j] - other.entries[i, j])

    def __neg__(self) -> "SymMatrix":
        return self._wrap(lambda i, j: -self.entries[i, j])

    def __mul__(self, other: Union["SymMatrix", CPoly, int]) -> "SymMatrix":
        if not isinstance(other, SymMatrix):
            return self._wrap(lambda i, j: self.entries[i, j] * other)
        n = self.n

        def entry(i, j):
            total = self.ring.zero
            for k in range(n):
                total += self.entries[i, k] * other.entries[k, j]
            return total

        return self._wrap(entry)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SymMatrix":
        result = SymMatrix.identity(self.n, self.ring)
        for _ in range(k):
            result = result * self
        return result

    def equals(self, other: "SymMatrix") -> bool:
        return all(self.entries[i, j] == other.entries[i, j] for i, j in itertools.product(range(self.n), repeat=2))

    def is_zero(self) -> bool:
        return all(_ == 0 for _ in self.entries.ravel())

    def is_scalar(self) -> bool:
        d = self.entries[0, 0]
        return all(
            self.entries[i, j] == (d if i == j else 0) for i, j in itertools.product(range(self.n), repeat=2)
        )

    def commutes_with(self, other: "SymMatrix") -> bool:
        return (self * other).equals(other * self)

    def trace(self) -> CPoly:
        return sum((self.entries[i, i] for i in range(self.n)), self.ring.zero)

    def minor_det(self, rows: Sequence[int], cols: Sequence[int]) -> CPoly:
        total = self.ring.zero
        for perm, sign in _permutations(len(rows)):
            term = self.ring(sign)
            for i, j in enumerate(perm):
                term *= self.entries[rows[i], cols[j]]
            total += term
        return total

    def det(self) -> CPoly:
        return self.minor_det(range(self.n), range(self.n))

    def tau(self, k: int) -> CPoly:
        """Sum of the principal k x k minors (tau_0 = 1, tau_n = det)"""
        if k == 0:
            return self.ring.one
        return sum(
            (self.minor_det(rows, rows) for rows in itertools.combinations(range(self.n), k)), self.ring.zero
        )


def pairing(a: SymMatrix, b: SymMatrix) -> CPoly:
    """<a,b> = tau_2(a + b) - tau_2(a) - tau_2(b)"""
    return (a + b).tau(2) - a.tau(2) - b.tau(2)


def symbolic_matrices(
    n: int, prefixes: Sequence[str] = ("a",), extra: Sequence[str] = ()
) -> Tuple[PolyRing, List[SymMatrix], Tuple[CPoly, ...]]:
    """Generic n x n matrices, one per prefix, over a shared ring that also holds the `extra` variables.

    Returns:
        The ring, the matrices and the generators for the extra variables.
    """
    names = tuple(f"{p}{i + 1}{j + 1}" for p in prefixes for i in range(n) for j in range(n)) + tuple(extra)
    R, gens = cpoly_ring(names)
    matrices = []
    for k, _ in enumerate(prefixes):
        entries = np.empty((n, n), dtype=object)
        for i, j in itertools.product(range(n), repeat=2):
            entries[i, j] = gens[k * n * n + i * n + j]
        matrices.append(SymMatrix(entries, R))
    return R, matrices, gens[len(prefixes) * n * n :]


@dataclass
class CharPoly:
    n: int
    taus: List[CPoly]
    """tau_1, ..., tau_{n-1}"""
    det: CPoly

    def coefficient(self, k: int) -> CPoly:
        """tau_k for 0 <= k <= n"""
        if k == 0:
            return self.taus[0].ring.one if self.taus else self.det.ring.one
        return self.det if k == self.n else self.taus[k - 1]


def _by_leibniz(a: SymMatrix, t: CPoly) -> List[CPoly]:
    """Coefficients c_0..c_n of det(t 1 - a)"""
    p = (SymMatrix.scalar(a.n, t, a.ring) - a).det()
    index = a.ring.gens.index(t)
    parts: Dict[int, Dict[Tuple[int, ...], Any]] = {}
    for monom, coeff in p.items():
        stripped = monom[:index] + (0,) + monom[index + 1 :]
        parts.setdefault(monom[index], {})[stripped] = coeff
    return [a.ring(parts.get(k, {})) for k in range(a.n + 1)]


def _by_faddeev_leverrier(a: SymMatrix) -> List[CPoly]:
    """Coefficients c_0..c_n of the characteristic polynomial through M_k = a M_{k-1} + c_{n-k+1} 1"""
    n, R = a.n, a.ring
    c = [R.zero] * (n + 1)
    c[n] = R.one
    M = SymMatrix.scalar(n, 0, R)
    for k in range(1, n + 1):
        M = a * M + SymMatrix.scalar(n, c[n - k + 1], R)
        try:
            c[n - k] = -(a * M).trace().exquo(R(k))
        except Exception as e:
            raise BrachyError(f"inexact division by {k} in the Faddeev-LeVerrier recursion: {e}")
    return c


@lru_cache(maxsize=None)
def symbolic_char_poly(n: int) -> CharPoly:
    """tau_1..tau_{n-1} and det of a generic n x n matrix, computed by expanding det(t 1 - a) and by the
    Faddeev-LeVerrier recursion; the two must agree"""
    _check_order(n)
    R, (a,), (t,) = symbolic_matrices(n, ("a",), ("t",))
    direct, recursive = _by_leibniz(a, t), _by_faddeev_leverrier(a)
    if direct != recursive:
        raise BrachyError(f"characteristic polynomial mismatch at order {n}")
    sign = [1 if k % 2 == 0 else -1 for k in range(n + 1)]
    taus = [sign[k] * direct[n - k] for k in range(1, n)]
    return CharPoly(n=n, taus=taus, det=sign[n] * direct[0])


def vandermonde(n: int) -> Tuple[SymMatrix, CPoly]:
    """The Vandermonde matrix (rows 1, l_i, l_i^2, ...) and the product of (l_j - l_i) over i < j"""
    R, gens = cpoly_ring(tuple(f"l{i + 1}" for i in range(n)))
    entries = np.empty((n, n), dtype=object)
    for i, j in itertools.product(range(n), repeat=2):
        entries[i, j] = gens[i] ** j
    product = R.one
    for i, j in itertools.combinations(range(n), 2):
        product *= gens[j] - gens[i]
    return SymMatrix(entries, R), product


def instantiate(p: CPoly, values: Dict[str, int], modulus: int) -> int:
    """Value of p modulo `modulus` with every variable replaced by an integer"""
    names = [str(_) for _ in p.ring.symbols]
    total = 0
    for monom, coeff in p.items():
        term = int(coeff)
        for name, e in zip(names, monom):
            if e:
                term *= pow(values[name], e, modulus)
        total = (total + term) % modulus
    return total


@dataclass
class MatrixCaseReport:
    name: str
    n: int
    holds: bool
    detail: str = ""


def _suite_cases(nmax: int):
    for n in range(1, nmax + 1):
        yield "charpoly", n, lambda n=n: symbolic_char_poly(n) is not None
    for n in (2, 3):
        if n <= nmax:
            R, (a, b), _ = symbolic_matrices(n, ("a", "b"))
            yield "m1", n, lambda a=a, b=b: a.trace() * b.trace() == (a * b).trace() + pairing(a, b)
    if nmax >= 3:
        R, (a, b), _ = symbolic_matrices(3, ("a", "b"))

        def m2(a=a, b=b):
            s = a + b
            rhs = (
                a.det()
                + b.det()
                - (a * b).tau(1) * s.tau(1)
                + a.tau(1) * b.tau(2)
                + a.tau(2) * b.tau(1)
                + (a * a * b).tau(1)
                + (a * b * b).tau(1)
            )
            return s.det() == rhs

        yield "m2", 3, m2
    if nmax >= 2:
        R, (a, b, e), _ = symbolic_matrices(2, ("a", "b", "e"))
        c = a * b - b * a
        square = c * c

        def m3(square=square, c=c, e=e):
            return (square + SymMatrix.scalar(2, c.det(), c.ring)).is_zero() and square.commutes_with(e)

        yield "m3", 2, m3
    for n in (2, 3):
        if n <= nmax:

            def m4(n=n):
                cp = symbolic_char_poly(n)
                _, (a,), _ = symbolic_matrices(n, ("a",), ("t",))
                total = a ** n
                for k in range(1, n + 1):
                    total = total + (a ** (n - k)) * (cp.coefficient(k) * (-1) ** k)
                return total.is_zero()

            yield "m4", n, m4
    for n in range(2, nmax + 1):
        V, product = vandermonde(n)
        yield "m5", n, lambda V=V, product=product: V.det() == product


def verify_matrix_suite(nmax: int = SYMBOLIC_ORDER_CAP, audits: Optional[Sequence["AuditSpec"]] = None) -> List[MatrixCaseReport]:
    """Verifies the trace/determinant identities as exact polynomial identities and the chain of
    consequences of det(1 + a) = 1 + det(a) on the 3 x 3 audit rings where it holds.

    Args:
        nmax: Largest matrix order used
        audits: Determinant audit specifications to search for 3 x 3 rings (defaults to the shipped ones)
    """
    _check_order(nmax)
    log = get_logger("matrixlab")
    reports = []
    for name, n, check in _suite_cases(nmax):
        try:
            holds = bool(check())
            detail = ""
        except BrachyError as e:
            holds, detail = False, str(e)
        log.info(f"{name} n={n}: {holds}")
        reports.append(MatrixCaseReport(name, n, holds, detail))
    if nmax >= 3:
        chains = 0
        for spec in audits if audits is not None else default_audit_specs():
            if spec.n != 3:
                continue
            audit = det_brachy_audit(spec)
            if audit.chain is None:
                continue
            chains += 1
            failed = [k for k, v in audit.chain.items() if not v]
            reports.append(MatrixCaseReport("m6", 3, not failed, f"{spec.name} (order {audit.order})" + (f" failed {failed}" if failed else "")))
        if not chains:
            reports.append(MatrixCaseReport("m6", 3, True, "no audit ring satisfies the premise"))
    return reports


# ---------------------------------------------------------------------------
# numeric matrices over a finite commutative ring


class NumMatrixRing:
    """n x n matrices over a finite commutative ring K, stored as arrays (..., n, n) of element indices.

    Codes are row-major base-|K| numbers, the same numbering `ringzoo.matring` uses for its elements.
    """

    def __init__(self, K: FiniteStruct, n: int):
        if not K.classification.is_commutative_ring:
            raise UsageError(f"matrix coefficients must form a commutative ring; {K} does not")
        if n < 1:
            raise UsageError(f"matrix order must be positive (got {n})")
        self.K, self.n = K, n
        self.weights = K.order ** np.arange(n * n, dtype=np.int64)
        self.perms = list(_permutations(n))

    @property
    def identity(self) -> np.ndarray:
        return self.scalar(self.K.one)

    def scalar(self, value: int) -> np.ndarray:
        X = np.full((self.n, self.n), self.K.zero, dtype=np.int64)
        X[np.diag_indices(self.n)] = value
        return X

    def matrix(self, rows: Sequence[Sequence[Any]]) -> np.ndarray:
        """A matrix from entries given as element indices or labels of K"""
        X = np.array(
            [[v if isinstance(v, int) and 0 <= v < self.K.order else self.K.index(str(v)) for v in row] for row in rows],
            dtype=np.int64,
        )
        if X.shape != (self.n, self.n):
            raise UsageError(f"expected a {self.n} x {self.n} matrix, got shape {X.shape}")
        return X

    def encode(self, X: np.ndarray) -> np.ndarray:
        return (X.reshape(X.shape[:-2] + (self.n * self.n,)) * self.weights).sum(axis=-1)

    def decode(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        digits = (codes[..., None] // self.weights) % self.K.order
        return digits.reshape(codes.shape + (self.n, self.n))

    def label(self, X: np.ndarray) -> str:
        return "[" + ";".join(" ".join(self.K.labels[e] for e in row) for row in X) + "]"

    def add(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return self.K.add[X, Y]

    def neg(self, X: np.ndarray) -> np.ndarray:
        return self.K.neg[X]

    def mul(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        terms = self.K.mul[X[..., :, :, None], Y[..., None, :, :]]
        acc = terms[..., :, 0, :]
        for k in range(1, self.n):
            acc = self.K.add[acc, terms[..., :, k, :]]
        return acc

    def power(self, X: np.ndarray, k: int) -> np.ndarray:
        result = np.broadcast_to(self.identity, X.shape).copy()
        for _ in range(k):
            result = self.mul(result, X)
        return result

    def _minor(self, X: np.ndarray, rows: Sequence[int]) -> np.ndarray:
        K = self.K
        total = np.full(X.shape[:-2], K.zero, dtype=np.int64)
        for perm, sign in _permutations(len(rows)):
            term = np.full(X.shape[:-2], K.one, dtype=np.int64)
            for i, j in enumerate(perm):
                term = K.mul[term, X[..., rows[i], rows[j]]]
            total = K.add[total, term if sign > 0 else K.neg[term]]
        return total

    def det(self, X: np.ndarray) -> np.ndarray:
        return self._minor(X, list(range(self.n)))

    def tau(self, X: np.ndarray, k: int) -> np.ndarray:
        K = self.K
        if k == 0:
            return np.full(X.shape[:-2], K.one, dtype=np.int64)
        total = np.full(X.shape[:-2], K.zero, dtype=np.int64)
        for rows in itertools.combinations(range(self.n), k):
            total = K.add[total, self._minor(X, rows)]
        return total

    def closure(self, generators: Sequence[np.ndarray], cap: int = DEFAULT_CLOSURE_CAP) -> np.ndarray:
        """The subring generated by the identity and `generators`, sorted by code"""
        start = np.stack([self.scalar(self.K.zero), self.identity] + [np.asarray(_) for _ in generators])
        codes = set(int(_) for _ in self.encode(start))
        elements = self.decode(np.array(sorted(codes)))
        frontier = elements
        while len(frontier):
            X, Y = frontier[:, None], elements[None, :]
            produced = np.concatenate(
                [self.encode(self.add(X, Y)).ravel(), self.encode(self.mul(X, Y)).ravel(), self.encode(self.mul(Y, X)).ravel()]
            )
            new = sorted(set(int(_) for _ in np.unique(produced)) - codes)
            if len(codes) + len(new) > cap:
                get_logger("matrixlab").warning(f"subring closure passed {cap} elements")
                raise ResourceLimitError("matrix subring closure", cap, partial=len(codes) + len(new))
            codes.update(new)
            frontier = self.decode(np.array(new, dtype=np.int64)) if new else frontier[:0]
            elements = self.decode(np.array(sorted(codes), dtype=np.int64))
        return elements

    def as_struct(self, elements: np.ndarray, name: str = "") -> FiniteStruct:
        """Cayley tables of a subring given by its elements"""
        codes = self.encode(elements)
        index = {int(c): i for i, c in enumerate(codes)}
        X, Y = elements[:, None], elements[None, :]
        lookup = np.vectorize(lambda c: index[int(c)])
        return FiniteStruct(
            add=lookup(self.encode(self.add(X, Y))),
            mul=lookup(self.encode(self.mul(X, Y))),
            zero=index[int(self.encode(self.scalar(self.K.zero)))],
            one=index[int(self.encode(self.identity))],
            labels=[self.label(_) for _ in elements],
            name=name,
        )


@dataclass
class AuditSpec:
    name: str = "audit"
    """Name printed in reports"""
    base: str = "zmod(2)"
    """Coefficient ring as a ringzoo expression (must be commutative)"""
    n: int = 3
    """Matrix order"""
    generators: List[List[List[Any]]] = field(default_factory=list)
    """Generator matrices as rows of entries (indices or labels of the coefficient ring)"""
    cap: int = DEFAULT_CLOSURE_CAP
    """Largest subring order"""

    def __post_init__(self):
        if self.n not in (2, 3):
            raise UsageError(f"determinant audits use 2 x 2 or 3 x 3 matrices (got {self.n})")


@dataclass
class DetAudit:
    spec: AuditSpec
    order: int
    premise_holds: bool
    """det(1 + a) = 1 + det(a) for every a in R"""
    premise_counterexample: Optional[str] = None
    conclusion_holds: Optional[bool] = None
    """det(a + b) = det(a) + det(b) for all a, b (only checked when the premise holds)"""
    conclusion_counterexample: Optional[Tuple[str, str]] = None
    scalars: Optional[Tuple[str, ...]] = None
    """n scalars l with l 1 in R and pairwise differences that are not zero divisors"""
    central_holds: Optional[bool] = None
    """a^n central, tau_k(a) = 0 for 0 < k < n and a^n + (-1)^n det(a) 1 = 0 (checked when the
    premise holds and scalars were found)"""
    chain: Optional[Dict[str, bool]] = None
    """For 3 x 3 rings satisfying the premise: tau_2 = tau_1, 2 tau_1 = 0, <x,y> = 0, delta = 0"""

    @property
    def passed(self) -> bool:
        return (
            self.conclusion_holds is not False
            and self.central_holds is not False
            and (self.chain is None or all(self.chain.values()))
        )


def _scalar_supply(M: NumMatrixRing, elements: np.ndarray) -> Optional[Tuple[int, ...]]:
    K, n = M.K, M.n
    present = set(int(_) for _ in M.encode(elements))
    scalars = [v for v in K.elements if int(M.encode(M.scalar(v))) in present]
    nonzero = [x for x in K.elements if x != K.zero]

    def zero_divisor(d: int) -> bool:
        return d == K.zero or any(K.mul[x, d] == K.zero for x in nonzero)

    for choice in itertools.combinations(scalars, n):
        if all(not zero_divisor(K.sub(a, b)) for a, b in itertools.combinations(choice, 2)):
            return choice
    return None


def det_brachy_audit(spec: AuditSpec) -> DetAudit:
    """Audits whether the determinant of a generated matrix ring is a brachymorphism and what follows.

    Remarks:
        The premise is reported first and is never assumed; consequences are only asserted on rings
        where it holds.
    """
    K = build(spec.base)
    M = NumMatrixRing(K, spec.n)
    E = M.closure([M.matrix(_) for _ in spec.generators], spec.cap)
    N = len(E)
    D = M.det(E)
    lhs = M.det(M.add(M.identity, E))
    rhs = K.add[K.one, D]
    bad = np.flatnonzero(lhs != rhs)
    audit = DetAudit(spec=spec, order=N, premise_holds=len(bad) == 0)
    scalars = _scalar_supply(M, E)
    if scalars is not None:
        audit.scalars = tuple(K.label(_) for _ in scalars)
    if len(bad):
        audit.premise_counterexample = M.label(E[bad[0]])
        get_logger("matrixlab").info(f"{spec.name}: premise violated at {audit.premise_counterexample}")
        return audit
    X, Y = E[:, None], E[None, :]
    pair_dets = M.det(M.add(X, Y))
    mismatch = np.argwhere(pair_dets != K.add[D[:, None], D[None, :]])
    audit.conclusion_holds = len(mismatch) == 0
    if len(mismatch):
        i, j = mismatch[0]
        audit.conclusion_counterexample = (M.label(E[i]), M.label(E[j]))
    if scalars is not None:
        P = M.power(E, spec.n)
        central = bool((M.mul(P[:, None], E[None, :]) == M.mul(E[None, :], P[:, None])).all())
        taus_vanish = all((M.tau(E, k) == K.zero).all() for k in range(1, spec.n))
        shift = D if spec.n % 2 == 0 else K.neg[D]
        Q = P.copy()
        for i in range(spec.n):
            Q[:, i, i] = K.add[P[:, i, i], shift]
        audit.central_holds = central and taus_vanish and bool((Q == K.zero).all())
    if spec.n == 3:
        t1, t2 = M.tau(E, 1), M.tau(E, 2)
        mul = K.mul
        S = M.add(X, Y)
        pairing_values = K.add[K.add[M.tau(S, 2), K.neg[t2[:, None]]], K.neg[t2[None, :]]]
        AB = M.mul(X, Y)
        delta = K.add[
            K.add[
                K.add[mul[M.tau(AB, 1), M.tau(S, 1)], K.neg[mul[t1[:, None], t2[None, :]]]],
                K.neg[mul[t2[:, None], t1[None, :]]],
            ],
            K.neg[M.tau(M.mul(AB, S), 1)],
        ]
        audit.chain = dict(
            tau2_equals_tau1=bool((t1 == t2).all()),
            two_tau1_zero=bool((K.add[t1, t1] == K.zero).all()),
            pairing_zero=bool((pairing_values == K.zero).all()),
            delta_zero=bool((delta == K.zero).all()),
        )
    return audit


def load_audit_specs(path: Union[str, Path]) -> List[AuditSpec]:
    """Reads a YAML file holding a list of audit specifications under the key `audits`"""
    try:
        with open(path, "r") as f:
            d = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise UsageError(f"Cannot read audit specification {path}: {e}")
    if isinstance(d, dict):
        d = d.get("audits", [d])
    if not isinstance(d, list):
        raise UsageError(f"{path} does not hold a list of audits")
    try:
        return [AuditSpec(**_) for _ in d]
    except TypeError as e:
        raise UsageError(f"Bad audit specification in {path}: {e}")


def default_audit_specs() -> List[AuditSpec]:
    return load_audit_specs(Path(__file__).parent / "data" / "detaudit.yaml")
