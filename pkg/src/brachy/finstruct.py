"""
Finite two-operation structures given by Cayley tables.

Elements are indices `0..n-1`; labels are for presentation only. All axiom checks are
exhaustive and vectorized with numpy (one row of the cube at a time).
"""
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np
import yaml
from prettytable import PrettyTable

from .common import JACOBSON_DUAL_CAP, BrachyError, NotARingError, UsageError
from .helpers import get_logger
from .polycore import NCPoly

__all__ = [
    "FiniteStruct",
    "Classification",
    "ElementProfile",
    "Monoid",
    "AlphaChain",
    "validate_structure",
    "element_profile",
    "jacobson_radical",
    "left_ideal_closure",
    "maximal_left_ideals",
    "alpha_hierarchy",
    "sums_of_units",
    "engel_index",
    "load_struct",
    "save_struct",
    "struct_from_dict",
    "struct_to_dict",
]


@dataclass(frozen=True)
class Classification:
    """Axioms verified exhaustively on a pair of tables"""

    add_associative: bool
    add_commutative: bool
    has_zero: bool
    """zero is a two-sided additive identity"""
    additive_group: bool
    """every element has a two-sided additive inverse"""
    add_cancellative: bool
    """x+z=y+z implies x=y and z+x=z+y implies x=y"""
    mul_associative: bool
    mul_commutative: bool
    has_one: bool
    """one is a two-sided multiplicative identity"""
    left_distributive: bool
    """x(y+z) = xy + xz"""
    right_distributive: bool
    """(x+y)z = xz + yz"""
    right_zero_law: bool
    """x0 = 0"""
    mul_zero_absorbs: bool
    """x0 = 0 = 0x"""

    @property
    def is_semiring(self) -> bool:
        return (
            self.add_associative
            and self.add_commutative
            and self.has_zero
            and self.mul_associative
            and self.has_one
            and self.left_distributive
            and self.right_distributive
        )

    @property
    def is_commutative_semiring(self) -> bool:
        return self.is_semiring and self.mul_commutative

    @property
    def is_cancellative_semiring(self) -> bool:
        return self.is_semiring and self.add_cancellative

    @property
    def is_ring(self) -> bool:
        return self.is_semiring and self.additive_group

    @property
    def is_commutative_ring(self) -> bool:
        return self.is_ring and self.mul_commutative

    @property
    def is_right_nearring(self) -> bool:
        return (
            self.add_associative
            and self.has_zero
            and self.additive_group
            and self.mul_associative
            and self.has_one
            and self.right_distributive
        )

    def flags(self) -> Dict[str, bool]:
        result = {k: getattr(self, k) for k in self.__dataclass_fields__}
        for k in (
            "is_ring",
            "is_commutative_ring",
            "is_semiring",
            "is_commutative_semiring",
            "is_cancellative_semiring",
            "is_right_nearring",
        ):
            result[k] = getattr(self, k)
        return result


def _as_table(t: Any, n: Optional[int], what: str) -> np.ndarray:
    try:
        a = np.array(t, dtype=np.int64)
    except (TypeError, ValueError):
        raise UsageError(f"{what} table is not a table of integers")
    if a.ndim == 1 and n is not None and a.size == n * n:
        a = a.reshape(n, n)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError(f"{what} table must be square (got shape {a.shape})")
    if n is not None and a.shape[0] != n:
        raise UsageError(f"{what} table has {a.shape[0]} rows but the order is {n}")
    if a.size and (a.min() < 0 or a.max() >= a.shape[0]):
        bad = np.argwhere((a < 0) | (a >= a.shape[0]))[0]
        raise UsageError(f"{what} table entry at ({bad[0]}, {bad[1]}) is out of range: {a[tuple(bad)]}")
    return a


def _associative(T: np.ndarray) -> bool:
    return all(np.array_equal(T[T[x]], T[x][T]) for x in range(T.shape[0]))


def _left_distributive(A: np.ndarray, M: np.ndarray) -> bool:
    return all(np.array_equal(M[x][A], A[M[x][:, None], M[x][None, :]]) for x in range(A.shape[0]))


def _right_distributive(A: np.ndarray, M: np.ndarray) -> bool:
    return all(
        np.array_equal(M[:, z][A], A[M[:, z][:, None], M[:, z][None, :]]) for z in range(A.shape[0])
    )


def _injective_lines(T: np.ndarray) -> bool:
    n = T.shape[0]
    return all(len(np.unique(T[i])) == n and len(np.unique(T[:, i])) == n for i in range(n))


def validate_structure(add, mul, zero: int, one: int) -> Classification:
    """Computes every classification flag by exhaustive axiom checking.

    Args:
        add: n x n addition table (nested lists, flat row-major list or array)
        mul: n x n multiplication table
        zero: index of the designated zero
        one: index of the designated one

    Remarks:
        Malformed tables raise `UsageError`; a designated zero or one that is not an identity
        only clears the corresponding flag.
    """
    A = _as_table(add, None, "add")
    n = A.shape[0]
    M = _as_table(mul, n, "mul")
    if not (0 <= zero < n and 0 <= one < n):
        raise UsageError(f"zero ({zero}) and one ({one}) must be elements of 0..{n - 1}")
    ar = np.arange(n)
    has_zero = bool(np.array_equal(A[zero], ar) and np.array_equal(A[:, zero], ar))
    inverse = (A == zero) & (A.T == zero)
    return Classification(
        add_associative=_associative(A),
        add_commutative=bool(np.array_equal(A, A.T)),
        has_zero=has_zero,
        additive_group=has_zero and bool(inverse.any(axis=1).all()),
        add_cancellative=_injective_lines(A),
        mul_associative=_associative(M),
        mul_commutative=bool(np.array_equal(M, M.T)),
        has_one=bool(np.array_equal(M[one], ar) and np.array_equal(M[:, one], ar)),
        left_distributive=_left_distributive(A, M),
        right_distributive=_right_distributive(A, M),
        right_zero_law=bool((M[:, zero] == zero).all()),
        mul_zero_absorbs=bool((M[:, zero] == zero).all() and (M[zero] == zero).all()),
    )


@dataclass(eq=False)
class FiniteStruct:
    """A finite structure with signature (0, 1, +, ·) given by its Cayley tables.

    Remarks:
        - Tables are stored as read-only integer arrays; the structure is immutable.
        - Flags are never asserted by the caller: `classification` computes them on first use.
    """

    add: np.ndarray
    """Addition table"""
    mul: np.ndarray
    """Multiplication table"""
    zero: int = 0
    """Index of zero"""
    one: int = 1
    """Index of one"""
    labels: Optional[Tuple[str, ...]] = None
    """Presentation labels (defaults to the indices)"""
    name: str = ""
    """Human readable name (e.g. the zoo expression that built it)"""

    def __post_init__(self):
        self.add = _as_table(self.add, None, "add")
        n = self.add.shape[0]
        if n < 1:
            raise UsageError("A structure needs at least one element")
        self.mul = _as_table(self.mul, n, "mul")
        self.zero, self.one = int(self.zero), int(self.one)
        if not (0 <= self.zero < n and 0 <= self.one < n):
            raise UsageError(f"zero ({self.zero}) and one ({self.one}) must be elements of 0..{n - 1}")
        if self.labels is None:
            self.labels = tuple(str(_) for _ in range(n))
        else:
            self.labels = tuple(str(_) for _ in self.labels)
            if len(self.labels) != n or len(set(self.labels)) != n:
                raise UsageError(f"Need {n} distinct labels (got {len(self.labels)})")
        self.add.setflags(write=False)
        self.mul.setflags(write=False)

    @property
    def order(self) -> int:
        return self.add.shape[0]

    @property
    def elements(self) -> range:
        return range(self.order)

    @cached_property
    def classification(self) -> Classification:
        return validate_structure(self.add, self.mul, self.zero, self.one)

    @property
    def is_ring(self) -> bool:
        return self.classification.is_ring

    def require_ring(self, what: str = "this operation") -> None:
        if not self.is_ring:
            raise NotARingError(f"{what} needs a ring but {self.name or 'the structure'} is not one")

    @cached_property
    def succ(self) -> np.ndarray:
        """The successor map x -> 1 + x"""
        return self.add[self.one].copy()

    @cached_property
    def neg(self) -> np.ndarray:
        """Additive inverses (-1 where none exists)"""
        inverse = (self.add == self.zero) & (self.add.T == self.zero)
        result = np.where(inverse.any(axis=1), inverse.argmax(axis=1), -1)
        return result

    @cached_property
    def units(self) -> Tuple[int, ...]:
        both = (self.mul == self.one) & (self.mul.T == self.one)
        return tuple(int(_) for _ in np.flatnonzero(both.any(axis=1)))

    @cached_property
    def regular_mask(self) -> np.ndarray:
        """regular_mask[x, t] is True when x t x = x"""
        M = self.mul
        return np.stack([M[M[x], x] == x for x in self.elements])

    @cached_property
    def center(self) -> FrozenSet[int]:
        M = self.mul
        return frozenset(int(x) for x in self.elements if np.array_equal(M[x], M[:, x]))

    def label(self, x: int) -> str:
        return self.labels[x]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise UsageError(f"{label!r} is not an element of {self.name or 'the structure'}")

    def sub(self, x: int, y: int) -> int:
        return int(self.add[x, self.neg[y]])

    def commutator(self, x: int, y: int) -> int:
        return int(self.add[self.mul[x, y], self.neg[self.mul[y, x]]])

    def power(self, x: int, k: int) -> int:
        result = self.one
        for _ in range(k):
            result = int(self.mul[result, x])
        return result

    def powers(self, x: int) -> List[int]:
        """x^1, ..., x^n where n is the order"""
        result, p = [], x
        for _ in range(self.order):
            result.append(int(p))
            p = self.mul[p, x]
        return result

    def nmul(self, k: int, x: int) -> int:
        """The integer multiple k·x (negative k needs additive inverses)"""
        if k < 0:
            if self.neg[x] < 0:
                raise NotARingError(f"{self.label(x)} has no additive inverse")
            return self.nmul(-k, int(self.neg[x]))
        result = self.zero
        for _ in range(k):
            result = int(self.add[result, x])
        return result

    def evaluate(self, p: NCPoly, env: Mapping[str, int]) -> int:
        """Value of an integer polynomial at the given assignment"""
        result = self.zero
        for w, c in p.terms:
            v = self.one
            for letter in w:
                try:
                    v = int(self.mul[v, env[letter]])
                except KeyError:
                    raise UsageError(f"Unbound variable {letter}")
            result = int(self.add[result, self.nmul(c, v)])
        return result

    def same_tables(self, other: "FiniteStruct") -> bool:
        return (
            self.order == other.order
            and self.zero == other.zero
            and self.one == other.one
            and np.array_equal(self.add, other.add)
            and np.array_equal(self.mul, other.mul)
        )

    def cayley_tables(self) -> str:
        """Both tables rendered with labels"""
        out = []
        for symbol, table in (("+", self.add), ("*", self.mul)):
            t = PrettyTable([symbol] + list(self.labels))
            for x in self.elements:
                t.add_row([self.labels[x]] + [self.labels[_] for _ in table[x]])
            out.append(str(t))
        return "\n".join(out)

    def __str__(self):
        return f"{self.name or 'FiniteStruct'} (order {self.order})"


@dataclass(frozen=True)
class ElementProfile:
    element: int
    is_unit: bool
    inverse: Optional[int]
    """Two-sided inverse when the element is a unit"""
    is_regular: bool
    quasi_inverse: Optional[int]
    """Some t with xtx = x"""
    is_idempotent: bool
    nilpotency_index: int
    """Least k with x^k = 0 (0 when the element is not nilpotent)"""
    pi_regular_exponent: Optional[int]
    """Least k with x^k regular"""
    is_central: bool

    @property
    def is_pi_regular(self) -> bool:
        return self.pi_regular_exponent is not None


def element_profile(S: FiniteStruct) -> List[ElementProfile]:
    """Per-element unit/regular/idempotent/nilpotent/π-regular/central analysis with witnesses"""
    M = S.mul
    regular = S.regular_mask
    is_reg = regular.any(axis=1)
    both = (M == S.one) & (M.T == S.one)
    profiles = []
    for x in S.elements:
        powers = S.powers(x)
        nil = next((k + 1 for k, p in enumerate(powers) if p == S.zero), 0)
        pi = next((k + 1 for k, p in enumerate(powers) if is_reg[p]), None)
        unit = bool(both[x].any())
        profiles.append(
            ElementProfile(
                element=x,
                is_unit=unit,
                inverse=int(both[x].argmax()) if unit else None,
                is_regular=bool(is_reg[x]),
                quasi_inverse=int(regular[x].argmax()) if is_reg[x] else None,
                is_idempotent=bool(M[x, x] == x),
                nilpotency_index=nil,
                pi_regular_exponent=pi,
                is_central=x in S.center,
            )
        )
    return profiles


def left_ideal_closure(R: FiniteStruct, generators: Iterable[int]) -> FrozenSet[int]:
    """The left ideal generated by the given elements"""
    mask = np.zeros(R.order, dtype=bool)
    mask[R.zero] = True
    mask[list(generators)] = True
    while True:
        members = np.flatnonzero(mask)
        grown = mask.copy()
        grown[R.mul[:, members].ravel()] = True
        grown[R.add[np.ix_(members, members)].ravel()] = True
        if np.array_equal(grown, mask):
            return frozenset(int(_) for _ in members)
        mask = grown


def maximal_left_ideals(R: FiniteStruct) -> List[FrozenSet[int]]:
    """All maximal left ideals, found by enumerating every left ideal"""
    R.require_ring("maximal left ideal enumeration")
    everything = frozenset(R.elements)
    ideals = {left_ideal_closure(R, [])}
    frontier = list(ideals)
    while frontier:
        new = []
        for ideal in frontier:
            for a in R.elements:
                if a in ideal:
                    continue
                bigger = left_ideal_closure(R, ideal | {a})
                if bigger not in ideals:
                    ideals.add(bigger)
                    new.append(bigger)
        frontier = new
    proper = [_ for _ in ideals if _ != everything]
    return sorted(
        (_ for _ in proper if not any(_ < other for other in proper)), key=lambda _: sorted(_)
    )


def jacobson_radical(R: FiniteStruct, dual_cap: int = JACOBSON_DUAL_CAP) -> FrozenSet[int]:
    """J(R) computed through quasi-regularity and, up to `dual_cap`, as the intersection of the
    maximal left ideals. The two must agree.

    Remarks:
        x is in J(R) iff 1 - rx has a left inverse for every r. This characterization is the
        standard one from ring theory.
    """
    R.require_ring("the Jacobson radical")
    left_invertible = (R.mul == R.one).any(axis=0)
    radical = frozenset(
        int(x)
        for x in R.elements
        if left_invertible[R.add[R.one, R.neg[R.mul[:, x]]]].all()
    )
    if R.order <= dual_cap:
        maximal = maximal_left_ideals(R)
        dual = frozenset.intersection(*maximal) if maximal else frozenset(R.elements)
        if dual != radical:
            raise BrachyError(
                f"Jacobson radical mismatch in {R}: quasi-regular {sorted(radical)} vs "
                f"maximal left ideals {sorted(dual)}"
            )
    return radical


def engel_index(R: FiniteStruct) -> Optional[int]:
    """Least n with [x,y]_n = 0 for all x, y where [x,y]_{n+1} = [[x,y]_n, y]; None if there is none"""
    R.require_ring("the Engel index")
    n = R.order
    C = R.add[R.mul, R.neg[R.mul.T]]
    current = C
    columns = np.arange(n)[None, :]
    for k in range(1, n + 1):
        if (current == R.zero).all():
            return k
        current = C[current, columns]
    return None


def sums_of_units(R: FiniteStruct) -> List[Optional[int]]:
    """For each element the least number of units summing to it (zero is the empty sum) or None"""
    R.require_ring("sums of units")
    units = list(R.units)
    best: Dict[int, int] = {R.zero: 0}
    frontier = [R.zero]
    k = 0
    while frontier:
        k += 1
        reached = set(int(_) for _ in R.add[np.ix_(frontier, units)].ravel()) if units else set()
        frontier = sorted(_ for _ in reached if _ not in best)
        for x in frontier:
            best[x] = k
    return [best.get(x) for x in R.elements]


@dataclass
class Monoid:
    """A finite monoid given by its multiplication table"""

    table: np.ndarray
    identity: int = 0

    def __post_init__(self):
        self.table = _as_table(self.table, None, "monoid")
        n = self.table.shape[0]
        ar = np.arange(n)
        if not (0 <= self.identity < n):
            raise UsageError(f"identity {self.identity} is not an element")
        if not (np.array_equal(self.table[self.identity], ar) and np.array_equal(self.table[:, self.identity], ar)):
            raise UsageError("not a monoid: the identity is not a two-sided identity")
        if not _associative(self.table):
            raise UsageError("not a monoid: the table is not associative")

    @classmethod
    def from_struct(cls, S: FiniteStruct) -> "Monoid":
        return cls(S.mul, S.one)

    @property
    def order(self) -> int:
        return self.table.shape[0]


@dataclass
class AlphaChain:
    levels: List[FrozenSet[int]] = field(default_factory=list)
    """alpha_0 (the center), alpha_1, ... up to the first repetition"""
    exhausts: bool = False
    """Does the last level contain every element?"""


def _closure_under_products(T: np.ndarray, start: Set[int]) -> np.ndarray:
    mask = np.zeros(T.shape[0], dtype=bool)
    mask[list(start)] = True
    while True:
        members = np.flatnonzero(mask)
        grown = mask.copy()
        grown[T[np.ix_(members, members)].ravel()] = True
        if np.array_equal(grown, mask):
            return mask
        mask = grown


def alpha_hierarchy(M: Union[FiniteStruct, Monoid]) -> AlphaChain:
    """The ascending chain alpha_0 (center) ⊆ alpha_1 ⊆ ... where alpha_{k+1} collects every v having
    some power of the form x_1...x_i u y_1...y_j with regular x's and y's and u in alpha_k"""
    if isinstance(M, FiniteStruct):
        M = Monoid.from_struct(M)
    T, n = M.table, M.order
    regular = [x for x in range(n) if (T[T[x], x] == x).any()]
    products = np.flatnonzero(_closure_under_products(T, set(regular) | {M.identity}))
    center = frozenset(x for x in range(n) if np.array_equal(T[x], T[:, x]))
    powers = []
    for v in range(n):
        row, p = [], v
        for _ in range(n):
            row.append(p)
            p = T[p, v]
        powers.append(row)
    chain = AlphaChain(levels=[center])
    while True:
        current = sorted(chain.levels[-1])
        left = np.unique(T[np.ix_(products, current)])
        sandwiched = np.zeros(n, dtype=bool)
        sandwiched[T[np.ix_(left, products)].ravel()] = True
        nxt = frozenset(v for v in range(n) if sandwiched[powers[v]].any())
        if nxt == chain.levels[-1]:
            break
        chain.levels.append(nxt)
    chain.exhausts = len(chain.levels[-1]) == n
    return chain


# ---------------------------------------------------------------------------
# structure files


def struct_to_dict(S: FiniteStruct) -> Dict[str, Any]:
    d = dict(
        order=S.order,
        zero=S.zero,
        one=S.one,
        add=S.add.tolist(),
        mul=S.mul.tolist(),
        labels=list(S.labels),
    )
    if S.name:
        d["name"] = S.name
    return d


def struct_from_dict(d: Mapping[str, Any], name: str = "") -> FiniteStruct:
    for k in ("order", "zero", "one", "add", "mul"):
        if k not in d:
            raise UsageError(f"structure description lacks {k!r}")
    n = int(d["order"])
    return FiniteStruct(
        add=_as_table(d["add"], n, "add"),
        mul=_as_table(d["mul"], n, "mul"),
        zero=d["zero"],
        one=d["one"],
        labels=d.get("labels", None),
        name=d.get("name", name),
    )


def load_struct(path: Union[str, Path]) -> FiniteStruct:
    """Loads a `.struct` file (YAML with order, zero, one, add, mul and optional labels)"""
    path = Path(path)
    try:
        with open(path, "r") as f:
            d = yaml.safe_load(f)
    except OSError as e:
        raise UsageError(f"Cannot read {path}: {e}")
    except yaml.YAMLError as e:
        raise UsageError(f"{path} is not a valid structure file: {e}")
    if not isinstance(d, Mapping):
        raise UsageError(f"{path} is not a valid structure file")
    return struct_from_dict(d, name=path.stem)


def save_struct(S: FiniteStruct, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        yaml.safe_dump(struct_to_dict(S), f, default_flow_style=None, sort_keys=False)
