"""
Brachymorphisms between finite structures and certified addability.

A brachymorphism satisfies f(0) = 0, f(1 + x) = 1 + f(x) and f(xy) = f(x)f(y). It need not be
additive; `additivity_violations` lists the pairs where it is not. The certifiers compute lower
bounds for the addable elements and summable pairs of a finite ring by iterating closure rules to a
fixpoint, and every certified item carries a replayable `Certificate`.
"""
import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from constraint import FunctionConstraint, Problem

from .brachylang import And, Atom, Exists, Or, SFormula, builtin_terms, eval_sformula, expand_tilde, free_variables
from .common import DEFAULT_NODE_BUDGET, BrachyError, NotARingError, ReplayError, ResourceLimitError, UsageError
from .finstruct import FiniteStruct, jacobson_radical
from .helpers import get_logger
from .polycore import NCPoly

__all__ = [
    "Morphism",
    "Certificate",
    "CertifyConfig",
    "FormulaReport",
    "ZxzyReport",
    "PowerMapReport",
    "ADDABLE_RULES",
    "PAIR_RULES",
    "RULE_CITATIONS",
    "enumerate_brachymorphisms",
    "enumerate_brachymorphisms_csp",
    "additivity_violations",
    "certify_addable",
    "certify_summable_pairs",
    "replay_certificates",
    "consistency_violations",
    "check_summability_formula",
    "check_zxzy_characterization",
    "power_map_audit",
]

Pair = Tuple[int, int]
Item = Union[int, Pair]

ADDABLE_RULES = ("r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8", "r9", "r10")
PAIR_RULES = ("s1", "s2", "s3", "s5", "s4", "s0", "sym")

RULE_CITATIONS = {
    "r1": "integer multiples of 1 are addable",
    "r2": "the center is addable",
    "r3": "the Jacobson radical is addable",
    "r4": "addable elements form an additive subgroup",
    "r5": "addable times regular (either side) is addable",
    "r6": "x is addable when some power of x is",
    "r7": "pi-regular elements are addable",
    "r8": "the addable set is right integrally closed",
    "r9": "x is addable when every commutator [x,y] is",
    "r10": "R is addable when every element is a sum a_0 + a_1 y + ... with addable a_k",
    "s0": "(a,x) is summable for addable a",
    "sym": "summability is symmetric",
    "s1": "(x,y) is summable when xy = 0",
    "s2": "(x,y) is summable when xyx = x^2 y",
    "s3": "(x,y) is summable when x+y is addable",
    "s4": "(xu,y) is summable when (x,yv) is and uvu = u",
    "s5": "(x,y) is summable when [x,y] is addable (or pairs with [x,y] are summable)",
}


@dataclass(eq=False)
class Morphism:
    """A total map between finite structures; every flag is recomputed from the map"""

    source: FiniteStruct
    target: FiniteStruct
    map: np.ndarray
    """map[x] is the image of element x"""

    def __post_init__(self):
        self.map = np.array(self.map, dtype=np.int64)
        if self.map.shape != (self.source.order,):
            raise UsageError(f"A map from {self.source} needs {self.source.order} values")
        if self.map.size and (self.map.min() < 0 or self.map.max() >= self.target.order):
            raise UsageError(f"Map values must be elements of {self.target}")
        self.map.setflags(write=False)

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    @property
    def as_tuple(self) -> Tuple[int, ...]:
        return tuple(int(_) for _ in self.map)

    @cached_property
    def is_brachymorphism(self) -> bool:
        R, S, f = self.source, self.target, self.map
        return bool(
            f[R.zero] == S.zero
            and np.array_equal(f[R.succ], S.succ[f])
            and np.array_equal(f[R.mul], S.mul[f[:, None], f[None, :]])
        )

    @cached_property
    def violations(self) -> List[Pair]:
        """Every (a, b) with f(a + b) != f(a) + f(b)"""
        R, S, f = self.source, self.target, self.map
        bad = f[R.add] != S.add[f[:, None], f[None, :]]
        return [(int(a), int(b)) for a, b in np.argwhere(bad)]

    @property
    def is_additive(self) -> bool:
        return not self.violations

    @property
    def is_bijective(self) -> bool:
        return self.source.order == self.target.order and len(set(self.as_tuple)) == self.source.order

    def cycles(self) -> str:
        """Cycle notation of a permutation (with labels), e.g. (a b)"""
        if not self.is_bijective:
            return str([self.target.label(_) for _ in self.map])
        seen, parts = set(), []
        for start in self.source.elements:
            if start in seen or self.map[start] == start:
                continue
            cycle, x = [], start
            while x not in seen:
                seen.add(x)
                cycle.append(self.source.label(x))
                x = int(self.map[x])
            parts.append("(" + " ".join(cycle) + ")")
        return "".join(parts) if parts else "id"

    def __str__(self):
        return f"{self.source.name or 'R'} -> {self.target.name or 'S'}: {self.cycles()}"


# ---------------------------------------------------------------------------
# enumeration


class _Backtracker:
    def __init__(self, R: FiniteStruct, S: FiniteStruct, budget: int):
        self.R, self.S, self.budget = R, S, budget
        self.f = np.full(R.order, -1, dtype=np.int64)
        self.nodes = 0
        self.results: List[Tuple[int, ...]] = []
        self.preds = [np.flatnonzero(R.succ == x) for x in R.elements]
        self.succ_inverse = None
        if len(np.unique(S.succ)) == S.order:
            self.succ_inverse = np.argsort(S.succ)
        occurrences = np.bincount(R.mul.ravel(), minlength=R.order)
        self.order = sorted(R.elements, key=lambda x: (-occurrences[x], x))

    def assign(self, x: int, v: int, trail: List[int]) -> bool:
        R, S, f = self.R, self.S, self.f
        stack = [(x, v)]
        while stack:
            x, v = stack.pop()
            if f[x] >= 0:
                if f[x] != v:
                    return False
                continue
            f[x] = v
            trail.append(x)
            stack.append((int(R.succ[x]), int(S.succ[v])))
            if self.succ_inverse is not None:
                stack.extend((int(p), int(self.succ_inverse[v])) for p in self.preds[x])
            for y in np.flatnonzero(f >= 0):
                fy = f[y]
                stack.append((int(R.mul[x, y]), int(S.mul[v, fy])))
                stack.append((int(R.mul[y, x]), int(S.mul[fy, v])))
        return True

    def undo(self, trail: List[int]) -> None:
        self.f[trail] = -1

    def search(self) -> None:
        x = next((_ for _ in self.order if self.f[_] < 0), None)
        if x is None:
            self.results.append(tuple(int(_) for _ in self.f))
            return
        for v in self.S.elements:
            self.nodes += 1
            if self.nodes > self.budget:
                raise ResourceLimitError(
                    f"brachymorphism enumeration {self.R} -> {self.S}",
                    self.budget,
                    partial=dict(nodes=self.nodes, found=len(self.results)),
                )
            trail: List[int] = []
            if self.assign(x, v, trail):
                self.search()
            self.undo(trail)

    def run(self) -> List[Tuple[int, ...]]:
        trail: List[int] = []
        if self.assign(self.R.zero, self.S.zero, trail) and self.assign(self.R.one, self.S.one, trail):
            self.search()
        return sorted(self.results)


def enumerate_brachymorphisms(
    R: FiniteStruct, S: FiniteStruct, budget: int = DEFAULT_NODE_BUDGET
) -> List[Morphism]:
    """All brachymorphisms R -> S in lexicographic order of their value tuples.

    Args:
        R: Source structure
        S: Target structure
        budget: Number of branching decisions allowed before giving up

    Remarks:
        - f(0) = 0 and f(1) = 1 are forced, values propagate along successor orbits (backwards too
          when the successor of S is a permutation) and products are checked, and forced, as soon
          as both factors have images.
        - Raises `ResourceLimitError` carrying the node count and the number of maps found so far.
    """
    search = _Backtracker(R, S, budget)
    found = search.run()
    get_logger("brachysearch").debug(f"{R} -> {S}: {len(found)} brachymorphisms in {search.nodes} nodes")
    result = [Morphism(R, S, _) for _ in found]
    for f in result:
        if not f.is_brachymorphism:
            raise BrachyError(f"enumeration produced a map that is not a brachymorphism: {f}")
    return result


def _add_constraint(problem: Problem, variables: Sequence[int], predicate) -> None:
    unique = sorted(set(variables))
    positions = [unique.index(_) for _ in variables]
    problem.addConstraint(
        FunctionConstraint(lambda *values, p=positions: predicate(*[values[i] for i in p])), unique
    )


def enumerate_brachymorphisms_csp(R: FiniteStruct, S: FiniteStruct) -> List[Morphism]:
    """Same output as `enumerate_brachymorphisms`, through python-constraint"""
    problem = Problem()
    problem.addVariables(list(R.elements), list(S.elements))
    _add_constraint(problem, [R.zero], lambda a: a == S.zero)
    for x in R.elements:
        _add_constraint(problem, [x, int(R.succ[x])], lambda a, b: S.succ[a] == b)
    for x, y in itertools.product(R.elements, repeat=2):
        _add_constraint(problem, [x, y, int(R.mul[x, y])], lambda a, b, c: S.mul[a, b] == c)
    solutions = sorted(tuple(s[x] for x in R.elements) for s in problem.getSolutions())
    return [Morphism(R, S, _) for _ in solutions]


def additivity_violations(f: Morphism) -> List[Pair]:
    """Every (a, b) with f(a + b) != f(a) + f(b); raises `UsageError` unless f is a brachymorphism"""
    if not f.is_brachymorphism:
        raise UsageError(f"{f} is not a brachymorphism")
    return f.violations


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class Certificate:
    item: Item
    """The certified element (addable) or pair (summable)"""
    rule: str
    """Name of the closure rule"""
    premises: Tuple[Item, ...] = ()
    """Previously certified items the rule used"""
    witness: Tuple[Any, ...] = ()
    """Rule specific data (exponents, quasi-inverses, coefficients)"""

    @property
    def citation(self) -> str:
        return RULE_CITATIONS[self.rule]

    def __str__(self):
        premises = ", ".join(str(_) for _ in self.premises)
        return f"{self.item} by {self.rule} [{self.citation}] from {{{premises}}} witness={self.witness}"


@dataclass
class CertifyConfig:
    rules: Tuple[str, ...] = ADDABLE_RULES
    """Closure rules for addable elements (applied in this order every round)"""
    pair_rules: Tuple[str, ...] = PAIR_RULES
    """Closure rules for summable pairs"""
    max_rounds: int = 100
    """Maximum number of rounds before stopping (the fixpoint is usually reached in two or three)"""

    def __post_init__(self):
        unknown = [_ for _ in tuple(self.rules) + tuple(self.pair_rules) if _ not in RULE_CITATIONS]
        if unknown:
            raise UsageError(f"Unknown rules {unknown} (known: {', '.join(RULE_CITATIONS.keys())})")
        self.rules, self.pair_rules = tuple(self.rules), tuple(self.pair_rules)


def _successor_orbit(R: FiniteStruct) -> List[int]:
    orbit, x = [], R.zero
    while x not in orbit:
        orbit.append(x)
        x = int(R.succ[x])
    return orbit


def _regular_pairs(R: FiniteStruct) -> List[Pair]:
    """Every (u, v) with uvu = u"""
    return [(int(u), int(v)) for u, v in np.argwhere(R.regular_mask)]


def _spans(R: FiniteStruct, coefficients: Sequence[int], powers: Iterable[int]):
    """For n = 1, 2, ... yields the values a_0 p_0 + ... + a_{n-1} p_{n-1} with certified a_k,
    each with one choice of coefficients"""
    reach: Dict[int, Tuple[int, ...]] = {R.zero: ()}
    for p in powers:
        scaled: Dict[int, int] = {}
        for a in coefficients:
            scaled.setdefault(int(R.mul[a, p]), a)
        nxt: Dict[int, Tuple[int, ...]] = {}
        for s, chosen in reach.items():
            for v, a in scaled.items():
                nxt.setdefault(int(R.add[s, v]), chosen + (a,))
        reach = nxt
        yield reach


def _linear_value(R: FiniteStruct, coefficients: Sequence[int], y: int) -> int:
    value, p = R.zero, R.one
    for a in coefficients:
        value = int(R.add[value, R.mul[a, p]])
        p = int(R.mul[p, y])
    return value


class _AddableRules:
    """Applies each closure rule to the current certified set"""

    def __init__(self, R: FiniteStruct):
        self.R = R
        self.orbit = _successor_orbit(R)
        self.regular = sorted({u for u, _ in _regular_pairs(R)})
        self._radical: Optional[FrozenSet[int]] = None

    @property
    def radical(self) -> FrozenSet[int]:
        if self._radical is None:
            self._radical = jacobson_radical(self.R)
        return self._radical

    def apply(self, rule: str, certified: Set[int]) -> List[Certificate]:
        candidates = [x for x in self.R.elements if x not in certified]
        if not candidates:
            return []
        return getattr(self, rule)(candidates, sorted(certified))

    def r1(self, candidates, certified):
        return [Certificate(x, "r1", (), (self.orbit.index(x),)) for x in candidates if x in self.orbit]

    def r2(self, candidates, certified):
        return [Certificate(x, "r2") for x in candidates if x in self.R.center]

    def r3(self, candidates, certified):
        return [Certificate(x, "r3") for x in candidates if x in self.radical]

    def r4(self, candidates, certified):
        R, result = self.R, []
        for x in candidates:
            negs = [b for b in certified if R.neg[b] == x]
            if negs:
                result.append(Certificate(x, "r4", (negs[0],)))
                continue
            for b in certified:
                hits = [c for c in certified if R.add[b, c] == x]
                if hits:
                    result.append(Certificate(x, "r4", (b, hits[0])))
                    break
        return result

    def r5(self, candidates, certified):
        R, result = self.R, []
        for x in candidates:
            found = None
            for a, u in itertools.product(certified, self.regular):
                if R.mul[a, u] == x:
                    found = Certificate(x, "r5", (a,), (u, "right"))
                elif R.mul[u, a] == x:
                    found = Certificate(x, "r5", (a,), (u, "left"))
                if found:
                    break
            if found:
                result.append(found)
        return result

    def r6(self, candidates, certified):
        result = []
        for x in candidates:
            powers = self.R.powers(x)
            n = next((k + 1 for k, p in enumerate(powers) if k > 0 and p in certified), None)
            if n is not None:
                result.append(Certificate(x, "r6", (powers[n - 1],), (n,)))
        return result

    def r7(self, candidates, certified):
        R, result = self.R, []
        is_regular = R.regular_mask.any(axis=1)
        for x in candidates:
            powers = R.powers(x)
            k = next((k + 1 for k, p in enumerate(powers) if is_regular[p]), None)
            if k is not None:
                p = powers[k - 1]
                result.append(Certificate(x, "r7", (), (k, int(R.regular_mask[p].argmax()))))
        return result

    def r8(self, candidates, certified):
        R, result = self.R, []
        for x in candidates:
            powers = [R.one] + R.powers(x)
            for n, reach in enumerate(_spans(R, certified, powers[:-1]), start=1):
                if powers[n] in reach:
                    coefficients = reach[powers[n]]
                    result.append(Certificate(x, "r8", tuple(sorted(set(coefficients))), (n, coefficients)))
                    break
        return result

    def r9(self, candidates, certified):
        R, result = self.R, []
        for x in candidates:
            commutators = sorted({R.commutator(x, y) for y in R.elements})
            if all(_ in certified for _ in commutators):
                result.append(Certificate(x, "r9", tuple(commutators)))
        return result

    def r10(self, candidates, certified):
        R = self.R
        everything = set(R.elements)
        for y in R.elements:
            powers = [R.one] + R.powers(y)
            reach: Dict[int, Tuple[int, ...]] = {}
            for reach in _spans(R, certified, powers):
                if set(reach.keys()) == everything:
                    break
            if set(reach.keys()) == everything:
                return [
                    Certificate(x, "r10", tuple(sorted(set(reach[x]))), (y, reach[x])) for x in candidates
                ]
        return []


def certify_addable(
    R: FiniteStruct, cfg: Optional[CertifyConfig] = None
) -> Tuple[FrozenSet[int], List[Certificate]]:
    """Certifies addable elements of a finite ring by iterating the closure rules to a fixpoint.

    Args:
        R: A ring
        cfg: Rules to use and round limit

    Returns:
        The certified set and one certificate per certified element, in derivation order.

    Remarks:
        - The certified set is a lower bound: addability quantifies over brachymorphisms into all rings.
        - There is no rule for products of addable elements.
    """
    cfg = cfg or CertifyConfig()
    R.require_ring("certify_addable")
    log = get_logger("brachysearch")
    rules = _AddableRules(R)
    certified: Set[int] = set()
    certificates: List[Certificate] = []
    for rnd in range(cfg.max_rounds):
        fired = Counter()
        for rule in cfg.rules:
            for c in rules.apply(rule, certified):
                if c.item in certified:
                    continue
                certified.add(c.item)
                certificates.append(c)
                fired[rule] += 1
        log.info(f"{R} round {rnd}: {dict(fired)} ({len(certified)}/{R.order} certified)")
        if not fired or len(certified) == R.order:
            break
    return frozenset(certified), certificates


class _PairRules:
    def __init__(self, R: FiniteStruct, addable: FrozenSet[int]):
        self.R, self.addable = R, addable
        self.regular = _regular_pairs(R)
        terms = builtin_terms()
        self.p2 = expand_tilde(terms["p2"])
        self.sq = NCPoly.word("xx") + NCPoly.word("yx")

    def apply(self, rule: str, certified: Set[Pair]) -> List[Certificate]:
        candidates = [(x, y) for x, y in itertools.product(self.R.elements, repeat=2) if (x, y) not in certified]
        if not candidates:
            return []
        return getattr(self, rule)(candidates, certified)

    def s0(self, candidates, certified):
        result = []
        for x, y in candidates:
            if x in self.addable:
                result.append(Certificate((x, y), "s0", (x,)))
            elif y in self.addable:
                result.append(Certificate((x, y), "s0", (y,)))
        return result

    def sym(self, candidates, certified):
        return [Certificate((x, y), "sym", ((y, x),)) for x, y in candidates if (y, x) in certified]

    def s1(self, candidates, certified):
        M = self.R.mul
        return [Certificate((x, y), "s1") for x, y in candidates if M[x, y] == self.R.zero]

    def s2(self, candidates, certified):
        M = self.R.mul
        return [Certificate((x, y), "s2") for x, y in candidates if M[M[x, y], x] == M[M[x, x], y]]

    def s3(self, candidates, certified):
        A = self.R.add
        return [Certificate((x, y), "s3", (int(A[x, y]),)) for x, y in candidates if A[x, y] in self.addable]

    def companions(self, x: int, y: int) -> Tuple[int, int, int]:
        """x^2 + yx, p2(x, y, x+y) and p2(x, 1+y, 1+x+y)"""
        R = self.R
        z = int(R.add[x, y])
        return (
            R.evaluate(self.sq, dict(x=x, y=y)),
            R.evaluate(self.p2, dict(x=x, y=y, z=z)),
            R.evaluate(self.p2, dict(x=x, y=int(R.succ[y]), z=int(R.succ[z]))),
        )

    def s5(self, candidates, certified):
        R, result = self.R, []
        for x, y in candidates:
            c = R.commutator(x, y)
            if c in self.addable:
                result.append(Certificate((x, y), "s5", (c,)))
                continue
            premises = tuple((c, w) for w in self.companions(x, y))
            if all(_ in certified for _ in premises):
                result.append(Certificate((x, y), "s5", premises))
        return result

    def s4(self, candidates, certified):
        R, result = self.R, []
        wanted = set(candidates)
        done: Set[Pair] = set()
        for (x, w), (u, v) in itertools.product(sorted(certified), self.regular):
            xu = int(R.mul[x, u])
            for y in np.flatnonzero(R.mul[:, v] == w):
                item = (xu, int(y))
                if item in wanted and item not in done:
                    done.add(item)
                    result.append(Certificate(item, "s4", ((x, w),), (u, v)))
        return result


def certify_summable_pairs(
    R: FiniteStruct, cfg: Optional[CertifyConfig] = None
) -> Tuple[FrozenSet[Pair], List[Certificate]]:
    """Certifies summable pairs of a finite ring.

    Returns:
        The certified pairs and the certificates: first those of `certify_addable` (which the pair
        rules cite) followed by one per pair.
    """
    cfg = cfg or CertifyConfig()
    R.require_ring("certify_summable_pairs")
    addable, certificates = certify_addable(R, cfg)
    rules = _PairRules(R, addable)
    log = get_logger("brachysearch")
    certified: Set[Pair] = set()
    total = R.order * R.order
    for rnd in range(cfg.max_rounds):
        fired = Counter()
        for rule in cfg.pair_rules:
            for c in rules.apply(rule, certified):
                if c.item in certified:
                    continue
                certified.add(c.item)
                certificates.append(c)
                fired[rule] += 1
        log.info(f"{R} pair round {rnd}: {dict(fired)} ({len(certified)}/{total} certified)")
        if not fired or len(certified) == total:
            break
    return frozenset(certified), certificates


def _replay_one(R: FiniteStruct, c: Certificate, rules: _PairRules) -> bool:
    M, A = R.mul, R.add
    rule, w, p = c.rule, c.witness, c.premises
    if isinstance(c.item, tuple):
        x, y = c.item
        if rule == "s0":
            return p[0] in (x, y)
        if rule == "sym":
            return p == ((y, x),)
        if rule == "s1":
            return M[x, y] == R.zero
        if rule == "s2":
            return M[M[x, y], x] == M[M[x, x], y]
        if rule == "s3":
            return p == (int(A[x, y]),)
        if rule == "s4":
            (x0, w0), (u, v) = p[0], w
            return M[M[u, v], u] == u and M[x0, u] == x and M[y, v] == w0
        if rule == "s5":
            comm = R.commutator(x, y)
            if len(p) == 1:
                return p == (comm,)
            return p == tuple((comm, _) for _ in rules.companions(x, y))
        return False
    x = c.item
    if rule == "r1":
        return R.nmul(w[0], R.one) == x
    if rule == "r2":
        return x in R.center
    if rule == "r3":
        return x in jacobson_radical(R)
    if rule == "r4":
        return (len(p) == 1 and R.neg[p[0]] == x) or (len(p) == 2 and A[p[0], p[1]] == x)
    if rule == "r5":
        a, (u, side) = p[0], w
        return bool(R.regular_mask[u].any()) and (M[a, u] if side == "right" else M[u, a]) == x
    if rule == "r6":
        return w[0] >= 2 and R.power(x, w[0]) == p[0]
    if rule == "r7":
        k, t = w
        q = R.power(x, k)
        return k >= 1 and M[M[q, t], q] == q
    if rule == "r8":
        n, coefficients = w
        return len(coefficients) == n and set(coefficients) <= set(p) and _linear_value(
            R, coefficients, x
        ) == R.power(x, n)
    if rule == "r9":
        return set(p) == {R.commutator(x, y) for y in R.elements}
    if rule == "r10":
        y, coefficients = w
        return set(coefficients) <= set(p) and _linear_value(R, coefficients, y) == x
    return False


def replay_certificates(R: FiniteStruct, certificates: Sequence[Certificate]) -> bool:
    """Re-derives every certificate, in order, from its premises; raises `ReplayError` on failure"""
    proven: Set[Item] = set()
    rules = _PairRules(R, frozenset())
    for c in certificates:
        missing = [_ for _ in c.premises if _ not in proven]
        if missing:
            raise ReplayError(f"{c}: premises {missing} were not certified before")
        if not _replay_one(R, c, rules):
            raise ReplayError(f"{c}: the rule does not re-derive the conclusion")
        proven.add(c.item)
    return True


def consistency_violations(
    R: FiniteStruct, addable: Iterable[int], pairs: Iterable[Pair], morphisms: Iterable[Morphism]
) -> List[Tuple[Item, Morphism]]:
    """Certified items refuted by a brachymorphism out of R (any result means a certifier bug)"""
    addable, pairs = set(addable), set(pairs)
    result = []
    for f in morphisms:
        if f.source is not R:
            raise UsageError(f"{f} does not start at {R}")
        for a, b in f.violations:
            if (a, b) in pairs:
                result.append(((a, b), f))
            for x in (a, b):
                if x in addable:
                    result.append((x, f))
    return result


# ---------------------------------------------------------------------------
# formulas, characterizations and power maps


@dataclass
class FormulaReport:
    formula: str
    structure: str
    variables: Tuple[str, ...]
    """Free variables; the last one stands for the sum of the others"""
    values: Tuple[int, ...]
    condition_ii: bool
    """Does R satisfy the formula at (a_1, ..., a_n, a_1 + ... + a_n)?"""
    condition_i_on_battery: bool
    """Does the formula imply the sum equation in every structure of the battery?"""
    counterexamples: List[Tuple[str, Tuple[int, ...]]] = field(default_factory=list)
    """(structure, assignment) where the formula holds but the last value is not the sum"""
    battery: Tuple[str, ...] = ()
    limitation: str = (
        "condition (i) is checked on the battery only; it is a necessary check, not a proof for all rings"
    )

    @property
    def applicable(self) -> bool:
        return self.condition_ii

    @property
    def passed(self) -> bool:
        return self.condition_ii and self.condition_i_on_battery


def _positive(phi: Any) -> bool:
    if isinstance(phi, Atom):
        return True
    if isinstance(phi, (And, Or)):
        return all(_positive(_) for _ in phi.parts)
    if isinstance(phi, Exists):
        return _positive(phi.body)
    return False


def _sum(S: FiniteStruct, values: Iterable[int]) -> int:
    total = S.zero
    for v in values:
        total = int(S.add[total, v])
    return total


def check_summability_formula(
    phi: SFormula,
    R: FiniteStruct,
    values: Sequence[int],
    battery: Sequence[FiniteStruct],
    variables: Optional[Sequence[str]] = None,
    name: str = "",
) -> FormulaReport:
    """Checks the two conditions that make `phi` a summability formula for `values`.

    Args:
        phi: A positive existential S-formula
        R: The structure holding `values`
        values: The tuple (a_1, ..., a_n)
        battery: Structures on which the implication phi(x_1..x_n, s) => s = x_1 + ... + x_n is checked
        variables: Free variables of phi in order; defaults to the sorted free variables
        name: Name printed in the report
    """
    if not _positive(phi):
        raise UsageError(f"{phi} is not a positive existential formula")
    variables = tuple(variables) if variables is not None else tuple(sorted(free_variables(phi)))
    if len(variables) != len(values) + 1:
        raise UsageError(f"{phi} has free variables {variables}; expected {len(values)} values plus the sum")
    for v in values:
        if not 0 <= v < R.order:
            raise UsageError(f"{v} is not an element of {R}")
    env = dict(zip(variables, list(values) + [_sum(R, values)]))
    report = FormulaReport(
        formula=name or str(phi),
        structure=R.name,
        variables=variables,
        values=tuple(values),
        condition_ii=eval_sformula(phi, R, env),
        condition_i_on_battery=True,
        battery=tuple(_.name for _ in battery),
    )
    for B in battery:
        for assignment in itertools.product(B.elements, repeat=len(variables)):
            if assignment[-1] == _sum(B, assignment[:-1]):
                continue
            if eval_sformula(phi, B, dict(zip(variables, assignment))):
                report.condition_i_on_battery = False
                report.counterexamples.append((B.name, tuple(assignment)))
                break
    return report


@dataclass
class ZxzyReport:
    successor_condition: bool
    """f(1 + x) = 1 + f(x) for all x"""
    sandwich_condition: bool
    """f(z + xzy) = f(z) + f(x)f(z)f(y) for all x, y and z in {0, 1, x + y}"""
    is_homomorphism: bool
    """f is additive, multiplicative and unital"""

    @property
    def conditions_hold(self) -> bool:
        return self.successor_condition and self.sandwich_condition

    @property
    def consistent(self) -> bool:
        """The conditions hold exactly when f is a ring homomorphism"""
        return self.conditions_hold == self.is_homomorphism


def check_zxzy_characterization(f: Morphism) -> ZxzyReport:
    """Checks the successor/sandwich characterization of ring homomorphisms on one map"""
    R, S, m = f.source, f.target, f.map
    for T, role in ((R, "source"), (S, "target")):
        if not T.is_ring:
            raise NotARingError(f"the characterization is stated between rings; the {role} {T} is not one")
    successor = bool(np.array_equal(m[R.succ], S.succ[m]))
    sandwich = True
    for x, y in itertools.product(R.elements, repeat=2):
        for z in (R.zero, R.one, int(R.add[x, y])):
            lhs = m[R.add[z, R.mul[R.mul[x, z], y]]]
            rhs = S.add[m[z], S.mul[S.mul[m[x], m[z]], m[y]]]
            if lhs != rhs:
                sandwich = False
                break
        if not sandwich:
            break
    homomorphism = (
        m[R.one] == S.one
        and bool(np.array_equal(m[R.add], S.add[m[:, None], m[None, :]]))
        and bool(np.array_equal(m[R.mul], S.mul[m[:, None], m[None, :]]))
    )
    return ZxzyReport(successor, sandwich, bool(homomorphism))


@dataclass
class PowerMapReport:
    exponent: int
    morphism: Morphism
    is_brachymorphism: bool
    violations: List[Pair]


def power_map_audit(R: FiniteStruct, n: int) -> PowerMapReport:
    """Is x -> x^n a brachymorphism of R, and if so, is it additive?"""
    if n < 1:
        raise UsageError(f"exponent must be positive (got {n})")
    f = Morphism(R, R, [R.power(x, n) for x in R.elements])
    brachy = f.is_brachymorphism
    return PowerMapReport(n, f, brachy, f.violations if brachy else [])
