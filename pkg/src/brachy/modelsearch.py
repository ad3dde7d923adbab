"""
Finite model search for brachy-automorphisms that are not additive.

Two classes are searched: commutative semirings and right near-rings with commutative addition
satisfying x0 = 0. Zero is always element 0 and one is element 1. The searcher fills Cayley-table
cells with propagation, collects completed structures up to isomorphism and looks for a bijective
brachymorphism with an additivity violation on each.
"""
import itertools
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import yaml
from joblib import Parallel, delayed
from tqdm import tqdm

from .brachysearch import Morphism, enumerate_brachymorphisms
from .common import DEFAULT_NODE_BUDGET, BrachyError, RunReport, UsageError
from .finstruct import FiniteStruct, load_struct
from .helpers import get_logger

__all__ = [
    "SearchTask",
    "SearchResult",
    "SEARCH_CLASSES",
    "CANONICAL_ORDER_CAP",
    "FIXTURES",
    "search_counterexample",
    "canonical_form",
    "isomorphic",
    "in_class",
    "fixture_path",
    "reference_fixture",
    "verify_fixture",
    "load_task",
]

SEARCH_CLASSES = ("semiring", "nearring")
CANONICAL_ORDER_CAP = 8
"""Largest order for which canonical forms are computed (all permutations fixing zero and one)"""

ADD, MUL = 0, 1
TABLE_NAMES = {"add": ADD, "mul": MUL}


@dataclass
class SearchTask:
    cls: str = "semiring"
    """semiring (commutative semiring) or nearring (right near-ring, commutative addition, x0 = 0)"""
    order: int = 4
    """Number of elements"""
    node_budget: int = DEFAULT_NODE_BUDGET
    """Total number of search nodes (split evenly between the top-level branches)"""
    time_budget: Optional[float] = None
    """Wall time allowed per top-level branch in seconds"""
    fixed: Tuple[Tuple[str, int, int, int], ...] = ()
    """Cells fixed in advance as (add|mul, row, column, value)"""
    isomorph_rejection: bool = True
    """Keep one structure per isomorphism class"""

    def __post_init__(self):
        if self.cls not in SEARCH_CLASSES:
            raise UsageError(f"Unknown class {self.cls} (known: {', '.join(SEARCH_CLASSES)})")
        if self.order < 2:
            raise UsageError("The search needs at least two elements (zero and one differ)")
        self.fixed = tuple(tuple(_) for _ in self.fixed)
        for t, i, j, v in self.fixed:
            if t not in TABLE_NAMES or not all(0 <= _ < self.order for _ in (i, j, v)):
                raise UsageError(f"Bad fixed cell {(t, i, j, v)}")


@dataclass
class SearchResult:
    task: SearchTask
    structures: List[FiniteStruct] = field(default_factory=list)
    """Counterexamples (canonical forms when isomorph rejection is on)"""
    witnesses: List[Morphism] = field(default_factory=list)
    """A violating bijective brachy-endomorphism for each structure"""
    violations: List[List[Tuple[int, int]]] = field(default_factory=list)
    seen: List[Tuple[int, ...]] = field(default_factory=list)
    """Every completed structure (canonical when isomorph rejection is on) as its flattened (add, mul) tables"""
    stats: Dict[str, Any] = field(default_factory=dict)
    """nodes, prunes, completed structures, isomorphism classes, wall time"""
    exhausted: bool = False
    """Was the whole search space explored?"""

    @property
    def budget_exhausted(self) -> bool:
        return not self.exhausted

    @property
    def found(self) -> bool:
        return len(self.structures) > 0


def in_class(S: FiniteStruct, cls: str) -> bool:
    c = S.classification
    if cls == "semiring":
        return c.is_commutative_semiring
    if cls == "nearring":
        return c.is_right_nearring and c.add_commutative and c.right_zero_law
    raise UsageError(f"Unknown class {cls}")


# ---------------------------------------------------------------------------
# canonical forms


def _relabel(S: FiniteStruct, pi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    inverse = np.argsort(pi)
    return pi[S.add[np.ix_(inverse, inverse)]], pi[S.mul[np.ix_(inverse, inverse)]]


def canonical_form(S: FiniteStruct) -> FiniteStruct:
    """The relabeling with zero at 0, one at 1 and lexicographically least (add, mul) tables"""
    n = S.order
    if n > CANONICAL_ORDER_CAP:
        raise UsageError(f"canonical forms are limited to order {CANONICAL_ORDER_CAP}")
    if S.zero == S.one:
        raise UsageError("canonical forms need zero and one to differ")
    others = [x for x in S.elements if x not in (S.zero, S.one)]
    best, best_key = None, None
    for rest in itertools.permutations(range(2, n)):
        pi = np.empty(n, dtype=np.int64)
        pi[S.zero], pi[S.one] = 0, 1
        pi[others] = rest
        add, mul = _relabel(S, pi)
        key = add.ravel().tolist() + mul.ravel().tolist()
        if best_key is None or key < best_key:
            best, best_key = (add, mul), key
    return FiniteStruct(add=best[0], mul=best[1], zero=0, one=1, name=S.name)


def isomorphic(S: FiniteStruct, T: FiniteStruct) -> bool:
    """Brute force: is there a bijection preserving zero, one, + and ·?"""
    if S.order != T.order:
        return False
    others = [x for x in S.elements if x not in (S.zero, S.one)]
    targets = [y for y in T.elements if y not in (T.zero, T.one)]
    if (S.zero == S.one) != (T.zero == T.one):
        return False
    for image in itertools.permutations(targets):
        pi = np.empty(S.order, dtype=np.int64)
        pi[S.zero], pi[S.one] = T.zero, T.one
        pi[others] = image
        add, mul = _relabel(S, pi)
        if np.array_equal(add, T.add) and np.array_equal(mul, T.mul):
            return True
    return False


# ---------------------------------------------------------------------------
# table search


class _TableSearch:
    """Depth first search over Cayley-table cells.

    Tables are (n+1) x (n+1) with -1 for unknown cells; the extra row and column are all -1 so that
    indexing with an unknown value yields unknown.
    """

    def __init__(self, task: SearchTask):
        self.task = task
        n = self.n = task.order
        self.semiring = task.cls == "semiring"
        self.commutative = (True, self.semiring)
        self.nodes = self.prunes = self.completed = 0
        self.leaves: List[Tuple[np.ndarray, np.ndarray]] = []
        ar = np.arange(n)
        self.X, self.Y, self.Z = np.meshgrid(ar, ar, ar, indexing="ij")
        tables = [np.full((n + 1, n + 1), -1, dtype=np.int64) for _ in range(2)]
        self.consistent = self.fix_cells(tables) and self.propagate(tables)
        self.initial = tables
        self.cells = [
            (t, i, j)
            for t in (ADD, MUL)
            for i, j in sorted(itertools.product(range(n), repeat=2), key=lambda c: (max(c), c))
            if tables[t][i, j] < 0 and (not self.commutative[t] or i <= j)
        ]

    def fix_cells(self, tables: List[np.ndarray]) -> bool:
        A, M = tables
        ar = np.arange(self.n)
        forced = [(ADD, 0, x, x) for x in ar] + [(MUL, 1, x, x) for x in ar] + [(MUL, x, 1, x) for x in ar]
        if not self.semiring:
            forced += [(MUL, x, 0, 0) for x in ar] + [(MUL, 0, x, 0) for x in ar]
        forced += [(TABLE_NAMES[t], i, j, v) for t, i, j, v in self.task.fixed]
        return all(self.set(tables, *_) for _ in forced)

    def set(self, tables: List[np.ndarray], t: int, i: int, j: int, v: int) -> bool:
        T = tables[t]
        for a, b in ((i, j), (j, i)) if self.commutative[t] else ((i, j),):
            if T[a, b] >= 0 and T[a, b] != v:
                return False
            T[a, b] = v
        return True

    def equations(self, A: np.ndarray, M: np.ndarray):
        X, Y, Z = self.X, self.Y, self.Z
        yield ADD, A[X, Y], Z, ADD, X, A[Y, Z]
        yield MUL, M[X, Y], Z, MUL, X, M[Y, Z]
        if self.semiring:
            yield MUL, X, A[Y, Z], ADD, M[X, Y], M[X, Z]
        else:
            yield MUL, A[X, Y], Z, ADD, M[X, Z], M[Y, Z]

    def latin(self, A: np.ndarray) -> bool:
        s = np.sort(A[: self.n, : self.n], axis=1)
        return not ((s[:, 1:] == s[:, :-1]) & (s[:, 1:] >= 0)).any()

    def propagate(self, tables: List[np.ndarray]) -> bool:
        """Applies every forced cell until nothing changes; False on a contradiction"""
        while True:
            forced = []
            for tl, il, jl, tr, ir, jr in self.equations(*tables):
                vl, vr = tables[tl][il, jl], tables[tr][ir, jr]
                if ((vl >= 0) & (vr >= 0) & (vl != vr)).any():
                    return False
                for k in np.flatnonzero(((vl >= 0) & (vr < 0) & (ir >= 0) & (jr >= 0)).ravel()):
                    forced.append((tr, ir.flat[k], jr.flat[k], vl.flat[k]))
                for k in np.flatnonzero(((vr >= 0) & (vl < 0) & (il >= 0) & (jl >= 0)).ravel()):
                    forced.append((tl, il.flat[k], jl.flat[k], vr.flat[k]))
            if not all(self.set(tables, int(t), int(i), int(j), int(v)) for t, i, j, v in forced):
                return False
            if not self.semiring and not self.latin(tables[ADD]):
                return False
            if not forced:
                return True

    def run(self, tables: List[np.ndarray], deadline: Optional[float], budget: int) -> bool:
        """Explores the subtree below `tables`; returns False when the budget ran out"""
        cell = next(((t, i, j) for t, i, j in self.cells if tables[t][i, j] < 0), None)
        if cell is None:
            self.completed += 1
            self.leaves.append((tables[ADD][: self.n, : self.n].copy(), tables[MUL][: self.n, : self.n].copy()))
            return True
        t, i, j = cell
        for v in range(self.n):
            self.nodes += 1
            if self.nodes > budget or (deadline is not None and time.perf_counter() > deadline):
                return False
            child = [_.copy() for _ in tables]
            if self.set(child, t, i, j, v) and self.propagate(child):
                if not self.run(child, deadline, budget):
                    return False
            else:
                self.prunes += 1
        return True


def _witness(S: FiniteStruct) -> Optional[Morphism]:
    """The first bijective, non-additive brachy-endomorphism (lexicographic order of maps)"""
    for f in enumerate_brachymorphisms(S, S):
        if f.is_bijective and f.violations:
            return f
    return None


def _explore(task: SearchTask, first_value: Optional[int], budget: int) -> Dict[str, Any]:
    """Runs one top-level branch and post-processes its completed structures"""
    search = _TableSearch(task)
    tables = [_.copy() for _ in search.initial]
    deadline = None if task.time_budget is None else time.perf_counter() + task.time_budget
    complete = True
    if search.consistent and first_value is None:
        complete = search.run(tables, deadline, budget)
    elif search.consistent:
        t, i, j = search.cells[0]
        search.nodes += 1
        if search.set(tables, t, i, j, first_value) and search.propagate(tables):
            complete = search.run(tables, deadline, budget)
        else:
            search.prunes += 1
    found: Dict[Tuple[int, ...], Tuple[list, list, Tuple[int, ...], list]] = {}
    classes = set()
    for add, mul in search.leaves:
        S = FiniteStruct(add=add, mul=mul, zero=0, one=1)
        if not in_class(S, task.cls):
            raise BrachyError(f"the search produced a structure outside the class {task.cls}")
        if task.isomorph_rejection and task.order <= CANONICAL_ORDER_CAP:
            S = canonical_form(S)
        key = tuple(S.add.ravel().tolist() + S.mul.ravel().tolist())
        if key in classes and task.isomorph_rejection:
            continue
        classes.add(key)
        f = _witness(S)
        if f is not None:
            found[key] = (S.add.tolist(), S.mul.tolist(), f.as_tuple, f.violations)
    return dict(
        nodes=search.nodes,
        prunes=search.prunes,
        completed=search.completed,
        classes=sorted(classes),
        found=found,
        complete=complete,
    )


def search_counterexample(task: SearchTask, n_jobs: int = 1, progress: bool = False) -> SearchResult:
    """Searches `task.cls` structures of order `task.order` with a violating brachy-automorphism.

    Args:
        task: What to search
        n_jobs: Number of workers for the top-level branches (results do not depend on it)
        progress: Show a progress bar over the branches

    Remarks:
        - The node budget is split evenly between the top-level branches, so the explored tree and
          the result are the same for any number of workers.
        - A run that hits its budget returns what it found with `exhausted` set to False.
    """
    log = get_logger("modelsearch")
    _start = time.perf_counter()
    probe = _TableSearch(task)
    if probe.consistent and probe.cells:
        branches: List[Optional[int]] = list(range(task.order))
    else:
        branches = [None]
    budget = max(1, task.node_budget // len(branches))
    if n_jobs == 1:
        outcomes = [_explore(task, b, budget) for b in tqdm(branches, disable=not progress)]
    else:
        outcomes = Parallel(n_jobs=n_jobs)(
            delayed(_explore)(task, b, budget) for b in tqdm(branches, disable=not progress)
        )
    result = SearchResult(task=task, exhausted=all(_["complete"] for _ in outcomes))
    merged: Dict[Tuple[int, ...], Any] = {}
    classes = set()
    for outcome in outcomes:
        classes.update(outcome["classes"])
        for key, value in outcome["found"].items():
            merged.setdefault(key, value)
    for key in sorted(merged.keys()):
        add, mul, f, violations = merged[key]
        S = FiniteStruct(add=add, mul=mul, zero=0, one=1, name=f"{task.cls}-{task.order}-{len(result.structures)}")
        result.structures.append(S)
        result.witnesses.append(Morphism(S, S, f))
        result.violations.append([tuple(_) for _ in violations])
    result.seen = sorted(classes)
    result.stats = dict(
        nodes=sum(_["nodes"] for _ in outcomes),
        prunes=sum(_["prunes"] for _ in outcomes),
        completed=sum(_["completed"] for _ in outcomes),
        classes=len(classes),
        branches=len(branches),
        wall_time=time.perf_counter() - _start,
    )
    if not result.exhausted:
        log.warning(f"search {task.cls} order {task.order} stopped at its budget: {result.stats}")
    log.info(f"search {task.cls} order {task.order}: {len(result.structures)} counterexamples {result.stats}")
    return result


def load_task(path: Union[str, Path]) -> SearchTask:
    """Reads a YAML task file whose keys are the fields of `SearchTask`"""
    try:
        with open(path, "r") as f:
            d = yaml.safe_load(f) or {}
        return SearchTask(**d)
    except (OSError, yaml.YAMLError, TypeError) as e:
        raise UsageError(f"Cannot load search task from {path}: {e}")


# ---------------------------------------------------------------------------
# fixtures

FIXTURES: Dict[str, Dict[str, Any]] = {
    "table1": dict(
        cls="semiring",
        map=(0, 2, 1, 3),
        pair=(1, 2),
        fixed_points=(),
    ),
    "table2": dict(
        cls="nearring",
        map=(0, 1, 2, 3, 4, 5, 8, 9, 6, 7, 10, 11, 12, 13, 14, 15),
        pair=(2, 4),
        fixed_points=(2, 4),
    ),
}
"""Expected class, automorphism, violating pair and fixed points of each fixture"""

_SIGMA = (0, 15, 12, 3, 4, 11, 8, 7, 6, 9, 10, 5, 2, 13, 14, 1)


def reference_fixture(name: str) -> FiniteStruct:
    """The pinned tables of a fixture, built independently of the fixture file"""
    if name == "table1":
        return FiniteStruct(
            add=[[0, 1, 2, 3], [1, 1, 2, 3], [2, 2, 2, 3], [3, 3, 3, 3]],
            mul=[[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 2], [0, 1, 2, 3]],
            zero=0,
            one=3,
            labels=("0", "a", "b", "1"),
            name="table1",
        )
    if name == "table2":
        ar = np.arange(16)
        mul = np.zeros((16, 16), dtype=np.int64)
        odd = (ar % 2 == 1)[:, None]
        mul[:, 2:15] = np.where(odd, ar[None, 2:15], 0)
        mul[:, 1] = ar
        mul[:, 15] = _SIGMA
        return FiniteStruct(add=ar[:, None] ^ ar[None, :], mul=mul, zero=0, one=1, name="table2")
    raise UsageError(f"Unknown fixture {name!r} (known: {', '.join(FIXTURES.keys())})")


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise UsageError(f"Unknown fixture {name!r} (known: {', '.join(FIXTURES.keys())})")
    return Path(__file__).parent / "data" / f"{name}.struct"


def _first_difference(S: FiniteStruct, T: FiniteStruct) -> Optional[str]:
    if S.order != T.order:
        return f"order: expected {T.order}, found {S.order}"
    for key in ("zero", "one"):
        if getattr(S, key) != getattr(T, key):
            return f"{key}: expected {getattr(T, key)}, found {getattr(S, key)}"
    for key in ("add", "mul"):
        a, b = getattr(S, key), getattr(T, key)
        diff = np.argwhere(a != b)
        if len(diff):
            i, j = diff[0]
            return f"{key}[{i}][{j}]: expected {b[i, j]}, found {a[i, j]}"
    return None


def verify_fixture(name: str, struct: Optional[FiniteStruct] = None) -> RunReport:
    """Checks a fixture cell by cell against the pinned tables, then its class axioms, its
    automorphism and the violation it witnesses.

    Args:
        name: table1 or table2
        struct: Structure to check instead of the shipped fixture file
    """
    spec = FIXTURES.get(name)
    reference = reference_fixture(name)
    S = struct if struct is not None else load_struct(fixture_path(name))
    report = RunReport(command=f"fixture {name}")
    difference = _first_difference(S, reference)
    report.add("tables", difference is None, **({"first_difference": difference} if difference else {}))
    if difference is not None:
        return report
    c = S.classification
    if name == "table1":
        report.add("commutative semiring", c.is_commutative_semiring)
        report.add("not a ring", not c.is_ring, additive_group=c.additive_group)
    else:
        report.add("right near-ring", c.is_right_nearring)
        report.add("commutative addition", c.add_commutative)
        report.add("x0 = 0", c.right_zero_law)
        report.add("left distributivity fails", not c.left_distributive)
        report.add("2x = 0", bool((np.diag(S.add) == S.zero).all()), additive_group="(Z/2)^4")
    f = Morphism(S, S, spec["map"])
    report.add("brachy-automorphism", f.is_brachymorphism and f.is_bijective, map=f.cycles())
    for x in spec["fixed_points"]:
        report.add(f"f({S.label(x)}) = {S.label(x)}", f(x) == x)
    a, b = spec["pair"]
    s = int(S.add[a, b])
    lhs, rhs = f(s), int(S.add[f(a), f(b)])
    report.add(
        "violation",
        lhs != rhs and (a, b) in f.violations,
        pair=f"({S.label(a)},{S.label(b)})",
        sum=S.label(s),
        f_of_sum=S.label(lhs),
        sum_of_images=S.label(rhs),
    )
    report.count("violations", len(f.violations))
    return report
