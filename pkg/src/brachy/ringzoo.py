"""
Constructors for the finite rings used throughout the workbench.

Structures are described by small expressions such as ``matring(zmod(2),2)`` or
``quotientpoly(zmod(2),[1,1,1])`` (coefficients listed from the constant term up).
"""
import ast
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from .common import CONSTRUCTION_CAP, BrachyError, ParseError, ResourceLimitError, UsageError
from .finstruct import FiniteStruct, Monoid
from .helpers import get_logger

__all__ = [
    "ZooSpec",
    "parse_spec",
    "build",
    "zmod",
    "product",
    "matring",
    "triangular",
    "quotientpoly",
    "monoidring",
    "matrix_entries",
    "BATTERY",
    "default_battery",
    "VALIDATION_CAP",
]

VALIDATION_CAP = 512
"""Constructions up to this order are fully classified before being returned"""

BATTERY = (
    "zmod(2)",
    "zmod(3)",
    "zmod(4)",
    "zmod(6)",
    "zmod(8)",
    "quotientpoly(zmod(2),[1,1,1])",
    "quotientpoly(zmod(2),[0,0,1])",
    "product(zmod(2),zmod(2))",
    "matring(zmod(2),2)",
    "triangular(zmod(2),2,upper)",
    "triangular(zmod(2),2,lower)",
    "monoidring(zmod(2),[[0,1],[1,1]])",
)
"""The default battery: small rings spanning commutative/noncommutative and semisimple/non-semisimple cases"""


def _format_arg(a: Any) -> str:
    if isinstance(a, (list, tuple)):
        return "[" + ",".join(_format_arg(_) for _ in a) + "]"
    return str(a)


@dataclass(frozen=True)
class ZooSpec:
    kind: str
    """One of zmod, product, matring, triangular, quotientpoly, monoidring"""
    args: Tuple[Any, ...] = ()
    """Arguments: integers, nested ZooSpecs, tuples (lists) or the words upper/lower"""

    def __str__(self):
        return f"{self.kind}({','.join(_format_arg(_) for _ in self.args)})"


def _convert(node: ast.AST, text: str) -> Any:
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        if node.keywords:
            raise ParseError("Keyword arguments are not supported", text, node.col_offset)
        return ZooSpec(node.func.id, tuple(_convert(_, text) for _ in node.args))
    if isinstance(node, (ast.List, ast.Tuple)):
        return tuple(_convert(_, text) for _ in node.elts)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.Name):
        return node.id
    raise ParseError("Unsupported construct", text, getattr(node, "col_offset", 0))


def parse_spec(text: str) -> ZooSpec:
    """Parses a constructor expression into a `ZooSpec`"""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ParseError(f"Invalid structure expression: {e.msg}", text, max(0, (e.offset or 1) - 1))
    spec = _convert(tree.body, text)
    if not isinstance(spec, ZooSpec):
        raise ParseError("Expected a constructor call", text, 0)
    return spec


def _check_cap(order: int, cap: int, what: str) -> None:
    if order > cap:
        get_logger("ringzoo").warning(f"{what} would have order {order} > {cap}")
        raise ResourceLimitError(f"construction of {what} (order {order})", cap)


def _commutative_base(K: FiniteStruct, what: str) -> None:
    if not K.classification.is_commutative_ring:
        raise UsageError(f"{what} needs a commutative coefficient ring but {K} is not one")


def _element(K: FiniteStruct, value: Any) -> int:
    if isinstance(value, int) and 0 <= value < K.order:
        return value
    return K.index(str(value))


def zmod(n: int) -> FiniteStruct:
    """The ring of integers modulo n"""
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"zmod needs a positive integer (got {n})")
    ar = np.arange(n)
    return FiniteStruct(
        add=(ar[:, None] + ar[None, :]) % n,
        mul=(ar[:, None] * ar[None, :]) % n,
        zero=0,
        one=1 % n,
        name=f"zmod({n})",
    )


def product(A: FiniteStruct, B: FiniteStruct, cap: int = CONSTRUCTION_CAP) -> FiniteStruct:
    """The direct product with componentwise operations; (a, b) has index a * |B| + b"""
    n, m = A.order, B.order
    _check_cap(n * m, cap, f"product({A.name},{B.name})")

    def combine(T1, T2):
        return (T1[:, None, :, None] * m + T2[None, :, None, :]).reshape(n * m, n * m)

    return FiniteStruct(
        add=combine(A.add, B.add),
        mul=combine(A.mul, B.mul),
        zero=A.zero * m + B.zero,
        one=A.one * m + B.one,
        labels=[f"({a},{b})" for a in A.labels for b in B.labels],
        name=f"product({A.name},{B.name})",
    )


def _matrix_structure(K: FiniteStruct, n: int, free: Sequence[int], name: str, cap: int) -> FiniteStruct:
    """Matrices over K whose entries outside the `free` positions (row-major) are zero"""
    q, f = K.order, len(free)
    _check_cap(q ** f, cap, name)
    N = q ** f
    weights = q ** np.arange(f, dtype=np.int64)
    free = np.array(free, dtype=np.int64)
    fixed = np.setdiff1d(np.arange(n * n), free)
    digits = (np.arange(N, dtype=np.int64)[:, None] // weights[None, :]) % q
    E = np.full((N, n * n), K.zero, dtype=np.int64)
    E[:, free] = digits
    E = E.reshape(N, n, n)

    def encode(X: np.ndarray) -> np.ndarray:
        flat = X.reshape(X.shape[0], n * n)
        if fixed.size and (flat[:, fixed] != K.zero).any():
            raise BrachyError(f"{name} is not closed under the ring operations")
        return (flat[:, free] * weights).sum(axis=1)

    add = np.empty((N, N), dtype=np.int64)
    mul = np.empty((N, N), dtype=np.int64)
    for a in range(N):
        add[a] = encode(K.add[E[a][None, :, :], E])
        # terms[b, i, k, j] = a[i, k] * b[k, j]
        terms = K.mul[E[a][None, :, :, None], E[:, None, :, :]]
        acc = terms[:, :, 0, :]
        for k in range(1, n):
            acc = K.add[acc, terms[:, :, k, :]]
        mul[a] = encode(acc)
    zero_matrix = np.full((1, n, n), K.zero, dtype=np.int64)
    identity = zero_matrix.copy()
    identity[0][np.diag_indices(n)] = K.one
    labels = [
        "[" + ";".join(" ".join(K.labels[e] for e in row) for row in E[i]) + "]" for i in range(N)
    ]
    return FiniteStruct(
        add=add,
        mul=mul,
        zero=int(encode(zero_matrix)[0]),
        one=int(encode(identity)[0]),
        labels=labels,
        name=name,
    )


def matring(K: FiniteStruct, n: int, cap: int = CONSTRUCTION_CAP) -> FiniteStruct:
    """The full n x n matrix ring over a commutative ring K"""
    _commutative_base(K, "matring")
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"matrix order must be a positive integer (got {n})")
    return _matrix_structure(K, n, list(range(n * n)), f"matring({K.name},{n})", cap)


def triangular(K: FiniteStruct, n: int, side: str = "lower", cap: int = CONSTRUCTION_CAP) -> FiniteStruct:
    """Lower or upper triangular n x n matrices over a commutative ring K"""
    _commutative_base(K, "triangular")
    if side not in ("lower", "upper"):
        raise UsageError(f"side must be lower or upper (got {side})")
    if side == "lower":
        free = [i * n + j for i in range(n) for j in range(n) if j <= i]
    else:
        free = [i * n + j for i in range(n) for j in range(n) if j >= i]
    return _matrix_structure(K, n, free, f"triangular({K.name},{n},{side})", cap)


def _tabulate(
    elements: List[Tuple[int, ...]],
    add: Callable,
    mul: Callable,
    zero: Tuple[int, ...],
    one: Tuple[int, ...],
    labels: List[str],
    name: str,
) -> FiniteStruct:
    index = {e: i for i, e in enumerate(elements)}
    return FiniteStruct(
        add=[[index[add(a, b)] for b in elements] for a in elements],
        mul=[[index[mul(a, b)] for b in elements] for a in elements],
        zero=index[zero],
        one=index[one],
        labels=labels,
        name=name,
    )


def quotientpoly(K: FiniteStruct, coefficients: Sequence[Any], cap: int = CONSTRUCTION_CAP) -> FiniteStruct:
    """K[x]/(g) for a monic g given by its coefficients from the constant term up"""
    _commutative_base(K, "quotientpoly")
    g = [_element(K, _) for _ in coefficients]
    d = len(g) - 1
    name = f"quotientpoly({K.name},{_format_arg(list(coefficients))})"
    if d < 1:
        raise UsageError(f"{name}: the modulus must have positive degree")
    if g[-1] != K.one:
        raise UsageError(f"{name}: the modulus polynomial is not monic")
    _check_cap(K.order ** d, cap, name)
    A, M = K.add, K.mul

    def add(a, b):
        return tuple(int(A[x, y]) for x, y in zip(a, b))

    def mul(a, b):
        prod = [K.zero] * (2 * d - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = int(A[prod[i + j], M[x, y]])
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            prod[k] = K.zero
            for j in range(d):
                prod[k - d + j] = int(A[prod[k - d + j], K.neg[M[c, g[j]]]])
        return tuple(prod[:d])

    elements = list(itertools.product(range(K.order), repeat=d))
    zero = tuple([K.zero] * d)
    one = tuple([K.one] + [K.zero] * (d - 1))
    return _tabulate(elements, add, mul, zero, one, [_poly_label(K, e) for e in elements], name)


def _poly_label(K: FiniteStruct, coefficients: Tuple[int, ...]) -> str:
    terms = []
    for k, c in enumerate(coefficients):
        if c == K.zero:
            continue
        c = K.labels[c]
        if k == 0:
            terms.append(c)
        else:
            power = "x" if k == 1 else f"x^{k}"
            terms.append(power if c == "1" else f"{c}{power}")
    return "+".join(terms) if terms else "0"


def monoidring(K: FiniteStruct, table: Sequence[Sequence[int]], cap: int = CONSTRUCTION_CAP) -> FiniteStruct:
    """The monoid ring K[M] for a commutative ring K and a finite monoid table"""
    _commutative_base(K, "monoidring")
    T = np.array(table, dtype=np.int64)
    m = T.shape[0] if T.ndim == 2 else 0
    ar = np.arange(m)
    candidates = [e for e in range(m) if np.array_equal(T[e], ar) and np.array_equal(T[:, e], ar)]
    if not candidates:
        raise UsageError("monoidring: the table has no identity element")
    monoid = Monoid(T, candidates[0])
    name = f"monoidring({K.name},{_format_arg(T.tolist())})"
    _check_cap(K.order ** m, cap, name)
    A, M, S = K.add, K.mul, monoid.table

    def add(a, b):
        return tuple(int(A[x, y]) for x, y in zip(a, b))

    def mul(a, b):
        c = [K.zero] * m
        for i, x in enumerate(a):
            if x == K.zero:
                continue
            for j, y in enumerate(b):
                k = S[i, j]
                c[k] = int(A[c[k], M[x, y]])
        return tuple(c)

    elements = list(itertools.product(range(K.order), repeat=m))
    zero = tuple([K.zero] * m)
    one = tuple(K.one if i == monoid.identity else K.zero for i in range(m))
    labels = ["(" + ",".join(K.labels[_] for _ in e) + ")" for e in elements]
    return _tabulate(elements, add, mul, zero, one, labels, name)


_BUILDERS: Dict[str, Callable] = dict(
    zmod=zmod,
    product=product,
    matring=matring,
    triangular=triangular,
    quotientpoly=quotientpoly,
    monoidring=monoidring,
)


def _realize(spec: ZooSpec, cap: int) -> FiniteStruct:
    if spec.kind not in _BUILDERS:
        raise UsageError(f"Unknown constructor {spec.kind!r} (known: {', '.join(_BUILDERS.keys())})")
    args = [_realize(_, cap) if isinstance(_, ZooSpec) else _ for _ in spec.args]
    if spec.kind == "zmod":
        if len(args) != 1:
            raise UsageError("zmod takes one argument")
        return zmod(args[0])
    try:
        return _BUILDERS[spec.kind](*args, cap=cap)
    except TypeError as e:
        raise UsageError(f"Bad arguments for {spec}: {e}")


def build(spec: Union[str, ZooSpec], cap: int = CONSTRUCTION_CAP) -> FiniteStruct:
    """Builds the structure described by `spec`.

    Args:
        spec: A `ZooSpec` or its textual form
        cap: Largest allowed order of the result (and of every intermediate structure)

    Returns:
        The structure; constructions of order at most `VALIDATION_CAP` are classified before
        being returned and must be rings.
    """
    if isinstance(spec, str):
        spec = parse_spec(spec)
    S = _realize(spec, cap)
    S.name = str(spec)
    if S.order <= VALIDATION_CAP and not S.classification.is_ring:
        raise BrachyError(f"{spec} did not produce a ring")
    get_logger("ringzoo").debug(f"built {spec} of order {S.order}")
    return S


@lru_cache(maxsize=None)
def _battery(specs: Tuple[str, ...]) -> Tuple[FiniteStruct, ...]:
    return tuple(build(_) for _ in specs)


def default_battery(specs: Sequence[str] = BATTERY) -> List[FiniteStruct]:
    """The curated battery of rings (built once and cached)"""
    return list(_battery(tuple(specs)))


def matrix_entries(S: FiniteStruct) -> Dict[int, Tuple[Tuple[str, ...], ...]]:
    """Parses matrix labels back into entry labels (only for structures built by matring/triangular)"""
    result = {}
    for i, label in enumerate(S.labels):
        if not (label.startswith("[") and label.endswith("]")):
            raise UsageError(f"{S} is not a matrix structure")
        result[i] = tuple(tuple(row.split(" ")) for row in label[1:-1].split(";"))
    return result
