"""
The vocabulary (successor, product, zero) as a small language.

S-terms translate into brachynomials through `expand_tilde`; positive existential S-formulas
are evaluated over finite structures by exhaustive witness search.
"""
import itertools
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .common import DEFAULT_DECISION_CAP, ParseError, ResourceLimitError, UsageError
from .helpers import get_logger
from .polycore import NCPoly, Word

if TYPE_CHECKING:
    from .finstruct import FiniteStruct

__all__ = [
    "Zero",
    "Var",
    "Succ",
    "Prod",
    "STerm",
    "Atom",
    "And",
    "Or",
    "Exists",
    "SFormula",
    "BrachyWitness",
    "Catalogue",
    "numeral",
    "parse_sterm",
    "parse_sformula",
    "expand_tilde",
    "decide_brachynomial",
    "eval_sterm",
    "eval_sformula",
    "witnesses",
    "free_variables",
    "builtin_terms",
    "term_size",
]


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Succ:
    arg: "STerm"

    def __str__(self):
        n, inner = _peel(self)
        if isinstance(inner, Zero):
            return str(n)
        return _atom(self.arg) + "'"


@dataclass(frozen=True)
class Prod:
    left: "STerm"
    right: "STerm"

    def __str__(self):
        right = f"({self.right})" if isinstance(self.right, Prod) else str(self.right)
        return f"{self.left} {right}"


STerm = Union[Zero, Var, Succ, Prod]


def _peel(t: STerm) -> Tuple[int, STerm]:
    n = 0
    while isinstance(t, Succ):
        t, n = t.arg, n + 1
    return n, t


def _atom(t: STerm) -> str:
    return f"({t})" if isinstance(t, Prod) else str(t)


def numeral(n: int) -> STerm:
    """The term 0'...' with n successors"""
    t: STerm = Zero()
    for _ in range(n):
        t = Succ(t)
    return t


def term_size(t: STerm) -> int:
    if isinstance(t, Succ):
        return 1 + term_size(t.arg)
    if isinstance(t, Prod):
        return 1 + term_size(t.left) + term_size(t.right)
    return 1


@dataclass(frozen=True)
class Atom:
    lhs: STerm
    rhs: STerm

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class And:
    parts: Tuple["SFormula", ...]

    def __str__(self):
        return " & ".join(_group(_, (Or, Exists)) for _ in self.parts)


@dataclass(frozen=True)
class Or:
    parts: Tuple["SFormula", ...]

    def __str__(self):
        return " | ".join(_group(_, (Exists,)) for _ in self.parts)


@dataclass(frozen=True)
class Exists:
    variables: Tuple[str, ...]
    body: "SFormula"

    def __str__(self):
        return f"exists {' '.join(self.variables)} . {self.body}"


SFormula = Union[Atom, And, Or, Exists]


def _group(f: SFormula, kinds) -> str:
    return f"({f})" if isinstance(f, kinds) else str(f)


@dataclass(frozen=True)
class BrachyWitness:
    term: STerm
    """A term whose tilde translation is `expansion`"""
    expansion: NCPoly
    """The brachynomial"""


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<kw>exists)(?![0-9])|(?P<int>\d+)|(?P<ident>[A-Za-z][0-9]*)|(?P<op>[()\[\],'=&|.]))"
)

Macro = Tuple[Tuple[str, ...], STerm]


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError("Unexpected character", text, len(text) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _substitute(t: STerm, bindings: Mapping[str, STerm]) -> STerm:
    if isinstance(t, Var):
        return bindings.get(t.name, t)
    if isinstance(t, Succ):
        return Succ(_substitute(t.arg, bindings))
    if isinstance(t, Prod):
        return Prod(_substitute(t.left, bindings), _substitute(t.right, bindings))
    return t


class _Parser:
    def __init__(self, text: str, macros: Mapping[str, Macro]):
        self.text = text
        self.tokens = _tokenize(text)
        self.macros = macros
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, message: str):
        raise ParseError(message, self.text, self.tok[2])

    def take(self, value: Optional[str] = None, kind: Optional[str] = None) -> str:
        k, v, _ = self.tok
        if (value is not None and v != value) or (kind is not None and k != kind):
            self.fail(f"Expected {value or kind} but found {v or 'end of input'!r}")
        self.i += 1
        return v

    def finish(self):
        if self.tok[0] != "end":
            self.fail(f"Unexpected {self.tok[1]!r}")

    def starts_term(self) -> bool:
        k, v, _ = self.tok
        return k in ("int", "ident") or v == "("

    def term(self) -> STerm:
        if not self.starts_term():
            self.fail(f"Expected a term but found {self.tok[1] or 'end of input'!r}")
        t = self.postfix()
        while self.starts_term():
            t = Prod(t, self.postfix())
        return t

    def postfix(self) -> STerm:
        t = self.primary()
        while self.tok[1] == "'":
            self.take()
            t = Succ(t)
        return t

    def primary(self) -> STerm:
        k, v, _ = self.tok
        if k == "int":
            self.take()
            return numeral(int(v))
        if k == "ident":
            self.take()
            if v in self.macros:
                params, body = self.macros[v]
                if self.tok[1] != "[":
                    return body
                self.take("[")
                args = [self.term()]
                while self.tok[1] == ",":
                    self.take()
                    args.append(self.term())
                self.take("]")
                if len(args) != len(params):
                    self.fail(f"{v} expects {len(params)} arguments, got {len(args)}")
                return _substitute(body, dict(zip(params, args)))
            return Var(v)
        if v == "(":
            self.take()
            t = self.term()
            self.take(")")
            return t
        self.fail(f"Unexpected {v or 'end of input'!r}")

    def formula(self) -> SFormula:
        parts = [self.conjunction()]
        while self.tok[1] == "|":
            self.take()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> SFormula:
        parts = [self.unit()]
        while self.tok[1] == "&":
            self.take()
            parts.append(self.unit())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unit(self) -> SFormula:
        if self.tok[0] == "kw":
            self.take()
            names = [self.take(kind="ident")]
            while self.tok[0] == "ident":
                names.append(self.take())
            self.take(".")
            return Exists(tuple(names), self.formula())
        if self.tok[1] == "(":
            start = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = start
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        return self.atom()

    def atom(self) -> Atom:
        lhs = self.term()
        self.take("=")
        return Atom(lhs, self.term())


def parse_sterm(text: str, macros: Optional[Mapping[str, Macro]] = None) -> STerm:
    """Parses an S-term.

    Args:
        text: Term text. `0` is zero, a number n is zero followed by n successors, `'` is the
              successor (postfix) and juxtaposition is the product (left associative).
        macros: Named terms that may be used as `name` or `name[arg, ...]`. Defaults to the
                built-in p1, q1, p2, q2.
    """
    parser = _Parser(text, _default_macros() if macros is None else macros)
    t = parser.term()
    parser.finish()
    return t


def parse_sformula(text: str, macros: Optional[Mapping[str, Macro]] = None) -> SFormula:
    """Parses a positive existential S-formula (`=`, `&`, `|`, `exists v1 v2 . body`)"""
    parser = _Parser(text, _default_macros() if macros is None else macros)
    if parser.tok[0] == "end":
        parser.fail("Empty formula")
    f = parser.formula()
    parser.finish()
    return f


# ---------------------------------------------------------------------------
# tilde translation and the decision procedure


def expand_tilde(t: STerm) -> NCPoly:
    if isinstance(t, Zero):
        return NCPoly()
    if isinstance(t, Var):
        return NCPoly.var(t.name)
    if isinstance(t, Succ):
        return 1 + expand_tilde(t.arg)
    if isinstance(t, Prod):
        return expand_tilde(t.left) * expand_tilde(t.right)
    raise UsageError(f"Not an S-term: {t!r}")


def _factor_bounds(p: NCPoly) -> Dict[Word, int]:
    """Largest coefficient of p over the words containing each factor"""
    bounds: Dict[Word, int] = {}
    for w, c in p.terms:
        for i in range(len(w) + 1):
            for j in range(i, len(w) + 1):
                f = w[i:j]
                if bounds.get(f, 0) < c:
                    bounds[f] = c
    return bounds


def decide_brachynomial(p: NCPoly, cap: int = DEFAULT_DECISION_CAP) -> Optional[BrachyWitness]:
    """Decides whether `p` is the tilde translation of some S-term.

    Args:
        p: The candidate polynomial
        cap: Largest number of dominated candidates to generate before giving up

    Returns:
        A witness or None when `p` is definitely not a brachynomial.

    Remarks:
        - Every subterm of a witness (with zero-valued subterms replaced by 0) expands to a
          polynomial each of whose words is a factor of a word of `p`, with coefficient bounded
          by the coefficient of that word in `p`. The candidates are therefore drawn from a finite
          set and the closure below is complete.
        - Raises `ResourceLimitError` if more than `cap` candidates are generated.
    """
    if p.is_zero:
        return BrachyWitness(Zero(), p)
    if not p.is_nonnegative:
        return None
    log = get_logger("brachylang")
    bounds = _factor_bounds(p)
    degree = p.degree

    def dominated(q: NCPoly) -> bool:
        return all(bounds.get(w, 0) >= c for w, c in q.terms)

    found: Dict[NCPoly, STerm] = {NCPoly(): Zero()}
    items: List[NCPoly] = [NCPoly()]
    for v in p.variables:
        q = NCPoly.var(v)
        found[q] = Var(v)
        items.append(q)
        if q == p:
            return BrachyWitness(Var(v), p)

    def admit(q: NCPoly, t: STerm) -> bool:
        if q in found or not dominated(q):
            return False
        found[q] = t
        items.append(q)
        if len(items) > cap:
            log.warning(f"brachynomial decision for {p} gave up after {cap} candidates")
            raise ResourceLimitError("dominated candidate set", cap, partial=len(items))
        return q == p

    one = NCPoly.constant(1)
    i, done = 0, False
    while i < len(items) and not done:
        e = items[i]
        i += 1
        done = admit(e + 1, Succ(found[e]))
        if done or e.is_zero or e == one:
            continue
        # products with every earlier candidate (and e itself), both orders
        for f in items[:i]:
            if f.is_zero or f == one or e.degree + f.degree > degree:
                continue
            done = admit(e * f, Prod(found[e], found[f])) or admit(f * e, Prod(found[f], found[e]))
            if done:
                break
    if p in found:
        log.debug(f"{p} is a brachynomial after {len(items)} candidates")
        return BrachyWitness(found[p], p)
    log.debug(f"{p} is not a brachynomial ({len(items)} dominated candidates exhausted)")
    return None


# ---------------------------------------------------------------------------
# evaluation over finite structures


def free_variables(x: Union[STerm, SFormula]) -> Set[str]:
    if isinstance(x, Var):
        return {x.name}
    if isinstance(x, Succ):
        return free_variables(x.arg)
    if isinstance(x, Prod):
        return free_variables(x.left) | free_variables(x.right)
    if isinstance(x, Atom):
        return free_variables(x.lhs) | free_variables(x.rhs)
    if isinstance(x, (And, Or)):
        return set().union(*(free_variables(_) for _ in x.parts))
    if isinstance(x, Exists):
        return free_variables(x.body) - set(x.variables)
    return set()


def eval_sterm(t: STerm, S: "FiniteStruct", env: Mapping[str, int]) -> int:
    if isinstance(t, Zero):
        return S.zero
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UsageError(f"Unbound variable {t.name}")
    if isinstance(t, Succ):
        return int(S.succ[eval_sterm(t.arg, S, env)])
    return int(S.mul[eval_sterm(t.left, S, env), eval_sterm(t.right, S, env)])


def _holds(phi: SFormula, S: "FiniteStruct", env: Dict[str, int]) -> bool:
    if isinstance(phi, Atom):
        return eval_sterm(phi.lhs, S, env) == eval_sterm(phi.rhs, S, env)
    if isinstance(phi, And):
        return all(_holds(_, S, env) for _ in phi.parts)
    if isinstance(phi, Or):
        return any(_holds(_, S, env) for _ in phi.parts)
    if isinstance(phi, Exists):
        inner = dict(env)
        for values in itertools.product(range(S.order), repeat=len(phi.variables)):
            inner.update(zip(phi.variables, values))
            if _holds(phi.body, S, inner):
                return True
        return False
    raise UsageError(f"Not a positive existential formula: {phi!r}")


def eval_sformula(phi: SFormula, S: "FiniteStruct", env: Mapping[str, int]) -> bool:
    """Truth value of `phi` in `S` under `env` (existentials searched over the whole carrier)"""
    missing = free_variables(phi) - set(env.keys())
    if missing:
        raise UsageError(f"Unbound free variables {sorted(missing)}")
    return _holds(phi, S, dict(env))


def witnesses(phi: Exists, S: "FiniteStruct", env: Mapping[str, int]) -> Iterator[Dict[str, int]]:
    """All assignments of the bound variables of `phi` making its body true"""
    inner = dict(env)
    for values in itertools.product(range(S.order), repeat=len(phi.variables)):
        inner.update(zip(phi.variables, values))
        if _holds(phi.body, S, inner):
            yield dict(zip(phi.variables, values))


# ---------------------------------------------------------------------------
# catalogue

_TERM_TEXTS = {
    "p1": "(x z)' (y z)'",
    "q1": "((x y)' z z)'",
    "p2": "(z x)' (y z)'",
    "q2": "(z (x y)' z)'",
}
_FORMULA_TEXTS = {
    "S_perp": "x y = 0 & z' = x' y'",
    "S_comm": "x z y = x y z & p1 = q1 & p1[x, y', z'] = q1[x, y', z']",
    "S_div": "(x = 0 & z = y) | exists u . (u x = 1 & z u = (y u)')",
}


def _default_macros() -> Dict[str, Macro]:
    params = ("x", "y", "z")
    return {k: (params, parse_sterm(v, macros={})) for k, v in _TERM_TEXTS.items()}


class Catalogue(dict):
    """Named terms and formulas; unknown names raise `UsageError`"""

    def __missing__(self, key):
        raise UsageError(f"Unknown catalogue entry {key!r} (known: {sorted(self.keys())})")


def builtin_terms() -> Catalogue:
    """p1, q1, p2, q2 as S-terms and S_perp, S_comm, S_div as S-formulas in the variables x, y, z
    (z plays the role of the sum)"""
    macros = _default_macros()
    result = Catalogue({k: body for k, (_, body) in macros.items()})
    result.update({k: parse_sformula(v, macros) for k, v in _FORMULA_TEXTS.items()})
    return result
