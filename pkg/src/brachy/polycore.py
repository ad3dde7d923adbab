"""
Exact polynomial arithmetic.

Noncommutative polynomials over the integers (`NCPoly`) are kept as a sorted tuple of
(word, coefficient) terms so that equality is structural. Commutative polynomials (`CPoly`)
are sympy ring elements over `ZZ`.
"""
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import ZZ
from sympy.polys.rings import PolyElement, ring

from .common import ParseError, UsageError

__all__ = [
    "Word",
    "NCPoly",
    "CPoly",
    "cpoly_ring",
    "parse_poly",
    "poly_combine",
    "poly_substitute",
    "commutator",
    "weyl_normal_form",
    "weyl_step",
    "WEYL_VARIABLES",
]

Word = Tuple[str, ...]
CPoly = PolyElement
WEYL_VARIABLES = ("x", "y")


def _word_key(word: Word, alphabet: Optional[Sequence[str]] = None):
    """Length-lexicographic key. Letters rank by `alphabet` (unlisted ones after it, by name) or by name"""
    if alphabet is None:
        return len(word), word
    rank = {v: i for i, v in enumerate(alphabet)}
    return len(word), tuple((rank.get(v, len(rank)), v) for v in word)


def _format_word(word: Word) -> str:
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        parts.append(word[i] if j - i == 1 else f"{word[i]}^{j - i}")
        i = j
    return "*".join(parts)


@dataclass(frozen=True)
class NCPoly:
    """A polynomial in noncommuting variables with integer coefficients.

    Remarks:
        - Construct through `from_dict`, `constant`, `var` or `parse_poly`. The constructor
          expects the terms already canonical (sorted length-lexicographically, no zeros).
        - Integers mix freely with polynomials in arithmetic.
        - Stored terms use the fixed alphabet order of variable names by code point (so `x < y < z`).
          `ordered_terms` and `format` re-sort for another alphabet order; equality never depends on it.
    """

    terms: Tuple[Tuple[Word, int], ...] = ()
    """(word, coefficient) pairs sorted length-lexicographically with no zero coefficient"""

    @classmethod
    def from_dict(cls, mapping: Mapping[Word, int]) -> "NCPoly":
        return cls(
            tuple(
                (tuple(w), int(c))
                for w, c in sorted(mapping.items(), key=lambda _: _word_key(tuple(_[0])))
                if c != 0
            )
        )

    @classmethod
    def constant(cls, n: int) -> "NCPoly":
        return cls((((), int(n)),)) if n else cls()

    @classmethod
    def var(cls, name: str) -> "NCPoly":
        return cls((((name,), 1),))

    @classmethod
    def word(cls, word: Iterable[str], coefficient: int = 1) -> "NCPoly":
        return cls.from_dict({tuple(word): coefficient})

    def as_dict(self) -> Dict[Word, int]:
        return dict(self.terms)

    def coefficient(self, word: Iterable[str]) -> int:
        return self.as_dict().get(tuple(word), 0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(sorted({v for w, _ in self.terms for v in w}))

    @property
    def degree(self) -> int:
        """Length of the longest word (-1 for the zero polynomial)"""
        return max((len(w) for w, _ in self.terms), default=-1)

    @property
    def max_coefficient(self) -> int:
        return max((c for _, c in self.terms), default=0)

    @property
    def is_nonnegative(self) -> bool:
        return all(c > 0 for _, c in self.terms)

    def reduce_mod(self, modulus: int) -> "NCPoly":
        if modulus <= 0:
            return self
        return NCPoly.from_dict({w: c % modulus for w, c in self.terms})

    @staticmethod
    def _coerce(other) -> "NCPoly":
        if isinstance(other, NCPoly):
            return other
        if isinstance(other, int):
            return NCPoly.constant(other)
        raise UsageError(f"Cannot combine a noncommutative polynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        acc = Counter(self.as_dict())
        for w, c in other.terms:
            acc[w] += c
        return NCPoly.from_dict(acc)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(tuple((w, -c) for w, c in self.terms))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        acc = Counter()
        for w1, c1 in self.terms:
            for w2, c2 in other.terms:
                acc[w1 + w2] += c1 * c2
        return NCPoly.from_dict(acc)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise UsageError(f"Only nonnegative integer powers are supported (got {n})")
        result = NCPoly.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def ordered_terms(self, alphabet: Optional[Sequence[str]] = None) -> Tuple[Tuple[Word, int], ...]:
        """Terms in length-lexicographic order for the given alphabet order"""
        if alphabet is None:
            return self.terms
        return tuple(sorted(self.terms, key=lambda _: _word_key(_[0], alphabet)))

    def format(self, alphabet: Optional[Sequence[str]] = None) -> str:
        if not self.terms:
            return "0"
        out = ""
        for i, (w, c) in enumerate(self.ordered_terms(alphabet)):
            sign = "-" if c < 0 else "+"
            c = abs(c)
            if not w:
                body = str(c)
            elif c == 1:
                body = _format_word(w)
            else:
                body = f"{c}*{_format_word(w)}"
            if i == 0:
                out = body if sign == "+" else f"-{body}"
            else:
                out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"NCPoly({str(self)!r})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z][0-9]*)|(?P<op>[-+*^()]))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError("Unexpected character", text, pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _PolyParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self, value=None, kind=None):
        k, v, p = self.tok
        if (value is not None and v != value) or (kind is not None and k != kind):
            raise ParseError(f"Expected {value or kind} but found {v or 'end of input'!r}", self.text, p)
        self.i += 1
        return v

    def parse(self) -> NCPoly:
        if self.tok[0] == "end":
            raise ParseError("Empty polynomial", self.text, 0)
        p = self.expr()
        if self.tok[0] != "end":
            raise ParseError(f"Unexpected {self.tok[1]!r}", self.text, self.tok[2])
        return p

    def expr(self) -> NCPoly:
        p = self.term()
        while self.tok[1] in ("+", "-"):
            op = self.take()
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> NCPoly:
        p = self.factor()
        while True:
            k, v, _ = self.tok
            if v == "*":
                self.take()
            elif not (k in ("int", "ident") or v == "("):
                return p
            p = p * self.factor()

    def factor(self) -> NCPoly:
        if self.tok[1] == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        if self.tok[1] == "^":
            self.take()
            return base ** int(self.take(kind="int"))
        return base

    def atom(self) -> NCPoly:
        k, v, p = self.tok
        if k == "int":
            self.take()
            return NCPoly.constant(int(v))
        if k == "ident":
            self.take()
            return NCPoly.var(v)
        if v == "(":
            self.take()
            result = self.expr()
            self.take(")")
            return result
        raise ParseError(f"Unexpected {v or 'end of input'!r}", self.text, p)


def parse_poly(text: str) -> NCPoly:
    """Parses the textual polynomial syntax.

    Identifiers are one letter optionally followed by digits so `xzy` is the word x·z·y and
    `a12` is a single variable. Products may be written with `*` or by juxtaposition and
    `^` takes a nonnegative integer exponent.

    Examples:
        >>> str(parse_poly("(1+x)(1+y)"))
        '1 + x + y + x*y'
        >>> str(parse_poly("x y - y x"))
        'x*y - y*x'
    """
    return _PolyParser(text).parse()


# ---------------------------------------------------------------------------
# commutative polynomials


@lru_cache(maxsize=None)
def cpoly_ring(names: Tuple[str, ...]):
    """Returns `(R, gens)` for the integer polynomial ring in the given commuting variables"""
    R, *gens = ring(",".join(names), ZZ)
    return R, tuple(gens)


def poly_combine(kind: str, p: Union[NCPoly, CPoly], q: Union[NCPoly, CPoly]):
    """Adds, subtracts or multiplies two polynomials of the same flavor.

    Args:
        kind: One of `add`, `sub` or `mul`
        p: First operand
        q: Second operand (same flavor and alphabet as `p`)

    Returns:
        The exact result in the same flavor.
    """
    if isinstance(p, NCPoly) != isinstance(q, NCPoly):
        raise UsageError("Cannot combine a noncommutative and a commutative polynomial")
    if not isinstance(p, NCPoly):
        if not isinstance(p, PolyElement) or not isinstance(q, PolyElement):
            raise UsageError(f"Unsupported polynomial types {type(p).__name__}, {type(q).__name__}")
        if p.ring != q.ring:
            raise UsageError("Commutative polynomials must share one ring (alphabet)")
    if kind == "add":
        return p + q
    if kind == "sub":
        return p - q
    if kind == "mul":
        return p * q
    raise UsageError(f"Unknown polynomial operation {kind}")


def poly_substitute(p: NCPoly, bindings: Mapping[str, Union[NCPoly, int, str]]) -> NCPoly:
    """Simultaneous substitution of polynomials for variables (unbound variables map to themselves)"""
    values = {
        k: parse_poly(v) if isinstance(v, str) else NCPoly._coerce(v) for k, v in bindings.items()
    }
    result = NCPoly()
    for w, c in p.terms:
        term = NCPoly.constant(c)
        for v in w:
            term = term * values.get(v, NCPoly.var(v))
        result = result + term
    return result


def commutator(p: NCPoly, q: NCPoly) -> NCPoly:
    return p * q - q * p


# ---------------------------------------------------------------------------
# Weyl relation xy - yx = 1


def _check_weyl_variables(p: NCPoly) -> None:
    extra = set(p.variables) - set(WEYL_VARIABLES)
    if extra:
        raise UsageError(f"Weyl rewriting only accepts x and y (found {sorted(extra)})")


def _leftmost_yx(word: Word) -> int:
    for i in range(len(word) - 1):
        if word[i] == "y" and word[i + 1] == "x":
            return i
    return -1


@lru_cache(maxsize=None)
def _weyl_word(word: Word) -> Tuple[Tuple[Word, int], ...]:
    i = _leftmost_yx(word)
    if i < 0:
        return ((word, 1),)
    acc = Counter()
    for w, c in _weyl_word(word[:i] + ("x", "y") + word[i + 2 :]):
        acc[w] += c
    for w, c in _weyl_word(word[:i] + word[i + 2 :]):
        acc[w] -= c
    return tuple(acc.items())


def weyl_normal_form(p: NCPoly, modulus: int = 0) -> NCPoly:
    """Rewrites yx -> xy - 1 until every word has the shape x^i y^j.

    Args:
        p: A polynomial in x and y only
        modulus: Reduce coefficients modulo this number (0 means characteristic zero)
    """
    _check_weyl_variables(p)
    if modulus < 0:
        raise UsageError(f"modulus must be nonnegative (got {modulus})")
    acc = Counter()
    for w, c in p.terms:
        for nw, nc in _weyl_word(w):
            acc[nw] += c * nc
    return NCPoly.from_dict(acc).reduce_mod(modulus)


def weyl_step(p: NCPoly) -> Optional[NCPoly]:
    """Applies one rewrite yx -> xy - 1 at the leftmost occurrence in the first reducible term.

    Returns:
        The rewritten polynomial or None if `p` is already in normal form.
    """
    _check_weyl_variables(p)
    for w, c in p.terms:
        i = _leftmost_yx(w)
        if i < 0:
            continue
        rest = NCPoly.from_dict({k: v for k, v in p.terms if k != w})
        return (
            rest
            + NCPoly.word(w[:i] + ("x", "y") + w[i + 2 :], c)
            - NCPoly.word(w[:i] + w[i + 2 :], c)
        )
    return None
