"""
A registry of ring identities verified by exact expansion in the free ring, and the central power
identity of the Weyl algebra.
"""
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

import yaml

from .brachylang import Prod, Var, builtin_terms, expand_tilde, numeral
from .common import UsageError
from .helpers import get_logger
from .polycore import NCPoly, commutator, parse_poly, poly_substitute, weyl_normal_form

__all__ = [
    "IdentityCase",
    "IdentityReport",
    "WeylReport",
    "verify_identity",
    "builtin_cases",
    "run_builtin_suite",
    "load_cases",
    "perturb",
    "rename_case",
    "weyl_check",
]

Substitution = Dict[str, NCPoly]


@dataclass
class IdentityCase:
    """An identity lhs = rhs in the free ring"""

    name: str
    lhs: NCPoly
    rhs: NCPoly
    substitutions: List[Substitution] = field(default_factory=list)
    """Simultaneous substitutions applied to both sides, in order, before comparing"""
    citation: str = ""
    """Human readable statement of the identity"""


@dataclass
class IdentityReport:
    name: str
    citation: str
    holds: bool
    difference: NCPoly
    """lhs - rhs after the substitutions"""


def verify_identity(case: IdentityCase) -> IdentityReport:
    lhs, rhs = case.lhs, case.rhs
    for bindings in case.substitutions:
        lhs, rhs = poly_substitute(lhs, bindings), poly_substitute(rhs, bindings)
    difference = lhs - rhs
    return IdentityReport(case.name, case.citation, difference.is_zero, difference)


def _as_poly(value: Union[str, int, NCPoly]) -> NCPoly:
    return parse_poly(value) if isinstance(value, str) else NCPoly._coerce(value)


def _case_from_dict(d: Mapping) -> IdentityCase:
    try:
        return IdentityCase(
            name=str(d["name"]),
            lhs=_as_poly(d["lhs"]),
            rhs=_as_poly(d["rhs"]),
            substitutions=[{k: _as_poly(v) for k, v in _.items()} for _ in d.get("substitutions") or []],
            citation=str(d.get("citation", "")),
        )
    except (KeyError, AttributeError, TypeError) as e:
        raise UsageError(f"Malformed identity case {d!r}: {e}")


def load_cases(path: Union[str, Path]) -> List[IdentityCase]:
    """Reads identity cases from YAML: a list (or a mapping with key `identities`) of entries with
    name, citation, lhs, rhs and optional substitutions given as polynomial text"""
    try:
        with open(path, "r") as f:
            d = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise UsageError(f"Cannot read identity cases from {path}: {e}")
    if isinstance(d, dict):
        d = d.get("identities", [])
    if not isinstance(d, list):
        raise UsageError(f"{path} does not hold a list of identity cases")
    return [_case_from_dict(_) for _ in d]


def _generated_cases() -> List[IdentityCase]:
    terms = builtin_terms()
    x, y, z = NCPoly.var("x"), NCPoly.var("y"), NCPoly.var("z")
    cases = [
        IdentityCase(
            "tilde-p1-q1",
            expand_tilde(terms["p1"]),
            expand_tilde(terms["q1"]) + (x + y - z) * z + x * commutator(z, y) * z,
            citation="p1~ = q1~ + (x + y - z)z + x[z,y]z for p1 = (xz)'(yz)', q1 = ((xy)'zz)'",
        ),
        IdentityCase(
            "tilde-p2-q2",
            expand_tilde(terms["p2"]) + commutator(x, z),
            expand_tilde(terms["q2"]) + (x + y - z) * z,
            citation="p2~ + [x,z] = q2~ + (x + y - z)z",
        ),
    ]
    for n in range(2, 5):
        cases.append(
            IdentityCase(
                f"multiple-{n}",
                expand_tilde(Prod(numeral(n), Var("x"))),
                n * x,
                citation=f"the S-term {n}x expands to {n} times x",
            )
        )
    cases.append(IdentityCase("multiple-minus-1", x + (-1) * x, NCPoly(), citation="x + (-1)x = 0"))
    for n in range(1, 5):
        cases.append(
            IdentityCase(
                f"binomial-{n}",
                (1 + x) ** n,
                sum((NCPoly.constant(math.comb(n, k)) * x ** k for k in range(n + 1)), NCPoly()),
                citation=f"(1 + x)^{n} has degree {n} with binomial coefficients",
            )
        )
    return cases


def builtin_cases() -> List[IdentityCase]:
    """The shipped identity file followed by the cases built from S-terms and integer families"""
    return load_cases(Path(__file__).parent / "data" / "identities.yaml") + _generated_cases()


def run_builtin_suite(cases: Optional[Iterable[IdentityCase]] = None) -> List[IdentityReport]:
    log = get_logger("identity_suite")
    reports = []
    for case in builtin_cases() if cases is None else cases:
        report = verify_identity(case)
        if report.holds:
            log.info(f"{case.name}: holds")
        else:
            log.warning(f"{case.name}: fails with difference {report.difference}")
        reports.append(report)
    return reports


def perturb(case: IdentityCase, word: str = "", delta: int = 1) -> IdentityCase:
    """A copy of the case with `delta` times the given word (empty for the constant) added to rhs"""
    w = parse_poly(word).terms[0][0] if word.strip() else ()
    return replace(case, rhs=case.rhs + NCPoly.word(w, delta))


def rename_case(case: IdentityCase, mapping: Mapping[str, str]) -> IdentityCase:
    """Renames variables consistently in both sides and in the substitutions"""
    images = {k: NCPoly.var(v) for k, v in mapping.items()}

    def rename(p: NCPoly) -> NCPoly:
        return poly_substitute(p, images)

    return replace(
        case,
        lhs=rename(case.lhs),
        rhs=rename(case.rhs),
        substitutions=[{mapping.get(k, k): rename(v) for k, v in _.items()} for _ in case.substitutions],
    )


@dataclass
class WeylReport:
    m: int
    normal_form: NCPoly
    """x^m y - y x^m in characteristic zero"""
    reduced: NCPoly
    """The same normal form modulo m"""
    holds: bool


def weyl_check(m: int) -> WeylReport:
    """Checks x^m y - y x^m = m x^(m-1) in the Weyl algebra and that it vanishes in characteristic m"""
    if not isinstance(m, int) or m < 2:
        raise UsageError(f"m must be an integer >= 2 (got {m})")
    x, y = NCPoly.var("x"), NCPoly.var("y")
    p = x ** m * y - y * x ** m
    normal, reduced = weyl_normal_form(p, 0), weyl_normal_form(p, m)
    return WeylReport(m, normal, reduced, normal == m * x ** (m - 1) and reduced.is_zero)
