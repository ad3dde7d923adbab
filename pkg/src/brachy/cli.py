#!/usr/bin/env python
"""The brachymorphism workbench command line tool"""
import logging
import sys
import time
from functools import partial, wraps
from pathlib import Path

import click
import click_config_file
import yaml
from tabulate import tabulate

from .battery import FORMULAS, certify_battery, formula_sweep, pairwise_audit
from .brachylang import builtin_terms, decide_brachynomial
from .brachysearch import (
    ADDABLE_RULES,
    PAIR_RULES,
    CertifyConfig,
    certify_addable,
    certify_summable_pairs,
    check_summability_formula,
    consistency_violations,
    enumerate_brachymorphisms,
    enumerate_brachymorphisms_csp,
    replay_certificates,
)
from .common import (
    DEFAULT_DECISION_CAP,
    DEFAULT_NODE_BUDGET,
    EXIT_RESOURCE,
    EXIT_USAGE,
    BrachyError,
    ReplayError,
    ResourceLimitError,
    RunReport,
    UsageError,
)
from .finstruct import element_profile, engel_index, jacobson_radical, load_struct, save_struct
from .helpers import get_logger, set_log_file, set_screen_level
from .identity_suite import builtin_cases, load_cases, run_builtin_suite, weyl_check
from .matrixlab import default_audit_specs, det_brachy_audit, load_audit_specs, verify_matrix_suite
from .modelsearch import FIXTURES, SEARCH_CLASSES, SearchTask, fixture_path, search_counterexample, verify_fixture
from .polycore import parse_poly
from .ringzoo import BATTERY, build, default_battery

try:
    # disable a warning in yaml 1b1 version
    yaml.warnings({"YAMLLoadWarning": False})
except Exception:
    pass

click.option = partial(click.option, show_default=True)


def _guarded(f):
    """Maps workbench errors to exit codes"""

    @wraps(f)
    def wrapper(ctx: click.Context, *args, **kwargs):
        try:
            return f(ctx, *args, **kwargs)
        except ResourceLimitError as e:
            get_logger("cli").warning(str(e))
            report = RunReport(command=_command(ctx), exit_code=EXIT_RESOURCE)
            report.add("resource limit", False, what=e.what, cap=e.cap, partial=e.partial)
            _finish(ctx, report)
        except UsageError as e:
            print(f"error: {e}", file=sys.stderr)
            report = RunReport(command=_command(ctx), exit_code=EXIT_USAGE)
            report.add("usage", False, error=str(e))
            _save(ctx, report)
            sys.exit(EXIT_USAGE)

    return wrapper


def _save(ctx: click.Context, report: RunReport, started: float = None) -> None:
    obj = ctx.obj or {}
    if started is None:
        started = obj.get("started")
    if started is not None:
        report.stats.setdefault("wall_time", time.perf_counter() - started)
    path = obj.get("report")
    if path:
        report.save(path)


def _finish(ctx: click.Context, report: RunReport, started: float = None) -> None:
    """Stamps the wall time, prints the report, saves it when --report was given and exits with its code"""
    _save(ctx, report, started)
    print(report)
    sys.exit(report.code)


def _command(ctx: click.Context, **extra) -> str:
    params = dict(ctx.params)
    params.update(extra)
    args = " ".join(f"{k}={v}" for k, v in sorted(params.items()) if v not in (None, False, ()))
    return f"{ctx.info_name} {args}".strip()


def _load(path: str):
    try:
        return load_struct(path)
    except BrachyError:
        raise
    except Exception as e:
        raise UsageError(f"Cannot read {path}: {e}")


@click.group()
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Also save the report (json or yaml)")
@click.option("--jobs", "-j", type=float, default=1, help="Workers for parallel commands (0 means all cores)")
@click.option("--log-file", type=click.Path(dir_okay=False), default=None, help="Log everything to this file")
@click.option("--verbose", "-v", count=True, help="Repeat to see more logs on screen")
@click.pass_context
def cli(ctx, report, jobs, log_file, verbose):
    set_screen_level(max(logging.DEBUG, logging.WARNING - 10 * verbose))
    set_log_file(log_file)
    ctx.obj = dict(
        report=report, jobs=int(jobs) if float(jobs).is_integer() else jobs, started=time.perf_counter()
    )


@cli.command(help="Verifies the identity registry in the free ring")
@click.option("--case", "case_name", default=None, help="Only this case")
@click.option("--file", "file_name", type=click.Path(exists=True, dir_okay=False), default=None, help="Identity case file (YAML)")
@click.pass_context
@_guarded
def identities(ctx, case_name, file_name):
    cases = load_cases(file_name) if file_name else builtin_cases()
    if case_name is not None:
        cases = [_ for _ in cases if _.name == case_name]
        if not cases:
            raise UsageError(f"Unknown identity case {case_name}")
    report = RunReport(command=_command(ctx))
    for r in run_builtin_suite(cases):
        detail = dict(statement=r.citation)
        if not r.holds:
            detail["difference"] = str(r.difference)
        report.add(r.name, r.holds, **detail)
    report.count("cases", len(cases))
    _finish(ctx, report)


@cli.command(help="Checks x^m y - y x^m = m x^(m-1) in the Weyl algebra")
@click.option("--m", "m", type=int, default=2, help="Exponent (at least 2)")
@click.pass_context
@_guarded
def weyl(ctx, m):
    r = weyl_check(m)
    report = RunReport(command=_command(ctx))
    report.add(f"m={m}", r.holds, normal_form=str(r.normal_form), modulo_m=str(r.reduced))
    _finish(ctx, report)


@cli.command(help="Classifies a structure file and profiles its elements")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--tables/--no-tables", default=False, help="Print the Cayley tables")
@click.pass_context
@_guarded
def check(ctx, path, tables):
    S = _load(path)
    c = S.classification
    report = RunReport(command=_command(ctx))
    if tables:
        print(S.cayley_tables())
    report.add("tables", True, order=S.order, **{k: v for k, v in c.flags().items()})
    rows = [
        dict(
            x=S.label(p.element),
            unit=p.is_unit,
            regular=p.is_regular,
            idempotent=p.is_idempotent,
            nilpotent=p.nilpotency_index,
            pi_regular=p.pi_regular_exponent,
            central=p.is_central,
        )
        for p in element_profile(S)
    ]
    print(tabulate(rows, headers="keys", tablefmt="psql"))
    report.count("units", sum(_["unit"] for _ in rows))
    report.count("regular", sum(_["regular"] for _ in rows))
    if c.is_ring:
        radical = jacobson_radical(S)
        report.add("jacobson radical", True, elements=", ".join(S.label(_) for _ in sorted(radical)))
        engel = engel_index(S)
        report.add("engel index", True, index=engel if engel is not None else "none")
    _finish(ctx, report)


@cli.command("build", help="Builds a structure from a constructor expression such as matring(zmod(2),2)")
@click.option("--spec", "expression", required=True, help="Constructor expression")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Save the structure here")
@click.pass_context
@_guarded
def build_(ctx, expression, out):
    S = build(expression)
    if out:
        save_struct(S, out)
    report = RunReport(command=_command(ctx))
    report.add(str(S.name), True, order=S.order, **{k: v for k, v in S.classification.flags().items() if v})
    _finish(ctx, report)


@cli.command(help="Enumerates the brachymorphisms between two structures and audits additivity")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.argument("target", type=click.Path(exists=True, dir_okay=False))
@click.option("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="Search node budget")
@click.option("--cross-check/--no-cross-check", default=False, help="Compare with the constraint solver")
@click.pass_context
@_guarded
def morphisms(ctx, source, target, budget, cross_check):
    R, S = _load(source), _load(target)
    found = enumerate_brachymorphisms(R, S, budget)
    report = RunReport(command=_command(ctx))
    for i, f in enumerate(found):
        detail = dict(map=" ".join(S.label(_) for _ in f.as_tuple))
        if f.violations:
            detail["violations"] = " ".join(f"({R.label(a)},{R.label(b)})" for a, b in f.violations)
        report.add(f"f{i}", True, **detail)
    if cross_check:
        other = enumerate_brachymorphisms_csp(R, S)
        report.add("constraint solver agrees", [_.as_tuple for _ in other] == [_.as_tuple for _ in found])
    report.count("morphisms", len(found))
    report.count("non_additive", sum(1 for _ in found if _.violations))
    report.count("violations", sum(len(_.violations) for _ in found))
    _finish(ctx, report)


@cli.command(help="Certifies addable elements (and summable pairs) of a finite ring")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--pairs/--no-pairs", default=False, help="Also certify summable pairs")
@click.option("--rules", default=",".join(ADDABLE_RULES), help="Comma separated closure rules for elements")
@click.option("--pair-rules", default=",".join(PAIR_RULES), help="Comma separated closure rules for pairs")
@click.option("--max-rounds", type=int, default=100, help="Round limit")
@click.option("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="Node budget for the consistency check")
@click.option("--show/--no-show", default=True, help="Print the certificates")
@click_config_file.configuration_option()
@click.pass_context
@_guarded
def certify(ctx, path, pairs, rules, pair_rules, max_rounds, budget, show):
    R = _load(path)
    cfg = CertifyConfig(
        rules=tuple(_.strip() for _ in rules.split(",") if _.strip()),
        pair_rules=tuple(_.strip() for _ in pair_rules.split(",") if _.strip()),
        max_rounds=max_rounds,
    )
    _start = time.perf_counter()
    if pairs:
        certified_pairs, certificates = certify_summable_pairs(R, cfg)
    else:
        certified_pairs, (_, certificates) = frozenset(), certify_addable(R, cfg)
    addable = {c.item for c in certificates if not isinstance(c.item, tuple)}
    if show:
        print(
            tabulate(
                [dict(item=c.item, rule=c.rule, premises=c.premises, because=c.citation) for c in certificates],
                headers="keys",
                tablefmt="psql",
            )
        )
    report = RunReport(command=_command(ctx))
    try:
        replay_certificates(R, certificates)
        report.add("replay", True)
    except ReplayError as e:
        report.add("replay", False, error=str(e))
    refuted = consistency_violations(R, addable, certified_pairs, enumerate_brachymorphisms(R, R, budget))
    report.add("no certified item refuted by a brachy-endomorphism", not refuted, refuted=len(refuted))
    report.add(
        "addable",
        True,
        elements=", ".join(R.label(_) for _ in sorted(addable)),
        all=len(addable) == R.order,
    )
    report.count("addable", len(addable))
    if pairs:
        report.count("summable_pairs", len(certified_pairs))
    report.count("certificates", len(certificates))
    _finish(ctx, report, _start)


def _values(S, text: str):
    values = []
    for part in text.split(","):
        part = part.strip()
        if part.isdigit() and int(part) < S.order:
            values.append(int(part))
        else:
            values.append(S.index(part))
    return values


@cli.command(help="Checks a built-in summability formula at a tuple of a structure")
@click.option("--name", type=click.Choice(FORMULAS), required=True, help="Formula")
@click.option("--struct", "path", type=click.Path(exists=True, dir_okay=False), required=True, help="Structure file")
@click.option("--tuple", "values", required=True, help="Comma separated elements (indices or labels)")
@click.option("--battery", type=click.Path(exists=True, file_okay=False), default=None, help="Directory of .struct files")
@click.pass_context
@_guarded
def formula(ctx, name, path, values, battery):
    R = _load(path)
    structures = (
        [_load(str(_)) for _ in sorted(Path(battery).glob("*.struct"))] if battery else default_battery()
    )
    if not structures:
        raise UsageError(f"No .struct files in {battery}")
    result = check_summability_formula(builtin_terms()[name], R, _values(R, values), structures, name=name)
    report = RunReport(command=_command(ctx))
    report.add("holds at the tuple and its sum", result.condition_ii, values=", ".join(R.label(_) for _ in result.values))
    detail = dict(structures=len(structures), limitation=result.limitation)
    if result.counterexamples:
        where, assignment = result.counterexamples[0]
        detail["counterexample"] = f"{where} at {assignment}"
    report.add("implies the sum on the battery", result.condition_i_on_battery, **detail)
    _finish(ctx, report)


@cli.command(help="Searches semirings or near-rings with a brachy-automorphism that is not additive")
@click.option("--class", "cls", type=click.Choice(SEARCH_CLASSES), default="semiring", help="Class to search")
@click.option("--order", type=int, default=4, help="Number of elements")
@click.option("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="Total node budget")
@click.option("--time-budget", type=float, default=None, help="Seconds per top-level branch")
@click.option("--iso/--no-iso", default=True, help="Keep one structure per isomorphism class")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Save the counterexamples in this directory")
@click.option("--progress/--no-progress", default=False, help="Show a progress bar")
@click_config_file.configuration_option()
@click.pass_context
@_guarded
def search(ctx, cls, order, budget, time_budget, iso, out, progress):
    task = SearchTask(cls=cls, order=order, node_budget=budget, time_budget=time_budget, isomorph_rejection=iso)
    result = search_counterexample(task, n_jobs=ctx.obj["jobs"], progress=progress)
    report = RunReport(command=_command(ctx))
    for S, f, violations in zip(result.structures, result.witnesses, result.violations):
        a, b = violations[0]
        report.add(S.name, True, map=f.cycles(), pair=f"({S.label(a)},{S.label(b)})")
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
            save_struct(S, Path(out) / f"{S.name}.struct")
    report.count("counterexamples", len(result.structures))
    report.count("isomorphism_classes", len(result.seen))
    report.stats.update(result.stats)
    if result.budget_exhausted:
        report.add("search space exhausted", False)
        report.exit_code = EXIT_RESOURCE
    _finish(ctx, report)


@cli.command(help="Verifies a shipped counterexample fixture")
@click.argument("name", type=click.Choice(tuple(FIXTURES.keys())))
@click.option("--file", "file_name", type=click.Path(exists=True, dir_okay=False), default=None, help="Check this file instead")
@click.pass_context
@_guarded
def fixture(ctx, name, file_name):
    S = _load(file_name if file_name else str(fixture_path(name)))
    report = verify_fixture(name, S)
    report.command = _command(ctx)
    _finish(ctx, report)


@cli.command(help="Verifies the trace and determinant identities over generic matrices")
@click.option("--nmax", type=int, default=4, help="Largest matrix order")
@click.pass_context
@_guarded
def matrix(ctx, nmax):
    _start = time.perf_counter()
    report = RunReport(command=_command(ctx))
    for r in verify_matrix_suite(nmax):
        report.add(f"{r.name} n={r.n}", r.holds, **({"detail": r.detail} if r.detail else {}))
    _finish(ctx, report, _start)


@cli.command(help="Audits whether the determinant of matrix subrings is a brachymorphism")
@click.option("--spec", "spec_file", type=click.Path(exists=True, dir_okay=False), default=None, help="Audit file (YAML)")
@click_config_file.configuration_option()
@click.pass_context
@_guarded
def detaudit(ctx, spec_file):
    specs = load_audit_specs(spec_file) if spec_file else default_audit_specs()
    report = RunReport(command=_command(ctx))
    for spec in specs:
        audit = det_brachy_audit(spec)
        detail = dict(order=audit.order, n=spec.n, premise=audit.premise_holds)
        if audit.premise_counterexample:
            detail["premise_counterexample"] = audit.premise_counterexample
        if audit.conclusion_holds is not None:
            detail["det_additive"] = audit.conclusion_holds
        if audit.conclusion_counterexample:
            detail["det_counterexample"] = audit.conclusion_counterexample
        if audit.scalars is not None:
            detail["scalars"] = ", ".join(audit.scalars)
        if audit.central_holds is not None:
            detail["central_power"] = audit.central_holds
        if audit.chain is not None:
            detail.update(audit.chain)
        report.add(spec.name, audit.passed, **detail)
        report.count("premise_holds", int(audit.premise_holds))
    report.count("audits", len(specs))
    _finish(ctx, report)


@cli.command(help="Decides whether a polynomial is the tilde translation of an S-term")
@click.option("--poly", "text", required=True, help="Polynomial such as x + x y")
@click.option("--cap", type=int, default=DEFAULT_DECISION_CAP, help="Candidate cap")
@click.pass_context
@_guarded
def brachynomial(ctx, text, cap):
    p = parse_poly(text)
    witness = decide_brachynomial(p, cap)
    report = RunReport(command=_command(ctx))
    if witness is None:
        report.add("verdict", True, result="not a brachynomial")
    else:
        report.add("verdict", True, result="brachynomial", term=str(witness.term))
    _finish(ctx, report)


@cli.command(help="Runs a battery experiment and prints its table")
@click.argument("kind", type=click.Choice(("pairs", "certify", "formulas")))
@click.option("--spec", "specs", multiple=True, help="Structure expressions (defaults to the battery)")
@click.option("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="Node budget per enumeration")
@click.option("--progress/--no-progress", default=False, help="Show a progress bar")
@click.pass_context
@_guarded
def sweep(ctx, kind, specs, budget, progress):
    specs = tuple(specs) or BATTERY
    n_jobs = ctx.obj["jobs"]
    _start = time.perf_counter()
    report = RunReport(command=_command(ctx))
    if kind == "pairs":
        df = pairwise_audit(specs, budget=budget, n_jobs=n_jobs, progress=progress)
        report.count("non_additive_pairs", int((df["brachymorphisms"] != df["additive"]).sum()))
    elif kind == "certify":
        df = certify_battery(specs, budget=budget, n_jobs=n_jobs, progress=progress)
        report.add("replay", bool(df["replayed"].all()))
        report.add("consistency", bool((df["inconsistencies"] == 0).all()))
    else:
        df = formula_sweep(specs=specs, n_jobs=n_jobs, progress=progress)
        for name, ok in df.groupby("formula", sort=False)["condition_i_on_battery"].first().items():
            report.add(f"{name} implies the sum", bool(ok))
    print(tabulate(df, headers="keys", tablefmt="psql", showindex=False))
    report.count("rows", len(df))
    _finish(ctx, report, _start)


@cli.command(help="Lists the default battery of rings")
@click.pass_context
@_guarded
def zoo(ctx):
    rows = []
    for S in default_battery():
        c = S.classification
        rows.append(dict(structure=S.name, order=S.order, commutative=c.mul_commutative, units=len(S.units)))
    print(tabulate(rows, headers="keys", tablefmt="psql"))
    report = RunReport(command=_command(ctx))
    report.count("structures", len(rows))
    _finish(ctx, report)


@cli.command(help="Prints the versions of the workbench and its main dependencies")
def version():
    import negmas
    import numpy
    import sympy

    from . import __version__

    print(f"brachy: {__version__}")
    print(f"negmas: {negmas.__version__}")
    print(f"numpy: {numpy.__version__}")
    print(f"sympy: {sympy.__version__}")


if __name__ == "__main__":
    cli()
