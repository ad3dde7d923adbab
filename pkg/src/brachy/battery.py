"""Battery-wide experiments collected into data frames"""
import itertools
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from .brachylang import builtin_terms, eval_sformula
from .brachysearch import (
    CertifyConfig,
    certify_summable_pairs,
    check_summability_formula,
    consistency_violations,
    enumerate_brachymorphisms,
    replay_certificates,
)
from .common import DEFAULT_NODE_BUDGET, ReplayError
from .helpers import get_logger, jobs
from .ringzoo import BATTERY, build

__all__ = ["pairwise_audit", "certify_battery", "formula_sweep", "FORMULAS"]

FORMULAS = ("S_perp", "S_comm", "S_div")


def _run(f: Callable[..., Dict[str, Any]], args: List[tuple], n_jobs: int, progress: bool) -> pd.DataFrame:
    """Runs f over args keeping the order of args in the result"""
    n_jobs = jobs(n_jobs)
    it = tqdm(args) if progress else args
    if n_jobs == 1:
        rows = [f(*_) for _ in it]
    else:
        rows = Parallel(n_jobs=n_jobs)(delayed(f)(*_) for _ in it)
    return pd.DataFrame(rows)


def _audit_pair(source: str, target: str, budget: int) -> Dict[str, Any]:
    R, S = build(source), build(target)
    morphisms = enumerate_brachymorphisms(R, S, budget)
    non_additive = [f for f in morphisms if not f.is_additive]
    example = ""
    if non_additive:
        a, b = non_additive[0].violations[0]
        example = f"{list(non_additive[0].as_tuple)} at ({R.label(a)},{R.label(b)})"
    return dict(
        source=source,
        target=target,
        brachymorphisms=len(morphisms),
        additive=len(morphisms) - len(non_additive),
        violations=sum(len(_.violations) for _ in non_additive),
        example=example,
    )


def pairwise_audit(
    specs: Sequence[str] = BATTERY,
    budget: int = DEFAULT_NODE_BUDGET,
    n_jobs: int = 1,
    progress: bool = False,
) -> pd.DataFrame:
    """Enumerates the brachymorphisms between every ordered pair of structures and counts the
    non-additive ones.

    Args:
        specs: Structure expressions
        budget: Node budget of each enumeration
        n_jobs: Number of workers (see `jobs`)
        progress: Show a progress bar

    Returns:
        One row per (source, target) in the order of `specs`.
    """
    args = [(a, b, budget) for a, b in itertools.product(specs, repeat=2)]
    df = _run(_audit_pair, args, n_jobs, progress)
    if len(df):
        get_logger("battery").info(f"pairwise audit: {len(df)} pairs, {int(df['violations'].sum())} violations")
    return df


def _certify_one(spec: str, targets: Sequence[str], cfg: CertifyConfig, budget: int) -> Dict[str, Any]:
    R = build(spec)
    pairs, certificates = certify_summable_pairs(R, cfg)
    addable = {c.item for c in certificates if not isinstance(c.item, tuple)}
    try:
        replayed = replay_certificates(R, certificates)
    except ReplayError as e:
        get_logger("battery").error(f"{spec}: {e}")
        replayed = False
    morphisms = [f for target in targets for f in enumerate_brachymorphisms(R, build(target), budget)]
    return dict(
        structure=spec,
        order=R.order,
        addable=len(addable),
        all_addable=len(addable) == R.order,
        summable_pairs=len(pairs),
        certificates=len(certificates),
        replayed=replayed,
        inconsistencies=len(consistency_violations(R, addable, pairs, morphisms)),
    )


def certify_battery(
    specs: Sequence[str] = BATTERY,
    cfg: Optional[CertifyConfig] = None,
    budget: int = DEFAULT_NODE_BUDGET,
    n_jobs: int = 1,
    progress: bool = False,
) -> pd.DataFrame:
    """Certifies addable elements and summable pairs of every structure, replays the certificates and
    checks them against the brachymorphisms into every structure of the battery"""
    cfg = cfg or CertifyConfig()
    args = [(spec, tuple(specs), cfg, budget) for spec in specs]
    return _run(_certify_one, args, n_jobs, progress)


def _sweep_one(name: str, spec: str, battery_ok: bool) -> Dict[str, Any]:
    phi = builtin_terms()[name]
    R = build(spec)
    applicable = 0
    for x, y in itertools.product(R.elements, repeat=2):
        if eval_sformula(phi, R, dict(x=x, y=y, z=int(R.add[x, y]))):
            applicable += 1
    return dict(
        formula=name,
        structure=spec,
        order=R.order,
        applicable_pairs=applicable,
        pairs=R.order ** 2,
        condition_i_on_battery=battery_ok,
    )


def formula_sweep(
    names: Sequence[str] = FORMULAS,
    specs: Sequence[str] = BATTERY,
    n_jobs: int = 1,
    progress: bool = False,
) -> pd.DataFrame:
    """For each built-in formula, checks that it implies z = x + y on every structure and counts the
    pairs (x, y) of every structure for which it holds at z = x + y"""
    structures = [build(_) for _ in specs]
    catalogue = builtin_terms()
    battery_ok = {}
    for name in names:
        R = structures[0]
        report = check_summability_formula(
            catalogue[name], R, (R.zero, R.zero), structures, variables=("x", "y", "z"), name=name
        )
        battery_ok[name] = report.condition_i_on_battery
    args = [(name, spec, battery_ok[name]) for name in names for spec in specs]
    return _run(_sweep_one, args, n_jobs, progress)
