from pytest import mark

from brachy.battery import FORMULAS, certify_battery, formula_sweep, pairwise_audit
from brachy.brachysearch import CertifyConfig

SMALL = ("zmod(2)", "zmod(4)", "quotientpoly(zmod(2),[1,1,1])")


def test_pairwise_audit_counts_brachymorphisms():
    df = pairwise_audit(SMALL)
    assert len(df) == 9
    assert list(df.columns) == ["source", "target", "brachymorphisms", "additive", "violations", "example"]
    rows = {(r.source, r.target): r for r in df.itertuples()}
    assert rows[("zmod(4)", "zmod(2)")].brachymorphisms == 1
    assert rows[("zmod(2)", "zmod(4)")].brachymorphisms == 0
    assert rows[("quotientpoly(zmod(2),[1,1,1])", "quotientpoly(zmod(2),[1,1,1])")].brachymorphisms == 2
    assert (df["brachymorphisms"] == df["additive"]).all()
    assert (df["violations"] == 0).all()


def test_certify_battery():
    df = certify_battery(SMALL)
    assert list(df["structure"]) == list(SMALL)
    assert df["all_addable"].all()
    assert df["replayed"].all()
    assert (df["inconsistencies"] == 0).all()
    restricted = certify_battery(("zmod(4)",), CertifyConfig(rules=("r1",)))
    assert restricted["addable"].tolist() == [4]


def test_formula_sweep():
    df = formula_sweep(specs=("zmod(2)", "zmod(3)"))
    assert len(df) == 2 * len(FORMULAS)
    assert df["condition_i_on_battery"].all()
    perp = df[df["formula"] == "S_perp"].set_index("structure")
    assert perp.loc["zmod(2)", "applicable_pairs"] == 3
    assert perp.loc["zmod(3)", "applicable_pairs"] == 5
    assert (df["pairs"] == df["order"] ** 2).all()


@mark.slow
def test_parallel_runs_match_serial_ones():
    serial = pairwise_audit(SMALL, n_jobs=1)
    parallel = pairwise_audit(SMALL, n_jobs=2)
    assert serial.equals(parallel)


@mark.slow
def test_default_battery_audit():
    df = certify_battery()
    assert df["replayed"].all()
    assert (df["inconsistencies"] == 0).all()
