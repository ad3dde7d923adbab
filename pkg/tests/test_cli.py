import json

from click.testing import CliRunner
from pytest import fixture, mark

from brachy.cli import cli as main
from brachy.finstruct import save_struct
from brachy.modelsearch import reference_fixture
from brachy.ringzoo import zmod


@fixture
def runner():
    return CliRunner()


@fixture
def z4(tmp_path):
    path = tmp_path / "z4.struct"
    save_struct(zmod(4), path)
    return str(path)


def test_main(runner):
    result = runner.invoke(main, ["--help"])
    assert len(result.output) >= 0
    assert result.exit_code == 0


def test_fixture_table1(runner):
    result = runner.invoke(main, ["fixture", "table1"])
    assert result.exit_code == 0, result.output
    assert "brachy-automorphism: pass" in result.output
    assert "violation: pass" in result.output
    assert "exit_code: 0" in result.output


def test_tampered_fixture_fails(runner, tmp_path):
    S = reference_fixture("table1")
    add = S.add.copy()
    add[1, 2] = add[2, 1] = 1
    broken = S.__class__(add=add, mul=S.mul, zero=0, one=3, labels=S.labels)
    path = tmp_path / "broken.struct"
    save_struct(broken, path)
    result = runner.invoke(main, ["fixture", "table1", "--file", str(path)])
    assert result.exit_code == 1
    assert "first_difference: add[1][2]" in result.output


def test_brachynomial_verdicts(runner):
    result = runner.invoke(main, ["brachynomial", "--poly", "x + y"])
    assert result.exit_code == 0
    assert "not a brachynomial" in result.output
    result = runner.invoke(main, ["brachynomial", "--poly", "x + x y"])
    assert result.exit_code == 0
    assert "result: brachynomial" in result.output


def test_brachynomial_cap_is_a_resource_limit(runner):
    result = runner.invoke(main, ["brachynomial", "--poly", "x y x", "--cap", "1"])
    assert result.exit_code == 3


def test_usage_errors(runner):
    result = runner.invoke(main, ["brachynomial", "--poly", "x +"])
    assert result.exit_code == 2
    assert "error:" in result.output
    result = runner.invoke(main, ["build", "--spec", "field(2)"])
    assert result.exit_code == 2


def test_build_then_enumerate(runner, tmp_path):
    path = tmp_path / "z4.struct"
    result = runner.invoke(main, ["build", "--spec", "zmod(4)", "--out", str(path)])
    assert result.exit_code == 0, result.output
    result = runner.invoke(main, ["morphisms", str(path), str(path), "--cross-check"])
    assert result.exit_code == 0, result.output
    assert "morphisms: 1" in result.output
    assert "violations: 0" in result.output
    assert "constraint solver agrees: pass" in result.output


def test_check_and_certify(runner, z4):
    result = runner.invoke(main, ["check", z4, "--tables"])
    assert result.exit_code == 0, result.output
    assert "jacobson radical: pass" in result.output
    assert "  elements: 0, 2" in result.output
    result = runner.invoke(main, ["certify", z4, "--pairs"])
    assert result.exit_code == 0, result.output
    assert "addable: 4" in result.output
    assert "summable_pairs: 16" in result.output


def test_formula_on_a_small_battery(runner, z4, tmp_path):
    battery = tmp_path / "battery"
    battery.mkdir()
    save_struct(zmod(2), battery / "z2.struct")
    save_struct(zmod(3), battery / "z3.struct")
    result = runner.invoke(
        main, ["formula", "--name", "S_perp", "--struct", z4, "--tuple", "2,2", "--battery", str(battery)]
    )
    assert result.exit_code == 0, result.output
    assert "structures: 2" in result.output


def test_identities_and_weyl(runner):
    result = runner.invoke(main, ["identities"])
    assert result.exit_code == 0, result.output
    assert "cases: 14" in result.output
    result = runner.invoke(main, ["identities", "--case", "no-such-case"])
    assert result.exit_code == 2
    result = runner.invoke(main, ["weyl", "--m", "3"])
    assert result.exit_code == 0
    assert "m=3: pass" in result.output


def test_small_search(runner, tmp_path):
    result = runner.invoke(main, ["search", "--class", "semiring", "--order", "2"])
    assert result.exit_code == 0, result.output
    assert "counterexamples: 0" in result.output
    result = runner.invoke(main, ["search", "--order", "4", "--budget", "4"])
    assert result.exit_code == 3


def test_matrix_and_detaudit(runner, tmp_path):
    result = runner.invoke(main, ["matrix", "--nmax", "2"])
    assert result.exit_code == 0, result.output
    assert "m3 n=2: pass" in result.output
    spec = tmp_path / "audit.yaml"
    spec.write_text("audits:\n  - name: dual\n    base: zmod(2)\n    n: 2\n    generators: [[[0, 0], [1, 0]]]\n")
    result = runner.invoke(main, ["detaudit", "--spec", str(spec)])
    assert result.exit_code == 0, result.output
    assert "dual: pass" in result.output
    assert "premise_holds: 1" in result.output


def test_sweep(runner):
    result = runner.invoke(main, ["sweep", "formulas", "--spec", "zmod(2)", "--spec", "zmod(3)"])
    assert result.exit_code == 0, result.output
    assert "rows: 6" in result.output


def test_report_is_saved(runner, tmp_path):
    path = tmp_path / "report.json"
    result = runner.invoke(main, ["--report", str(path), "fixture", "table2"])
    assert result.exit_code == 0, result.output
    with open(path) as f:
        saved = json.load(f)
    assert saved["exit_code"] == 0
    assert saved["command"].startswith("fixture")


def test_report_is_saved_on_resource_limit(runner, tmp_path):
    path = tmp_path / "report.json"
    result = runner.invoke(main, ["--report", str(path), "brachynomial", "--poly", "x y x", "--cap", "1"])
    assert result.exit_code == 3
    assert "command: brachynomial cap=1 text=x y x\n" in result.output
    assert "resource limit: FAIL" in result.output
    with open(path) as f:
        saved = json.load(f)
    assert saved["exit_code"] == 3
    assert saved["command"] == "brachynomial cap=1 text=x y x"
    assert saved["items"][0]["name"] == "resource limit"
    assert "wall_time" in saved["stats"]


def test_report_is_saved_on_usage_error(runner, tmp_path):
    path = tmp_path / "report.json"
    result = runner.invoke(main, ["--report", str(path), "brachynomial", "--poly", "x +"])
    assert result.exit_code == 2
    assert path.exists()
    with open(path) as f:
        saved = json.load(f)
    assert saved["exit_code"] == 2
    assert saved["command"].startswith("brachynomial")
    assert saved["items"][0]["status"] == "FAIL"


@mark.parametrize(
    "args",
    [
        ["weyl", "--m", "2"],
        ["brachynomial", "--poly", "x + x y"],
        ["fixture", "table1"],
    ],
)
def test_every_command_reports_wall_time(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    assert "[stats]" in result.output
    assert "wall_time: " in result.output


@mark.slow
def test_zoo_and_version(runner):
    result = runner.invoke(main, ["zoo"])
    assert result.exit_code == 0
    assert "structures: 12" in result.output
    result = runner.invoke(main, ["version"])
    assert result.exit_code == 0
    assert "brachy: 0.1.0" in result.output
