import json

import pytest

from knowhow.cli import main
from knowhow.fixtures import fixture_text, proof_text


@pytest.fixture
def t1_path(tmp_path):
    path = tmp_path / "t1.ets"
    path.write_text(fixture_text("t1"))
    return str(path)


def test_check_true_with_witness(t1_path, capsys):
    code = main(["check", "--system", t1_path,
                 "--history", "w0 ; a=1 ; w1", "--formula", "H{a} p"])
    out = capsys.readouterr().out
    assert code == 0
    assert "verdict: True" in out
    assert "witness: a=0" in out
    assert "horizon: exact" in out


def test_check_false_exit_code(t1_path, capsys):
    code = main(["check", "--system", t1_path,
                 "--history", "w1", "--formula", "H{a} p"])
    out = capsys.readouterr().out
    assert code == 1
    assert "verdict: False" in out
    assert "witness: none" in out


def test_check_defaults_horizon_for_empty_coalitions(t1_path, capsys):
    code = main(["check", "--system", t1_path,
                 "--history", "w2", "--formula", "K{} (p -> p)"])
    out = capsys.readouterr().out
    assert code == 0
    assert "horizon: 2" in out  # history 0 + nesting 0 + 2
    assert "bounded: yes" in out


def test_check_reports_counterexample(t1_path, capsys):
    code = main(["check", "--system", t1_path,
                 "--history", "w2", "--formula", "K{} p", "--horizon", "3"])
    out = capsys.readouterr().out
    assert code == 1
    assert "counterexample:" in out
    assert "bounded: no" in out


def test_check_bad_formula_is_usage_error(t1_path, capsys):
    code = main(["check", "--system", t1_path,
                 "--history", "w2", "--formula", "p ->"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_missing_file_is_reported(capsys):
    code = main(["check", "--system", "/nonexistent.ets",
                 "--history", "w0", "--formula", "p"])
    assert code == 2


def test_prove_ok_and_failing(tmp_path, capsys):
    good = tmp_path / "good.proof"
    good.write_text(proof_text("how_coalition_widening.proof"))
    assert main(["prove", str(good)]) == 0
    assert capsys.readouterr().out.strip() == "ok"

    bad = tmp_path / "bad.proof"
    bad.write_text(proof_text("bad_cooperation_overlap.proof"))
    assert main(["prove", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().out


def test_examples_commands(capsys):
    assert main(["examples", "t1"]) == 0
    out = capsys.readouterr().out
    assert "6/6 claims pass" in out
    assert main(["examples", "t2"]) == 0
    assert "3/3 claims pass" in capsys.readouterr().out


def test_validate_regular_and_broken(t1_path, tmp_path, capsys):
    assert main(["validate", "--system", t1_path]) == 0
    assert "regular" in capsys.readouterr().out

    broken = tmp_path / "broken.ets"
    broken.write_text("agents: a\nchoices: 0 1\nstates: w0\ntrans w0 [a=0] w0\n")
    assert main(["validate", "--system", str(broken)]) == 1
    assert "not regular" in capsys.readouterr().out


def test_fuzz_small_run(capsys):
    code = main(["fuzz", "--seed", "3", "--systems", "2", "--instances", "2",
                 "--states", "3", "--depth", "2", "--horizon", "4"])
    out = capsys.readouterr().out
    assert code == 0
    assert "violations=0" in out
    assert "failures=0" in out


def test_fuzz_json_report(capsys):
    code = main(["fuzz", "--seed", "3", "--systems", "1", "--instances", "1",
                 "--states", "2", "--depth", "2", "--horizon", "4", "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["soundness"]["violations"] == []
    assert payload["lemmas"]["failures"] == []


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["check", "--system"])
    assert err.value.code == 2
