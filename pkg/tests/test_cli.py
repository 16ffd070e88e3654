import csv
import io
import json

import numpy as np
import pytest

from grusslab.cli import main
from grusslab.hermitian import matrix_to_json

from conftest import random_pd

FAIL_DIGEST = "suite=THM13;seed=1;trial=1;dim=4"


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_run_report_is_deterministic_across_workers(tmp_path):
    outs = []
    for w in ("1", "1", "8"):
        p = tmp_path / f"r{len(outs)}.json"
        main(["run", "--suite", "ALL", "--dim", "3", "--trials", "40", "--seed", "5", "--workers", w, "--out", str(p)])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_run_report_structure(capsys):
    code, out = run_cli(capsys, "run", "--suite", "THM1,OP_HERON", "--dim", "2", "--trials", "7",
                        "--seed", "3", "--workers", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["seed"] == 3 and "workers" not in rep["config"]
    assert [s["id"] for s in rep["suites"]] == ["THM1", "OP_HERON"]
    for s in rep["suites"]:
        assert s["trials"] == 7 and s["failures"] == []
        assert s["refinement_gain"]["min"] >= -1e-9
    assert rep["version"]["prng"]


def test_run_all_fails_only_on_thm13(capsys):
    code, out = run_cli(capsys, "run", "--suite", "ALL", "--dim", "4", "--trials", "100", "--seed", "1",
                        "--workers", "1")
    rep = json.loads(out)
    failing = {s["id"] for s in rep["suites"] if s["failures"]}
    assert code == 1
    assert failing == {"THM13"}
    f = next(s for s in rep["suites"] if s["id"] == "THM13")["failures"][0]
    assert f["details"]["failing_links"] == ["final_step"]


def test_unknown_suite_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--suite", "NOSUCH"])
    assert exc.value.code == 2
    assert "NOSUCH" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["run", "--dim", "0", "--trials", "1"],
    ["run", "--weights", "bogus"],
    ["sweep", "THM1", "--lo", "2", "--hi", "1"],
    ["crossover", "--lo", "0"],
    ["replay", "suite=THM1;seed=x"],
])
def test_bad_arguments_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_csv_format(capsys):
    code, out = run_cli(capsys, "run", "--suite", "COR3", "--trials", "4", "--seed", "2", "--workers", "1",
                        "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert rows[0]["digest"].startswith("suite=COR3;seed=2;trial=0")
    assert all(r["holds"] == "True" for r in rows)


def test_sweep(capsys):
    code, out = run_cli(capsys, "sweep", "COR3", "--lo", "0.5", "--hi", "2", "--points", "5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5
    assert float(rows[2]["x"]) == pytest.approx(1.0)
    assert float(rows[2]["gain"]) == pytest.approx(0.0, abs=1e-15)
    code, out = run_cli(capsys, "sweep", "THM1", "--lo", "3", "--hi", "3", "--weight", "exp")
    assert code == 0 and len(list(csv.DictReader(io.StringIO(out)))) == 1
    code, out = run_cli(capsys, "sweep", "EQ6_EQ7", "--lo", "2", "--hi", "1e6", "--points", "2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["lhs6"]) == pytest.approx(0.077352, abs=1e-6)


def test_crossover(capsys):
    code, out = run_cli(capsys, "crossover")
    rep = json.loads(out)
    assert code == 0
    assert rep["claimed_threshold"] == 11288
    assert rep["crossovers"] == [pytest.approx(235929.927, rel=1e-8)]
    assert rep["verdict"] == "INCONSISTENT"
    code, out = run_cli(capsys, "crossover", "--lo", "2", "--hi", "100")
    assert json.loads(out)["crossovers"] == [] and json.loads(out)["verdict"] == "UNDETERMINED"


def test_replay(capsys):
    code, out = run_cli(capsys, "replay", FAIL_DIGEST)
    rec = json.loads(out)
    assert code == 1 and rec["holds"] is False and rec["digest"] == FAIL_DIGEST
    code, _ = run_cli(capsys, "run", "--replay", "suite=THM1;seed=1;trial=2;dim=4;v=0.5;weight=exp")
    assert code == 0


def test_input_file(tmp_path, capsys, rng):
    p = tmp_path / "pair.json"
    p.write_text(json.dumps({"A": matrix_to_json(random_pd(rng, 3)), "B": matrix_to_json(random_pd(rng, 3))}))
    code, out = run_cli(capsys, "run", "--suite", "OP_HERON,OP_ENTROPY", "--input", str(p), "--weights", "identity,exp")
    reps = json.loads(out)
    assert code == 0 and len(reps) == 3 and all(r["holds"] for r in reps)
    with pytest.raises(SystemExit) as exc:
        main(["run", "--suite", "THM1", "--input", str(p)])
    assert exc.value.code == 2
    p.write_text(json.dumps({"A": matrix_to_json(np.eye(2)), "B": matrix_to_json(-np.eye(2))}))
    assert main(["run", "--suite", "OP_HERON", "--input", str(p)]) == 2
    assert "positive definite" in capsys.readouterr().err
