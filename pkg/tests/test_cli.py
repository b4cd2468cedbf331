import io
import json
import subprocess
import sys

import pytest

from opkls import poset
from opkls.cli import CHECKS, RunConfig, main

from conftest import FROZEN_KL


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--format", "json")
    return code, json.loads(out) if out else None, err


def test_lattice_partition4():
    code, rep, _ = run_json("lattice", "--builtin", "partition:4")
    assert code == 0
    assert len(rep["elements"]) == 15 and rep["rank"] == 3
    assert len(rep["atoms"]) == 6


def test_lattice_boolean2_characteristic():
    code, rep, _ = run_json("lattice", "--builtin", "boolean:2")
    assert rep["characteristic"] == [1, -2, 1]
    code, text, _ = run("lattice", "--builtin", "boolean:2")
    assert "elements: 4" in text and "rank: 2" in text


def test_malformed_json_exits_2(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"elements": [0, 1],\n "covers": [[0, 1]')
    code, out, err = run("lattice", "--input", str(p))
    assert code == 2
    assert "2:" in err


def test_missing_file_exits_2(tmp_path):
    assert run("lattice", "--input", str(tmp_path / "nope.json"))[0] == 2
    assert run("lattice", "--builtin", "graph:" + str(tmp_path / "nope.json"))[0] == 2


def test_bad_arguments_exit_2():
    assert run("lattice")[0] == 2
    assert run("lattice", "--builtin", "boolean:2", "--max-elements", "0")[0] == 2
    assert run("lattice", "--builtin", "spiral:3")[0] == 2


def test_size_guard_exits_3():
    code, _, err = run("lattice", "--builtin", "partition:5", "--max-elements", "20")
    assert code == 3 and "size guard" in err


def test_chain_cap_exits_3_and_is_restored():
    saved = poset.DEFAULT_MAX_CHAINS
    code, _, _ = run("betti", "--builtin", "partition:4", "--max-chains", "3", "--variant", "bar")
    assert code == 3
    assert poset.DEFAULT_MAX_CHAINS == saved


def test_input_matroid_file(tmp_path):
    p = tmp_path / "k4.json"
    p.write_text(json.dumps({"graph": {"vertices": 4, "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]}}))
    code, rep, _ = run_json("lattice", "--input", str(p))
    assert code == 0 and len(rep["elements"]) == 15


@pytest.mark.parametrize("name", ["uniform:2,3", "partition:4", "boolean:4", "graph:K4"])
def test_kl_two_routes_match(name):
    code, rep, _ = run_json("kl", "--builtin", name)
    assert code == 0 and rep["match"] is True
    want = FROZEN_KL.get(name)
    if want:
        assert rep["P"]["recursion"] == rep["P"]["complexes"] == want[0]
        assert rep["Q"]["recursion"] == rep["Q"]["complexes"] == want[1]
    for e in rep["betti"]:
        assert set(e) == {"lattice", "variant", "weight", "betti", "euler"}


def test_kl_text_and_csv():
    code, text, _ = run("kl", "--builtin", "uniform:3,4")
    assert code == 0 and "verdict: match" in text
    code, csv_text, _ = run("kl", "--builtin", "uniform:3,4", "--format", "csv")
    assert csv_text.splitlines()[0].startswith("x,y,rank")


def test_kl_parallel_jobs_agree():
    a = run_json("kl", "--builtin", "uniform:3,5")[1]
    b = run_json("kl", "--builtin", "uniform:3,5", "--jobs", "2")[1]
    assert a == b


def test_dims_uniform23():
    code, rep, _ = run_json("dims", "--builtin", "uniform:2,3")
    dims = {tuple(e["bigrade"]): e["dim"] for e in rep["gerst"]}
    assert dims == {(2, 0): 1, (1, 1): 3, (0, 2): 2}
    assert rep["hilbert"] == rep["chi_plus"] == [2, 3, 1]
    assert rep["os_whitney"] == [1, 3, 2]
    assert rep["normal_monomials"] == {"com": 1, "lie": 2, "gerst": 6}


def test_dims_rank_one():
    code, rep, _ = run_json("dims", "--builtin", "boolean:1")
    assert rep["hilbert"] == [1, 1]


def test_betti_single_table():
    code, rep, _ = run_json("betti", "--builtin", "partition:4", "--variant", "rkls", "--weight", "1")
    assert code == 0
    assert rep["variant"] == "rkls" and rep["weight"] == 1
    assert {d: v for d, v in rep["betti"].items() if v} == {"1": 1}


def test_betti_koszul_is_zero():
    code, rep, _ = run_json("betti", "--builtin", "uniform:2,3", "--variant", "kos")
    assert all(not any(t["betti"].values()) for t in rep["tables"])


def test_verify_full_suite_on_pi4():
    code, rep, _ = run_json("verify", "--builtin", "partition:4")
    assert code == 0 and rep["ok"]
    names = [c["check"] for c in rep["checks"]]
    assert names == ["geometric", *CHECKS]


def test_verify_single_check():
    code, rep, _ = run_json("verify", "--builtin", "partition:4", "--check", "bar-acyclic")
    assert code == 0
    assert [c["check"] for c in rep["checks"]] == ["geometric", "bar-acyclic"]
    assert run("verify", "--builtin", "partition:4", "--check", "nonsense")[0] == 2


def test_verify_non_geometric_poset(tmp_path):
    # a 3-element chain has a single atom but rank 2: not atomistic
    p = tmp_path / "chain.json"
    p.write_text(json.dumps({"elements": ["0", "a", "1"], "covers": [[0, 1], [1, 2]]}))
    code, rep, _ = run_json("verify", "--input", str(p))
    assert code == 1 and not rep["ok"]
    status = {c["check"]: c["status"] for c in rep["checks"]}
    assert status.pop("geometric") == "FAIL"
    assert set(status.values()) == {"skip"}


def test_json_output_is_deterministic():
    a = run("dims", "--builtin", "partition:4", "--format", "json")[1]
    b = run("dims", "--builtin", "partition:4", "--format", "json")[1]
    assert a == b
    json.loads(a)


def test_run_config_validation():
    cfg = RunConfig(command="kl", builtin="boolean:2", input=None, format="json", weight=None,
                    variant=None, max_elements=10, max_chains=10, jobs=0, check=None, verbose=0)
    from opkls.errors import InputError
    with pytest.raises(InputError):
        cfg.validate()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "opkls", "lattice", "--builtin", "boolean:1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "rank: 1" in r.stdout
