import json

import pytest

from opkls.errors import InputError, InvalidMatroid, NotGeometric, SizeGuardExceeded
from opkls.lattices import (MatroidSpec, basis_matroid, build_lattice, circuit_matroid, corpus,
                            load_input)

from conftest import lattice
from oracles import uniform_flat_count


@pytest.mark.parametrize("k,n", [(1, 1), (2, 3), (2, 5), (3, 4), (3, 5), (4, 5), (5, 5)])
def test_uniform_flat_counts(k, n):
    assert lattice(f"uniform:{k},{n}").n == uniform_flat_count(k, n)


def test_boolean_is_uniform_full_rank():
    assert lattice("boolean:4").n == 16
    assert lattice("boolean:4").rank == 4


def test_atoms_follow_ground_order():
    L = lattice("uniform:2,3")
    assert [L.labels[a] for a in L.atom_list] == [(1,), (2,), (3,)]
    K = lattice("partition:4")
    assert [K.labels[a] for a in K.atom_list] == [("12",), ("13",), ("14",), ("23",), ("24",), ("34",)]


def test_named_graphs_match_partition():
    assert lattice("graph:K4").n == lattice("partition:4").n
    assert lattice("graph:C4").n == lattice("uniform:3,4").n


def test_partition_one_is_a_point():
    L = build_lattice("partition:1")
    assert L.n == 1 and L.rank == 0


def test_circuits_input():
    data = {"ground": ["a", "b", "c"], "circuits": [["a", "b", "c"]]}
    L = build_lattice(data)
    assert L.n == lattice("uniform:2,3").n


def test_bases_input():
    data = {"bases": [[1, 2], [1, 3], [2, 3]]}
    assert build_lattice(data).mobius() == 2


def test_covers_input_round_trip():
    L = lattice("boolean:2")
    again = build_lattice(L.to_json())
    assert again.n == 4 and again.mobius() == 1


def test_covers_input_non_geometric():
    with pytest.raises(NotGeometric):
        build_lattice({"elements": [0, 1, 2], "covers": [[0, 1], [1, 2]]})


@pytest.mark.parametrize("circuits", [
    [["a", "b"], ["a", "b", "c"]],      # not a clutter
    [["a", "b"], ["b", "c"]],           # elimination gives {a, c}, missing
    [["z"]],
    [[]],
])
def test_invalid_circuits(circuits):
    with pytest.raises(InvalidMatroid):
        circuit_matroid(["a", "b", "c"], circuits)


def test_invalid_bases():
    with pytest.raises(InvalidMatroid):
        basis_matroid([1, 2, 3, 4], [[1, 2], [3, 4]])
    with pytest.raises(InvalidMatroid):
        basis_matroid([1, 2, 3], [[1, 2], [3]])


@pytest.mark.parametrize("name", ["nonsense:3", "uniform:3", "boolean:x", "graph:/no/such/file"])
def test_bad_builtins(name):
    with pytest.raises(InputError):
        MatroidSpec.from_builtin(name)


def test_bad_uniform_parameters():
    with pytest.raises(InputError):
        build_lattice("uniform:4,3")


def test_size_guard_on_flats():
    with pytest.raises(SizeGuardExceeded):
        build_lattice("partition:6", max_elements=100)


def test_json_errors_carry_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"boolean": 2,\n  oops}')
    with pytest.raises(InputError, match=r":2:"):
        load_input(str(p))


def test_json_graph_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"graph": {"vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]]}}))
    assert load_input(str(p)).n == 5
    assert build_lattice(f"graph:{p}").n == 5


def test_corpus_ranks():
    c = corpus(max_rank=3)
    assert all(L.rank <= 3 for L in c.values())
    assert "partition:4" in c and "partition:5" not in c
