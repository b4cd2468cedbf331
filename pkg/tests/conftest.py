import functools
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from opkls.lattices import build_lattice  # noqa: E402

CORPUS = [
    "boolean:1", "boolean:2", "boolean:3", "boolean:4",
    *[f"uniform:{k},{n}" for n in range(1, 6) for k in range(1, n + 1)],
    "partition:2", "partition:3", "partition:4", "partition:5",
    "graph:K4", "graph:C4",
]

# corpus members of rank <= 3, for the slower exhaustive checks
SMALL = ["boolean:2", "boolean:3", "uniform:2,3", "uniform:2,4", "uniform:3,4",
         "uniform:3,5", "partition:3", "partition:4", "graph:K4", "graph:C4"]

# (P, Q) frozen from tests/oracles.py (flats by brute force, EPW and
# Gao-Xie identities), ascending coefficients
FROZEN_KL = {
    "boolean:4": ([1], [1]),
    "uniform:2,3": ([1], [2]),
    "uniform:2,4": ([1], [3]),
    "uniform:2,5": ([1], [4]),
    "uniform:3,4": ([1, 2], [3, 2]),
    "uniform:3,5": ([1, 5], [6, 5]),
    "uniform:4,5": ([1, 5], [4, 5]),
    "uniform:5,5": ([1], [1]),
    "partition:3": ([1], [2]),
    "partition:4": ([1, 1], [6, 1]),
    "partition:5": ([1, 5], [24, 10]),
    "graph:K4": ([1, 1], [6, 1]),
    "graph:C4": ([1, 2], [3, 2]),
}


@functools.lru_cache(maxsize=None)
def lattice(name):
    return build_lattice(name)


@pytest.fixture
def lat():
    return lattice


# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
