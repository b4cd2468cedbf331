"""Lattice ingestion: matroid descriptions, builtin families and JSON.

Every matroid-flavoured input is turned into its lattice of flats.  Atoms
are ordered by the smallest ground-set element they contain, so the atom
order is the ground-set order; nbc bases and EL-labelings downstream depend
on it.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import InputError, InvalidMatroid
from .poset import DEFAULT_MAX_ELEMENTS, GeometricLattice, GradedBoundedPoset


class Matroid:
    """A matroid given by a rank oracle on frozensets of ground indices."""

    def __init__(self, ground: Sequence, rank_fn: Callable[[frozenset], int]):
        self.ground = list(ground)
        self._rank_fn = rank_fn
        self._cache: dict[frozenset, int] = {}

    def rank(self, s) -> int:
        s = frozenset(s)
        r = self._cache.get(s)
        if r is None:
            r = self._cache[s] = self._rank_fn(s)
        return r

    def closure(self, s) -> frozenset:
        s = frozenset(s)
        r = self.rank(s)
        return frozenset(e for e in range(len(self.ground)) if e in s or self.rank(s | {e}) == r)

    def flats(self, max_elements: int = DEFAULT_MAX_ELEMENTS) -> list[list[frozenset]]:
        """Flats grouped by rank, each level sorted by sorted element tuple."""
        from .errors import SizeGuardExceeded

        levels = [[self.closure(())]]
        total = 1
        while True:
            nxt = set()
            for f in levels[-1]:
                for e in range(len(self.ground)):
                    if e not in f:
                        nxt.add(self.closure(f | {e}))
            if not nxt:
                break
            total += len(nxt)
            if total > max_elements:
                raise SizeGuardExceeded(f"lattice of flats exceeds {max_elements} elements")
            levels.append(sorted(nxt, key=lambda s: sorted(s)))
        return levels

    def lattice_of_flats(self, max_elements: int = DEFAULT_MAX_ELEMENTS) -> GeometricLattice:
        levels = self.flats(max_elements)
        loops = levels[0][0]
        # atoms in ground-set order
        if len(levels) > 1:
            levels[1] = sorted(levels[1], key=lambda f: min(f - loops))
        flat_list = [f for lvl in levels for f in lvl]
        index = {f: i for i, f in enumerate(flat_list)}
        rel = []
        for r in range(len(levels) - 1):
            for f in levels[r]:
                for e in range(len(self.ground)):
                    if e not in f:
                        rel.append((index[f], index[self.closure(f | {e})]))
        labels = [tuple(self.ground[e] for e in sorted(f)) for f in flat_list]
        return GeometricLattice(labels, sorted(set(rel)), max_elements=max_elements)


# -- rank oracles ---------------------------------------------------------


def uniform_matroid(k: int, n: int) -> Matroid:
    if not (0 <= k <= n) or n < 1:
        raise InvalidMatroid(f"uniform parameters need 0 <= k <= n, n >= 1 (got {k}, {n})")
    return Matroid(list(range(1, n + 1)), lambda s: min(len(s), k))


def graphic_matroid(num_vertices: int, edges: Sequence[Sequence[int]]) -> Matroid:
    edges = [tuple(int(t) for t in e) for e in edges]
    for e in edges:
        if len(e) != 2 or not all(0 <= v < num_vertices for v in e):
            raise InputError(f"bad edge {e!r} for {num_vertices} vertices")

    def rank(s):
        parent = list(range(num_vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        r = 0
        for i in s:
            u, v = edges[i]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                r += 1
        return r

    return Matroid([f"{u}{v}" if num_vertices <= 10 else f"{u}-{v}" for u, v in edges], rank)


def circuit_matroid(ground: Sequence, circuits: Sequence[Sequence]) -> Matroid:
    pos = {g: i for i, g in enumerate(ground)}
    if len(pos) != len(ground):
        raise InvalidMatroid("ground set has repeated elements")
    try:
        cs = [frozenset(pos[g] for g in c) for c in circuits]
    except KeyError as exc:
        raise InvalidMatroid(f"circuit uses unknown element {exc.args[0]!r}") from None
    if any(not c for c in cs):
        raise InvalidMatroid("empty circuit")
    for a, b in itertools.permutations(cs, 2):
        if a <= b:
            raise InvalidMatroid(f"circuits {sorted(a)} and {sorted(b)} are not a clutter")
    cset = set(cs)
    for a, b in itertools.combinations(cset, 2):
        for e in a & b:
            u = (a | b) - {e}
            if not any(c <= u for c in cset):
                raise InvalidMatroid(f"circuit elimination fails for {sorted(a)}, {sorted(b)} at {e}")

    def rank(s):
        indep: set[int] = set()
        for e in sorted(s):
            trial = frozenset(indep | {e})
            if not any(c <= trial for c in cs):
                indep.add(e)
        return len(indep)

    return Matroid(list(ground), rank)


def basis_matroid(ground: Sequence, bases: Sequence[Sequence]) -> Matroid:
    pos = {g: i for i, g in enumerate(ground)}
    try:
        bs = {frozenset(pos[g] for g in b) for b in bases}
    except KeyError as exc:
        raise InvalidMatroid(f"basis uses unknown element {exc.args[0]!r}") from None
    if not bs:
        raise InvalidMatroid("no bases")
    if len({len(b) for b in bs}) != 1:
        raise InvalidMatroid("bases have different sizes")
    for b1, b2 in itertools.permutations(bs, 2):
        for x in b1 - b2:
            if not any((b1 - {x}) | {y} in bs for y in b2 - b1):
                raise InvalidMatroid(f"basis exchange fails for {sorted(b1)}, {sorted(b2)} at {x}")
    blist = list(bs)
    return Matroid(list(ground), lambda s: max(len(s & b) for b in blist))


# -- matroid descriptions----------------------------------------------------


@dataclass
class MatroidSpec:
    """One of the accepted input forms.  ``kind`` selects which fields apply."""

    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, data: dict) -> "MatroidSpec":
        if not isinstance(data, dict):
            raise InputError("top-level JSON value must be an object")
        for kind in ("covers", "circuits", "bases", "graph", "uniform", "boolean", "partition"):
            if kind in data:
                return cls(kind, dict(data))
        raise InputError("JSON input needs one of covers, circuits, bases, graph, "
                         "uniform, boolean, partition")

    @classmethod
    def from_builtin(cls, name: str) -> "MatroidSpec":
        """Parse ``boolean:n``, ``uniform:k,n``, ``partition:n`` or ``graph:PATH``."""
        kind, _, arg = name.partition(":")
        try:
            if kind == "boolean":
                return cls("boolean", {"boolean": int(arg)})
            if kind == "uniform":
                k, n = (int(t) for t in arg.split(","))
                return cls("uniform", {"uniform": [k, n]})
            if kind == "partition":
                return cls("partition", {"partition": int(arg)})
            if kind in ("k4", "cycle4"):
                return cls.from_builtin({"k4": "partition:4", "cycle4": "uniform:3,4"}[kind])
            if kind == "graph":
                named = _named_graph(arg)
                if named is not None:
                    return cls("graph", {"graph": named})
                with open(arg) as fh:
                    return cls.from_json(json.load(fh))
        except OSError as exc:
            raise InputError(f"cannot read {arg!r}: {exc.strerror}") from None
        except (ValueError, TypeError) as exc:
            raise InputError(f"bad builtin {name!r}: {exc}") from None
        raise InputError(f"unknown builtin {name!r}")


def _named_graph(name: str) -> dict | None:
    """``Kn`` (complete) or ``Cn`` (cycle) graphs, else None."""
    if len(name) < 2 or name[0] not in "KC" or not name[1:].isdigit():
        return None
    n = int(name[1:])
    if name[0] == "K":
        edges = [list(e) for e in itertools.combinations(range(n), 2)]
    else:
        edges = [[i, (i + 1) % n] for i in range(n)] if n >= 3 else []
    return {"vertices": n, "edges": edges}


def build_lattice(spec: MatroidSpec | dict | str, *, max_elements: int = DEFAULT_MAX_ELEMENTS
                  ) -> GeometricLattice:
    """Validate a matroid description and return its geometric lattice."""
    if isinstance(spec, str):
        spec = MatroidSpec.from_builtin(spec)
    elif isinstance(spec, dict):
        spec = MatroidSpec.from_json(spec)
    p = spec.params
    try:
        if spec.kind == "covers":
            P = poset_from_json(p, max_elements=max_elements)
            return GeometricLattice.from_poset(P)
        if spec.kind == "boolean":
            n = int(p["boolean"])
            return uniform_matroid(n, n).lattice_of_flats(max_elements)
        if spec.kind == "uniform":
            k, n = (int(t) for t in p["uniform"])
            return uniform_matroid(k, n).lattice_of_flats(max_elements)
        if spec.kind == "partition":
            n = int(p["partition"])
            if n < 1:
                raise InvalidMatroid("partition lattice needs n >= 1")
            edges = list(itertools.combinations(range(n), 2))
            if not edges:
                return GeometricLattice([()], [], max_elements=max_elements)
            m = graphic_matroid(n, edges)
            m.ground = [f"{u + 1}{v + 1}" for u, v in edges]
            return m.lattice_of_flats(max_elements)
        if spec.kind == "graph":
            g = p["graph"]
            return graphic_matroid(int(g["vertices"]), g["edges"]).lattice_of_flats(max_elements)
        if spec.kind == "circuits":
            ground = p.get("ground")
            if ground is None:
                raise InputError("circuits input needs a ground list")
            return circuit_matroid(ground, p["circuits"]).lattice_of_flats(max_elements)
        if spec.kind == "bases":
            ground = p.get("ground")
            if ground is None:
                ground = sorted({g for b in p["bases"] for g in b}, key=repr)
            return basis_matroid(ground, p["bases"]).lattice_of_flats(max_elements)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed {spec.kind} input: {exc!r}") from None
    raise InputError(f"unknown specification kind {spec.kind!r}")


def poset_from_json(data: dict, *, max_elements: int = DEFAULT_MAX_ELEMENTS) -> GradedBoundedPoset:
    if "elements" not in data or "covers" not in data:
        raise InputError("poset JSON needs 'elements' and 'covers'")
    elems = data["elements"]
    covers = data["covers"]
    if not isinstance(elems, list) or not isinstance(covers, list):
        raise InputError("'elements' and 'covers' must be lists")
    labels = [tuple(e) if isinstance(e, list) else e for e in elems]
    return GradedBoundedPoset(labels, covers, max_elements=max_elements)


def load_input(path: str, *, max_elements: int = DEFAULT_MAX_ELEMENTS):
    """Load a JSON file; returns a GeometricLattice when possible, else raises."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return build_lattice(MatroidSpec.from_json(data), max_elements=max_elements)


def boolean(n: int, **kw) -> GeometricLattice:
    return build_lattice(MatroidSpec("boolean", {"boolean": n}), **kw)


def uniform(k: int, n: int, **kw) -> GeometricLattice:
    return build_lattice(MatroidSpec("uniform", {"uniform": [k, n]}), **kw)


def partition(n: int, **kw) -> GeometricLattice:
    return build_lattice(MatroidSpec("partition", {"partition": n}), **kw)


def graph(num_vertices: int, edges, **kw) -> GeometricLattice:
    return build_lattice(MatroidSpec("graph", {"graph": {"vertices": num_vertices, "edges": edges}}), **kw)


def corpus(max_rank: int = 5) -> dict[str, GeometricLattice]:
    """The builtin test corpus, keyed by a short name."""
    out: dict[str, GeometricLattice] = {}
    for n in range(1, 5):
        out[f"boolean:{n}"] = boolean(n)
    for n in range(1, 6):
        for k in range(1, n + 1):
            out[f"uniform:{k},{n}"] = uniform(k, n)
    for n in range(2, 6):
        out[f"partition:{n}"] = partition(n)
    out["graph:K4"] = graph(4, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]])
    out["graph:C4"] = graph(4, [[0, 1], [1, 2], [2, 3], [3, 0]])
    return {k: v for k, v in out.items() if v.rank <= max_rank}
