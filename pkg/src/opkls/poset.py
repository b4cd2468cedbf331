"""Finite graded bounded posets and geometric lattices.

Elements are integers ``0..n-1`` sorted by rank, so ``0`` is always the
bottom and ``n-1`` the top.  Order relations are kept as Python-int
bitmasks of up-sets and down-sets, which makes interval extraction a single
``&``.
"""

from __future__ import annotations

from collections import deque
from functools import cached_property
from typing import Iterator, Sequence

from .errors import (
    ELVerificationFailed,
    InputError,
    NotALattice,
    NotComparable,
    NotGeometric,
    NotGraded,
    SizeGuardExceeded,
)
from .polynomial import Poly

DEFAULT_MAX_ELEMENTS = 500
DEFAULT_MAX_CHAINS = 10**6


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class GradedBoundedPoset:
    """A finite poset with a bottom, a top and a rank function.

    Built from a list of labels and a list of (lower, upper) pairs whose
    transitive closure is the order.  Redundant pairs are accepted; the
    cover relation is recomputed from the closure.
    """

    def __init__(self, labels: Sequence, relations: Sequence[tuple[int, int]],
                 *, max_elements: int = DEFAULT_MAX_ELEMENTS, parent_map=None):
        n = len(labels)
        if n == 0:
            raise InputError("poset has no elements")
        if n > max_elements:
            raise SizeGuardExceeded(f"{n} elements exceeds cap {max_elements}")
        succ: list[set[int]] = [set() for _ in range(n)]
        for pair in relations:
            try:
                u, v = (int(t) for t in pair)
            except (TypeError, ValueError):
                raise InputError(f"bad cover entry {pair!r}") from None
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"cover {pair!r} references a missing element")
            if u == v:
                raise InputError(f"cover {pair!r} is a loop")
            succ[u].add(v)

        indeg = [0] * n
        for u in range(n):
            for v in succ[u]:
                indeg[v] += 1
        queue = deque(u for u in range(n) if indeg[u] == 0)
        topo = []
        while queue:
            u = queue.popleft()
            topo.append(u)
            for v in sorted(succ[u]):
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if len(topo) != n:
            raise InputError("relation contains a cycle; not a partial order")

        up = [0] * n
        for u in reversed(topo):
            m = 1 << u
            for v in succ[u]:
                m |= up[v]
            up[u] = m
        full = (1 << n) - 1
        bottoms = [u for u in range(n) if up[u] == full]
        if not bottoms:
            minimal = [u for u in range(n) if not any((up[w] >> u) & 1 for w in range(n) if w != u)]
            raise NotALattice(f"no bottom element (minimal elements {minimal[:2]})")
        tops = [u for u in range(n) if all((up[w] >> u) & 1 for w in range(n))]
        if not tops:
            raise NotALattice("no top element")

        down = [0] * n
        for u in range(n):
            for v in iter_bits(up[u]):
                down[v] |= 1 << u
        # longest-path rank from the bottom, then gradedness on covers
        rank0 = [0] * n
        covers0: list[list[int]] = [[] for _ in range(n)]
        for u in range(n):
            for v in iter_bits(up[u] & ~(1 << u)):
                if up[u] & down[v] == (1 << u) | (1 << v):
                    covers0[u].append(v)
        for u in topo:
            for v in covers0[u]:
                rank0[v] = max(rank0[v], rank0[u] + 1)
        for u in range(n):
            for v in covers0[u]:
                if rank0[v] != rank0[u] + 1:
                    raise NotGraded(
                        f"maximal chains of unequal length: cover {labels[u]!r} < {labels[v]!r} "
                        f"jumps from rank {rank0[u]} to {rank0[v]}")

        order = sorted(range(n), key=lambda u: (rank0[u], u))
        pos = {u: i for i, u in enumerate(order)}
        self._pos = pos
        self.n = n
        self.labels = [labels[u] for u in order]
        self.rank_of = [rank0[u] for u in order]
        self.covers = [sorted(pos[v] for v in covers0[u]) for u in order]
        self.cocovers: list[list[int]] = [[] for _ in range(n)]
        for i, cs in enumerate(self.covers):
            for j in cs:
                self.cocovers[j].append(i)
        self.up = [0] * n
        for u in order:
            m = 0
            for v in iter_bits(up[u]):
                m |= 1 << pos[v]
            self.up[pos[u]] = m
        self.down = [0] * n
        for i in range(n):
            for j in iter_bits(self.up[i]):
                self.down[j] |= 1 << i
        self.bottom = 0
        self.top = n - 1
        self.max_elements = max_elements
        # parent_map[i] is the index in the parent poset for intervals
        if parent_map is not None:
            parent_map = [parent_map[u] for u in order]
        self.parent_map = parent_map

    # -- basic queries ---------------------------------------------------

    @property
    def rank(self) -> int:
        return self.rank_of[self.top]

    def leq(self, x: int, y: int) -> bool:
        return bool((self.up[x] >> y) & 1)

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.leq(x, y)

    def relation_matrix(self) -> list[list[bool]]:
        return [[self.leq(x, y) for y in range(self.n)] for x in range(self.n)]

    def interval_mask(self, x: int, y: int) -> int:
        if not self.leq(x, y):
            raise NotComparable(f"{self.labels[x]!r} is not below {self.labels[y]!r}")
        return self.up[x] & self.down[y]

    def interval_elements(self, x: int, y: int) -> list[int]:
        return list(iter_bits(self.interval_mask(x, y)))

    def interior(self, x: int | None = None, y: int | None = None) -> list[int]:
        x = self.bottom if x is None else x
        y = self.top if y is None else y
        mask = self.interval_mask(x, y) & ~(1 << x) & ~(1 << y)
        return list(iter_bits(mask))

    def rank_between(self, x: int, y: int) -> int:
        return self.rank_of[y] - self.rank_of[x]

    def pairs(self) -> Iterator[tuple[int, int]]:
        """All comparable pairs x <= y."""
        for x in range(self.n):
            for y in iter_bits(self.up[x]):
                yield x, y

    def to_json(self) -> dict:
        return {
            "elements": [_jsonable(lab) for lab in self.labels],
            "covers": [[x, y] for x in range(self.n) for y in self.covers[x]],
        }

    # -- intervals -------------------------------------------------------

    def interval(self, x: int, y: int) -> "GradedBoundedPoset":
        elems = self.interval_elements(x, y)
        local = {e: i for i, e in enumerate(elems)}
        rel = [(local[a], local[b]) for a in elems for b in self.covers[a] if b in local]
        return GradedBoundedPoset([self.labels[e] for e in elems], rel,
                                  max_elements=self.max_elements, parent_map=elems)

    # -- Möbius function and characteristic polynomial ------------------

    @cached_property
    def _mobius_rows(self) -> list[dict[int, int]]:
        rows = []
        for x in range(self.n):
            mu = {x: 1}
            for y in iter_bits(self.up[x] & ~(1 << x)):
                mu[y] = -sum(mu[z] for z in iter_bits(self.up[x] & self.down[y] & ~(1 << y)))
            rows.append(mu)
        return rows

    def mobius(self, x: int | None = None, y: int | None = None) -> int:
        x = self.bottom if x is None else x
        y = self.top if y is None else y
        if not self.leq(x, y):
            raise NotComparable(f"{self.labels[x]!r} is not below {self.labels[y]!r}")
        return self._mobius_rows[x][y]

    def characteristic_polynomial(self, x: int | None = None, y: int | None = None,
                                  unsigned: bool = False) -> Poly:
        """sum over z in [x, y] of mu(x, z) t^rk[z, y]."""
        x = self.bottom if x is None else x
        y = self.top if y is None else y
        coeffs = [0] * (self.rank_between(x, y) + 1)
        for z in iter_bits(self.interval_mask(x, y)):
            m = self.mobius(x, z)
            coeffs[self.rank_between(z, y)] += abs(m) if unsigned else m
        return Poly(coeffs)

    # -- chains ----------------------------------------------------------

    def iter_chains(self, x: int | None = None, y: int | None = None) -> Iterator[tuple[int, ...]]:
        """Strict chains in the open interval (x, y), empty chain first, lexicographic."""
        x = self.bottom if x is None else x
        y = self.top if y is None else y
        inner = self.interval_mask(x, y) & ~(1 << x) & ~(1 << y)

        def rec(prefix, allowed):
            yield prefix
            for z in iter_bits(allowed):
                yield from rec(prefix + (z,), allowed & self.up[z] & ~(1 << z))

        yield from rec((), inner)

    def enumerate_chains(self, open_interior: bool = True, *, x: int | None = None,
                         y: int | None = None, max_chains: int = DEFAULT_MAX_CHAINS
                         ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Chains of the open interior, each paired with its full decomposition.

        With ``open_interior=False`` the closed chain 0 < ... < 1 is returned in
        both slots (the decomposition already includes the end points).
        """
        x = self.bottom if x is None else x
        y = self.top if y is None else y
        out = []
        for c in self.iter_chains(x, y):
            if len(out) >= max_chains:
                raise SizeGuardExceeded(f"more than {max_chains} chains")
            full = (x,) + c + (y,) if x != y else (x,)
            out.append((c if open_interior else full, full))
        return out

    def maximal_chains(self, x: int | None = None, y: int | None = None) -> list[tuple[int, ...]]:
        x = self.bottom if x is None else x
        y = self.top if y is None else y
        out = []

        def rec(path):
            last = path[-1]
            if last == y:
                out.append(tuple(path))
                return
            for z in self.covers[last]:
                if self.leq(z, y):
                    path.append(z)
                    rec(path)
                    path.pop()

        rec([x])
        return out

    # -- order complex ---------------------------------------------------

    def order_complex_homology(self, x: int | None = None, y: int | None = None,
                               max_chains: int = DEFAULT_MAX_CHAINS) -> dict[int, int]:
        """Reduced rational Betti numbers of the order complex of the open interval.

        Keys run over simplex dimensions -1 .. rk - 2; the empty simplex is
        included so the result is reduced homology.
        """
        from .linalg import SparseMatrix, rank

        x = self.bottom if x is None else x
        y = self.top if y is None else y
        by_dim: dict[int, list[tuple[int, ...]]] = {}
        count = 0
        for c in self.iter_chains(x, y):
            count += 1
            if count > max_chains:
                raise SizeGuardExceeded(f"more than {max_chains} chains")
            by_dim.setdefault(len(c) - 1, []).append(c)
        top_dim = self.rank_between(x, y) - 2
        dims = range(-1, max(top_dim, -1) + 1)
        index = {d: {s: i for i, s in enumerate(by_dim.get(d, []))} for d in dims}
        ranks = {}
        for d in dims:
            if d == -1:
                ranks[d] = 0
                continue
            rows = []
            for s in by_dim.get(d, []):
                row = {}
                for k in range(len(s)):
                    face = s[:k] + s[k + 1:]
                    row[index[d - 1][face]] = (-1) ** k
                rows.append(row)
            ranks[d] = rank(SparseMatrix(len(rows), len(index[d - 1]), rows))
        return {d: len(index[d]) - ranks[d] - ranks.get(d + 1, 0) for d in dims}

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, rank={self.rank})"


class GeometricLattice(GradedBoundedPoset):
    """A finite atomic semimodular lattice with a fixed linear order on atoms.

    ``atom_list`` fixes the order used by nbc bases and by the minimal-atom
    EL-labeling; for lattices of flats it is the ground-set order.
    """

    def __init__(self, labels, relations, *, atom_order: Sequence[int] | None = None,
                 max_elements: int = DEFAULT_MAX_ELEMENTS, parent_map=None):
        super().__init__(labels, relations, max_elements=max_elements, parent_map=parent_map)
        n = self.n
        join = [[0] * n for _ in range(n)]
        meet = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                ub = self.up[a] & self.up[b]
                j = self._least(ub, self.up)
                if j is None:
                    raise NotALattice(f"no join for {self.labels[a]!r}, {self.labels[b]!r}")
                lb = self.down[a] & self.down[b]
                m = self._least(lb, self.down)
                if m is None:
                    raise NotALattice(f"no meet for {self.labels[a]!r}, {self.labels[b]!r}")
                join[a][b] = join[b][a] = j
                meet[a][b] = meet[b][a] = m
        self.join_table = join
        self.meet_table = meet
        atoms = list(self.covers[self.bottom]) if n > 1 else []
        if atom_order is not None:
            # atom_order lists atoms by their index in the constructor input
            atom_order = [self._pos[a] for a in atom_order]
            if sorted(atom_order) != sorted(atoms):
                raise InputError("atom order is not a permutation of the atoms")
            atoms = list(atom_order)
        self.atom_list = atoms
        self.atom_position = {a: i for i, a in enumerate(atoms)}
        self.atom_mask = [0] * n
        for x in range(n):
            for i, a in enumerate(atoms):
                if self.leq(a, x):
                    self.atom_mask[x] |= 1 << i
        self._validate_geometric()

    @staticmethod
    def _least(mask, cone):
        for z in iter_bits(mask):
            if cone[z] & mask == mask:
                return z
        return None

    def _validate_geometric(self):
        n = self.n
        for x in range(n):
            j = self.bottom
            for i in iter_bits(self.atom_mask[x]):
                j = self.join_table[j][self.atom_list[i]]
            if j != x:
                raise NotGeometric(f"not atomic: {self.labels[x]!r} is not a join of atoms "
                                   f"(witness pair {self.labels[self.bottom]!r}, {self.labels[x]!r})")
        rk = self.rank_of
        for a in range(n):
            for b in range(a + 1, n):
                if rk[a] + rk[b] < rk[self.join_table[a][b]] + rk[self.meet_table[a][b]]:
                    raise NotGeometric(
                        f"not semimodular: witness pair {self.labels[a]!r}, {self.labels[b]!r}")

    # -- lattice operations ----------------------------------------------

    def join(self, a: int, b: int) -> int:
        return self.join_table[a][b]

    def meet(self, a: int, b: int) -> int:
        return self.meet_table[a][b]

    def join_all(self, elems, start: int | None = None) -> int:
        j = self.bottom if start is None else start
        for e in elems:
            j = self.join_table[j][e]
        return j

    def atoms_of(self, x: int, y: int) -> list[int]:
        """Atoms of [x, y] ordered by their minimal-atom label relative to x."""
        if not self.leq(x, y):
            raise NotComparable(f"{self.labels[x]!r} is not below {self.labels[y]!r}")
        hs = [h for h in self.covers[x] if self.leq(h, y)]
        return sorted(hs, key=lambda h: self.cover_label(x, h))

    def cover_label(self, x: int, y: int) -> int:
        """Index of the least atom a (in atom_list order) with x v a = y."""
        new = self.atom_mask[y] & ~self.atom_mask[x]
        if not new or self.rank_of[y] != self.rank_of[x] + 1:
            raise NotComparable(f"{self.labels[y]!r} does not cover {self.labels[x]!r}")
        return (new & -new).bit_length() - 1

    def interval(self, x: int, y: int) -> "GeometricLattice":
        elems = self.interval_elements(x, y)
        local = {e: i for i, e in enumerate(elems)}
        rel = [(local[a], local[b]) for a in elems for b in self.covers[a] if b in local]
        order = [local[h] for h in self.atoms_of(x, y)]
        return GeometricLattice([self.labels[e] for e in elems], rel, atom_order=order,
                                max_elements=self.max_elements, parent_map=elems)

    @classmethod
    def from_poset(cls, P: GradedBoundedPoset, atom_order=None) -> "GeometricLattice":
        rel = [(x, y) for x in range(P.n) for y in P.covers[x]]
        return cls(P.labels, rel, atom_order=atom_order, max_elements=P.max_elements,
                   parent_map=P.parent_map)

    def el_labeling(self) -> "ELLabeling":
        return ELLabeling(self)

    def whitney_numbers(self) -> list[int]:
        """|mu(0, F)| summed by rank of F."""
        out = [0] * (self.rank + 1)
        for f in range(self.n):
            out[self.rank_of[f]] += abs(self.mobius(self.bottom, f))
        return out


class ELLabeling:
    """Björner's minimal-atom edge labeling of a geometric lattice."""

    def __init__(self, lattice: GeometricLattice):
        self.lattice = lattice
        self.label = {(x, y): lattice.cover_label(x, y)
                      for x in range(lattice.n) for y in lattice.covers[x]}

    def word(self, chain: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.label[(a, b)] for a, b in zip(chain, chain[1:]))

    def increasing_chains(self, x=None, y=None) -> list[tuple[int, ...]]:
        return [c for c in self.lattice.maximal_chains(x, y)
                if all(u <= v for u, v in zip(self.word(c), self.word(c)[1:]))]

    def decreasing_chains(self, x=None, y=None) -> list[tuple[int, ...]]:
        return [c for c in self.lattice.maximal_chains(x, y)
                if all(u > v for u, v in zip(self.word(c), self.word(c)[1:]))]

    def verify(self, max_rank: int | None = None) -> None:
        """Check the EL property on every closed interval of rank <= max_rank."""
        L = self.lattice
        for x, y in L.pairs():
            r = L.rank_between(x, y)
            if r < 1 or (max_rank is not None and r > max_rank):
                continue
            chains = L.maximal_chains(x, y)
            words = [self.word(c) for c in chains]
            inc = [w for w in words if all(u <= v for u, v in zip(w, w[1:]))]
            if len(inc) != 1:
                raise ELVerificationFailed(
                    f"[{L.labels[x]!r}, {L.labels[y]!r}] has {len(inc)} increasing chains")
            if sum(1 for w in words if w <= inc[0]) != 1:
                raise ELVerificationFailed(
                    f"[{L.labels[x]!r}, {L.labels[y]!r}]: increasing chain is not lex-least")


def el_labeling_min_atom(L: GeometricLattice, verify_max_rank: int | None = 4) -> ELLabeling:
    lab = ELLabeling(L)
    lab.verify(verify_max_rank)
    return lab


def _jsonable(label):
    if isinstance(label, (str, int)):
        return label
    if isinstance(label, (tuple, list, frozenset, set)):
        items = sorted(label, key=repr) if isinstance(label, (frozenset, set)) else label
        return [_jsonable(t) for t in items]
    return repr(label)


def chain_count(P: GradedBoundedPoset) -> int:
    """Number of chains of the open interior (empty chain included)."""
    memo: dict[int, int] = {}

    def from_(z):
        # chains of the interior starting at z
        if z not in memo:
            memo[z] = 1 + sum(from_(w) for w in iter_bits(P.up[z] & ~(1 << z) & ~(1 << P.top)))
        return memo[z]

    return 1 + sum(from_(z) for z in P.interior())


__all__ = [
    "DEFAULT_MAX_CHAINS",
    "DEFAULT_MAX_ELEMENTS",
    "ELLabeling",
    "GeometricLattice",
    "GradedBoundedPoset",
    "chain_count",
    "el_labeling_min_atom",
    "iter_bits",
]
