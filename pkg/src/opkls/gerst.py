"""The Gerstenhaber operad of a geometric lattice, realised as the dual of OS.

For an interval I = [x, y], Gerst(I) has the basis dual to the nbc basis of
OS(I).  The dual of a degree-d monomial has C-weight rk I - d and L-weight
d, so C is 1* and L is e* on rank-one intervals.  The operadic product
mu_g is the transpose of the plain coproduct Delta_g.

The second half of the module holds the Groebner side: decorated chain
monomials, divisibility, admissible orders, normal monomials and the Com
and Lie rewriting systems.  They are verification machinery; the linear
model above is the one used by the bar complexes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

from .errors import LoopCapExceeded, NotInterior
from .linalg import SparseMatrix, rank
from .os_algebra import OSFamily, _add_into, os_family
from .polynomial import Poly
from .poset import ELLabeling, GeometricLattice


class GerstSpace:
    """Basis and bigrades of Gerst([x, y])."""

    def __init__(self, operad: "GerstOperad", x: int, y: int):
        alg = operad.family.algebra(x, y)
        self.x, self.y = x, y
        self.rank = alg.rank
        self.algebra = alg
        self.basis = alg.basis_list
        self.bigrades = [(self.rank - len(m), len(m)) for m in self.basis]

    def dimension(self, bigrade: tuple[int, int] | None = None) -> int:
        if bigrade is None:
            return len(self.basis)
        return sum(1 for b in self.bigrades if b == bigrade)

    def dimensions(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for b in self.bigrades:
            out[b] = out.get(b, 0) + 1
        return dict(sorted(out.items(), reverse=True))

    def hilbert_series(self) -> Poly:
        """Generating function of dimensions in the C-weight."""
        coeffs = [0] * (self.rank + 1)
        for c, _ in self.bigrades:
            coeffs[c] += 1
        return Poly(coeffs)

    def indices_of_weight(self, c_weight: int) -> list[int]:
        return [i for i, b in enumerate(self.bigrades) if b[0] == c_weight]


class OperadProductMatrix:
    """mu_g : Gerst([x, g]) (x) Gerst([g, y]) -> Gerst([x, y]) in dual-nbc bases.

    ``columns[(a, b)]`` is the image of the pair of basis vectors as a sparse
    dict over the target basis.
    """

    def __init__(self, g: int, x: int, y: int, columns: dict[tuple[int, int], dict[int, int]]):
        self.g, self.x, self.y = g, x, y
        self.columns = columns

    def apply(self, a: int, b: int) -> dict[int, int]:
        return self.columns.get((a, b), {})

    def apply_vectors(self, u: dict[int, object], v: dict[int, object]) -> dict[int, object]:
        out: dict[int, object] = {}
        for a, ca in u.items():
            for b, cb in v.items():
                for i, w in self.apply(a, b).items():
                    _add_into(out, i, ca * cb * w)
        return out


class GerstOperad:
    """Gerst on all intervals of a lattice, with cached product matrices."""

    def __init__(self, L: GeometricLattice, family: OSFamily | None = None):
        self.lattice = L
        self.family = family or os_family(L)
        self._spaces: dict[tuple[int, int], GerstSpace] = {}
        self._mus: dict[tuple[int, int, int], OperadProductMatrix] = {}

    def space(self, x: int | None = None, y: int | None = None) -> GerstSpace:
        L = self.lattice
        x = L.bottom if x is None else x
        y = L.top if y is None else y
        s = self._spaces.get((x, y))
        if s is None:
            s = self._spaces[(x, y)] = GerstSpace(self, x, y)
        return s

    def mu(self, g: int, x: int | None = None, y: int | None = None) -> OperadProductMatrix:
        L = self.lattice
        x = L.bottom if x is None else x
        y = L.top if y is None else y
        key = (g, x, y)
        m = self._mus.get(key)
        if m is None:
            rows = self.family.coproduct_matrix(x, y, g)  # raises NotInterior
            cols: dict[tuple[int, int], dict[int, int]] = {}
            for i, row in enumerate(rows):
                for ab, c in row.items():
                    cols.setdefault(ab, {})[i] = c
            m = self._mus[key] = OperadProductMatrix(g, x, y, cols)
        return m


def gerst_operad(L: GeometricLattice) -> GerstOperad:
    op = getattr(L, "_gerst_operad", None)
    if op is None:
        op = GerstOperad(L)
        L._gerst_operad = op
    return op


def gerst_space(L: GeometricLattice, x: int | None = None, y: int | None = None) -> GerstSpace:
    return gerst_operad(L).space(x, y)


def gerst_mu(L: GeometricLattice, g: int, x: int | None = None,
             y: int | None = None) -> OperadProductMatrix:
    return gerst_operad(L).mu(g, x, y)


def check_operad_axiom(L: GeometricLattice, x: int | None = None, y: int | None = None):
    """mu_{g2}(mu_{g1}(a, b), c) == mu_{g1}(a, mu_{g2}(b, c)) for all g1 < g2 interior.

    Returns ``(True, None)`` or ``(False, (g1, g2, (a, b, c)))``.
    """
    op = gerst_operad(L)
    x = L.bottom if x is None else x
    y = L.top if y is None else y
    for g1 in L.interior(x, y):
        for g2 in L.interior(g1, y):
            sa = op.space(x, g1).basis
            sb = op.space(g1, g2).basis
            sc = op.space(g2, y).basis
            inner_l = op.mu(g1, x, g2)
            outer_l = op.mu(g2, x, y)
            inner_r = op.mu(g2, g1, y)
            outer_r = op.mu(g1, x, y)
            for a in range(len(sa)):
                for b in range(len(sb)):
                    ab = inner_l.apply(a, b)
                    for c in range(len(sc)):
                        lhs = outer_l.apply_vectors(ab, {c: 1})
                        rhs = outer_r.apply_vectors({a: 1}, inner_r.apply(b, c))
                        if lhs != rhs:
                            return False, (g1, g2, (a, b, c))
    return True, None


def check_bigrade_additivity(L: GeometricLattice, g: int, x: int | None = None,
                             y: int | None = None) -> bool:
    op = gerst_operad(L)
    x = L.bottom if x is None else x
    y = L.top if y is None else y
    A, B, T = op.space(x, g), op.space(g, y), op.space(x, y)
    for (a, b), col in op.mu(g, x, y).columns.items():
        want = (A.bigrades[a][0] + B.bigrades[b][0], A.bigrades[a][1] + B.bigrades[b][1])
        if any(T.bigrades[i] != want for i in col):
            return False
    return True


# -- decorated chain monomials ---------------------------------------------

COM, LIE, GERST = "com", "lie", "gerst"


@dataclass(frozen=True)
class DecoratedChainMonomial:
    """A chain x = G_0 < ... < G_n = y with one decoration per step.

    Decorations are letters: "C"/"L" for Gerst, "1" for Com and Lie.
    """

    chain: tuple[int, ...]
    decorations: tuple[str, ...]

    def __post_init__(self):
        if len(self.decorations) != len(self.chain) - 1:
            raise ValueError("need one decoration per interval of the chain")

    @property
    def interval(self) -> tuple[int, int]:
        return self.chain[0], self.chain[-1]

    def replace(self, k: int, element: int) -> "DecoratedChainMonomial":
        c = list(self.chain)
        c[k] = element
        return DecoratedChainMonomial(tuple(c), self.decorations)


def divides(m1: DecoratedChainMonomial, m2: DecoratedChainMonomial) -> bool:
    """m1 sits inside m2 as the segment between two of m2's chain elements."""
    n1 = len(m1.chain)
    for p in range(len(m2.chain) - n1 + 1):
        if m2.chain[p:p + n1] == m1.chain and m2.decorations[p:p + n1 - 1] == m1.decorations:
            return True
    return False


def element_key(L: GeometricLattice) -> Callable[[int], tuple]:
    """Total order on elements: characteristic vectors of atom sets, an atom present first.

    Among the covers of a fixed element it orders by minimal-atom label.
    """
    m = len(L.atom_list)

    def key(z: int) -> tuple:
        mask = L.atom_mask[z]
        return tuple(0 if (mask >> i) & 1 else 1 for i in range(m))

    return key


class AdmissibleOrder:
    """Compare the lowest chain element, then its decoration, then move up.

    ``key`` maps a monomial to the list of pairs (element key of G_{k+1},
    decoration key of step k); comparison is lexicographic.  No key is a
    proper prefix of another key over the same interval because a chain
    cannot revisit its last element, which gives compatibility with
    operadic products.  ``reverse`` flips the element order.
    """

    def __init__(self, L: GeometricLattice, elem_key: Callable[[int], tuple] | None = None,
                 dec_order: Sequence[str] = ("L", "C", "1"), reverse: bool = False):
        self.lattice = L
        base = elem_key or element_key(L)
        self.elem_key = (lambda z: tuple(-t for t in base(z))) if reverse else base
        self.dec_rank = {d: i for i, d in enumerate(dec_order)}

    @classmethod
    def for_com(cls, L: GeometricLattice) -> "AdmissibleOrder":
        """Increasing-label chains are least, so they are the normal ones."""
        return cls(L)

    @classmethod
    def for_lie(cls, L: GeometricLattice) -> "AdmissibleOrder":
        """Increasing-label chains are greatest, so relations lead with them."""
        return cls(L, reverse=True)

    def key(self, m: DecoratedChainMonomial) -> tuple:
        return tuple((self.elem_key(g), self.dec_rank[d])
                     for g, d in zip(m.chain[1:], m.decorations))

    def less(self, m1: DecoratedChainMonomial, m2: DecoratedChainMonomial) -> bool:
        return self.key(m1) < self.key(m2)

    def max(self, monomials):
        return max(monomials, key=self.key)


def _labels(L: GeometricLattice, chain: Sequence[int]) -> list[int]:
    return [L.cover_label(a, b) for a, b in zip(chain, chain[1:])]


def normal_monomials(L: GeometricLattice, kind: str, x: int | None = None,
                     y: int | None = None, labeling=None) -> list[DecoratedChainMonomial]:
    """Com: the increasing chain.  Lie: decreasing chains.  Gerst: Lie below g, Com above."""
    x = L.bottom if x is None else x
    y = L.top if y is None else y
    lab = labeling or _labeling(L)
    if kind == COM:
        return [DecoratedChainMonomial(c, ("1",) * (len(c) - 1)) for c in lab.increasing_chains(x, y)]
    if kind == LIE:
        return [DecoratedChainMonomial(c, ("1",) * (len(c) - 1)) for c in lab.decreasing_chains(x, y)]
    if kind == GERST:
        out = []
        for g in L.interval_elements(x, y):
            ups = lab.increasing_chains(g, y)
            for low in lab.decreasing_chains(x, g):
                for up in ups:
                    chain = low + up[1:]
                    decs = ("L",) * (len(low) - 1) + ("C",) * (len(up) - 1)
                    out.append(DecoratedChainMonomial(chain, decs))
        return out
    raise ValueError(f"unknown kind {kind!r}")


def _labeling(L: GeometricLattice) -> ELLabeling:
    lab = getattr(L, "_el_labeling", None)
    if lab is None:
        lab = L._el_labeling = ELLabeling(L)
    return lab


def _descent(L, m: DecoratedChainMonomial, k: int) -> bool:
    return L.cover_label(m.chain[k - 1], m.chain[k]) > L.cover_label(m.chain[k], m.chain[k + 1])


def _middles(L, lo: int, hi: int) -> list[int]:
    return [h for h in L.covers[lo] if L.leq(h, hi)]


def _increasing_middle(L, lo: int, hi: int) -> int:
    return min(_middles(L, lo, hi), key=lambda h: L.cover_label(lo, h))


def rewrite_normal_form(L: GeometricLattice, m: DecoratedChainMonomial, kind: str,
                        order: AdmissibleOrder | None = None, *, strategy: str = "greatest",
                        seed: int | None = None, max_steps: int = 1_000_000
                        ) -> dict[DecoratedChainMonomial, int]:
    """Rewrite a maximal-chain monomial into normal monomials.

    Com replaces a descent G_{k-1} < G_k > G_{k+1} (in labels) by the
    increasing chain of [G_{k-1}, G_{k+1}].  Lie replaces an ascent by minus
    the sum of the other chains through that rank-two interval.  Every
    replacement must be strictly smaller in ``order``; otherwise, or after
    ``max_steps`` rewrites, LoopCapExceeded is raised.

    ``strategy`` picks which monomial and position to rewrite: "greatest"
    (largest monomial, lowest position), "leftmost", "rightmost" or
    "random" (seeded).
    """
    if kind not in (COM, LIE):
        raise ValueError("rewriting is defined for com and lie")
    if order is None:
        order = AdmissibleOrder.for_com(L) if kind == COM else AdmissibleOrder.for_lie(L)
    rng = random.Random(seed)
    want_descent = kind == COM
    state: dict[DecoratedChainMonomial, int] = {m: 1}
    steps = 0

    def redexes(mono):
        return [k for k in range(1, len(mono.chain) - 1) if _descent(L, mono, k) == want_descent]

    while True:
        todo = [mono for mono in state if redexes(mono)]
        if not todo:
            return state
        steps += 1
        if steps > max_steps:
            raise LoopCapExceeded(f"rewriting exceeded {max_steps} steps")
        if strategy == "random":
            mono = rng.choice(sorted(todo, key=order.key))
            k = rng.choice(redexes(mono))
        else:
            mono = order.max(todo) if strategy == "greatest" else sorted(todo, key=order.key)[0]
            ks = redexes(mono)
            k = ks[-1] if strategy == "rightmost" else ks[0]
        coeff = state.pop(mono)
        lo, mid, hi = mono.chain[k - 1], mono.chain[k], mono.chain[k + 1]
        if kind == COM:
            images = [(mono.replace(k, _increasing_middle(L, lo, hi)), 1)]
        else:
            images = [(mono.replace(k, h), -1) for h in _middles(L, lo, hi) if h != mid]
        for new, c in images:
            if not order.less(new, mono):
                raise LoopCapExceeded("rewrite did not decrease the admissible order")
            _add_into(state, new, coeff * c)


# -- quotient dimensions by linear algebra --------------------------------


def _chain_index(L, x, y):
    chains = L.maximal_chains(x, y)
    return chains, {c: i for i, c in enumerate(chains)}


def lie_relations(L: GeometricLattice, x: int, y: int) -> list[dict[int, int]]:
    """Jacobi relations: sums over all chains through a rank-two window."""
    chains, index = _chain_index(L, x, y)
    rows, seen = [], set()
    for c in chains:
        for k in range(1, len(c) - 1):
            key = (c[:k], c[k + 1:])
            if key in seen:
                continue
            seen.add(key)
            rows.append({index[c[:k] + (h,) + c[k + 1:]]: 1 for h in _middles(L, c[k - 1], c[k + 1])})
    return rows


def com_relations(L: GeometricLattice, x: int, y: int) -> list[dict[int, int]]:
    chains, index = _chain_index(L, x, y)
    rows = []
    for c in chains:
        for k in range(1, len(c) - 1):
            for h in _middles(L, c[k - 1], c[k + 1]):
                if h != c[k]:
                    rows.append({index[c]: 1, index[c[:k] + (h,) + c[k + 1:]]: -1})
    return rows


def quotient_dimension(L: GeometricLattice, kind: str, x: int | None = None,
                       y: int | None = None) -> int:
    """dim of Q<maximal chains> modulo the Com or Lie quadratic relations."""
    x = L.bottom if x is None else x
    y = L.top if y is None else y
    n = len(L.maximal_chains(x, y))
    rows = com_relations(L, x, y) if kind == COM else lie_relations(L, x, y)
    return n - rank(SparseMatrix(len(rows), n, rows))


def in_relation_span(L: GeometricLattice, kind: str, combo: dict[DecoratedChainMonomial, int],
                     x: int | None = None, y: int | None = None) -> bool:
    """Whether a combination of maximal chains lies in the span of the relations."""
    x = L.bottom if x is None else x
    y = L.top if y is None else y
    chains, index = _chain_index(L, x, y)
    rows = com_relations(L, x, y) if kind == COM else lie_relations(L, x, y)
    r0 = rank(SparseMatrix(len(rows), len(chains), rows))
    v = {index[m.chain]: c for m, c in combo.items() if c}
    return rank(SparseMatrix(len(rows) + 1, len(chains), rows + [v])) == r0


# -- the presentation map from decorated chains to OS duals ----------------


def phi_functional(L: GeometricLattice, m: DecoratedChainMonomial,
                   family: OSFamily | None = None) -> dict[int, int]:
    """The linear form on OS([x, y]) obtained from a C/L-decorated maximal chain.

    Each generator e_h of a basis monomial goes to the unique step k with
    h <= G_{k+1} and h not <= G_k.  The value is the sign of sorting the
    generators into step order when they land bijectively on the L steps,
    and 0 otherwise.
    """
    fam = family or os_family(L)
    x, y = m.interval
    alg = fam.algebra(x, y)
    lsteps = sorted(k for k, d in enumerate(m.decorations) if d == "L")
    out = {}
    for i, mono in enumerate(alg.basis_list):
        if len(mono) != len(lsteps):
            continue
        slots = []
        for p in mono:
            h = alg.atoms[p]
            k = next(k for k in range(len(m.chain) - 1)
                     if L.leq(h, m.chain[k + 1]) and not L.leq(h, m.chain[k]))
            slots.append(k)
        if sorted(slots) != lsteps:
            continue
        inv = sum(1 for a in range(len(slots)) for b in range(a + 1, len(slots)) if slots[a] > slots[b])
        out[i] = -1 if inv % 2 else 1
    return out


def phi_by_products(L: GeometricLattice, m: DecoratedChainMonomial) -> dict[int, int]:
    """The same functional, computed by composing operadic products bottom-up."""
    op = gerst_operad(L)
    chain = m.chain
    # rank-one pieces: C is the dual of 1 (index 0), L the dual of e (index 1)
    vec = {0 if m.decorations[0] == "C" else 1: 1}
    for k in range(1, len(chain) - 1):
        piece = {0 if m.decorations[k] == "C" else 1: 1}
        vec = op.mu(chain[k], chain[0], chain[k + 1]).apply_vectors(vec, piece)
    return vec


def gerst_relations(L: GeometricLattice, x: int, y: int,
                    chains: list[tuple[int, ...]], index: dict) -> list[dict[int, int]]:
    """The quadratic Gerst relations placed in every rank-two window of every chain."""
    rows = []
    seen = set()
    for c in chains:
        n = len(c) - 1
        for k in range(1, n):
            for decs in product("CL", repeat=n):
                outer = (c[:k], c[k + 1:], decs[:k - 1], decs[k + 1:])
                lo, hi = c[k - 1], c[k + 1]
                if (outer, decs[k - 1:k + 1]) in seen:
                    continue
                mids = _middles(L, lo, hi)

                def col(h, d1, d2):
                    dd = decs[:k - 1] + (d1, d2) + decs[k + 1:]
                    return index[(c[:k] + (h,) + c[k + 1:], dd)]

                pair = decs[k - 1:k + 1]
                for p in (("C", "C"), ("L", "L"), ("C", "L"), ("L", "C")):
                    seen.add((outer, p))
                # C C: all equal
                for h in mids[1:]:
                    rows.append({col(mids[0], "C", "C"): 1, col(h, "C", "C"): -1})
                # L L: sum vanishes
                rows.append({col(h, "L", "L"): 1 for h in mids})
                # mu_H(C L) - sum_{H' != H} mu_{H'}(L C)
                for h in mids:
                    r = {col(h, "C", "L"): 1}
                    for h2 in mids:
                        if h2 != h:
                            r[col(h2, "L", "C")] = -1
                    rows.append(r)
                del pair
    return rows


def check_gerst_presentation(L: GeometricLattice, x: int | None = None,
                             y: int | None = None) -> dict[str, int]:
    """Dimensions comparing the quadratic presentation with the OS dual.

    Returns the number of decorated maximal chains, the rank of the
    relations, the quotient dimension, the rank of the presentation map
    on all chains and on Gerst normal monomials, and dim OS.  The map
    kills the relations iff ``relations_killed`` is 1.
    """
    x = L.bottom if x is None else x
    y = L.top if y is None else y
    fam = os_family(L)
    dim_os = fam.algebra(x, y).dimension()
    r = L.rank_between(x, y)
    chains = L.maximal_chains(x, y)
    monos = [(c, d) for c in chains for d in product("CL", repeat=r)]
    index = {k: i for i, k in enumerate(monos)}
    rels = gerst_relations(L, x, y, chains, index) if r >= 2 else []
    rel_rank = rank(SparseMatrix(len(rels), len(monos), rels))
    phis = [phi_functional(L, DecoratedChainMonomial(c, d), fam) for c, d in monos]
    killed = 1
    for row in rels:
        acc: dict[int, int] = {}
        for j, v in row.items():
            for i, w in phis[j].items():
                _add_into(acc, i, v * w)
        if acc:
            killed = 0
            break
    normals = normal_monomials(L, GERST, x, y)
    normal_rows = [phis[index[(m.chain, m.decorations)]] for m in normals]
    return {
        "monomials": len(monos),
        "relation_rank": rel_rank,
        "quotient_dimension": len(monos) - rel_rank,
        "phi_rank": rank(SparseMatrix(len(phis), dim_os, phis)),
        "normal_monomials": len(normals),
        "phi_rank_on_normals": rank(SparseMatrix(len(normal_rows), dim_os, normal_rows)),
        "dim_os": dim_os,
        "relations_killed": killed,
    }


__all__ = [
    "AdmissibleOrder",
    "COM",
    "DecoratedChainMonomial",
    "GERST",
    "GerstOperad",
    "GerstSpace",
    "LIE",
    "NotInterior",
    "OperadProductMatrix",
    "check_bigrade_additivity",
    "check_gerst_presentation",
    "check_operad_axiom",
    "divides",
    "gerst_mu",
    "gerst_operad",
    "gerst_space",
    "in_relation_span",
    "normal_monomials",
    "phi_by_products",
    "phi_functional",
    "quotient_dimension",
    "rewrite_normal_form",
]
