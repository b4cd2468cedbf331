"""Orlik-Solomon algebras of the intervals of a geometric lattice.

An algebra is attached to each interval [x, y] of a parent lattice L.  Its
generators are the covers h of x inside [x, y] ordered by the minimal-atom
label of x < h, which on the full lattice is the atom order of L.  Atoms
are referred to by their position in that order.

A monomial is a tuple of positions in strictly DECREASING order; ``e_S``
means the product of the generators in that order.  Elements are sparse
dicts monomial -> coefficient over the nbc basis.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

from .errors import HostMismatch, LoopCapExceeded, NotInterior, VerificationError
from .poset import GeometricLattice

DEBUG = bool(os.environ.get("OPKLS_DEBUG"))
REWRITE_DEPTH_CAP = 10_000

Monomial = tuple  # positions, strictly decreasing


def sort_sign(word: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``word`` decreasingly; 0 on repeats."""
    w = list(word)
    if len(set(w)) != len(w):
        return 0, ()
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] < w[j]:
            w[j - 1], w[j] = w[j], w[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(w)


def _add_into(acc: dict, key, coeff) -> None:
    v = acc.get(key, 0) + coeff
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class OSAlgebra:
    """OS(L[x, y]) with its nbc basis and straightening."""

    def __init__(self, L: GeometricLattice, x: int | None = None, y: int | None = None,
                 atom_order: Sequence[int] | None = None, family: "OSFamily | None" = None):
        self.lattice = L
        self.x = L.bottom if x is None else x
        self.y = L.top if y is None else y
        self.rank = L.rank_between(self.x, self.y)
        default = L.atoms_of(self.x, self.y)
        if atom_order is not None:
            if sorted(atom_order) != sorted(default):
                raise ValueError("atom_order must list the atoms of the interval")
            default = list(atom_order)
        self.atoms: list[int] = default
        self.pos = {h: i for i, h in enumerate(self.atoms)}
        self.family = family
        self._cache: dict[Monomial, dict[Monomial, int]] = {}
        self.basis: list[list[Monomial]] = self._nbc_basis()
        self.basis_list: list[Monomial] = [m for deg in self.basis for m in deg]
        self.index = {m: i for i, m in enumerate(self.basis_list)}

    # -- combinatorics ---------------------------------------------------

    def flat(self, mono: Iterable[int]) -> int:
        L = self.lattice
        j = self.x
        for p in mono:
            j = L.join_table[j][self.atoms[p]]
        return j

    def is_independent(self, mono: Sequence[int]) -> bool:
        return self.lattice.rank_between(self.x, self.flat(mono)) == len(mono)

    def broken_circuit_witness(self, mono: Sequence[int]):
        """``(c, tail)`` with c below the join of ``tail`` and smaller than it, else None.

        ``tail`` is a suffix (in increasing order) of the set, so a broken
        circuit ``C - c`` sits inside it.
        """
        inc = sorted(mono)
        L = self.lattice
        for j in range(len(inc)):
            tail = inc[j:]
            top = self.flat(tail)
            for c in range(inc[j]):
                if L.leq(self.atoms[c], top):
                    return c, tail
        return None

    def is_nbc(self, mono: Sequence[int]) -> bool:
        return self.is_independent(mono) and self.broken_circuit_witness(mono) is None

    def _nbc_basis(self) -> list[list[Monomial]]:
        # grow increasing sets; nbc is closed under taking subsets
        out: list[list[Monomial]] = [[] for _ in range(self.rank + 1)]
        out[0].append(())
        frontier = [()]
        for d in range(1, self.rank + 1):
            nxt = []
            for inc in frontier:
                start = inc[-1] + 1 if inc else 0
                for a in range(start, len(self.atoms)):
                    cand = inc + (a,)
                    if self.is_nbc(cand):
                        nxt.append(cand)
            frontier = nxt
            out[d] = sorted(tuple(sorted(m, reverse=True)) for m in nxt)
        return out

    def dimension(self, degree: int | None = None) -> int:
        if degree is None:
            return len(self.basis_list)
        return len(self.basis[degree]) if 0 <= degree <= self.rank else 0

    def circuits(self) -> list[tuple[int, ...]]:
        """Circuits among the generators, as increasing position tuples."""
        out = []
        n = len(self.atoms)

        def rec(start, cur):
            if cur and not self.is_independent(cur):
                if all(self.is_independent(cur[:k] + cur[k + 1:]) for k in range(len(cur))):
                    out.append(cur)
                return
            if len(cur) > self.rank:
                return
            for a in range(start, n):
                rec(a + 1, cur + (a,))

        rec(0, ())
        return out

    # -- straightening ---------------------------------------------------

    def reduce_word(self, word: Sequence[int]) -> dict[Monomial, int]:
        """The product of generators in ``word`` order, in the nbc basis."""
        sign, mono = sort_sign(word)
        if not sign:
            return {}
        base = self._reduce_sorted(mono, 0)
        if sign == 1:
            return dict(base)
        return {m: -c for m, c in base.items()}

    def _reduce_sorted(self, mono: Monomial, depth: int) -> dict[Monomial, int]:
        hit = self._cache.get(mono)
        if hit is not None:
            return hit
        if depth > REWRITE_DEPTH_CAP:
            raise LoopCapExceeded(f"straightening of {mono} did not terminate")
        if not self.is_independent(mono):
            res: dict[Monomial, int] = {}
        else:
            wit = self.broken_circuit_witness(mono)
            if wit is None:
                res = {mono: 1}
            else:
                res = self._rewrite(mono, *wit, depth)
        if DEBUG:
            for m in res:
                if not self.is_nbc(m):
                    raise VerificationError(f"straightening produced non-nbc monomial {m}")
        self._cache[mono] = res
        return res

    def _rewrite(self, mono, c, tail, depth):
        L = self.lattice
        cpos = self.atoms[c]
        # shrink the tail to a minimal set whose join still lies above c
        core = list(tail)
        for t in list(core):
            trial = [u for u in core if u != t]
            if L.leq(cpos, self.flat(trial)):
                core = trial
        core_dec = tuple(sorted(core, reverse=True))
        rest = tuple(p for p in mono if p not in core)
        sign, _ = sort_sign(core_dec + rest)
        # boundary of e_{c, c1, ..., cp} vanishes:
        # e_{c1..cp} = -sum_{k>=1} (-1)^k e_{c, c1, .., ^ck, .., cp}
        res: dict[Monomial, int] = {}
        for k in range(1, len(core_dec) + 1):
            coeff = -sign * (-1) ** k
            word = (c,) + core_dec[:k - 1] + core_dec[k:] + rest
            s2, m2 = sort_sign(word)
            if not s2:
                continue
            for m, v in self._reduce_sorted(m2, depth + 1).items():
                _add_into(res, m, coeff * s2 * v)
        return res

    # -- elements --------------------------------------------------------

    def one(self) -> "OSElement":
        return OSElement(self, {(): 1})

    def generator(self, h: int) -> "OSElement":
        """e_h for an atom h of the interval, given as a parent element index."""
        return OSElement(self, {(self.pos[h],): 1})

    def element(self, word: Sequence[int]) -> "OSElement":
        """Product of generators given by positions, in the given order."""
        return OSElement(self, self.reduce_word(word))

    def basis_element(self, i: int) -> "OSElement":
        return OSElement(self, {self.basis_list[i]: 1})

    def __repr__(self):
        return f"OSAlgebra([{self.x}, {self.y}], rank={self.rank}, dim={self.dimension()})"


class OSElement:
    """A sparse combination of nbc monomials of one algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: OSAlgebra, terms: dict[Monomial, object] | None = None):
        self.algebra = algebra
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    def degrees(self) -> set[int]:
        return {len(m) for m in self.terms}

    @property
    def degree(self) -> int | None:
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "OSElement") -> None:
        if other.algebra is not self.algebra:
            raise HostMismatch("OS elements from different algebras")

    def __add__(self, other: "OSElement") -> "OSElement":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(out, m, c)
        return OSElement(self.algebra, out)

    def __neg__(self):
        return OSElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "OSElement":
        return OSElement(self.algebra, {m: a * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, OSElement):
            return os_multiply(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other):
        return (isinstance(other, OSElement) and other.algebra is self.algebra
                and other.terms == self.terms)

    def __repr__(self):
        return f"OSElement({self.terms})"


def os_reduce(algebra: OSAlgebra, word: Sequence[int]) -> OSElement:
    return algebra.element(word)


def os_multiply(a: OSElement, b: OSElement) -> OSElement:
    a._check(b)
    alg = a.algebra
    out: dict[Monomial, object] = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            for m, v in alg.reduce_word(m1 + m2).items():
                _add_into(out, m, c1 * c2 * v)
    return OSElement(alg, out)


def nbc_basis(L: GeometricLattice, atom_order: Sequence[int] | None = None,
              x: int | None = None, y: int | None = None) -> list[list[Monomial]]:
    """nbc monomials of [x, y] grouped by degree (positions, decreasing)."""
    return OSAlgebra(L, x, y, atom_order=atom_order).basis


# -- tensor products and coproducts ---------------------------------------


class TensorElement:
    """A sparse element of A (x) B with A, B OS algebras.

    ``terms`` maps (monomial_A, monomial_B) to coefficients.
    """

    __slots__ = ("left", "right", "terms")

    def __init__(self, left: OSAlgebra, right: OSAlgebra, terms=None):
        self.left = left
        self.right = right
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        return TensorElement(self.left, self.right, out)

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        """(a (x) b)(a' (x) b') = (-1)^{|b||a'|} aa' (x) bb'."""
        if other.left is not self.left or other.right is not self.right:
            raise HostMismatch("tensor elements over different algebras")
        out: dict = {}
        for (a, b), c in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                sign = -1 if (len(b) * len(a2)) % 2 else 1
                la = self.left.reduce_word(a + a2)
                if not la:
                    continue
                rb = self.right.reduce_word(b + b2)
                for ma, va in la.items():
                    for mb, vb in rb.items():
                        _add_into(out, (ma, mb), sign * c * c2 * va * vb)
        return TensorElement(self.left, self.right, out)

    def __eq__(self, other):
        return (isinstance(other, TensorElement) and other.left is self.left
                and other.right is self.right and other.terms == self.terms)

    def __repr__(self):
        return f"TensorElement({self.terms})"


class OSFamily:
    """All interval algebras of one lattice, with cached coproduct matrices."""

    def __init__(self, L: GeometricLattice):
        self.lattice = L
        self._algebras: dict[tuple[int, int], OSAlgebra] = {}
        self._coproducts: dict[tuple[int, int, int, bool], list[dict]] = {}

    def algebra(self, x: int | None = None, y: int | None = None) -> OSAlgebra:
        L = self.lattice
        x = L.bottom if x is None else x
        y = L.top if y is None else y
        key = (x, y)
        alg = self._algebras.get(key)
        if alg is None:
            L.interval_mask(x, y)  # raises NotComparable
            alg = self._algebras[key] = OSAlgebra(L, x, y, family=self)
        return alg

    def _generator_image(self, x, y, g, h, twisted):
        """Delta_g(e_h) as ((side, position), sign)."""
        L = self.lattice
        if L.leq(h, g):
            return "L", self.algebra(x, g).pos[h], 1
        return "R", self.algebra(g, y).pos[L.join(g, h)], (-1 if twisted else 1)

    def coproduct_monomial(self, x: int, y: int, g: int, mono: Monomial,
                           twisted: bool = False) -> dict[tuple[Monomial, Monomial], int]:
        """Delta_g(e_mono) for a monomial of OS([x, y]), as a tensor dict."""
        A = self.algebra(x, g)
        B = self.algebra(g, y)
        src = self.algebra(x, y)
        left: list[int] = []
        right: list[int] = []
        sign = 1
        for p in mono:
            side, q, s = self._generator_image(x, y, g, src.atoms[p], twisted)
            sign *= s
            if side == "L":
                # moving a left factor past the right factors already placed
                if len(right) % 2:
                    sign = -sign
                left.append(q)
            else:
                right.append(q)
        la = A.reduce_word(left)
        if not la:
            return {}
        rb = B.reduce_word(right)
        out: dict = {}
        for ma, va in la.items():
            for mb, vb in rb.items():
                _add_into(out, (ma, mb), sign * va * vb)
        return out

    def coproduct_matrix(self, x: int, y: int, g: int, twisted: bool = False) -> list[dict]:
        """Row i is Delta_g of basis monomial i of OS([x, y]), keyed by (iA, iB)."""
        L = self.lattice
        if not (L.lt(x, g) and L.lt(g, y)):
            raise NotInterior(f"{L.labels[g]!r} is not interior to "
                              f"[{L.labels[x]!r}, {L.labels[y]!r}]")
        key = (x, y, g, twisted)
        hit = self._coproducts.get(key)
        if hit is not None:
            return hit
        A = self.algebra(x, g)
        B = self.algebra(g, y)
        rows = []
        for mono in self.algebra(x, y).basis_list:
            img = self.coproduct_monomial(x, y, g, mono, twisted)
            rows.append({(A.index[a], B.index[b]): c for (a, b), c in img.items()})
        self._coproducts[key] = rows
        return rows

    def coproduct(self, g: int, a: OSElement, twisted: bool = False) -> TensorElement:
        src = a.algebra
        L = self.lattice
        if not (L.lt(src.x, g) and L.lt(g, src.y)):
            raise NotInterior(f"{L.labels[g]!r} is not interior to the host interval")
        if src.atoms != self.algebra(src.x, src.y).atoms:
            raise ValueError("coproducts need the default (minimal-atom label) generator order")
        A = self.algebra(src.x, g)
        B = self.algebra(g, src.y)
        out: dict = {}
        for mono, c in a.terms.items():
            for k, v in self.coproduct_monomial(src.x, src.y, g, mono, twisted).items():
                _add_into(out, k, c * v)
        return TensorElement(A, B, out)


def os_family(L: GeometricLattice) -> OSFamily:
    """The shared OSFamily of ``L`` (one per lattice object)."""
    fam = getattr(L, "_os_family", None)
    if fam is None:
        fam = OSFamily(L)
        L._os_family = fam
    return fam


def os_coproduct(g: int, a: OSElement, twisted: bool = False) -> TensorElement:
    """Delta_g (plain, or sign-twisted when ``twisted``) of an OS element."""
    fam = a.algebra.family or os_family(a.algebra.lattice)
    return fam.coproduct(g, a, twisted)



# -- structural checks ----------------------------------------------------


def check_multiplicative(fam: OSFamily, x: int, y: int, g: int, twisted: bool = False):
    """Delta_g(ab) == Delta_g(a) Delta_g(b) on all pairs of basis monomials.

    Returns None, or the first failing pair of monomials.
    """
    src = fam.algebra(x, y)
    for m1 in src.basis_list:
        d1 = fam.coproduct(g, OSElement(src, {m1: 1}), twisted)
        for m2 in src.basis_list:
            if len(m1) + len(m2) > src.rank:
                continue
            d2 = fam.coproduct(g, OSElement(src, {m2: 1}), twisted)
            prod = fam.coproduct(g, os_multiply(OSElement(src, {m1: 1}), OSElement(src, {m2: 1})),
                                 twisted)
            if prod != d1 * d2:
                return m1, m2
    return None


def _compose_left(fam, x, g1, g2, y, twisted, tensor):
    """Apply Delta_{g1} to the left factor of a dict over OS[x,g2] (x) OS[g2,y]."""
    out: dict = {}
    for (a, c), v in tensor.items():
        for (a1, b1), w in fam.coproduct_monomial(x, g2, g1, a, twisted).items():
            _add_into(out, (a1, b1, c), v * w)
    return out


def _compose_right(fam, x, g1, g2, y, twisted, tensor):
    """Apply Delta_{g2} to the right factor of a dict over OS[x,g1] (x) OS[g1,y]."""
    out: dict = {}
    for (a, b), v in tensor.items():
        for (b1, c1), w in fam.coproduct_monomial(g1, y, g2, b, twisted).items():
            _add_into(out, (a, b1, c1), v * w)
    return out


def check_coassociative(fam: OSFamily, x: int, y: int, g1: int, g2: int, twisted: bool = False,
                        corrected: bool = False):
    """(Delta_{g1} (x) Id) Delta_{g2} == (Id (x) Delta_{g2}) Delta_{g1} for g1 < g2.

    The twisted coproducts satisfy this only up to the sign (-1)^deg(c) of
    the outer right factor c, because the twist (-1)^deg is not a cocycle;
    ``corrected`` inserts that sign on the left-hand side.
    Returns None, or the first basis monomial where the two sides differ.
    """
    src = fam.algebra(x, y)
    for m in src.basis_list:
        lhs = _compose_left(fam, x, g1, g2, y, twisted, fam.coproduct_monomial(x, y, g2, m, twisted))
        if twisted and corrected:
            lhs = {k: (-v if len(k[2]) % 2 else v) for k, v in lhs.items()}
        rhs = _compose_right(fam, x, g1, g2, y, twisted, fam.coproduct_monomial(x, y, g1, m, twisted))
        if lhs != rhs:
            return m
    return None
