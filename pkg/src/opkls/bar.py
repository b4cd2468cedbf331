"""Bar complexes of Gerst, their KLS subcomplexes, and the Koszul complex.

A summand of Bar(Gerst)(L) is a chain 0 = G_0 < ... < G_n = 1 with one
Gerst basis vector on every interval [G_k, G_{k+1}].  Its degree is
rk L - n, so maximal chains sit in degree 0, and its weight is the total
C-weight.  The differential merges neighbours with sign (-1)^k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .errors import (CharacterizationMismatch, ConcentrationFailure, DSquareNonzero,
                     SubcomplexViolation)
from .gerst import GerstOperad, gerst_operad
from .linalg import SparseMatrix, rank
from .os_algebra import _add_into, os_family
from .polynomial import Poly
from . import poset as _poset
from .poset import GeometricLattice, GradedBoundedPoset

GERST_OP, COM_OP, LIE_OP = "gerst", "com", "lie"
RKLS, LKLS, RKLS_HAT, LKLS_HAT = "rkls", "lkls", "rkls-hat", "lkls-hat"
VARIANTS = (RKLS, LKLS, RKLS_HAT, LKLS_HAT)


def normalize_variant(name: str) -> str:
    v = name.lower().replace("_", "-")
    if v not in VARIANTS:
        raise ValueError(f"unknown KLS variant {name!r}")
    return v


@dataclass(frozen=True)
class ChainSummand:
    """One basis vector of the bar construction.

    ``local[k]`` indexes the Gerst basis of [G_k, G_{k+1}] and
    ``bigrades[k]`` is its (C-weight, L-weight).
    """

    chain: tuple[int, ...]
    local: tuple[int, ...]
    bigrades: tuple[tuple[int, int], ...]

    @property
    def length(self) -> int:
        return len(self.chain) - 1

    @property
    def rank(self) -> int:
        return sum(i + j for i, j in self.bigrades)

    @property
    def degree(self) -> int:
        return self.rank - self.length

    @property
    def weight(self) -> int:
        return sum(i for i, _ in self.bigrades)

    @property
    def l_weight(self) -> int:
        return sum(j for _, j in self.bigrades)

    def letters(self) -> str:
        """Top-down word for rank-one factors, e.g. 'LLC'; '?' for longer factors."""
        out = []
        for i, j in reversed(self.bigrades):
            out.append("L" if (i, j) == (0, 1) else "C" if (i, j) == (1, 0) else "?")
        return "".join(out)


# -- lattice paths --------------------------------------------------------


class LatticePath:
    """phi on a finite set I of integers: position -> value."""

    def __init__(self, values: dict[int, int]):
        self.values = dict(sorted(values.items()))

    @property
    def support(self) -> list[int]:
        return list(self.values)

    def __getitem__(self, p: int) -> int:
        return self.values[p]

    def interior(self) -> list[int]:
        s = self.support
        return s[1:-1]

    def interior_min(self) -> int | None:
        return min((self.values[p] for p in self.interior()), default=None)

    def interior_argmin(self) -> int | None:
        inner = self.interior()
        if not inner:
            return None
        return min(inner, key=lambda p: (self.values[p], p))

    def rank(self) -> int:
        s = self.support
        return s[-1] - s[0]

    def degree(self) -> int:
        return self.rank() - len(self.values) + 1

    def weight(self) -> int:
        s = self.support
        num = self.rank() - self.values[s[-1]] + self.values[s[0]]
        if num % 2 or num < 0:
            raise CharacterizationMismatch(f"path weight {num}/2 is not a non-negative integer")
        return num // 2

    def __eq__(self, other):
        return isinstance(other, LatticePath) and self.values == other.values

    def __repr__(self):
        return f"LatticePath({self.values})"


def path_of_summand(s: ChainSummand) -> LatticePath:
    """Read factors from the top: an L step adds 1, a C step subtracts 1.

    Values are kept at the positions rk L - rk G_q of the chain points.
    """
    pos, val = 0, 0
    out = {0: 0}
    for i, j in reversed(s.bigrades):
        pos += i + j
        val += j - i
        out[pos] = val
    return LatticePath(out)


def _filter_by_inequalities(s: ChainSummand, variant: str) -> bool:
    bg = s.bigrades
    if variant in (RKLS_HAT, LKLS_HAT):
        bg = tuple((j, i) for i, j in bg)
    n = len(bg)
    if variant in (RKLS, RKLS_HAT):
        for q in range(1, n):
            part = bg[q:]
            if not 2 * sum(i for i, _ in part) < sum(i + j for i, j in part):
                return False
        return True
    for q in range(n - 1):
        part = bg[:q + 1]
        if not 2 * sum(i for i, _ in part) < sum(i + j for i, j in part):
            return False
    return True


def _filter_by_path(s: ChainSummand, variant: str) -> bool:
    path = path_of_summand(s)
    last = path[path.support[-1]]
    inner = [path[p] for p in path.interior()]
    if variant == RKLS:
        return all(v > 0 for v in inner)
    if variant == RKLS_HAT:
        return all(v < 0 for v in inner)
    if variant == LKLS:
        return all(v < last for v in inner)
    return all(v > last for v in inner)


def kls_filter(s: ChainSummand, variant: str) -> bool:
    """Membership of a summand in a KLS complex, checked two ways."""
    variant = normalize_variant(variant)
    a = _filter_by_inequalities(s, variant)
    b = _filter_by_path(s, variant)
    if a != b:
        raise CharacterizationMismatch(f"{variant}: inequalities say {a}, path says {b} for {s}")
    return a


# -- graded complexes and Betti numbers -------------------------------------


class BettiTable:
    """weight -> degree -> dimension, with chain dimensions for Euler checks."""

    def __init__(self):
        self.betti: dict[int, dict[int, int]] = {}
        self.chain_dims: dict[int, dict[int, int]] = {}

    def set(self, weight: int, betti: dict[int, int], dims: dict[int, int]) -> None:
        self.betti[weight] = dict(sorted(betti.items()))
        self.chain_dims[weight] = dict(sorted(dims.items()))

    def euler(self, weight: int) -> int:
        return sum((-1) ** d * b for d, b in self.betti[weight].items())

    def euler_from_chains(self, weight: int) -> int:
        return sum((-1) ** d * b for d, b in self.chain_dims[weight].items())

    def nonzero(self, weight: int) -> dict[int, int]:
        return {d: b for d, b in self.betti[weight].items() if b}

    def __repr__(self):
        return f"BettiTable({ {w: self.nonzero(w) for w in self.betti} })"


class GradedChainComplex:
    """A cochain complex with basis per degree and lazily built differentials.

    ``basis[D]`` lists basis keys in degree D; ``image(key)`` returns the
    differential of one basis key as a dict over keys of degree D + 1.
    """

    def __init__(self, basis: dict[int, list], image, *, weight=None, variant=None, lattice=None):
        self.basis = {d: list(b) for d, b in sorted(basis.items()) if b}
        self._image = image
        self.weight = weight
        self.variant = variant
        self.lattice = lattice
        self._index = {d: {k: i for i, k in enumerate(b)} for d, b in self.basis.items()}
        self._mats: dict[int, SparseMatrix] = {}

    def degrees(self) -> list[int]:
        return list(self.basis)

    def dimension(self, degree: int) -> int:
        return len(self.basis.get(degree, ()))

    def dimensions(self) -> dict[int, int]:
        return {d: len(b) for d, b in self.basis.items()}

    def differential(self, degree: int) -> SparseMatrix:
        """d^degree as a matrix with one row per source basis vector."""
        m = self._mats.get(degree)
        if m is not None:
            return m
        src = self.basis.get(degree, [])
        tgt = self._index.get(degree + 1, {})
        rows = []
        for key in src:
            row: dict[int, object] = {}
            for k2, c in self._image(key).items():
                j = tgt.get(k2)
                if j is None:
                    raise SubcomplexViolation(f"d({key}) leaves the complex at {k2}")
                _add_into(row, j, c)
            rows.append(row)
        m = self._mats[degree] = SparseMatrix(len(src), len(tgt), rows)
        return m

    def check_d_squared(self) -> None:
        for d in self.basis:
            if d + 1 not in self.basis:
                continue
            prod = self.differential(d) @ self.differential(d + 1)
            if not prod.is_zero():
                raise DSquareNonzero(f"d^{d + 1} d^{d} != 0 (weight {self.weight}, {self.variant})")

    def betti(self) -> dict[int, int]:
        ranks = {d: rank(self.differential(d)) for d in self.basis}
        return {d: len(b) - ranks[d] - ranks.get(d - 1, 0) for d, b in self.basis.items()}


def cohomology(c: GradedChainComplex | Iterable[GradedChainComplex], *,
               check: bool = True) -> BettiTable:
    """Betti numbers over Q, one row per weight."""
    cs = [c] if isinstance(c, GradedChainComplex) else list(c)
    table = BettiTable()
    for cx in cs:
        if check:
            cx.check_d_squared()
        table.set(cx.weight, cx.betti(), cx.dimensions())
    return table


# -- bar constructions -----------------------------------------------------


def _cap(max_chains: int | None) -> int:
    return _poset.DEFAULT_MAX_CHAINS if max_chains is None else max_chains


def _all_chains(P: GradedBoundedPoset, max_chains: int | None) -> list[tuple[int, ...]]:
    return [full for _, full in P.enumerate_chains(False, max_chains=_cap(max_chains))]


def _local_choices(op: GerstOperad, a: int, b: int, operad: str) -> list[tuple[int, tuple[int, int]]]:
    sp = op.space(a, b)
    out = []
    for idx, bg in enumerate(sp.bigrades):
        if operad == COM_OP and bg[1] != 0:
            continue
        if operad == LIE_OP and bg[0] != 0:
            continue
        out.append((idx, bg))
    return out


def bar_summands(L: GeometricLattice, weight: int | None = None, operad: str = GERST_OP, *,
                 max_chains: int | None = None, seed: int | None = None
                 ) -> list[ChainSummand]:
    """All summands of the given weight (all weights when None)."""
    op = gerst_operad(L)
    if L.n == 1:
        return []
    chains = _all_chains(L, max_chains)
    if seed is not None:
        random.Random(seed).shuffle(chains)
    out = []
    for chain in chains:
        choices = [_local_choices(op, a, b, operad) for a, b in zip(chain, chain[1:])]
        for combo in product(*choices):
            bgs = tuple(bg for _, bg in combo)
            if weight is not None and sum(i for i, _ in bgs) != weight:
                continue
            out.append(ChainSummand(chain, tuple(k for k, _ in combo), bgs))
    return out


def _bar_image(L: GeometricLattice, op: GerstOperad):
    def image(s: ChainSummand) -> dict[ChainSummand, int]:
        out: dict[ChainSummand, int] = {}
        ch = s.chain
        for k in range(s.length - 1):
            sign = -1 if k % 2 else 1
            mu = op.mu(ch[k + 1], ch[k], ch[k + 2])
            target = op.space(ch[k], ch[k + 2])
            new_chain = ch[:k + 1] + ch[k + 2:]
            for idx, c in mu.apply(s.local[k], s.local[k + 1]).items():
                t = ChainSummand(new_chain, s.local[:k] + (idx,) + s.local[k + 2:],
                                 s.bigrades[:k] + (target.bigrades[idx],) + s.bigrades[k + 2:])
                _add_into(out, t, sign * c)
        return out
    return image


def _by_degree(summands: Iterable[ChainSummand]) -> dict[int, list[ChainSummand]]:
    basis: dict[int, list[ChainSummand]] = {}
    for s in summands:
        basis.setdefault(s.degree, []).append(s)
    return basis


def bar_complex(L: GeometricLattice, weight: int | None = None, operad: str = GERST_OP, *,
                max_chains: int | None = None, seed: int | None = None) -> GradedChainComplex:
    """Bar(O)(L) at one C-weight, for O = Gerst, Com (pure C) or Lie (pure L)."""
    op = gerst_operad(L)
    summands = bar_summands(L, weight, operad, max_chains=max_chains, seed=seed)
    return GradedChainComplex(_by_degree(summands), _bar_image(L, op), weight=weight,
                              variant=f"bar-{operad}", lattice=L)


def bar_com(P: GradedBoundedPoset, x: int | None = None, y: int | None = None, *,
            max_chains: int | None = None) -> GradedChainComplex:
    """Bar(Com) of any graded bounded poset: one basis vector per chain x < ... < y.

    Built from chains alone, independent of the OS machinery.
    """
    x = P.bottom if x is None else x
    y = P.top if y is None else y
    if x == y:
        return GradedChainComplex({}, lambda c: {}, weight=0, variant="bar-com", lattice=P)
    r = P.rank_between(x, y)
    basis: dict[int, list] = {}
    for c, _ in P.enumerate_chains(True, x=x, y=y, max_chains=_cap(max_chains)):
        basis.setdefault(r - len(c) - 1, []).append(c)

    def image(c):
        out = {}
        for k in range(len(c)):
            _add_into(out, c[:k] + c[k + 1:], -1 if k % 2 else 1)
        return out

    return GradedChainComplex(basis, image, weight=r, variant="bar-com", lattice=P)


def kls_complex(L: GeometricLattice, weight: int, variant: str, *,
                max_chains: int | None = None, seed: int | None = None) -> GradedChainComplex:
    """The KLS subcomplex of Bar(Gerst)(L).

    Plain variants are indexed by C-weight, hatted ones by L-weight.
    """
    variant = normalize_variant(variant)
    c_weight = weight if variant in (RKLS, LKLS) else L.rank - weight
    op = gerst_operad(L)
    summands = [s for s in bar_summands(L, c_weight, GERST_OP, max_chains=max_chains, seed=seed)
                if kls_filter(s, variant)]
    base = _bar_image(L, op)

    def image(s):
        out = base(s)
        for t in out:
            if not kls_filter(t, variant):
                raise SubcomplexViolation(f"d({s}) has a component outside {variant}: {t}")
        return out

    return GradedChainComplex(_by_degree(summands), image, weight=weight, variant=variant, lattice=L)


def kls_betti(L: GeometricLattice, weight: int, variant: str, **kw) -> dict[int, int]:
    c = kls_complex(L, weight, variant, **kw)
    c.check_d_squared()
    return c.betti()


def bar_betti(L: GeometricLattice, weight: int, operad: str = GERST_OP, **kw) -> dict[int, int]:
    c = bar_complex(L, weight, operad, **kw)
    c.check_d_squared()
    return c.betti()


def expected_degree(rank: int, weight: int) -> int | None:
    """Where KLS cohomology lives: degree i below half rank, i - 1 above, nowhere at half."""
    if 2 * weight < rank:
        return weight
    if 2 * weight > rank:
        return weight - 1
    return None


def check_concentration(L: GeometricLattice, weight: int, variant: str,
                        betti: dict[int, int]) -> None:
    want = expected_degree(L.rank, weight)
    stray = {d: b for d, b in betti.items() if b and d != want}
    if stray:
        raise ConcentrationFailure(f"{variant}_({weight}) on rank {L.rank}: cohomology {stray} "
                                   f"outside degree {want}")


def kl_via_complexes(L: GeometricLattice, **kw) -> tuple[Poly, Poly, dict]:
    """P and Q read off H^i of RKLS_(i) and of hatted LKLS_(i) for 2i < rk.

    Returns (P, Q, evidence) where evidence maps (variant, weight) to Betti
    numbers.  Cohomology outside degree i raises ConcentrationFailure.
    """
    p_coeffs, q_coeffs, evidence = [], [], {}
    if L.rank == 0:
        return Poly.const(1), Poly.const(1), evidence
    for i in range((L.rank + 1) // 2):
        for variant, coeffs in ((RKLS, p_coeffs), (LKLS_HAT, q_coeffs)):
            b = kls_betti(L, i, variant, **kw)
            evidence[(variant, i)] = b
            check_concentration(L, i, variant, b)
            coeffs.append(b.get(i, 0))
    return Poly(p_coeffs), Poly(q_coeffs), evidence


# -- the Koszul complex -----------------------------------------------------


def _tau(idx: int) -> int:
    """twOS of a rank-one interval -> Gerst of it: 1 goes to L, e goes to C."""
    return 1 if idx == 0 else 0


def koszul_complex(L: GeometricLattice, weight: int | None = None,
                   sign_convention: str = "default") -> GradedChainComplex:
    """Sum over G of Gerst([0, G]) (x) twOS([G, 1]) placed in degree rk G.

    Basis keys are (G, a, b) with a a Gerst basis index of [0, G] and b an
    OS basis index of [G, 1]; the trivial factor at G = 0 or G = 1 uses
    index 0.  The weight is the C-weight of a plus the OS degree of b.
    ``sign_convention`` "untwisted" swaps in the plain coproduct.
    """
    op = gerst_operad(L)
    fam = os_family(L)
    bot, top = L.bottom, L.top
    twisted = sign_convention != "untwisted"

    def a_info(G):
        return [(0, 0)] if G == bot else op.space(bot, G).bigrades

    def b_degrees(G):
        return [0] if G == top else [len(m) for m in fam.algebra(G, top).basis_list]

    basis: dict[int, list] = {}
    for G in range(L.n):
        for a, (ci, _) in enumerate(a_info(G)):
            for b, bd in enumerate(b_degrees(G)):
                if weight is None or ci + bd == weight:
                    basis.setdefault(L.rank_of[G], []).append((G, a, b))

    def glue(G, a, piece_gerst, G2):
        if G == bot:
            return {piece_gerst: 1}
        return op.mu(G, bot, G2).apply(a, piece_gerst)

    def image(key):
        G, a, b = key
        out: dict = {}
        if G == top:
            return out
        for G2 in L.covers[G]:
            if G2 == top:
                for a2, c in glue(G, a, _tau(b), G2).items():
                    _add_into(out, (G2, a2, 0), c)
                continue
            A = fam.algebra(G, G2)
            B = fam.algebra(G2, top)
            mono = fam.algebra(G, top).basis_list[b]
            for (ma, mb), c in fam.coproduct_monomial(G, top, G2, mono, twisted).items():
                for a2, c2 in glue(G, a, _tau(A.index[ma]), G2).items():
                    _add_into(out, (G2, a2, B.index[mb]), c * c2)
        return out

    return GradedChainComplex(basis, image, weight=weight, variant="kos", lattice=L)


def koszul_betti(L: GeometricLattice) -> BettiTable:
    table = BettiTable()
    for w in range(L.rank + 1):
        c = koszul_complex(L, w)
        c.check_d_squared()
        table.set(w, c.betti(), c.dimensions())
    return table


# -- work units for parallel runs -------------------------------------------


def betti_job(spec, variant: str, weight: int, max_elements: int | None = None,
              max_chains: int | None = None) -> dict[int, int]:
    """Picklable unit: build the lattice from ``spec`` and return Betti numbers."""
    from .lattices import build_lattice

    kw = {} if max_elements is None else {"max_elements": max_elements}
    L = build_lattice(spec, **kw)
    if variant == "bar":
        return bar_betti(L, weight, max_chains=max_chains)
    if variant == "kos":
        c = koszul_complex(L, weight)
        c.check_d_squared()
        return c.betti()
    return kls_betti(L, weight, variant, max_chains=max_chains)


def run_jobs(jobs: Sequence[tuple], n_workers: int = 1) -> list[dict[int, int]]:
    if n_workers <= 1 or len(jobs) <= 1:
        return [betti_job(*j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(betti_job, *zip(*jobs)))
