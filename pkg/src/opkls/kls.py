"""Incidence algebra of a graded poset, kernels and KLS polynomials.

Conventions follow the usual Stanley / Brenti ones: for a kernel ``kappa``
the right polynomial ``f`` solves ``bar(f) = kappa * f`` and the left
polynomial ``g`` solves ``bar(g) = g * kappa``, both with unit diagonal and
``deg < rank/2`` off the diagonal.  With ``kappa`` the characteristic
function of a geometric lattice, ``f`` on the full interval is the
Elias-Proudfoot-Wakefield Kazhdan-Lusztig polynomial, while ``g`` is
identically 1.  The inverse KL polynomial is ``(-1)^rk`` times the left
polynomial of ``bar(kappa)``.
"""

from __future__ import annotations

import random
from .errors import DegreeExceedsRank, HostMismatch, KernelCheckFailed, RecursionInconsistent
from .polynomial import Poly
from .poset import GradedBoundedPoset, iter_bits

ZERO = Poly()
ONE = Poly.const(1)


class IncidencePolynomial:
    """A polynomial attached to each comparable pair of ``host``.

    Entries not stored are zero.  ``entry(x, y)`` raises nothing for
    incomparable pairs; it simply returns zero.
    """

    def __init__(self, host: GradedBoundedPoset, entries: dict[tuple[int, int], Poly] | None = None):
        self.host = host
        self.entries: dict[tuple[int, int], Poly] = {}
        for k, v in (entries or {}).items():
            if v:
                self.entries[k] = v

    def entry(self, x: int, y: int) -> Poly:
        return self.entries.get((x, y), ZERO)

    def __getitem__(self, key: tuple[int, int]) -> Poly:
        return self.entry(*key)

    def top(self) -> Poly:
        return self.entry(self.host.bottom, self.host.top)

    def __eq__(self, other):
        return (isinstance(other, IncidencePolynomial) and other.host is self.host
                and other.entries == self.entries)

    def __sub__(self, other: "IncidencePolynomial") -> "IncidencePolynomial":
        _same_host(self, other)
        keys = set(self.entries) | set(other.entries)
        return IncidencePolynomial(self.host, {k: self.entry(*k) - other.entry(*k) for k in keys})

    def in_rank_ring(self) -> bool:
        P = self.host
        return all(v.degree <= P.rank_between(x, y) for (x, y), v in self.entries.items())

    def in_half_rank_ring(self) -> bool:
        P = self.host
        return all(x == y or 2 * v.degree < P.rank_between(x, y)
                   for (x, y), v in self.entries.items())

    def to_rows(self) -> list[list[int]]:
        """Rows ``[x, y, rank, c0, c1, ...]`` over all comparable pairs."""
        P = self.host
        return [[x, y, P.rank_between(x, y)] + self.entry(x, y).to_list() for x, y in P.pairs()]

    def __repr__(self):
        return f"IncidencePolynomial(n={self.host.n}, nnz={len(self.entries)})"


def _same_host(f: IncidencePolynomial, g: IncidencePolynomial) -> None:
    if f.host is not g.host:
        raise HostMismatch("incidence elements live on different posets")


def delta(P: GradedBoundedPoset) -> IncidencePolynomial:
    return IncidencePolynomial(P, {(x, x): ONE for x in range(P.n)})


def zeta(P: GradedBoundedPoset) -> IncidencePolynomial:
    return IncidencePolynomial(P, {(x, y): ONE for x, y in P.pairs()})


def characteristic_kernel(P: GradedBoundedPoset) -> IncidencePolynomial:
    """chi_{xy}(t) = sum_{x<=z<=y} mu(x, z) t^rk[z, y]."""
    return IncidencePolynomial(P, {(x, y): P.characteristic_polynomial(x, y) for x, y in P.pairs()})


def bar(f: IncidencePolynomial) -> IncidencePolynomial:
    P = f.host
    out = {}
    for (x, y), v in f.entries.items():
        r = P.rank_between(x, y)
        if v.degree > r:
            raise DegreeExceedsRank(f"entry ({x}, {y}) has degree {v.degree} > rank {r}")
        out[(x, y)] = v.reflect(r)
    return IncidencePolynomial(P, out)


def convolve(f: IncidencePolynomial, g: IncidencePolynomial) -> IncidencePolynomial:
    _same_host(f, g)
    P = f.host
    out: dict[tuple[int, int], Poly] = {}
    for x, y in P.pairs():
        fxy = f.entries.get((x, y))
        if not fxy:
            continue
        for z in iter_bits(P.up[y]):
            gyz = g.entries.get((y, z))
            if gyz:
                out[(x, z)] = out.get((x, z), ZERO) + fxy * gyz
    return IncidencePolynomial(P, out)


def is_kernel(kappa: IncidencePolynomial) -> tuple[bool, tuple[int, int] | None]:
    """Whether ``bar(kappa) * kappa == delta``; on failure the first bad interval.

    Intervals are scanned by decreasing rank, so the witness is a largest
    failing interval (the full interval whenever it fails).
    """
    P = kappa.host
    for x in range(P.n):
        if kappa.entry(x, x) != ONE:
            return False, (x, x)
    try:
        prod = convolve(bar(kappa), kappa)
    except DegreeExceedsRank:
        bad = min(((x, y) for (x, y), v in kappa.entries.items()
                   if v.degree > P.rank_between(x, y)), key=lambda p: -P.rank_between(*p))
        return False, bad
    want = delta(P)
    for x, y in sorted(P.pairs(), key=lambda p: (-P.rank_between(*p), p)):
        if prod.entry(x, y) != want.entry(x, y):
            return False, (x, y)
    return True, None


def _require_kernel(kappa: IncidencePolynomial) -> None:
    ok, witness = is_kernel(kappa)
    if not ok:
        raise KernelCheckFailed(f"not a kernel; first failure on interval {witness}")


def _sum_order(items: list[int], rng: random.Random | None) -> list[int]:
    if rng is None:
        return items
    items = list(items)
    rng.shuffle(items)
    return items


def kls_right(kappa: IncidencePolynomial, *, check: bool = True,
              seed: int | None = None) -> IncidencePolynomial:
    """Right KLS polynomial: f with bar(f) = kappa f.

    f_{xy} = -TR( sum_{x<z<=y} kappa_{xz} f_{zy} ), computed for fixed y by
    decreasing rank of x.  ``seed`` shuffles the summation and processing
    order within a rank (the result must not depend on it).
    """
    if check:
        _require_kernel(kappa)
    P = kappa.host
    rng = random.Random(seed) if seed is not None else None
    f: dict[tuple[int, int], Poly] = {}
    for y in range(P.n):
        f[(y, y)] = ONE
        below = sorted(iter_bits(P.down[y] & ~(1 << y)), key=lambda x: -P.rank_of[x])
        if rng is not None:
            below.sort(key=lambda x: (-P.rank_of[x], rng.random()))
        for x in below:
            acc = ZERO
            for z in _sum_order(list(iter_bits(P.up[x] & P.down[y] & ~(1 << x))), rng):
                acc = acc + kappa.entry(x, z) * f[(z, y)]
            f[(x, y)] = -acc.truncate_half(P.rank_between(x, y))
    out = IncidencePolynomial(P, f)
    if check and bar(out) != convolve(kappa, out):
        raise RecursionInconsistent("computed right KLS polynomial violates bar(f) = kappa f")
    return out


def kls_left(kappa: IncidencePolynomial, *, check: bool = True,
             seed: int | None = None) -> IncidencePolynomial:
    """Left KLS polynomial: g with bar(g) = g kappa, by increasing rank of y."""
    if check:
        _require_kernel(kappa)
    P = kappa.host
    rng = random.Random(seed) if seed is not None else None
    g: dict[tuple[int, int], Poly] = {}
    for x in range(P.n):
        g[(x, x)] = ONE
        above = sorted(iter_bits(P.up[x] & ~(1 << x)), key=lambda y: P.rank_of[y])
        if rng is not None:
            above.sort(key=lambda y: (P.rank_of[y], rng.random()))
        for y in above:
            acc = ZERO
            for z in _sum_order(list(iter_bits(P.up[x] & P.down[y] & ~(1 << y))), rng):
                acc = acc + g[(x, z)] * kappa.entry(z, y)
            g[(x, y)] = -acc.truncate_half(P.rank_between(x, y))
    out = IncidencePolynomial(P, g)
    if check and bar(out) != convolve(out, kappa):
        raise RecursionInconsistent("computed left KLS polynomial violates bar(g) = g kappa")
    return out


def inverse_kls(kappa: IncidencePolynomial, **kw) -> tuple[IncidencePolynomial, IncidencePolynomial]:
    """Right and left KLS polynomials of ``bar(kappa)``."""
    kb = bar(kappa)
    return kls_right(kb, **kw), kls_left(kb, **kw)


def kl_polynomial(P: GradedBoundedPoset) -> Poly:
    """The matroid Kazhdan-Lusztig polynomial of the full lattice."""
    return kls_right(characteristic_kernel(P)).top()


def inverse_kl_polynomial(P: GradedBoundedPoset) -> Poly:
    """The inverse Kazhdan-Lusztig polynomial: (-1)^rk times the left polynomial of bar(chi)."""
    g = kls_left(bar(characteristic_kernel(P))).top()
    return g * (-1) ** P.rank


# -- brute-force oracle ---------------------------------------------------


def kls_chain_expansion(kappa: IncidencePolynomial, x: int | None = None, y: int | None = None,
                        side: str = "right") -> Poly:
    """Sum over chains of nested truncations, without any memoisation.

    Right: sum over x = G0 < ... < Gn = y of (-1)^n
    TR_[G0,y](kappa_{G0 G1} TR_[G1,y](kappa_{G1 G2} ... TR_[G_{n-1},y](kappa_{G_{n-1} y}))).
    Left is the mirror image, truncating over lower intervals [x, G_k].
    """
    P = kappa.host
    x = P.bottom if x is None else x
    y = P.top if y is None else y
    if x == y:
        return ONE
    total = ZERO
    for inner in P.iter_chains(x, y):
        chain = (x,) + inner + (y,)
        n = len(chain) - 1
        if side == "right":
            acc = ONE
            for k in range(n - 1, -1, -1):
                acc = (kappa.entry(chain[k], chain[k + 1]) * acc).truncate_half(
                    P.rank_between(chain[k], y))
        elif side == "left":
            acc = ONE
            for k in range(1, n + 1):
                acc = (acc * kappa.entry(chain[k - 1], chain[k])).truncate_half(
                    P.rank_between(x, chain[k]))
        else:
            raise ValueError(f"side must be 'right' or 'left', not {side!r}")
        total = total + acc * (-1) ** n
    return total

