import itertools
import random

import pytest

from opkls.errors import LoopCapExceeded, NotInterior
from opkls.gerst import (COM, GERST, LIE, AdmissibleOrder, DecoratedChainMonomial,
                         check_bigrade_additivity, check_gerst_presentation, check_operad_axiom,
                         divides, gerst_mu, gerst_space, in_relation_span, normal_monomials,
                         phi_by_products, phi_functional, quotient_dimension, rewrite_normal_form)

from conftest import CORPUS, SMALL, lattice


def chain_mono(chain, decs=None):
    return DecoratedChainMonomial(tuple(chain), tuple(decs or "1" * (len(chain) - 1)))


def test_rank_one_space():
    sp = gerst_space(lattice("boolean:1"))
    assert sp.dimensions() == {(1, 0): 1, (0, 1): 1}


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_rank_two_spaces(m):
    sp = gerst_space(lattice(f"uniform:2,{m}"))
    assert sp.dimensions() == {(2, 0): 1, (1, 1): m, (0, 2): m - 1}


def test_hilbert_series_of_u23():
    assert gerst_space(lattice("uniform:2,3")).hilbert_series().coeffs == (2, 3, 1)


@pytest.mark.parametrize("name", CORPUS)
def test_hilbert_series_is_unsigned_characteristic(name):
    L = lattice(name)
    sp = gerst_space(L)
    assert sp.hilbert_series() == L.characteristic_polynomial(unsigned=True)
    assert all(c + l == L.rank for c, l in sp.bigrades)


def _rank2_products(name):
    L = lattice(name)
    x, y = L.bottom, L.top
    C, Lv = {0: 1}, {1: 1}  # rank-one bases: index 0 is C, index 1 is L
    return L, {h: gerst_mu(L, h, x, y) for h in L.interior(x, y)}, C, Lv


@pytest.mark.parametrize("name", ["uniform:2,3", "uniform:2,4", "boolean:2"])
def test_rank_two_relations(name):
    L, mus, C, Lv = _rank2_products(name)
    cc = [mu.apply_vectors(C, C) for mu in mus.values()]
    assert all(v == cc[0] for v in cc)
    total = {}
    for mu in mus.values():
        for k, v in mu.apply_vectors(Lv, Lv).items():
            total[k] = total.get(k, 0) + v
    assert not any(total.values())
    for h, mu in mus.items():
        lhs = mu.apply_vectors(C, Lv)
        rhs = {}
        for h2, mu2 in mus.items():
            if h2 != h:
                for k, v in mu2.apply_vectors(Lv, C).items():
                    rhs[k] = rhs.get(k, 0) + v
        assert lhs == {k: v for k, v in rhs.items() if v}


def test_gerst_mu_requires_interior_element():
    L = lattice("boolean:2")
    with pytest.raises(NotInterior):
        gerst_mu(L, L.bottom)


def test_operad_axiom_examples():
    assert check_operad_axiom(lattice("uniform:2,3")) == (True, None)
    assert check_operad_axiom(lattice("boolean:3")) == (True, None)
    assert check_operad_axiom(lattice("partition:4")) == (True, None)


@pytest.mark.parametrize("name", ["boolean:4", "uniform:3,5", "uniform:4,5", "partition:5"])
def test_operad_axiom_on_all_intervals(name):
    L = lattice(name)
    for x, y in L.pairs():
        if L.rank_between(x, y) >= 3:
            assert check_operad_axiom(L, x, y)[0]


@pytest.mark.parametrize("name", SMALL)
def test_bigrade_additivity(name):
    L = lattice(name)
    for x, y in L.pairs():
        for g in L.interior(x, y):
            assert check_bigrade_additivity(L, g, x, y)


def test_pure_c_slice_is_one_dimensional_and_products_agree():
    L = lattice("partition:4")
    for x, y in L.pairs():
        if x == y:
            continue
        sp = gerst_space(L, x, y)
        assert sp.dimension((L.rank_between(x, y), 0)) == 1
        images = [gerst_mu(L, g, x, y).apply(0, 0) for g in L.interior(x, y)]
        assert all(im == {0: 1} for im in images)


# -- normal monomials and rewriting ------------------------------------------


@pytest.mark.parametrize("name", CORPUS)
def test_normal_monomial_counts(name):
    L = lattice(name)
    for x, y in L.pairs():
        if x == y:
            continue
        assert len(normal_monomials(L, COM, x, y)) == 1
        assert len(normal_monomials(L, LIE, x, y)) == abs(L.mobius(x, y))
    assert len(normal_monomials(L, GERST)) == gerst_space(L).dimension()


def test_lie_normal_monomials_of_u23():
    assert len(normal_monomials(lattice("uniform:2,3"), LIE)) == 2


@pytest.mark.parametrize("name", SMALL)
def test_quotient_dimensions(name):
    L = lattice(name)
    for x, y in L.pairs():
        if x != y:
            assert quotient_dimension(L, COM, x, y) == 1
            assert quotient_dimension(L, LIE, x, y) == abs(L.mobius(x, y))
            assert gerst_space(L, x, y).dimension((0, L.rank_between(x, y))) == abs(L.mobius(x, y))


def test_com_rewriting_of_b3_chains():
    L = lattice("boolean:3")
    [normal] = normal_monomials(L, COM)
    for c in L.maximal_chains():
        assert rewrite_normal_form(L, chain_mono(c), COM) == {normal: 1}


def test_lie_single_rewrite_on_u23():
    L = lattice("uniform:2,3")
    a1, a2, a3 = L.atom_list
    m = chain_mono((L.bottom, a1, L.top))
    assert rewrite_normal_form(L, m, LIE) == {chain_mono((L.bottom, a2, L.top)): -1,
                                              chain_mono((L.bottom, a3, L.top)): -1}


def test_normal_monomials_are_fixed_points():
    L = lattice("partition:4")
    for kind in (COM, LIE):
        for m in normal_monomials(L, kind):
            assert rewrite_normal_form(L, m, kind) == {m: 1}


@pytest.mark.parametrize("name", ["boolean:4", "uniform:3,5", "partition:4", "partition:5", "graph:C4"])
@pytest.mark.parametrize("kind", [COM, LIE])
def test_rewriting_is_confluent_and_sound(name, kind):
    L = lattice(name)
    normals = set(normal_monomials(L, kind))
    for c in L.maximal_chains():
        m = chain_mono(c)
        nf = rewrite_normal_form(L, m, kind)
        assert set(nf) <= normals
        for strategy, seed in [("leftmost", None), ("rightmost", None), ("random", 1), ("random", 2)]:
            assert rewrite_normal_form(L, m, kind, strategy=strategy, seed=seed) == nf
        if L.rank <= 3:
            diff = dict(nf)
            diff[m] = diff.get(m, 0) - 1
            assert in_relation_span(L, kind, diff)


def test_rewriting_step_cap():
    L = lattice("boolean:3")
    [normal] = normal_monomials(L, COM)
    m = next(chain_mono(c) for c in L.maximal_chains() if chain_mono(c) != normal)
    with pytest.raises(LoopCapExceeded):
        rewrite_normal_form(L, m, COM, max_steps=0)


def test_rewriting_rejects_non_decreasing_order():
    # with the Com order reversed every rewrite goes up
    L = lattice("uniform:2,3")
    bad = AdmissibleOrder.for_lie(L)
    descending = [c for c in L.maximal_chains()
                  if L.cover_label(c[0], c[1]) > L.cover_label(c[1], c[2])]
    with pytest.raises(LoopCapExceeded):
        rewrite_normal_form(L, chain_mono(descending[0]), COM, bad)


def test_divides():
    L = lattice("boolean:3")
    c = L.maximal_chains()[0]
    m = chain_mono(c, "LCL")
    assert divides(m, m)
    assert divides(chain_mono(c[1:3], "C"), m)
    assert divides(chain_mono(c[0:3], "LC"), m)
    assert not divides(chain_mono(c[0:3], "CC"), m)
    assert not divides(chain_mono(c[0:3], "LL"), m)


@pytest.mark.parametrize("name", ["partition:4", "uniform:3,5"])
def test_admissible_order_compatibility(name):
    L = lattice(name)
    rng = random.Random(3)
    for order in (AdmissibleOrder.for_com(L), AdmissibleOrder.for_lie(L)):
        for _ in range(200):
            c = rng.choice(L.maximal_chains())
            k = rng.randint(1, L.rank - 1)
            g = c[k]
            lows = [chain_mono(p, d) for p in L.maximal_chains(L.bottom, g)
                    for d in itertools.product("CL", repeat=k)]
            ups = [chain_mono(p, d) for p in L.maximal_chains(g, L.top)
                   for d in itertools.product("CL", repeat=L.rank - k)]
            m1, m2 = sorted(rng.sample(lows, 2) if len(lows) > 1 else lows * 2, key=order.key)
            n1, n2 = sorted(rng.sample(ups, 2) if len(ups) > 1 else ups * 2, key=order.key)
            left = chain_mono(m1.chain + n1.chain[1:], m1.decorations + n1.decorations)
            right = chain_mono(m2.chain + n2.chain[1:], m2.decorations + n2.decorations)
            assert order.key(left) <= order.key(right)


def test_order_is_total_on_maximal_chains():
    L = lattice("partition:4")
    order = AdmissibleOrder.for_com(L)
    keys = [order.key(chain_mono(c)) for c in L.maximal_chains()]
    assert len(set(keys)) == len(keys)


# -- the quadratic presentation -------------------------------------------


@pytest.mark.parametrize("name", ["uniform:2,3", "boolean:3", "uniform:3,4", "partition:4", "graph:C4"])
def test_presentation_matches_os_dual(name):
    r = check_gerst_presentation(lattice(name))
    assert r["relations_killed"] == 1
    assert r["quotient_dimension"] == r["dim_os"] == r["phi_rank"]
    assert r["normal_monomials"] == r["phi_rank_on_normals"] == r["dim_os"]


@pytest.mark.parametrize("name", ["uniform:2,3", "boolean:3", "partition:4"])
def test_phi_agrees_with_composed_products(name):
    L = lattice(name)
    for c in L.maximal_chains():
        for d in itertools.product("CL", repeat=L.rank):
            m = chain_mono(c, d)
            assert phi_functional(L, m) == phi_by_products(L, m)
