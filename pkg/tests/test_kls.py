import random

import pytest
from hypothesis import given, settings, strategies as st

from opkls.errors import DegreeExceedsRank, HostMismatch, KernelCheckFailed
from opkls.kls import (IncidencePolynomial, bar, characteristic_kernel, convolve, delta,
                       inverse_kl_polynomial, inverse_kls, is_kernel, kl_polynomial,
                       kls_chain_expansion, kls_left, kls_right, zeta)
from opkls.polynomial import Poly

from conftest import CORPUS, FROZEN_KL, lattice
from oracles import brute


def random_incidence(P, seed):
    rng = random.Random(seed)
    return IncidencePolynomial(P, {(x, y): Poly([rng.randint(-3, 3) for _ in range(P.rank_between(x, y) + 1)])
                                   for x, y in P.pairs()})


def test_delta_is_a_unit():
    P = lattice("boolean:3")
    f = random_incidence(P, 1)
    assert convolve(delta(P), f) == f == convolve(f, delta(P))
    assert bar(delta(P)) == delta(P)
    assert delta(P).entry(0, 0) == 1 and delta(P).entry(0, 1) == 0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_convolution_is_associative(seed):
    P = lattice("uniform:2,3")
    f, g, h = (random_incidence(P, seed + k) for k in range(3))
    assert convolve(convolve(f, g), h) == convolve(f, convolve(g, h))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_bar_is_an_involution(seed):
    P = lattice("boolean:3")
    f = random_incidence(P, seed)
    assert bar(bar(f)) == f


def test_bar_of_chi_on_u23():
    L = lattice("uniform:2,3")
    assert bar(characteristic_kernel(L)).top() == Poly([1, -3, 2])


def test_bar_rejects_high_degree():
    P = lattice("boolean:1")
    f = IncidencePolynomial(P, {(0, 1): Poly([0, 0, 1])})
    with pytest.raises(DegreeExceedsRank):
        bar(f)


def test_host_mismatch():
    with pytest.raises(HostMismatch):
        convolve(delta(lattice("boolean:2")), delta(lattice("boolean:3")))


@pytest.mark.parametrize("name", CORPUS)
def test_chi_is_a_kernel(name):
    assert is_kernel(characteristic_kernel(lattice(name))) == (True, None)


def test_kernel_witnesses():
    assert is_kernel(delta(lattice("boolean:2"))) == (True, None)
    assert is_kernel(zeta(lattice("boolean:2"))) == (False, (0, 3))
    with pytest.raises(KernelCheckFailed):
        kls_right(zeta(lattice("boolean:2")))


def test_chi_kernel_on_rank_one_intervals():
    L = lattice("boolean:2")
    chi = characteristic_kernel(L)
    prod = convolve(bar(chi), chi)
    for x, y in L.pairs():
        if L.rank_between(x, y) == 1:
            assert prod.entry(x, y) == 0


@pytest.mark.parametrize("name", CORPUS)
def test_kl_polynomials_match_oracle(name):
    L = lattice(name)
    M = brute(name)
    assert kl_polynomial(L).to_list() == M.top_kl()
    assert inverse_kl_polynomial(L).to_list() == M.top_inverse_kl()


@pytest.mark.parametrize("name,pq", sorted(FROZEN_KL.items()))
def test_frozen_kl_values(name, pq):
    L = lattice(name)
    assert (kl_polynomial(L).to_list(), inverse_kl_polynomial(L).to_list()) == pq


@pytest.mark.parametrize("name", ["boolean:3", "uniform:3,4", "partition:4", "uniform:4,5"])
def test_recursion_matches_chain_expansion(name):
    L = lattice(name)
    for kappa in (characteristic_kernel(L), bar(characteristic_kernel(L))):
        f, g = kls_right(kappa), kls_left(kappa)
        for x, y in L.pairs():
            assert f.entry(x, y) == kls_chain_expansion(kappa, x, y, "right")
            assert g.entry(x, y) == kls_chain_expansion(kappa, x, y, "left")


@pytest.mark.parametrize("name", ["partition:4", "uniform:3,5", "partition:5"])
def test_recursion_order_does_not_matter(name):
    kappa = characteristic_kernel(lattice(name))
    base_r, base_l = kls_right(kappa), kls_left(kappa)
    for seed in range(3):
        assert kls_right(kappa, seed=seed) == base_r
        assert kls_left(kappa, seed=seed) == base_l


@pytest.mark.parametrize("name", CORPUS)
def test_outputs_lie_in_half_rank_ring(name):
    kappa = characteristic_kernel(lattice(name))
    for f in (kls_right(kappa), kls_left(kappa), *inverse_kls(kappa)):
        assert f.in_half_rank_ring()
        assert all(f.entry(x, x) == 1 for x in range(f.host.n))


@pytest.mark.parametrize("name", ["uniform:2,3", "partition:4", "uniform:3,5"])
def test_defining_equations(name):
    kappa = characteristic_kernel(lattice(name))
    f, g = kls_right(kappa), kls_left(kappa)
    assert bar(f) == convolve(kappa, f)
    assert bar(g) == convolve(g, kappa)
    fh, gh = inverse_kls(kappa)
    kb = bar(kappa)
    assert bar(gh) == convolve(gh, kb) and bar(fh) == convolve(kb, fh)


def test_low_rank_polynomials_are_one():
    for name in ["boolean:1", "boolean:2", "uniform:2,3", "uniform:2,5"]:
        kappa = characteristic_kernel(lattice(name))
        assert kls_right(kappa).top() == 1
        assert kls_left(kappa).top() == 1


def test_inverse_of_delta():
    P = lattice("boolean:2")
    fh, gh = inverse_kls(delta(P))
    assert fh == delta(P) and gh == delta(P)


def test_inverse_kl_on_rank_two():
    # constant term of Q is |mu|; rank 2 with m atoms gives m - 1
    assert inverse_kl_polynomial(lattice("boolean:2")) == 1
    assert inverse_kl_polynomial(lattice("uniform:2,3")) == 2
    assert inverse_kl_polynomial(lattice("uniform:2,5")) == 4


@pytest.mark.parametrize("name", CORPUS)
def test_named_polynomials_have_nonnegative_coefficients(name):
    L = lattice(name)
    assert all(c >= 0 for c in kl_polynomial(L).coeffs)
    assert all(c >= 0 for c in inverse_kl_polynomial(L).coeffs)


@pytest.mark.parametrize("name", ["uniform:2,3", "partition:4", "partition:5", "uniform:3,5"])
def test_left_solution_of_chi_is_trivial_and_right_is_kl(name):
    # under f-bar = kappa f / g-bar = g kappa, the left polynomial of chi is
    # trivial and the right polynomial of chi-bar is the Mobius number, so
    # only kls_right(chi) and (-1)^rk kls_left(chi-bar) carry P and Q
    L = lattice(name)
    chi = characteristic_kernel(L)
    assert kls_left(chi).top() == 1
    assert kls_right(bar(chi)).top() == L.mobius()
    assert kls_left(bar(chi)).top() * (-1) ** L.rank == inverse_kl_polynomial(L)


def test_to_rows_layout():
    L = lattice("boolean:2")
    rows = kls_right(characteristic_kernel(L)).to_rows()
    assert rows[0] == [0, 0, 0, 1]
    assert len(rows) == len(list(L.pairs()))
