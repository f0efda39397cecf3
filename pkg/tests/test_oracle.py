from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import diag_lattice, hyperbolic_lattice
from hermlat import corpus
from hermlat.density import den_hs
from hermlat.efield import FieldConfig
from hermlat.enumerate import integral_overlattices
from hermlat.oracle import (
    coset_count_vint,
    count_herm_homs,
    count_symplectic_isoms,
    naive_integral_overlattices,
    symplectic_isom_formula,
)
from hermlat.verify import vertex_type4


def test_hom_count_unit_level1():
    r = count_herm_homs([[1]], 1, 1, 3)
    assert r.raw_count == 24
    assert r.normalized == Fraction(8, 9)
    assert r.d == 3


def test_hom_count_unit_level2_stable():
    r = count_herm_homs([[1]], 1, 2, 3)
    assert r.raw_count == 648
    assert r.normalized == Fraction(8, 9)


def test_hom_count_norm_p_matches_den_hs(cfg3):
    r = count_herm_homs([[3]], 1, 2, 3)
    assert r.normalized == Fraction(32, 27)
    assert r.normalized == den_hs(diag_lattice(cfg3, 3), 1, 3)


@pytest.mark.parametrize("p,eps0", [(3, 1), (3, 2), (5, 1), (5, 2)])
@pytest.mark.parametrize("b", [0, 1])
@pytest.mark.parametrize("s", [1, 2])
def test_hom_count_stabilizes_to_den_hs(p, eps0, b, s):
    cfg = FieldConfig(p, eps0)
    # level 3 at p = 5 is beyond the brute-force cap
    levels = (2, 3) if p == 3 else ((1, 2) if b == 0 else (2,))
    for beta in corpus.unit_classes(p):
        expected = den_hs(diag_lattice(cfg, beta * p**b), s, p)
        values = {count_herm_homs([[beta * p**b]], s, N, p, eps0).normalized for N in levels}
        assert values == {expected}


def test_hom_count_rank2(cfg3):
    r = count_herm_homs([[1, 0], [0, 1]], 2, 1, 3)
    assert r.normalized == den_hs(diag_lattice(cfg3, 1, 1), 2, 3)


def test_hom_count_bounds():
    with pytest.raises(ValueError):
        count_herm_homs([[1]], 3, 1, 3)
    with pytest.raises(ValueError):
        count_herm_homs([[1]], 1, 4, 3)


@pytest.mark.parametrize("m,t,s,q,expected", [(2, 0, 1, 3, 24), (1, 1, 1, 3, 8), (1, 1, 1, 2, 3), (2, 0, 1, 2, 6)])
def test_symplectic_examples(m, t, s, q, expected):
    assert count_symplectic_isoms(m, t, s, q) == expected
    assert symplectic_isom_formula(m, t, s, q) == expected


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("m,t", [(1, 1), (2, 0), (2, 2), (3, 1), (3, 3)])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_symplectic_matches_formula(q, m, t, s):
    assert count_symplectic_isoms(m, t, s, q) == symplectic_isom_formula(m, t, s, q)


def test_symplectic_parity_rejected():
    with pytest.raises(ValueError):
        count_symplectic_isoms(2, 1, 1, 3)


@pytest.mark.parametrize("beta", [1, 2])
def test_coset_count_rank1_unit(cfg3, beta):
    L = diag_lattice(cfg3, beta)
    assert coset_count_vint(L, 0) == 1
    assert coset_count_vint(L, 1) == 1


def test_coset_count_rank3_unit_diagonal(cfg3):
    L = diag_lattice(cfg3, 1, 1, 1)
    assert coset_count_vint(L, 0) == 9
    assert coset_count_vint(L, 1) == 1


@given(st.integers(0, 10**6), st.sampled_from([1, 3]))
def test_coset_identity_random(seed, n):
    rng = corpus.rng_for(seed, "coset-test")
    cfg = FieldConfig(3, rng.choice([1, 2]))
    inv = [2 * rng.randrange(3) + 1 for _ in range(n)]
    while sum(inv) > 5:
        inv = [2 * rng.randrange(3) + 1 for _ in range(n)]
    model = corpus.block_space(cfg, inv, [rng.choice([1, 2]) for _ in inv])
    L = corpus.Scrambled(rng, model).lattice(range(n))
    assert coset_count_vint(L, 0) == 3 ** (n - 1) * coset_count_vint(L, 1)


def test_coset_count_needs_full_type(cfg3):
    with pytest.raises(ValueError):
        coset_count_vint(hyperbolic_lattice(cfg3), 0)


def test_naive_selfdual(cfg3):
    H = hyperbolic_lattice(cfg3)
    assert naive_integral_overlattices(H) == [H]


def test_naive_invariants_1_3(cfg3):
    assert len(naive_integral_overlattices(diag_lattice(cfg3, 1, 6))) == 2


def test_naive_type4_vertex():
    Lam = vertex_type4(3, 1, 4)
    assert naive_integral_overlattices(Lam) == integral_overlattices(Lam)


def test_naive_limit(cfg3):
    with pytest.raises(ValueError):
        naive_integral_overlattices(diag_lattice(cfg3, 27, 27), limit=100)
