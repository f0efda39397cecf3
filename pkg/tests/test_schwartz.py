from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import diag_lattice, hyperbolic_lattice
from hermlat import corpus
from hermlat.density import dden_v
from hermlat.efield import FieldConfig
from hermlat.enumerate import Corank1Frame, vertex_overlattices
from hermlat.lattice import HermLattice, HermSpace, add_vectors, dual, rescale, vaxpy
from hermlat.schwartz import (
    LatticeFunction,
    dden_v_direct,
    dden_v_function,
    evaluate,
    fourier,
    int_vlambda_function,
    local_constancy_check,
    support_outside_vint,
    volume,
)
from hermlat.verify import ft_lattice, vertex_type4


def round_trip(f: LatticeFunction) -> LatticeFunction:
    """Copy through JSON so no cached duals are reused."""
    return LatticeFunction.from_json(f.to_json()) if f else f


def nonsplit4(cfg, entries):
    for g in (1, 2):
        sp = HermSpace.diagonal(cfg, list(entries) + [g])
        if sp.is_nonsplit():
            return sp
    raise AssertionError


def test_evaluate_indicator(cfg3):
    L = diag_lattice(cfg3, 1, 1)
    f = LatticeFunction.indicator(L)
    assert evaluate(f, L.basis[0]) == 1
    assert evaluate(f, tuple(cfg3.u.inv() * c for c in L.basis[0])) == 0


def test_cancelling_terms(cfg3):
    L = diag_lattice(cfg3, 1, 1)
    f = LatticeFunction.indicator(L, 2) - LatticeFunction.indicator(L, 2)
    assert len(f) == 0 and not f
    assert evaluate(f, L.basis[0]) == 0


def test_ambient_mismatch(cfg3):
    f = LatticeFunction.indicator(diag_lattice(cfg3, 1, 1))
    with pytest.raises(ValueError):
        evaluate(f, (cfg3.one,))


@pytest.mark.parametrize("s", [1, 2])
def test_volume_hyperbolic(cfg3, s):
    H = hyperbolic_lattice(cfg3, s)
    assert volume(H) == 1
    assert volume(rescale(H, cfg3.u)) == Fraction(1, 3 ** (2 * s))


def test_volume_diag_units(cfg3):
    assert volume(diag_lattice(cfg3, 1, 1)) == Fraction(1, 3)


@given(st.integers(0, 10**6), st.sampled_from([2, 4]))
def test_volume_laws(seed, n):
    rng = corpus.rng_for(seed, "volume")
    L = corpus.random_lattice(rng, FieldConfig(3, 1), n, 5)
    D = dual(L)
    q = 3
    assert volume(L) * volume(D) == 1
    assert volume(D) == volume(L) * index_of(L, D)
    assert volume(rescale(L, L.cfg.u)) == volume(L) / q**n


def index_of(small: HermLattice, big: HermLattice) -> int:
    """|big / small| by listing coset representatives."""
    from hermlat.oracle import _all_quotient_elements

    return len(_all_quotient_elements(big, small))


def test_fourier_of_selfdual(cfg3):
    H = hyperbolic_lattice(cfg3)
    assert fourier(LatticeFunction.indicator(H)).same_terms(LatticeFunction.indicator(H))


def test_fourier_of_diag_units(cfg3):
    L = diag_lattice(cfg3, 1, 1)
    f = LatticeFunction.indicator(L)
    expected = LatticeFunction.indicator(rescale(L, cfg3.u.inv()), Fraction(1, 3))
    assert fourier(f).same_terms(expected)
    assert round_trip(fourier(round_trip(fourier(f)))).same_terms(f)


@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(-3, 3), st.integers(-3, 3))
def test_fourier_linear_and_involutive(seed, a, b, k):
    rng = corpus.rng_for(seed, "fourier")
    cfg = FieldConfig(3, 1)
    L = corpus.random_lattice(rng, cfg, 2, 5)
    M = rescale(L, cfg.u_pow(k % 3))
    f = LatticeFunction.indicator(L)
    g = LatticeFunction.indicator(M)
    combo = f.scale(a) + g.scale(b)
    assert fourier(combo).same_terms(fourier(f).scale(a) + fourier(g).scale(b))
    assert fourier(round_trip(fourier(combo))).same_terms(combo)


def test_json_shape(cfg3):
    f = LatticeFunction.indicator(diag_lattice(cfg3, 1, 1), Fraction(-2, 3))
    d = f.to_json()
    assert d["terms"][0]["coef"] == "-2/3"
    assert round_trip(f).same_terms(f)


def test_dden_v_function_trivial_cases(cfg3):
    sp = nonsplit4(cfg3, [1])
    assert not dden_v_function(HermLattice(sp, [sp.unit_vector(0)]))
    sp4 = nonsplit4(cfg3, [Fraction(1, 3), 1, 1])
    assert not dden_v_function(HermLattice(sp4, [sp4.unit_vector(i) for i in range(3)]))


@pytest.mark.parametrize("i", range(4))
def test_dden_v_function_matches_pointwise(i):
    Lflat, _ = ft_lattice(3, 1, 4, 5, 2 * i)
    f = dden_v_function(Lflat)
    rng = corpus.rng_for(i, "pointwise")
    frame = Corank1Frame(Lflat)
    pair = corpus.CorankOnePair(Lflat, frame.w0)
    for _ in range(6):
        x = corpus.random_vector_near(rng, pair, lam_vals=(-1, 0, 1, 2, 3))
        assert evaluate(f, x) == dden_v_direct(Lflat, x)
        L = add_vectors(Lflat, [x])
        assert dden_v_direct(Lflat, x) == (dden_v(Lflat, x, 3) if L.integral else 0)


def test_support_zero_function(cfg3):
    assert support_outside_vint(LatticeFunction.zero(diag_lattice(cfg3, 1, 1).space)) is None


def test_support_witness_for_inflated_lattice(cfg3):
    L = rescale(diag_lattice(cfg3, 1, 1), cfg3.u.inv())
    z = support_outside_vint(LatticeFunction.indicator(L))
    assert z is not None
    assert L.contains_vector(z)
    assert L.space.pair(z, z).val() < 0


@pytest.mark.parametrize("i", range(3))
def test_fourier_of_vertical_function_supported_in_vint(i):
    Lflat, _ = ft_lattice(3, 1, 4, 9, 2 * i)
    f = dden_v_function(Lflat)
    assert support_outside_vint(fourier(f), direction=Corank1Frame(Lflat).w0) is None


def test_int_vlambda_values(cfg3):
    Lam = vertex_type4(3, 1, 0)
    f = int_vlambda_function(Lam)
    q = 3
    assert evaluate(f, Lam.basis[0]) == 1 - q
    proper = [L for L in vertex_overlattices(Lam) if L != Lam]
    for L in proper:
        x = next(v for v in L.basis if not Lam.contains_vector(v))
        assert add_vectors(Lam, [x]).integral
        assert evaluate(f, x) == 1
    far = tuple(cfg3.u.inv() * c for c in Lam.dual.basis[0])
    assert not add_vectors(Lam, [far]).integral
    assert evaluate(f, far) == 0


@pytest.mark.parametrize("p", [3, 5])
def test_int_vlambda_fourier_is_negation(p):
    Lam = vertex_type4(p, 1, 2)
    f = int_vlambda_function(Lam)
    ff = fourier(f)
    assert ff == f.scale(-1)
    # value on Lambda^dual minus the proper overlattices, read off the transform
    x = next(v for v in Lam.dual.basis if not any(L.contains_vector(v) for L in vertex_overlattices(Lam)))
    assert evaluate(ff, x) == 0


def test_int_vlambda_rejects_wrong_input(cfg3):
    with pytest.raises(ValueError):
        int_vlambda_function(diag_lattice(cfg3, 1, 1))


def test_constancy_trivial_cases(cfg3):
    sp = nonsplit4(cfg3, [1])
    assert local_constancy_check(HermLattice(sp, [sp.unit_vector(0)]), sp.zero_vector())
    sp4 = nonsplit4(cfg3, [1, 3, 3])
    Lflat = HermLattice(sp4, [sp4.unit_vector(i) for i in range(3)])
    y = tuple(cfg3.u_pow(-3) * c for c in sp4.unit_vector(2))
    assert local_constancy_check(Lflat, y)
    x = vaxpy(cfg3.u_pow(5), sp4.unit_vector(3), y)
    assert dden_v_direct(Lflat, x) == 0


@pytest.mark.parametrize("i", range(3))
def test_constancy_beyond_threshold(i):
    Lflat, y = ft_lattice(3, 1, 4, 13, 2 * i)
    assert local_constancy_check(Lflat, y)


def test_odd_rank_volume_is_irrational(cfg3):
    with pytest.raises(ValueError):
        volume(diag_lattice(cfg3, 1))
