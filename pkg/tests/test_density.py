import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from conftest import diag_lattice, hyperbolic_lattice
from hermlat import corpus
from hermlat.density import (
    DenPoly,
    archimedean_constant,
    aur_factor,
    b2r_at_zero,
    b2r_s,
    dden,
    dden_h,
    dden_rank2_closed,
    dden_split,
    dden_sum,
    dden_v,
    den_hs,
    int_number,
    mu,
    siegel_series,
    spherical_zeta,
    spherical_zeta_float,
    whittaker_scalar,
)
from hermlat.efield import FieldConfig
from hermlat.lattice import HermLattice, HermSpace, add_vectors
from hermlat.verify import split_pair


@pytest.mark.parametrize("t,q,expected", [(2, 3, 1), (2, 7, 1), (4, 3, -8), (6, 2, 45)])
def test_mu(t, q, expected):
    assert mu(t, q) == expected


@pytest.mark.parametrize("t", [0, 3, -2])
def test_mu_rejects(t):
    with pytest.raises(ValueError):
        mu(t, 3)


def test_den_hs_unit_line(cfg3):
    assert den_hs(diag_lattice(cfg3, 1), 1, 3) == 1 - Fraction(1, 9)


def test_den_hs_norm_p_line(cfg3):
    assert den_hs(diag_lattice(cfg3, 3), 1, 3) == Fraction(32, 27)


@pytest.mark.parametrize("r,s", [(1, 1), (1, 2), (2, 2)])
def test_den_hs_selfdual(cfg3, r, s):
    expected = Fraction(1)
    for i in range(s + 1, r + s + 1):
        expected *= 1 - Fraction(1, 3 ** (2 * i))
    assert den_hs(hyperbolic_lattice(cfg3, r), r + s, 3) == expected


def test_den_hs_rejects_small_s(cfg3):
    with pytest.raises(ValueError):
        den_hs(diag_lattice(cfg3, 1, 1), 1, 3)


def test_den_hs_non_integral_is_zero(cfg3):
    assert den_hs(diag_lattice(cfg3, Fraction(1, 3)), 1, 3) == 0


def test_siegel_series_examples(cfg3):
    assert siegel_series(diag_lattice(cfg3, 1, 1), 3).coeffs == (1, 0, -1)
    assert siegel_series(diag_lattice(cfg3, 1, 6), 3).coeffs == (1, 0, 0, 0, -1)
    assert siegel_series(diag_lattice(cfg3, Fraction(1, 3), 2), 3).is_zero()


def test_siegel_series_rejects_split(cfg3):
    with pytest.raises(ValueError):
        siegel_series(hyperbolic_lattice(cfg3), 3)


def test_q_must_match_p(cfg3):
    with pytest.raises(ValueError):
        dden(diag_lattice(cfg3, 1, 1), 5)


def test_denpoly_json_round_trip():
    P = DenPoly(3, (1, 0, -1))
    assert P.to_json() == {"q": 3, "coeffs": [1, 0, -1]}
    assert DenPoly.from_json(P.to_json()) == P
    assert P(Fraction(1, 3)) == Fraction(8, 9)


@pytest.mark.parametrize("entries,expected", [((1, 1), 2), ((1, 6), 4), ((3, 3), 12)])
def test_dden_examples(cfg3, entries, expected):
    L = diag_lattice(cfg3, *entries)
    assert dden(L, 3) == expected
    assert int_number(L, 3) == expected


def test_dden_non_integral(cfg3):
    assert dden(diag_lattice(cfg3, Fraction(1, 3), 2), 3) == 0


@pytest.mark.parametrize("b1,b2,q,expected", [(0, 0, 3, 2), (0, 0, 5, 2), (0, 2, 3, 6), (1, 1, 3, 12)])
def test_dden_rank2_closed_examples(b1, b2, q, expected):
    assert dden_rank2_closed(b1, b2, q) == expected


def test_dden_rank2_closed_rejects_order():
    with pytest.raises(ValueError):
        dden_rank2_closed(2, 1, 3)


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("b1,b2", [(0, 0), (0, 1), (1, 1), (0, 3), (2, 3)])
def test_dden_matches_closed_formula(p, b1, b2):
    for eps0 in corpus.unit_classes(p):
        cfg = FieldConfig(p, eps0)
        for beta1 in corpus.unit_classes(p):
            for beta2 in corpus.unit_classes(p):
                L = HermSpace.diagonal(cfg, [beta1 * p**b1, beta2 * p**b2]).standard_lattice()
                if L.space.is_nonsplit():
                    assert dden(L, p) == dden_rank2_closed(b1, b2, p)


@given(st.integers(0, 10**6), st.sampled_from([2, 4]))
def test_central_value_vanishes(seed, n):
    rng = corpus.rng_for(seed, "central-test")
    L = corpus.random_lattice(rng, FieldConfig(3, 1), n, 5, nonsplit=True)
    P = siegel_series(L, 3)
    assert P(1) == 0
    assert -P.derivative()(1) == dden_sum(L, 3)
    assert dden(L, 3) % 2 == 0


def test_rank2_split_is_all_horizontal(cfg3):
    sp = HermSpace.diagonal(cfg3, [1, 6])
    Lflat = HermLattice(sp, [sp.unit_vector(0)])
    for c in (1, 3, 9):
        x = tuple(c * e for e in sp.unit_vector(1))
        assert dden_v(Lflat, x, 3) == 0
        assert dden_h(Lflat, x, 3) == dden(add_vectors(Lflat, [x]), 3)


def test_split_perpendicular_unit(cfg3):
    for g in (1, 2):
        sp = HermSpace.diagonal(cfg3, [1, 1, 1, g])
        if sp.is_nonsplit():
            break
    Lflat = HermLattice(sp, [sp.unit_vector(i) for i in range(3)])
    x = sp.unit_vector(3)
    h, v = dden_split(Lflat, x, 3)
    assert h + v == dden(sp.standard_lattice(), 3)


def test_split_non_integral(cfg3):
    sp = HermSpace.diagonal(cfg3, [1, 6])
    Lflat = HermLattice(sp, [sp.unit_vector(0)])
    x = tuple(cfg3.u_pow(-3) * e for e in sp.unit_vector(1))
    assert dden_split(Lflat, x, 3) == (0, 0)


def test_split_rejects_span_vector(cfg3):
    sp = HermSpace.diagonal(cfg3, [1, 6])
    Lflat = HermLattice(sp, [sp.unit_vector(0)])
    with pytest.raises(ValueError):
        dden_split(Lflat, sp.unit_vector(0), 3)


@given(st.integers(0, 200))
def test_split_sums_to_dden(i):
    Lflat, x = split_pair(3, 1, 3, 11, i)
    h, v = dden_split(Lflat, x, 3)
    L = add_vectors(Lflat, [x])
    assert h + v == (dden(L, 3) if L.integral else 0)


def test_whittaker_scalar(cfg3):
    assert whittaker_scalar(diag_lattice(cfg3, 1, 1), 3) == Fraction(16, 9)
    assert whittaker_scalar(diag_lattice(cfg3, 1, 6), 3) == Fraction(32, 9)
    assert whittaker_scalar(diag_lattice(cfg3, Fraction(1, 3), 2), 3) == 0


def test_scalar_factors():
    assert b2r_at_zero(3, 1) == Fraction(8, 9)
    assert aur_factor(3, 1) == Fraction(1, 8)
    assert math.isclose(archimedean_constant(1), -math.pi, rel_tol=1e-12)
    assert b2r_s(3, 1, 0) == Fraction(9, 8)


@given(st.integers(2, 7), st.integers(1, 3))
def test_b2r_conventions_are_reciprocal_at_zero(q, r):
    assert b2r_s(q, r, 0) * b2r_at_zero(q, r) == 1


def test_spherical_zeta_example():
    assert spherical_zeta(3, 1, [1], Fraction(1, 3)) == Fraction(13, 6)


@pytest.mark.parametrize("t", [[3], [Fraction(1, 3)]])
def test_spherical_zeta_pole(t):
    with pytest.raises(ZeroDivisionError):
        spherical_zeta(3, 1, t, Fraction(1, 3))


@given(st.integers(1, 4), st.integers(-2, 2))
def test_spherical_zeta_float_agrees(k, sigma):
    assume(abs(sigma) != k + 1)
    # s = k + 1/2 makes q^{-s-1/2} = q^{-k-1} exact
    q = 3
    exact = spherical_zeta(q, 1, [Fraction(q) ** sigma], Fraction(1, q ** (k + 1)))
    approx = spherical_zeta_float(q, 1, [float(sigma)], k + 0.5)
    assert math.isclose(float(exact), approx, rel_tol=1e-12)
