"""Local densities, Siegel-series polynomials, central derivatives and the
scalar factors that accompany them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .enumerate import integral_overlattices
from .lattice import HermLattice, Vector, add_vectors, intersect_with_span


def mu(t: int, q: int) -> int:
    """prod_{i=1}^{t/2-1} (1 - q^{2i}); equal to 1 at t = 2."""
    if t < 2 or t % 2:
        raise ValueError(f"mu needs an even t >= 2, got {t}")
    out = 1
    for i in range(1, t // 2):
        out *= 1 - q ** (2 * i)
    return out


def _check_q(L: HermLattice, q: int) -> None:
    if q != L.cfg.p:
        raise ValueError(f"q={q} must equal the residue characteristic p={L.cfg.p}")


def _require_nonsplit(L: HermLattice) -> None:
    sp = L.space
    if sp.dim % 2:
        raise ValueError("ambient space must have even dimension")
    if not sp.is_nonsplit():
        raise ValueError("ambient space must be nonsplit")
    if L.rank != sp.dim:
        raise ValueError("lattice must have full rank")


def _length_over(Lp: HermLattice, L: HermLattice) -> int:
    # both integral: val = val_E(det) + rank and |L'/L| = q^{(val(L) - val(L'))/2}
    d = L.invariants.val - Lp.invariants.val
    assert d % 2 == 0
    return d // 2


def den_hs(L: HermLattice, s: int, q: int) -> Fraction:
    """Den(H_s, L) as a sum over the integral overlattices of L."""
    _check_q(L, q)
    m = L.rank
    if s < m:
        raise ValueError("s must be at least the rank of L")
    if not L.integral:
        return Fraction(0)
    total = Fraction(0)
    for Lp in integral_overlattices(L):
        size = Fraction(q) ** _length_over(Lp, L)
        term = size ** (m - 2 * s)
        lo = s - (m + Lp.invariants.t) // 2
        for i in range(lo + 1, s + 1):
            term *= 1 - Fraction(1, q ** (2 * i))
        total += term
    return total


@dataclass(frozen=True)
class DenPoly:
    """Integer polynomial in X, coefficients in ascending order."""

    q: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    eval = __call__

    def derivative(self) -> "DenPoly":
        return DenPoly(self.q, tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_json(self) -> dict:
        return {"q": self.q, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, d: dict) -> "DenPoly":
        return cls(int(d["q"]), tuple(int(c) for c in d["coeffs"]))


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _term_poly(length: int, t: int, q: int) -> list[int]:
    poly = [0] * (2 * length) + [1]
    for i in range(t // 2):
        poly = _poly_mul(poly, [1, 0, -(q ** (2 * i))])
    return poly


def siegel_series(boldL: HermLattice, q: int) -> DenPoly:
    """Den(X, L) = sum over integral L' of X^{2 len(L'/L)} prod_{i<t/2} (1 - q^{2i} X^2)."""
    _check_q(boldL, q)
    _require_nonsplit(boldL)
    if not boldL.integral:
        return DenPoly(q, ())
    acc: list[int] = []
    for Lp in integral_overlattices(boldL):
        tp = _term_poly(_length_over(Lp, boldL), Lp.invariants.t, q)
        if len(tp) > len(acc):
            acc += [0] * (len(tp) - len(acc))
        for i, c in enumerate(tp):
            acc[i] += c
    return DenPoly(q, tuple(acc))


def dden_sum(boldL: HermLattice, q: int) -> int:
    """2 * sum of mu(t(L')) over integral overlattices."""
    _check_q(boldL, q)
    _require_nonsplit(boldL)
    if not boldL.integral:
        return 0
    return 2 * sum(mu(Lp.invariants.t, q) for Lp in integral_overlattices(boldL))


def dden(boldL: HermLattice, q: int) -> int:
    """Central derivative -d/dX Den(X, L) at X = 1, cross-checked two ways."""
    poly = siegel_series(boldL, q)
    from_poly = -poly.derivative()(1)
    direct = dden_sum(boldL, q)
    if from_poly != direct:
        raise ArithmeticError(f"derivative {from_poly} disagrees with mu-sum {direct}")
    return direct


def int_number(boldL: HermLattice, q: int) -> int:
    """Intersection number, evaluated analytically as the central derivative."""
    return dden(boldL, q)


def dden_rank2_closed(b1: int, b2: int, q: int) -> int:
    if not 0 <= b1 <= b2:
        raise ValueError("need 0 <= b1 <= b2")
    total = 0
    for j in range(b1 + 1):
        total += sum(q**k for k in range(j + 1)) + (b2 - j) * q**j
    return 2 * total


def dden_split(Lflat: HermLattice, x: Vector, q: int) -> tuple[int, int]:
    """(horizontal, vertical) parts of the central derivative of Lflat + <x>."""
    _check_q(Lflat, q)
    if Lflat.in_span(x):
        raise ValueError("x lies in the span of Lflat")
    L = add_vectors(Lflat, [x])
    _require_nonsplit(L)
    if not L.integral:
        return 0, 0
    W = list(Lflat.basis)
    h = v = 0
    for Lp in integral_overlattices(L):
        term = 2 * mu(Lp.invariants.t, q)
        if intersect_with_span(Lp, W).invariants.t == 1:
            h += term
        else:
            v += term
    return h, v


def dden_h(Lflat: HermLattice, x: Vector, q: int) -> int:
    return dden_split(Lflat, x, q)[0]


def dden_v(Lflat: HermLattice, x: Vector, q: int) -> int:
    return dden_split(Lflat, x, q)[1]


def b2r_at_zero(q: int, r: int) -> Fraction:
    out = Fraction(1)
    for i in range(1, r + 1):
        out *= 1 - Fraction(1, q ** (2 * i))
    return out


def whittaker_scalar(boldL: HermLattice, q: int) -> Fraction:
    """Coefficient of log q in the derivative of the Whittaker function at 0."""
    r = boldL.space.dim // 2
    return dden(boldL, q) * b2r_at_zero(q, r)


def _qpow(q: int, e: Fraction) -> Fraction:
    if e.denominator != 1:
        raise ValueError("exponent must be an integer for an exact value")
    return Fraction(q) ** int(e)


def b2r_s(q: int, r: int, s) -> Fraction:
    """prod_{i=1}^r 1 / (1 - q^{-2s-2i}); 2s must be an integer."""
    s = Fraction(s)
    out = Fraction(1)
    for i in range(1, r + 1):
        f = 1 - _qpow(q, -2 * s - 2 * i)
        if f == 0:
            raise ZeroDivisionError("pole of b_2r")
        out /= f
    return out


def aur_factor(q: int, r: int) -> Fraction:
    return Fraction(q ** (r - 1) * (q + 1), (q ** (2 * r - 1) + 1) * (q ** (2 * r) - 1))


def archimedean_constant(r: int) -> float:
    return (-1) ** r * 2.0 ** (r * (r - 1)) * math.pi ** (r * r)


def spherical_zeta(q: int, r: int, t: Sequence, x) -> Fraction:
    """L^sigma(s + 1/2) / b_2r(s) with t_i = q^{sigma_i} and x = q^{-s-1/2}.

    Since q^{-2s} = q * x^2, everything stays rational.
    """
    if len(t) != r:
        raise ValueError("need r Satake parameters")
    x = Fraction(x)
    out = Fraction(1)
    for ti in t:
        ti = Fraction(ti)
        if ti == 0:
            raise ValueError("Satake parameters must be nonzero")
        d = (1 - ti * x) * (1 - x / ti)
        if d == 0:
            raise ZeroDivisionError("pole of the L-factor")
        out /= d
    q2s = q * x * x
    for i in range(1, r + 1):
        out *= 1 - q2s / Fraction(q) ** (2 * i)
    return out


def spherical_zeta_float(q: int, r: int, sigma: Sequence[float], s: float) -> float:
    """Floating-point version for arbitrary real s and sigma."""
    out = 1.0
    for sg in sigma:
        d = (1 - q ** (sg - s - 0.5)) * (1 - q ** (-sg - s - 0.5))
        if d == 0:
            raise ZeroDivisionError("pole of the L-factor")
        out /= d
    for i in range(1, r + 1):
        out *= 1 - q ** (-2 * s - 2 * i)
    return out
