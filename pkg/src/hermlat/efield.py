"""Exact arithmetic in the ramified quadratic extension E = Q_p(u), u^2 = p*eps0.

Elements are pairs of rationals (a, b) standing for a + b*u.  Valuations are
p-adic and exact, so the number field Q(u) serves as a faithful model of the
local field for every computation done here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq, mpz

INF = math.inf

Rational = Fraction | int
_RATIONAL_TYPES = (int, Fraction, type(mpq()), type(mpz()))
_MPQ = type(mpq())


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def vp_int(n: int, p: int) -> int | float:
    """p-adic valuation of an integer (inf for 0)."""
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x: Rational, p: int) -> int | float:
    """p-adic valuation of a rational (inf for 0)."""
    if isinstance(x, int):
        return vp_int(x, p)
    if x.numerator == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def reduce_rational(x: Rational, p: int, e: int) -> Fraction:
    """Canonical representative of x modulo p^e Z_p.

    The representative has a p-power denominator and lies in [0, p^e).
    """
    num, den = int(x.numerator), int(x.denominator)
    s = 0
    while den % p == 0:
        den //= p
        s += 1
    top = s + e
    if top <= 0:
        return Fraction(0)
    mod = p**top
    c = (num * pow(den, -1, mod)) % mod
    return Fraction(c, p**s)


def is_square_mod_p(w: int, p: int) -> bool:
    w %= p
    if w == 0:
        return True
    return pow(w, (p - 1) // 2, p) == 1


def smallest_nonresidue(p: int) -> int:
    for c in range(2, p):
        if not is_square_mod_p(c, p):
            return c
    raise ValueError(f"no nonresidue mod {p}")


@dataclass(frozen=True)
class FieldConfig:
    """Parameters of E: the odd prime p and the unit eps0 with u^2 = p*eps0."""

    p: int
    eps0: int = 1

    def __post_init__(self) -> None:
        if self.p % 2 == 0 or not _is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.eps0 % self.p == 0:
            raise ValueError("eps0 must be a p-adic unit")

    @property
    def q(self) -> int:
        return self.p

    @property
    def pi(self) -> int:
        """u^2 as an integer."""
        return self.p * self.eps0

    def __call__(self, a: Rational = 0, b: Rational = 0) -> "FieldElement":
        return FieldElement(a, b, self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, 0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, 0, self)

    @property
    def u(self) -> "FieldElement":
        return FieldElement(0, 1, self)

    def u_pow(self, k: int) -> "FieldElement":
        """Exact u^k for any integer k."""
        h, r = divmod(k, 2)
        c = Fraction(self.pi) ** h
        return FieldElement(c, 0, self) if r == 0 else FieldElement(0, c, self)

    def to_json(self) -> dict:
        return {"p": self.p, "eps0": self.eps0}

    @classmethod
    def from_json(cls, d: dict) -> "FieldConfig":
        return cls(int(d["p"]), int(d.get("eps0", 1)))

    def unit_classes(self) -> tuple[int, int]:
        """Representatives 1 and a nonresidue of O_F^x / (O_F^x)^2."""
        return (1, smallest_nonresidue(self.p))


def _to_mpq(x) -> "mpq":
    if isinstance(x, Fraction):
        return mpq(int(x.numerator), int(x.denominator))
    return mpq(x)


class FieldElement:
    __slots__ = ("a", "b", "cfg")

    # coordinates are stored as gmpy2 rationals, which compare and hash like Fractions
    def __init__(self, a: Rational, b: Rational, cfg: FieldConfig):
        self.a = a if type(a) is _MPQ else _to_mpq(a)
        self.b = b if type(b) is _MPQ else _to_mpq(b)
        self.cfg = cfg

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.cfg is not self.cfg and other.cfg != self.cfg:
                raise ValueError("field configurations differ")
            return other
        if isinstance(other, _RATIONAL_TYPES):
            return FieldElement(other, 0, self.cfg)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a + o.a, self.b + o.b, self.cfg)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.a - o.a, self.b - o.b, self.cfg)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.cfg)

    def __mul__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return FieldElement(self.a * other, self.b * other, self.cfg)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.a, self.b, o.a, o.b
        return FieldElement(a * c + b * d * self.cfg.pi, a * d + b * c, self.cfg)

    __rmul__ = __mul__

    def inv(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in E")
        return FieldElement(self.a / n, -self.b / n, self.cfg)

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            if other == 0:
                raise ZeroDivisionError("division by zero in E")
            return FieldElement(self.a / other, self.b / other, self.cfg)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        r = self.cfg.one
        base = self
        while k:
            if k & 1:
                r = r * base
            base = base * base
            k >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.a == other.a and self.b == other.b and (self.cfg is other.cfg or self.cfg == other.cfg)
        if isinstance(other, _RATIONAL_TYPES):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        if self.a == 0:
            return f"{self.b}*u"
        return f"({self.a} + {self.b}*u)"

    def conj(self) -> "FieldElement":
        return FieldElement(self.a, -self.b, self.cfg)

    def norm(self) -> Fraction:
        return self.a * self.a - self.cfg.pi * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def val(self) -> int | float:
        """Normalized valuation with val(u) = 1."""
        p = self.cfg.p
        va = vp(self.a, p)
        vb = vp(self.b, p)
        return min(2 * va, 2 * vb + 1)

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        return self.val() >= 0

    def reduce(self, k: int) -> "FieldElement":
        """Canonical representative modulo u^k O_E."""
        p = self.cfg.p
        return FieldElement(
            reduce_rational(self.a, p, (k + 1) // 2),
            reduce_rational(self.b, p, k // 2),
            self.cfg,
        )

    def to_json(self) -> list[str]:
        return [frac_str(self.a), frac_str(self.b)]


def frac_str(x: Rational) -> str:
    x = Fraction(int(x.numerator), int(x.denominator))
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise ValueError(f"cannot parse rational from {s!r}")


def elem_from_json(obj, cfg: FieldConfig) -> FieldElement:
    if isinstance(obj, (int, str)):
        return FieldElement(parse_frac(obj), 0, cfg)
    if isinstance(obj, list) and len(obj) == 2:
        return FieldElement(parse_frac(obj[0]), parse_frac(obj[1]), cfg)
    raise ValueError(f"bad field element {obj!r}")


# Free-function forms of the element operations.

def conj(x: FieldElement) -> FieldElement:
    return x.conj()


def val_E(x: FieldElement) -> int | float:
    return x.val()


def norm(x: FieldElement) -> Fraction:
    return x.norm()


def trace(x: FieldElement) -> Fraction:
    return x.trace()


def inv(x: FieldElement) -> FieldElement:
    return x.inv()


def is_norm(t: Rational, cfg: FieldConfig) -> bool:
    """Whether the nonzero rational t is a norm from E^x."""
    t = Fraction(t)
    if t == 0:
        raise ValueError("is_norm is undefined at 0")
    p = cfg.p
    k = vp(t, p)
    w = t / Fraction(p) ** k
    wi = w.numerator * pow(w.denominator, -1, p)
    if k % 2 == 0:
        return is_square_mod_p(wi, p)
    return is_square_mod_p(wi * pow(-cfg.eps0, -1, p), p)


# Matrices are lists of rows of FieldElements.

Matrix = list[list[FieldElement]]


def mat_shape(m: Sequence[Sequence]) -> tuple[int, int]:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if any(len(r) != cols for r in m):
        raise ValueError("ragged matrix")
    return rows, cols


def conj_transpose(m: Matrix) -> Matrix:
    r, c = mat_shape(m)
    return [[m[i][j].conj() for i in range(r)] for j in range(c)]


def transpose(m: Matrix) -> Matrix:
    r, c = mat_shape(m)
    return [[m[i][j] for i in range(r)] for j in range(c)]


def mat_mul(x: Matrix, y: Matrix) -> Matrix:
    r, k = mat_shape(x)
    k2, c = mat_shape(y)
    if k != k2:
        raise ValueError("dimension mismatch in product")
    cfg = x[0][0].cfg
    out = []
    for i in range(r):
        row = []
        for j in range(c):
            s = cfg.zero
            for t in range(k):
                s = s + x[i][t] * y[t][j]
            row.append(s)
        out.append(row)
    return out


def hermitian_check(m: Matrix) -> bool:
    r, c = mat_shape(m)
    if r != c:
        raise ValueError("hermitian_check needs a square matrix")
    return all(m[i][j] == m[j][i].conj() for i in range(r) for j in range(r))


def det(m: Matrix) -> FieldElement:
    r, c = mat_shape(m)
    if r != c:
        raise ValueError("det needs a square matrix")
    if r == 0:
        raise ValueError("empty matrix")
    cfg = m[0][0].cfg
    a = [list(row) for row in m]
    d = cfg.one
    for col in range(r):
        piv = next((i for i in range(col, r) if a[i][col]), None)
        if piv is None:
            return cfg.zero
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            d = -d
        d = d * a[col][col]
        pinv = a[col][col].inv()
        for i in range(col + 1, r):
            if a[i][col]:
                f = a[i][col] * pinv
                a[i] = [a[i][j] - f * a[col][j] for j in range(r)]
    return d


def mat_inv(m: Matrix) -> Matrix:
    r, c = mat_shape(m)
    if r != c:
        raise ValueError("inverse needs a square matrix")
    cfg = m[0][0].cfg
    a = [list(row) + [cfg.one if i == j else cfg.zero for j in range(r)] for i, row in enumerate(m)]
    for col in range(r):
        piv = next((i for i in range(col, r) if a[i][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        pinv = a[col][col].inv()
        a[col] = [x * pinv for x in a[col]]
        for i in range(r):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [a[i][j] - f * a[col][j] for j in range(2 * r)]
    return [row[r:] for row in a]


def minors(m: Matrix, i: int) -> list[FieldElement]:
    """All i-by-i minor determinants of m."""
    from itertools import combinations

    r, c = mat_shape(m)
    if not 1 <= i <= min(r, c):
        raise ValueError(f"minor size {i} out of range for {r}x{c}")
    out = []
    for rows in combinations(range(r), i):
        for cols in combinations(range(c), i):
            out.append(det([[m[a][b] for b in cols] for a in rows]))
    return out


def min_val(xs: Iterable[FieldElement]) -> int | float:
    return min((x.val() for x in xs), default=INF)
