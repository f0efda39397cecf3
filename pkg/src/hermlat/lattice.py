"""Hermitian spaces and O_E-lattices inside them.

The pairing is linear in the first argument and conjugate-linear in the second.
A lattice is stored as a list of column vectors; equality of lattices is decided
by an O_E Hermite form computed on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .efield import (
    INF,
    vp,
    FieldConfig,
    FieldElement,
    Matrix,
    det,
    elem_from_json,
    hermitian_check,
    is_norm,
    mat_inv,
    min_val,
    minors,
)

Vector = tuple[FieldElement, ...]


def vec(cfg: FieldConfig, *entries) -> Vector:
    return tuple(e if isinstance(e, FieldElement) else cfg(e) for e in entries)


def vadd(x: Vector, y: Vector) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Vector, y: Vector) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def vscale(c, x: Vector) -> Vector:
    return tuple(c * a for a in x)


def vaxpy(c, x: Vector, y: Vector) -> Vector:
    """y + c*x"""
    return tuple(b + c * a for a, b in zip(x, y))


def is_zero_vec(x: Vector) -> bool:
    return not any(x)


class HermSpace:
    """A nondegenerate hermitian space E^n with a fixed Gram matrix."""

    def __init__(self, cfg: FieldConfig, gram: Sequence[Sequence]):
        self.cfg = cfg
        g = [[e if isinstance(e, FieldElement) else cfg(e) for e in row] for row in gram]
        n = len(g)
        if n == 0 or any(len(r) != n for r in g):
            raise ValueError("gram must be a nonempty square matrix")
        if not hermitian_check(g):
            raise ValueError("gram is not hermitian")
        if not det(g):
            raise ValueError("gram is degenerate")
        self.gram = tuple(tuple(r) for r in g)
        self.dim = n
        self._conj_gram = tuple(tuple(e.conj() for e in r) for r in g)

    def __eq__(self, other):
        return isinstance(other, HermSpace) and self.cfg == other.cfg and self.gram == other.gram

    def __hash__(self):
        return hash((self.cfg, self.gram))

    def __repr__(self):
        return f"HermSpace(p={self.cfg.p}, eps0={self.cfg.eps0}, dim={self.dim})"

    def pair(self, x: Vector, y: Vector) -> FieldElement:
        """(x, y) = x^T G conj(y)."""
        n = self.dim
        s = self.cfg.zero
        for i in range(n):
            xi = x[i]
            if not xi:
                continue
            row = self.gram[i]
            acc = self.cfg.zero
            for j in range(n):
                yj = y[j]
                if yj and row[j]:
                    acc = acc + row[j] * yj.conj()
            s = s + xi * acc
        return s

    def norm_of(self, x: Vector) -> Fraction:
        """(x, x), a rational."""
        return self.pair(x, x).a

    def zero_vector(self) -> Vector:
        return tuple(self.cfg.zero for _ in range(self.dim))

    def unit_vector(self, i: int) -> Vector:
        cfg = self.cfg
        return tuple(cfg.one if j == i else cfg.zero for j in range(self.dim))

    def standard_lattice(self) -> "HermLattice":
        return HermLattice(self, [self.unit_vector(i) for i in range(self.dim)])

    def is_nonsplit(self) -> bool:
        return is_nonsplit(self)

    @cached_property
    def det_val(self) -> int:
        """val_E of the determinant of the Gram matrix."""
        return int(det([list(r) for r in self.gram]).val())

    def to_json(self) -> dict:
        return {
            "p": self.cfg.p,
            "eps0": self.cfg.eps0,
            "gram": [[e.to_json() for e in row] for row in self.gram],
        }

    @classmethod
    def from_json(cls, d: dict) -> "HermSpace":
        cfg = FieldConfig.from_json(d)
        gram = [[elem_from_json(e, cfg) for e in row] for row in d["gram"]]
        return cls(cfg, gram)

    @classmethod
    def hyperbolic(cls, cfg: FieldConfig, s: int) -> "HermSpace":
        """H_s: s orthogonal copies of [[0, 1/u], [-1/u, 0]]."""
        ui = cfg.u.inv()
        n = 2 * s
        g = [[cfg.zero] * n for _ in range(n)]
        for k in range(s):
            g[2 * k][2 * k + 1] = ui
            g[2 * k + 1][2 * k] = -ui
        return cls(cfg, g)

    @classmethod
    def diagonal(cls, cfg: FieldConfig, entries: Iterable) -> "HermSpace":
        ent = [e if isinstance(e, FieldElement) else cfg(e) for e in entries]
        n = len(ent)
        g = [[ent[i] if i == j else cfg.zero for j in range(n)] for i in range(n)]
        return cls(cfg, g)

    @classmethod
    def block_diagonal(cls, cfg: FieldConfig, blocks: Sequence[Matrix]) -> "HermSpace":
        n = sum(len(b) for b in blocks)
        g = [[cfg.zero] * n for _ in range(n)]
        off = 0
        for b in blocks:
            k = len(b)
            for i in range(k):
                for j in range(k):
                    e = b[i][j]
                    g[off + i][off + j] = e if isinstance(e, FieldElement) else cfg(e)
            off += k
        return cls(cfg, g)


def is_nonsplit(space: HermSpace) -> bool:
    n = space.dim
    if n % 2:
        raise ValueError("split/nonsplit is only defined for even dimension")
    d = det([list(r) for r in space.gram])
    return not is_norm((-1) ** (n // 2) * d.a, space.cfg)


# ---------------------------------------------------------------------------
# Hermite form over O_E


def hermite_form(gens: Iterable[Vector], n: int, cfg: FieldConfig):
    """Column Hermite form of the O_E-module generated by gens.

    Returns (columns, pivots) where pivots[k] = (row, exponent) and the k-th
    column has entry exactly u^exponent at its pivot row, zeros at earlier pivot
    rows, and reduced residues at the pivot rows of later columns.
    """
    cols = [list(v) for v in gens if any(v)]
    out: list[list[FieldElement]] = []
    pivots: list[tuple[int, int]] = []
    for r in range(n):
        best = None
        bv = INF
        for idx, c in enumerate(cols):
            x = c[r]
            if x:
                v = x.val()
                if v < bv:
                    bv, best = v, idx
        if best is None:
            continue
        k = int(bv)
        piv = cols.pop(best)
        uk = cfg.u_pow(k)
        s = uk / piv[r]
        piv = [x * s if x else x for x in piv]
        piv[r] = uk
        uk_inv = cfg.u_pow(-k)
        nxt = []
        for c in cols:
            x = c[r]
            if x:
                f = x * uk_inv
                c = [c[i] - f * piv[i] if piv[i] else c[i] for i in range(n)]
                c[r] = cfg.zero
            if any(c):
                nxt.append(c)
        cols = nxt
        for pc in out:
            x = pc[r]
            rep = x.reduce(k)
            if rep != x:
                f = (x - rep) * uk_inv
                for i in range(n):
                    if piv[i]:
                        pc[i] = pc[i] - f * piv[i]
                pc[r] = rep
        out.append(piv)
        pivots.append((r, k))
    return [tuple(c) for c in out], pivots


class HermLattice:
    """An O_E-lattice in a hermitian space, full rank in its E-span."""

    def __init__(self, space: HermSpace, basis: Sequence[Sequence]):
        cfg = space.cfg
        cols = []
        for v in basis:
            if len(v) != space.dim:
                raise ValueError("basis vector has wrong length")
            cols.append(tuple(e if isinstance(e, FieldElement) else cfg(e) for e in v))
        self.space = space
        self.basis: tuple[Vector, ...] = tuple(cols)
        hf = hermite_form(self.basis, space.dim, cfg)
        if len(hf[0]) != len(self.basis):
            raise ValueError("basis vectors are not linearly independent")
        self.__dict__["_hermite"] = hf

    @classmethod
    def generated_by(cls, space: HermSpace, gens: Iterable[Vector]) -> "HermLattice":
        cols, _ = hermite_form(list(gens), space.dim, space.cfg)
        lat = cls.__new__(cls)
        lat.space = space
        lat.basis = tuple(cols)
        lat.__dict__["_hermite"] = (lat.basis, _)
        return lat

    @property
    def cfg(self) -> FieldConfig:
        return self.space.cfg

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def _hermite(self):
        return hermite_form(self.basis, self.space.dim, self.cfg)

    @property
    def canonical_basis(self) -> tuple[Vector, ...]:
        return self._hermite[0]

    @cached_property
    def key(self) -> tuple:
        return tuple((x.a, x.b) for c in self.canonical_basis for x in c)

    def __eq__(self, other):
        if not isinstance(other, HermLattice):
            return NotImplemented
        return self.space == other.space and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"HermLattice(rank={self.rank}, gram={self.gram})"

    def sort_key(self) -> tuple:
        return tuple((x.a, x.b) for c in self.canonical_basis for x in c)

    @cached_property
    def gram(self) -> tuple[tuple[FieldElement, ...], ...]:
        b = self.basis
        sp = self.space
        m = len(b)
        rows = [[None] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                v = sp.pair(b[i], b[j])
                rows[i][j] = v
                rows[j][i] = v.conj()
        return tuple(tuple(r) for r in rows)

    # membership -----------------------------------------------------------

    def _reduce(self, x: Vector) -> tuple[Vector, bool]:
        """Reduce x by the Hermite basis; returns (residue, stayed_integral)."""
        cols, pivots = self._hermite
        cfg = self.cfg
        x = list(x)
        ok = True
        n = self.space.dim
        for col, (r, k) in zip(cols, pivots):
            xr = x[r]
            if not xr:
                continue
            c = xr * cfg.u_pow(-k)
            if c.val() < 0:
                ok = False
                c = (xr - xr.reduce(k)) * cfg.u_pow(-k)
            for i in range(n):
                if col[i]:
                    x[i] = x[i] - c * col[i]
        return tuple(x), ok

    def contains_vector(self, x: Vector) -> bool:
        res, ok = self._reduce(x)
        return ok and is_zero_vec(res)

    def coset_rep(self, x: Vector) -> Vector:
        """Canonical representative of x + L (for x in the span of L)."""
        res, _ = self._reduce(x)
        return res

    def in_span(self, x: Vector) -> bool:
        cols, pivots = self._hermite
        cfg = self.cfg
        x = list(x)
        n = self.space.dim
        for col, (r, k) in zip(cols, pivots):
            xr = x[r]
            if xr:
                c = xr * cfg.u_pow(-k)
                for i in range(n):
                    if col[i]:
                        x[i] = x[i] - c * col[i]
        return not any(x)

    def contains(self, other: "HermLattice") -> bool:
        return all(self.contains_vector(v) for v in other.basis)

    # structure --------------------------------------------------------------

    @cached_property
    def dual(self) -> "HermLattice":
        D = dual(self)
        if D is not self:
            D.__dict__.setdefault("dual", self)
        return D

    @cached_property
    def normal(self) -> "NormalBasis":
        return normal_basis(self)

    @cached_property
    def invariants(self) -> "Invariants":
        return fundamental_invariants(self)

    @cached_property
    def integral(self) -> bool:
        return is_integral(self)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "basis": [[e.to_json() for e in v] for v in self.basis],
        }

    @classmethod
    def from_json(cls, d: dict) -> "HermLattice":
        space = HermSpace.from_json(d["space"])
        if d.get("basis") is None:
            return space.standard_lattice()
        cfg = space.cfg
        basis = [tuple(elem_from_json(e, cfg) for e in v) for v in d["basis"]]
        return cls(space, basis)


# ---------------------------------------------------------------------------
# Gram matrices, duals, invariants


def moment_matrix(space: HermSpace, xs: Sequence[Vector]) -> Matrix:
    return [[space.pair(a, b) for b in xs] for a in xs]


def gram_of(L: HermLattice) -> Matrix:
    return [list(r) for r in L.gram]


def val_of_vector(space: HermSpace, x: Vector) -> int:
    nx = space.pair(x, x)
    if not nx:
        raise ValueError("val of an isotropic vector is undefined")
    return int(nx.val()) + 1


def v_int_test(space: HermSpace, x: Vector) -> bool:
    return space.pair(x, x).val() >= 0


def dual(L: HermLattice) -> HermLattice:
    """Vectors of span(L) pairing into u^-1 O_E against every vector of L."""
    T = gram_of(L)
    if not T:
        return L
    try:
        Ti = mat_inv(T)
    except ZeroDivisionError:
        raise ValueError("restricted form is degenerate") from None
    cfg = L.cfg
    ui = cfg.u.inv()
    m = len(T)
    n = L.space.dim
    # d_i = sum_k c_ik b_k with C = u^-1 T^-1
    out = []
    for i in range(m):
        v = [cfg.zero] * n
        for k in range(m):
            c = ui * Ti[i][k]
            if c:
                bk = L.basis[k]
                for t in range(n):
                    if bk[t]:
                        v[t] = v[t] + c * bk[t]
        out.append(tuple(v))
    return HermLattice(L.space, out)


@dataclass(frozen=True)
class Invariants:
    a: tuple[int, ...]

    @property
    def t(self) -> int:
        return sum(1 for x in self.a if x != 0)

    @property
    def val(self) -> int:
        return sum(self.a)

    @property
    def rank(self) -> int:
        return len(self.a)

    @property
    def amax(self) -> int:
        return max(self.a, default=0)

    def to_json(self) -> dict:
        return {"a": list(self.a), "t": self.t, "val": self.val}


@dataclass(frozen=True)
class Block:
    """One Jordan block of a normal basis.

    kind 1: a single vector e with (e, e) = beta * u^(2b).
    kind 2: a pair (e, f) with (e, f) = u^(2c-1) and (e, e), (f, f) in u^(2c) O_F.
    """

    kind: int
    indices: tuple[int, ...]
    exponent: int  # b for kind 1, c for kind 2
    beta: Fraction | None = None

    @property
    def invariants(self) -> tuple[int, ...]:
        if self.kind == 1:
            return (2 * self.exponent + 1,)
        return (2 * self.exponent, 2 * self.exponent)


@dataclass(frozen=True)
class NormalBasis:
    basis: tuple[Vector, ...]
    blocks: tuple[Block, ...]

    def invariant_of_index(self) -> list[int]:
        out = [0] * len(self.basis)
        for b in self.blocks:
            for i, a in zip(b.indices, b.invariants):
                out[i] = a
        return out


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    from math import isqrt

    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _clear_block_diagonal(space: HermSpace, e: Vector, f: Vector, t: FieldElement):
    """Try to make (e,e) = (f,f) = 0 while keeping (e,f) = t = u^odd.

    Succeeds when one diagonal entry already vanishes or when a rational
    isotropic combination exists; otherwise the pair is returned unchanged.
    """
    a = space.norm_of(e)
    b = space.norm_of(f)
    if a != 0 and b != 0:
        # t is a pure u-multiple, so (e + x f, e + x f) = a + x^2 b for rational x
        x = _rational_sqrt(-a / b)
        if x is not None:
            if vp(x, space.cfg.p) >= 0:
                e = vaxpy(x, f, e)
                a = Fraction(0)
            else:
                f = vaxpy(1 / x, e, f)
                b = Fraction(0)
    if a != 0 and b == 0:
        # (e + x f, e + x f) = a + Tr(x conj t)
        x = (-a / 2) / t.conj()
        e = vaxpy(x, f, e)
    elif b != 0 and a == 0:
        # (f + y e, f + y e) = b + Tr(y t)
        y = (-b / 2) / t
        f = vaxpy(y, e, f)
    return e, f


def normal_basis(L: HermLattice) -> NormalBasis:
    """Jordan splitting: pivot on a minimal-valuation Gram entry."""
    sp = L.space
    cfg = L.cfg
    vecs = list(L.basis)
    done: list[Vector] = []
    blocks: list[Block] = []
    while vecs:
        m = len(vecs)
        T = [[sp.pair(vecs[i], vecs[j]) for j in range(m)] for i in range(m)]
        dmin = INF
        di = None
        for i in range(m):
            v = T[i][i].val()
            if v < dmin:
                dmin, di = v, i
        omin = INF
        oij = None
        for i in range(m):
            for j in range(i + 1, m):
                v = T[i][j].val()
                if v < omin:
                    omin, oij = v, (i, j)
        if dmin == INF and omin == INF:
            raise ValueError("degenerate hermitian module")
        if dmin <= omin:
            i = di
            e = vecs[i]
            tii = T[i][i]
            rest = []
            for j in range(m):
                if j == i:
                    continue
                c = T[j][i] / tii
                rest.append(vaxpy(-c, e, vecs[j]) if c else vecs[j])
            b = int(dmin) // 2
            beta = tii.a / Fraction(cfg.pi) ** b
            blocks.append(Block(1, (len(done),), b, beta))
            done.append(e)
            vecs = rest
            continue
        i, j = oij
        if omin % 2 == 0:
            vecs[i] = vadd(vecs[i], vecs[j])
            continue
        k = int(omin)
        c = (k + 1) // 2
        e, f = vecs[i], vecs[j]
        tij = T[i][j]
        # rescale f so that (e, f) = u^k exactly: (e, lam f) = conj(lam) * tij
        lam = (cfg.u_pow(k) / tij).conj()
        f = vscale(lam, f)
        t = cfg.u_pow(k)
        e, f = _clear_block_diagonal(sp, e, f, t)
        a_ = sp.pair(e, e)
        b_ = sp.pair(f, f)
        t_ = sp.pair(e, f)
        det2 = a_ * b_ - t_ * t_.conj()
        rest = []
        for idx in range(m):
            if idx in (i, j):
                continue
            v = vecs[idx]
            p1 = sp.pair(v, e)
            p2 = sp.pair(v, f)
            # solve [x, y] G2 = [p1, p2], G2 = [[a, t], [conj t, b]]
            x = (p1 * b_ - p2 * t_.conj()) / det2
            y = (p2 * a_ - p1 * t_) / det2
            if x:
                v = vaxpy(-x, e, v)
            if y:
                v = vaxpy(-y, f, v)
            rest.append(v)
        blocks.append(Block(2, (len(done), len(done) + 1), c))
        done.extend([e, f])
        vecs = rest
    return NormalBasis(tuple(done), tuple(blocks))


def invariants_any(L: HermLattice) -> tuple[int, ...]:
    """Normal-basis exponents (2b+1 and 2c, 2c), sorted; valid for any L."""
    out: list[int] = []
    for b in L.normal.blocks:
        out.extend(b.invariants)
    return tuple(sorted(out))


def is_integral(L: HermLattice) -> bool:
    return all(a >= 0 for a in invariants_any(L))


def fundamental_invariants(L: HermLattice) -> Invariants:
    a = invariants_any(L)
    if any(x < 0 for x in a):
        raise ValueError("fundamental invariants need an integral lattice")
    return Invariants(a)


def is_vertex(L: HermLattice) -> bool:
    return L.integral and L.invariants.amax <= 1


def is_selfdual(L: HermLattice) -> bool:
    return L.integral and L.invariants.amax == 0


def lattice_val(L: HermLattice) -> int:
    """val(L) with the convention val = -1 for non-integral L."""
    return L.invariants.val if L.integral else -1


def invariants_from_minors(T: Matrix) -> tuple[int, ...]:
    """Invariants from minimal valuations of i-minors: a_1+..+a_i - i."""
    m = len(T)
    partial = [0]
    for i in range(1, m + 1):
        v = min_val(minors(T, i))
        if v == INF:
            raise ValueError("degenerate moment matrix")
        partial.append(int(v) + i)
    return tuple(partial[i] - partial[i - 1] for i in range(1, m + 1))


def smith_exponents(M: Matrix) -> tuple[int, ...]:
    """Elementary-divisor exponents of a square matrix over O_E (DVR pivoting)."""
    a = [list(r) for r in M]
    m = len(a)
    out = []
    rows = list(range(m))
    cols = list(range(m))
    while rows:
        best = None
        bv = INF
        for i in rows:
            for j in cols:
                if a[i][j]:
                    v = a[i][j].val()
                    if v < bv:
                        bv, best = v, (i, j)
        if best is None:
            raise ValueError("singular matrix")
        i0, j0 = best
        piv = a[i0][j0]
        for i in rows:
            if i != i0 and a[i][j0]:
                f = a[i][j0] / piv
                for j in cols:
                    a[i][j] = a[i][j] - f * a[i0][j]
        for j in cols:
            if j != j0 and a[i0][j]:
                f = a[i0][j] / piv
                for i in rows:
                    a[i][j] = a[i][j] - f * a[i][j0]
        out.append(int(bv))
        rows.remove(i0)
        cols.remove(j0)
    return tuple(sorted(out))


def invariants_from_quotient(L: HermLattice) -> tuple[int, ...]:
    """Elementary divisors of dual(L)/L, i.e. the Smith form of u*T."""
    T = gram_of(L)
    u = L.cfg.u
    return smith_exponents([[u * x for x in row] for row in T])


# ---------------------------------------------------------------------------
# Lattice algebra


def _check_same(*ls: HermLattice) -> None:
    sp = ls[0].space
    if any(x.space != sp for x in ls):
        raise ValueError("lattices live in different ambient spaces")


def lattice_sum(*ls: HermLattice) -> HermLattice:
    _check_same(*ls)
    gens = [v for L in ls for v in L.basis]
    return HermLattice.generated_by(ls[0].space, gens)


def add_vectors(L: HermLattice, xs: Iterable[Vector]) -> HermLattice:
    return HermLattice.generated_by(L.space, list(L.basis) + list(xs))


def project_onto(space: HermSpace, W: Sequence[Vector], x: Vector) -> Vector:
    """Orthogonal projection of x onto span(W) (W nondegenerate)."""
    T = moment_matrix(space, W)
    Ti = mat_inv(T)
    k = len(W)
    rhs = [space.pair(x, w) for w in W]
    coef = [sum((rhs[j] * Ti[j][i] for j in range(k)), space.cfg.zero) for i in range(k)]
    out = space.zero_vector()
    for c, w in zip(coef, W):
        if c:
            out = vaxpy(c, w, out)
    return out


def intersect_with_span(L: HermLattice, W: Sequence[Vector]) -> HermLattice:
    """L intersected with the nondegenerate subspace span(W); L full rank."""
    if L.rank != L.space.dim:
        raise ValueError("intersect_with_span needs a full-rank lattice")
    sp = L.space
    Ld = L.dual
    proj = [project_onto(sp, W, v) for v in Ld.basis]
    P = HermLattice.generated_by(sp, proj)
    return dual(P)


def intersect(L1: HermLattice, L2: HermLattice) -> HermLattice:
    """Intersection of two lattices spanning the same nondegenerate subspace."""
    _check_same(L1, L2)
    if L1.rank != L2.rank or not all(L1.in_span(v) for v in L2.basis):
        raise ValueError("intersect needs lattices with a common span")
    return dual(lattice_sum(dual(L1), dual(L2)))


def orthogonal_sum(A: HermLattice, B: HermLattice) -> HermLattice:
    """External orthogonal sum, in the block-diagonal ambient space."""
    if A.cfg != B.cfg:
        raise ValueError("field configurations differ")
    cfg = A.cfg
    sp = HermSpace.block_diagonal(cfg, [gram_of(A), gram_of(B)])
    m, k = A.rank, B.rank
    basis = [sp.unit_vector(i) for i in range(m + k)]
    return HermLattice(sp, basis)


def rescale(L: HermLattice, s: FieldElement | int | Fraction) -> HermLattice:
    return HermLattice(L.space, [vscale(s, v) for v in L.basis])


def contains(L1: HermLattice, L2: HermLattice) -> bool:
    _check_same(L1, L2)
    return L1.contains(L2)


def type_of(L: HermLattice) -> int:
    return L.invariants.t
