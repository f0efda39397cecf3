"""Finite lattice enumerations: integral overlattices, vertex overlattices,
full-rank integral lattices around a corank-one lattice, special lattices and
the valuation-lowering rewrite of a pair (Lflat, x).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from .efield import INF, FieldElement
from .lattice import (
    HermLattice,
    HermSpace,
    Invariants,
    Vector,
    add_vectors,
    dual,
    intersect_with_span,
    invariants_any,
    is_vertex,
    lattice_sum,
    lattice_val,
    project_onto,
    vaxpy,
    vscale,
    vsub,
)


def lattice_order_key(L: HermLattice) -> tuple:
    inv = L.invariants
    return (inv.val, inv.a, L.sort_key())


def projective_points(p: int, k: int) -> Iterator[tuple[int, ...]]:
    """Representatives of the lines of F_p^k (first nonzero coordinate 1)."""
    for lead in range(k):
        for tail in itertools.product(range(p), repeat=k - lead - 1):
            yield (0,) * lead + (1,) + tail


def _isotropic_steps(M: HermLattice) -> Iterator[Vector]:
    """Vectors x with u x in M, x in dual(M) \\ M and M + O x integral."""
    cfg = M.cfg
    sp = M.space
    nb = M.normal
    inv = nb.invariant_of_index()
    ui = cfg.u.inv()
    gens = [vscale(ui, nb.basis[i]) for i, a in enumerate(inv) if a >= 1]
    k = len(gens)
    if k == 0:
        return
    G = [[sp.pair(gens[i], gens[j]) for j in range(k)] for i in range(k)]
    p = cfg.p
    for c in projective_points(p, k):
        # (x, x) = sum_{i,j} c_i c_j G_ij with rational c
        s = Fraction(0)
        for i in range(k):
            if not c[i]:
                continue
            s += c[i] * c[i] * G[i][i].a
            for j in range(i + 1, k):
                if c[j]:
                    s += c[i] * c[j] * G[i][j].trace()
        if s.denominator % p == 0:
            continue
        x = sp.zero_vector()
        for ci, g in zip(c, gens):
            if ci:
                x = vaxpy(ci, g, x)
        yield x


def integral_overlattices(L: HermLattice) -> list[HermLattice]:
    """All integral L' with L contained in L' (inside the span of L)."""
    if not L.integral:
        raise ValueError("integral_overlattices needs an integral lattice")
    return list(_overlattices(L))


@lru_cache(maxsize=1024)
def _overlattices(L: HermLattice) -> tuple[HermLattice, ...]:
    seen = {L.key: L}
    stack = [L]
    while stack:
        M = stack.pop()
        for x in _isotropic_steps(M):
            N = add_vectors(M, [x])
            if N.key not in seen:
                seen[N.key] = N
                stack.append(N)
    return tuple(sorted(seen.values(), key=lattice_order_key))


def vertex_overlattices(L: HermLattice) -> list[HermLattice]:
    return [M for M in integral_overlattices(L) if is_vertex(M)]


def overlattices_with_invariants(L: HermLattice, a: Sequence[int]) -> list[HermLattice]:
    want = tuple(sorted(a))
    return [M for M in integral_overlattices(L) if M.invariants.a == want]


def length_of_quotient(big: HermLattice, small: HermLattice) -> int:
    """O_E-length of big/small for lattices of the same span."""
    vb = _det_val(big)
    vs = _det_val(small)
    d = vs - vb
    if d % 2:
        raise ValueError("inconsistent volumes")
    return d // 2


def _det_val(L: HermLattice) -> int:
    from .efield import det

    return int(det([list(r) for r in L.gram]).val())


# ---------------------------------------------------------------------------
# Finite quotients


def quotient_digits(p: int, a: int) -> list[list[int]]:
    """All digit strings (d_{-a}, ..., d_{-1}) for reps of u^-a O / O."""
    return [list(t) for t in itertools.product(range(p), repeat=a)]


def dual_quotient_reps(S: HermLattice) -> list[Vector]:
    """Representatives of dual(S)/S built from a normal basis of S."""
    cfg = S.cfg
    nb = S.normal
    inv = nb.invariant_of_index()
    per_vec: list[list[Vector]] = []
    sp = S.space
    for e, a in zip(nb.basis, inv):
        opts = []
        for digits in itertools.product(range(cfg.p), repeat=a):
            c = cfg.zero
            for j, d in enumerate(digits):
                if d:
                    c = c + d * cfg.u_pow(-(j + 1))
            opts.append(vscale(c, e))
        per_vec.append(opts)
    out = []
    for combo in itertools.product(*per_vec):
        x = sp.zero_vector()
        for v in combo:
            if any(v):
                x = tuple(a + b for a, b in zip(x, v))
        out.append(x)
    return out


# ---------------------------------------------------------------------------
# Corank-one machinery


class Corank1Frame:
    """Orthogonal splitting V = span(Lflat) + E*w0 with (w0, w0) a unit of O_F."""

    def __init__(self, Lflat: HermLattice):
        sp = Lflat.space
        n = sp.dim
        if Lflat.rank != n - 1:
            raise ValueError("a corank-one lattice is needed")
        self.Lflat = Lflat
        self.space = sp
        self.W = list(Lflat.basis)
        w = None
        for i in range(n):
            e = sp.unit_vector(i)
            v = vsub(e, project_onto(sp, self.W, e))
            if any(v):
                w = v
                break
        nw = sp.norm_of(w)
        k = int(sp.cfg(nw).val()) // 2
        w = vscale(sp.cfg.u_pow(-k), w)
        self.w0: Vector = w
        self.beta0: Fraction = sp.norm_of(w)

    def split(self, x: Vector) -> tuple[Vector, FieldElement]:
        """x = x' + lam * w0 with x' in span(Lflat)."""
        lam = self.space.pair(x, self.w0) / self.beta0
        xp = vaxpy(-lam, self.w0, x)
        return xp, lam

    def delta_of(self, x: Vector) -> int | float:
        return self.split(x)[1].val()

    def perp_int_contains(self, lam: FieldElement) -> bool:
        return lam.val() >= 0

    def lattice(self, S: HermLattice, eps: Vector, delta: int) -> HermLattice:
        cfg = self.space.cfg
        g = vaxpy(cfg.u_pow(delta), self.w0, eps)
        return HermLattice.generated_by(self.space, list(S.basis) + [g])


@dataclass
class Corank1Extension:
    lattice: HermLattice
    slice: HermLattice
    delta: int
    eps: Vector

    @cached_property
    def type(self) -> int:
        return self.lattice.invariants.t


def type_by_rule(S: HermLattice, eps: Vector) -> int:
    """t(S + <eps + f>) predicted from the position of eps in dual(S)/S."""
    cfg = S.cfg
    M = lattice_sum(S, HermLattice(S.space, [vscale(cfg.u, v) for v in S.dual.basis]))
    t = S.invariants.t
    return t + 1 if M.contains_vector(eps) else t - 1


def slice_extensions(frame: Corank1Frame, S: HermLattice, delta_max: int,
                     delta_min: int | None = None) -> list[Corank1Extension]:
    """Integral L with L meet span(Lflat) = S and delta_L in [delta_min, delta_max]."""
    sp = frame.space
    cfg = sp.cfg
    out = []
    for eps in dual_quotient_reps(S):
        ne = sp.norm_of(eps)
        v = cfg(ne).val()
        if v >= 0:
            deltas = range(max(0, delta_min if delta_min is not None else 0), delta_max + 1)
        else:
            d = int(v) // 2
            tot = ne + Fraction(-cfg.pi) ** d * frame.beta0
            if tot and cfg(tot).val() < 0:
                continue
            deltas = [d] if (delta_min is None or d >= delta_min) and d <= delta_max else []
        for d in deltas:
            L = frame.lattice(S, eps, d)
            out.append(Corank1Extension(L, S, d, eps))
    return out


def corank1_integral_lattices(Lflat: HermLattice, delta_max: int | None = None) -> list[Corank1Extension]:
    """Integral full-rank L containing Lflat, with delta_L at most delta_max.

    For delta >= 0 the family is periodic in delta and infinite, so a window is
    required; by default delta_max is the largest invariant of Lflat.  All
    members with negative delta are always included.
    """
    sp = Lflat.space
    if sp.dim % 2 or not sp.is_nonsplit():
        raise ValueError("corank-one enumeration needs a nonsplit even-dimensional space")
    if not Lflat.integral:
        return []
    frame = Corank1Frame(Lflat)
    if delta_max is None:
        delta_max = Lflat.invariants.amax
    out = []
    for S in integral_overlattices(Lflat):
        out.extend(slice_extensions(frame, S, delta_max))
    out.sort(key=lambda e: (e.delta, lattice_order_key(e.slice), e.lattice.sort_key()))
    return out


def delta_min_bound(Lflat: HermLattice) -> int:
    """Lowest delta that can occur: the norm of eps is bounded below."""
    a = Lflat.invariants.amax
    return -((a + 1) // 2)


# ---------------------------------------------------------------------------
# Special lattices and the region S_{Lflat}


@dataclass
class SpecialData:
    special: bool
    count: int
    plus_minus: tuple[HermLattice, HermLattice] | None = None
    checks: dict = field(default_factory=dict)


def _top_split(Lflat: HermLattice) -> tuple[list[Vector], Vector, int]:
    """Normal basis of Lflat split as (others, e_top) with e_top of largest invariant."""
    nb = Lflat.normal
    inv = nb.invariant_of_index()
    top = max(range(len(inv)), key=lambda i: (inv[i], -i))
    others = [v for i, v in enumerate(nb.basis) if i != top]
    return others, nb.basis[top], inv[top]


@lru_cache(maxsize=256)
def special_data(Lflat: HermLattice) -> SpecialData:
    sp = Lflat.space
    n = sp.dim
    if Lflat.rank != n - 1 or Lflat.rank < 3:
        raise ValueError("special_data needs a corank-one lattice of rank at least 3")
    if not sp.is_nonsplit():
        raise ValueError("ambient space must be nonsplit")
    if not Lflat.integral:
        raise ValueError("special_data needs an integral lattice")
    a = Lflat.invariants.a
    if a[-2] >= a[-1]:
        return SpecialData(False, 0)
    target = tuple(sorted(a[:-1] + (a[-1] - 1, a[-1] - 1)))
    frame = Corank1Frame(Lflat)
    val_target = sum(target)
    found = {}
    # val(S + O(eps + u^d w0)) = val(S) + 2d + 1 independently of eps
    num = val_target - Lflat.invariants.val - 1
    if num % 2:
        return SpecialData(False, 0)
    d = num // 2
    for eps in dual_quotient_reps(Lflat):
        ne = sp.norm_of(eps) + Fraction(-sp.cfg.pi) ** d * frame.beta0
        if ne and sp.cfg(ne).val() < 0:
            continue
        L = frame.lattice(Lflat, eps, d)
        if L.integral and L.invariants.a == target:
            found[L.key] = L
    lats = sorted(found.values(), key=lattice_order_key)
    if len(lats) == 2:
        data = SpecialData(True, 2, (lats[0], lats[1]))
        data.checks = verify_special(Lflat, data)
        return data
    return SpecialData(False, len(lats))


def verify_special(Lflat: HermLattice, data: SpecialData) -> dict:
    """Check meet-with-span, a_top >= 3 and the orthogonal decompositions."""
    sp = Lflat.space
    a = Lflat.invariants.a
    others, etop, atop = _top_split(Lflat)
    left = HermLattice(sp, others)
    right = HermLattice(sp, [etop])
    checks = {
        "meets_span_in_Lflat": all(intersect_with_span(L, list(Lflat.basis)) == Lflat
                                   for L in data.plus_minus),
        "top_invariant_at_least_3": a[-1] >= 3,
    }
    ok = left.integral and left.invariants.a == a[:-1]
    ok = ok and right.invariants.a == (a[-1],)
    ok = ok and lattice_sum(left, right) == Lflat
    for L in data.plus_minus:
        perp_basis = _orthogonal_complement_basis(sp, others)
        Lr = intersect_with_span(L, perp_basis)
        ok = ok and lattice_sum(left, Lr) == L
        ok = ok and Lr.integral and Lr.invariants.a == (a[-1] - 1, a[-1] - 1)
    checks["orthogonal_decompositions"] = bool(ok)
    return checks


def _orthogonal_complement_basis(sp: HermSpace, W: Sequence[Vector]) -> list[Vector]:
    out: list[Vector] = []
    span = list(W)
    for i in range(sp.dim):
        e = sp.unit_vector(i)
        v = vsub(e, project_onto(sp, span, e)) if span else e
        if out:
            v = vsub(v, project_onto(sp, out, v))
        if any(v) and sp.pair(v, v):
            out.append(v)
        if len(out) + len(W) == sp.dim:
            break
    if len(out) + len(W) != sp.dim:
        raise ValueError("could not build an orthogonal complement basis")
    return out


def s_region_membership(Lflat: HermLattice, x: Vector, special: SpecialData | None = None) -> bool:
    if not Lflat.integral:
        raise ValueError("S region needs an integral lattice")
    if special is None:
        special = special_data(Lflat) if Lflat.rank >= 3 else SpecialData(False, 0)
    if special.special:
        return any(L.contains_vector(x) for L in special.plus_minus)
    frame = Corank1Frame(Lflat)
    xp, lam = frame.split(x)
    return Lflat.contains_vector(xp) and lam.val() >= 0


# ---------------------------------------------------------------------------
# Valuation-lowering rewrite


def _drop_candidates(L: HermLattice) -> list[tuple[list[Vector], Vector]]:
    """Ways of writing L = Lflat' + <x'> from a normal basis of L."""
    sp = L.space
    cfg = L.cfg
    nb = L.normal
    out = []
    for blk in nb.blocks:
        others = [v for i, v in enumerate(nb.basis) if i not in blk.indices]
        if blk.kind == 1:
            out.append((others, nb.basis[blk.indices[0]]))
        else:
            e, f = (nb.basis[i] for i in blk.indices)
            for lam in (cfg.u, -cfg.u, cfg.one, -cfg.one):
                g = vaxpy(lam, f, e)
                if sp.norm_of(g):
                    out.append((others + [g], f))
                g = vaxpy(lam, e, f)
                if sp.norm_of(g):
                    out.append((others + [g], e))
    return out


def reduce_pair(Lflat: HermLattice, x: Vector) -> tuple[HermLattice, Vector]:
    """Rewrite Lflat + <x> as Lflat' + <x'> with val(Lflat') < val(Lflat)."""
    sp = Lflat.space
    if Lflat.rank != sp.dim - 1:
        raise ValueError("precondition failed: Lflat must have corank one")
    if not Lflat.integral:
        raise ValueError("precondition failed: Lflat must be integral")
    if Lflat.in_span(x):
        raise ValueError("precondition failed: x lies in the span of Lflat")
    if s_region_membership(Lflat, x):
        raise ValueError("precondition failed: x lies in the region S_Lflat")
    L = add_vectors(Lflat, [x])
    best = None
    for others, xp in _drop_candidates(L):
        try:
            cand = HermLattice(sp, others)
            v = lattice_val(cand)
            _ = invariants_any(cand)
        except (ValueError, ZeroDivisionError):
            continue
        if L.integral and v < 0:
            continue
        if not L.integral and v >= 0:
            continue
        if best is None or v < best[0]:
            best = (v, cand, xp)
    if best is None:
        raise ValueError("no valuation-lowering decomposition found")
    v, cand, xp = best
    if add_vectors(cand, [xp]) != L:
        raise AssertionError("rewrite does not reproduce the lattice")
    if not v < lattice_val(Lflat):
        raise AssertionError("rewrite does not lower the valuation")
    return cand, xp
