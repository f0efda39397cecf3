"""Brute-force counters used to cross-check the closed formulas."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .efield import FieldConfig, FieldElement, mat_inv, reduce_rational
from .lattice import HermLattice, Vector, add_vectors, lattice_sum, vaxpy, vscale

MAX_CELLS = 60_000_000


@dataclass(frozen=True)
class HomCountResult:
    raw_count: int
    level: int
    normalized: Fraction
    d: int

    def to_json(self) -> dict:
        return {"raw_count": self.raw_count, "level": self.level,
                "normalized": f"{self.normalized.numerator}/{self.normalized.denominator}", "d": self.d}


def _zp(x: Fraction, mod: int) -> int:
    x = Fraction(x)
    if x.denominator % _prime_of(mod) == 0:
        raise ValueError(f"{x} is not p-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod


def _prime_of(mod: int) -> int:
    d = 2
    while mod % d:
        d += 1
    return d


def _roll_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cyclic convolution of two integer arrays over a product of Z/N."""
    out = np.zeros_like(a)
    for idx in zip(*np.nonzero(b)):
        out += b[idx] * np.roll(a, shift=idx, axis=tuple(range(a.ndim)))
    return out


def count_herm_homs(L_gram: Sequence[Sequence], s: int, N: int, p: int, eps0: int = 1) -> HomCountResult:
    """Number of tuples in (H_s / u^{2N} H_s)^m whose moment matrix matches L_gram,
    diagonal entries modulo p^N and off-diagonal ones modulo u^{2N-1}."""
    m = len(L_gram)
    if not (1 <= m <= 2 and 1 <= s <= 2 and 1 <= N <= 3 and p <= 5):
        raise ValueError("parameters exceed the brute-force bounds (m, s <= 2, N <= 3, p <= 5)")
    cfg = FieldConfig(p, eps0)
    T = [[x if isinstance(x, FieldElement) else cfg(x) for x in row] for row in L_gram]
    mod = p**N
    pe = p * eps0 % mod
    cells = mod ** (4 * m)
    if cells > MAX_CELLS:
        raise ValueError("enumeration too large")
    # coordinates of one hyperbolic plane: y = y1 + y2 u, z = z1 + z2 u for each x_i
    grids = np.indices((mod,) * (4 * m)).reshape(4 * m, -1).astype(np.int64)
    diag = []
    for i in range(m):
        y1, y2, z1, z2 = grids[4 * i: 4 * i + 4]
        diag.append((y2 * z1 - y1 * z2) % mod)
    keys = list(diag)
    if m == 2:
        a1, a2, b1, b2 = grids[0:4]
        c1, c2, d1, d2 = grids[4:8]
        # w = y_1 conj(z_2) - z_1 conj(y_2); (x_1, x_2) = u^-1 w
        re = (a1 * d1 - a2 * d2 * pe) - (b1 * c1 - b2 * c2 * pe)
        im = (a2 * d1 - a1 * d2) - (b2 * c1 - b1 * c2)
        keys += [re % mod, im % mod]
    shape = (mod,) * len(keys)
    flat = np.ravel_multi_index(tuple(keys), shape)
    plane = np.bincount(flat, minlength=mod ** len(keys)).reshape(shape).astype(np.int64)
    total = plane
    for _ in range(s - 1):
        total = _roll_convolve(total, plane)
    target = []
    inv2 = pow(2, -1, mod)
    for i in range(m):
        t = T[i][i]
        if t.b or t.val() < 0:
            raise ValueError("diagonal entries must lie in O_F")
        target.append(_zp(t.a, mod) * inv2 % mod)
    if m == 2:
        w = T[0][1] * cfg.u
        if w.val() < 0:
            raise ValueError("off-diagonal entries must lie in u^-1 O_E")
        target += [_zp(w.a, mod), _zp(w.b, mod)]
    raw = int(total[tuple(target)])
    d = m * (4 * s - m)
    return HomCountResult(raw, N, Fraction(raw, p ** (N * d)), d)


def symplectic_isom_formula(m: int, t_rad: int, s: int, q: int) -> Fraction:
    e = m * (4 * s - m + 1)
    out = Fraction(q) ** (e // 2) if e % 2 == 0 else None
    if out is None:
        raise ValueError("exponent is not an integer")
    lo = s - (m + t_rad) // 2
    for i in range(lo + 1, s + 1):
        out *= 1 - Fraction(q) ** (-2 * i)
    return out


def count_symplectic_isoms(m: int, t_rad: int, s: int, q: int) -> int:
    """Injective form-preserving maps from an m-dimensional alternating space with
    radical of dimension t_rad into the standard 2s-dimensional symplectic space."""
    if (m - t_rad) % 2 or not 0 <= t_rad <= m:
        raise ValueError("radical dimension must have the parity of m")
    if q > 3 or m > 3 or 2 * s > 6 or q < 2:
        raise ValueError("parameters exceed the brute-force bounds")
    if m - t_rad > 2 * s:
        return 0
    n = 2 * s
    vecs = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)
    J = np.zeros((n, n), dtype=np.int64)
    for i in range(s):
        J[i, s + i] = 1
        J[s + i, i] = -1
    omega = (vecs @ J @ vecs.T) % q
    weights = q ** np.arange(n - 1, -1, -1)

    # source Gram: hyperbolic pairs first, radical last
    G = np.zeros((m, m), dtype=np.int64)
    for k in range((m - t_rad) // 2):
        G[2 * k, 2 * k + 1] = 1
        G[2 * k + 1, 2 * k] = q - 1

    coeff_grids = {k: np.array(list(itertools.product(range(q), repeat=k)), dtype=np.int64)
                   for k in range(1, m + 1)}

    def span_indices(prefix: list[int]) -> np.ndarray:
        if not prefix:
            return np.zeros(1, dtype=np.int64)
        combos = coeff_grids[len(prefix)] @ vecs[prefix] % q
        return np.unique(combos @ weights)

    def extend(prefix: list[int]) -> int:
        j = len(prefix)
        mask = np.ones(len(vecs), dtype=bool)
        for i, pi in enumerate(prefix):
            mask &= omega[pi] == G[i, j] % q
        span = span_indices(prefix)
        if j == m - 1:
            return int(mask.sum()) - int(mask[span].sum())
        mask[span] = False
        cands = np.nonzero(mask)[0]
        if j < m - 2:
            return sum(extend(prefix + [int(v)]) for v in cands)
        # last two vectors at once: c from cands, then v with the final constraints
        last = np.ones(len(vecs), dtype=bool)
        for i, pi in enumerate(prefix):
            last &= omega[pi] == G[i, j + 1] % q
        ok = (omega[cands] == G[j, j + 1] % q) & last[None, :]
        total = int(ok.sum())
        # remove v in span(prefix, c) = span(prefix) + k c
        base = vecs[span]
        for k in range(q):
            pts = (base[None, :, :] + k * vecs[cands][:, None, :]) % q
            idx = pts @ weights
            total -= int(np.take_along_axis(ok, idx, axis=1).sum())
        return total

    return extend([])


def _all_quotient_elements(big: HermLattice, small: HermLattice) -> list[Vector]:
    """All classes of big/small (small contained in big), as canonical reps."""
    from .schwartz import _quotient_reps

    cfg = big.cfg
    chain = [big]
    k = 0
    while chain[-1] != small:
        k += 1
        chain.append(lattice_sum(small, HermLattice(big.space, [vscale(cfg.u_pow(k), v) for v in big.basis])))
    reps = [big.space.zero_vector()]
    for a, b in zip(chain, chain[1:]):
        step = _quotient_reps(a, b)
        reps = [tuple(x + y for x, y in zip(r, st)) for r in reps for st in step]
    return [small.coset_rep(r) for r in reps]


def coset_count_vint(L: HermLattice, k: int) -> int:
    """|(u^k dual(L))^int / L| by listing coset representatives."""
    if k not in (0, 1):
        raise ValueError("scale must be 0 or 1")
    if L.rank % 2 == 0 or not L.integral or L.invariants.t != L.rank:
        raise ValueError("needs an integral lattice of odd rank with t(L) = rank(L)")
    cfg = L.cfg
    big = L.dual if k == 0 else HermLattice(L.space, [vscale(cfg.u, v) for v in L.dual.basis])
    sp = L.space
    count = 0
    for x in _all_quotient_elements(big, L):
        nx = sp.norm_of(x)
        if not nx or cfg(nx).val() >= 0:
            count += 1
    return count


def _smith_mod(A: list[list[int]], p: int, K: int):
    """Smith form of an integer matrix over Z/p^K.

    Returns (exponents, U, Uinv) with U A V diagonal with entries p^e; only the
    row transform and its inverse are tracked.
    """
    mod = p**K
    n = len(A)
    cols = len(A[0]) if n else 0
    A = [[x % mod for x in row] for row in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    Ui = [[int(i == j) for j in range(n)] for i in range(n)]

    def v(x: int) -> int:
        x %= mod
        if x == 0:
            return K
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        return e

    exps = []
    for r in range(min(n, cols)):
        best = None
        for i in range(r, n):
            for j in range(r, cols):
                e = v(A[i][j])
                if e < K and (best is None or e < best[0]):
                    best = (e, i, j)
        if best is None:
            break
        e, i, j = best
        A[r], A[i] = A[i], A[r]
        U[r], U[i] = U[i], U[r]
        for row in Ui:
            row[r], row[i] = row[i], row[r]
        for row in A:
            row[r], row[j] = row[j], row[r]
        piv = A[r][r]
        unit = (piv // p**e) % mod
        uinv = pow(unit, -1, mod)
        for i2 in range(n):
            if i2 == r or A[i2][r] == 0:
                continue
            c = (A[i2][r] // p**e) * uinv % mod
            A[i2] = [(x - c * y) % mod for x, y in zip(A[i2], A[r])]
            U[i2] = [(x - c * y) % mod for x, y in zip(U[i2], U[r])]
            # inverse gets the opposite column operation
            for row in Ui:
                row[r] = (row[r] + c * row[i2]) % mod
        for j2 in range(r + 1, cols):
            if A[r][j2]:
                c = (A[r][j2] // p**e) * uinv % mod
                for row in A:
                    row[j2] = (row[j2] - c * row[r]) % mod
        exps.append(e)
    exps += [K] * (n - len(exps))
    return exps, U, Ui


class _QuotientGroup:
    """dual(L)/L as an explicit product of cyclic p-groups."""

    def __init__(self, L: HermLattice):
        cfg = L.cfg
        self.L = L
        D = L.dual
        self.D = D
        n = L.rank
        p = cfg.p
        dmat = [[D.basis[j][i] for j in range(n)] for i in range(n)]
        dinv = mat_inv(dmat)

        def coords(x: Vector) -> list[int]:
            c = [sum((dinv[i][k] * x[k] for k in range(n)), cfg.zero) for i in range(n)]
            out = []
            for z in c:
                out += [z.a, z.b]
            return out

        cols = []
        for b in L.basis:
            cols.append(coords(b))
            cols.append(coords(vscale(cfg.u, b)))
        K = max(L.invariants.a, default=0) + 2
        mod = p**K
        A = [[int(reduce_rational(cols[j][i], p, K)) % mod for j in range(2 * n)] for i in range(2 * n)]
        exps, U, Ui = _smith_mod(A, p, K)
        keep = [i for i, e in enumerate(exps) if e > 0]
        if any(exps[i] >= K for i in keep):
            raise ArithmeticError("quotient is not finite")
        self.orders = [p ** exps[i] for i in keep]
        self.keep = keep
        self.mod = mod
        self.U = U
        self.Ui = Ui
        # u acts on Z_p-coordinates: d -> u d, u d -> p eps0 d
        pe = p * cfg.eps0
        Mu = [[0] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            Mu[2 * i + 1][2 * i] = 1
            Mu[2 * i][2 * i + 1] = pe
        self.Mu = Mu
        self.dbasis = D.basis
        self.cfg = cfg

    def to_full(self, y: tuple[int, ...]) -> list[int]:
        full = [0] * len(self.U)
        for k, i in enumerate(self.keep):
            full[i] = y[k]
        return [sum(self.Ui[r][c] * full[c] for c in range(len(full))) % self.mod for r in range(len(full))]

    def from_full(self, x: list[int]) -> tuple[int, ...]:
        return tuple(sum(self.U[i][c] * x[c] for c in range(len(x))) % o for i, o in zip(self.keep, self.orders))

    def times_u(self, y: tuple[int, ...]) -> tuple[int, ...]:
        x = self.to_full(y)
        return self.from_full([sum(self.Mu[r][c] * x[c] for c in range(len(x))) for r in range(len(x))])

    def vector(self, y: tuple[int, ...]) -> Vector:
        x = self.to_full(y)
        cfg = self.cfg
        out = self.L.space.zero_vector()
        for i, d in enumerate(self.dbasis):
            out = vaxpy(cfg(x[2 * i], x[2 * i + 1]), d, out)
        return out

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*[range(o) for o in self.orders]))

    def add(self, a, b):
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))


def naive_integral_overlattices(L: HermLattice, limit: int = 729) -> list[HermLattice]:
    """Integral overlattices found by listing every subgroup of dual(L)/L as an
    abelian group and keeping the O_E-stable ones with integral lift."""
    from .enumerate import lattice_order_key

    if not L.integral:
        raise ValueError("needs an integral lattice")
    if L.cfg.q ** L.invariants.val > limit:
        raise ValueError("quotient too large for the naive oracle")
    G = _QuotientGroup(L)
    elems = G.elements()
    zero = tuple(0 for _ in G.orders)

    def join(H: frozenset, g) -> frozenset:
        out = set(H)
        step = g
        while step not in H:
            out.update(G.add(h, step) for h in H)
            step = G.add(step, g)
        return frozenset(out)

    start = frozenset([zero])
    seen = {start}
    todo = [start]
    while todo:
        H = todo.pop()
        covered = set(H)
        for g in elems:
            if g in covered:
                continue
            K = join(H, g)
            # H + k g with k prime to p generates the same subgroup together with H
            step, k = g, 1
            while step not in H:
                if k % L.cfg.p:
                    covered.update(G.add(h, step) for h in H)
                step = G.add(step, g)
                k += 1
            if K not in seen:
                seen.add(K)
                todo.append(K)
    u_image = {g: G.times_u(g) for g in elems}
    out = {}
    for H in seen:
        if any(u_image[h] not in H for h in H):
            continue
        gens, span = [], frozenset([zero])
        for h in sorted(H):
            if h not in span:
                gens.append(h)
                span = join(span, h)
        M = add_vectors(L, [G.vector(h) for h in gens])
        if M.integral:
            out[M.key] = M
    return sorted(out.values(), key=lattice_order_key)
