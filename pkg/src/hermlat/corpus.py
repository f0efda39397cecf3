"""Seeded random lattices for tests and verification suites.

Lattices are orthogonal sums of normal-form blocks, moved into a scrambled
coordinate system by a random matrix in GL_n(O_E) and given a scrambled basis.
"""

from __future__ import annotations

import random
from typing import Sequence

from .efield import FieldConfig, FieldElement, mat_inv, smallest_nonresidue
from .lattice import HermLattice, HermSpace, Vector, vaxpy

Matrix = list[list[FieldElement]]


def unit_classes(p: int) -> tuple[int, int]:
    """Representatives of O_F^x modulo squares."""
    return 1, smallest_nonresidue(p)


def block_gram(cfg: FieldConfig, a: int, beta: int = 1) -> Matrix:
    """Normal-form block with invariant a: odd a gives [beta * p^((a-1)/2)],
    even a = 2c gives the antidiagonal block with entries +-u^(2c-1)."""
    if a % 2:
        return [[cfg(beta * cfg.p ** ((a - 1) // 2))]]
    w = cfg.u_pow(a - 1)
    return [[cfg.zero, w], [-w, cfg.zero]]


def block_space(cfg: FieldConfig, invariants: Sequence[int], betas: Sequence[int] | None = None) -> HermSpace:
    """Orthogonal sum of blocks. Even invariants must come in equal pairs; betas
    are used, in order, for the odd invariants."""
    inv = sorted(invariants)
    betas = list(betas or [])
    blocks = []
    i = 0
    while i < len(inv):
        a = inv[i]
        if a % 2:
            blocks.append(block_gram(cfg, a, betas.pop(0) if betas else 1))
            i += 1
        else:
            if i + 1 >= len(inv) or inv[i + 1] != a:
                raise ValueError("even invariants must come in pairs")
            blocks.append(block_gram(cfg, a))
            i += 2
    return HermSpace.block_diagonal(cfg, blocks)


def random_unimodular(rng: random.Random, cfg: FieldConfig, n: int, steps: int | None = None) -> Matrix:
    """A product of elementary matrices with small O_E entries and a unit diagonal."""
    small = [cfg(0), cfg(1), cfg(-1), cfg.u, -cfg.u, cfg(1, 1)]
    M = [[cfg.one if i == j else cfg.zero for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        c = rng.choice(small)
        if i != j and c:
            for r in range(n):
                M[r][j] = M[r][j] + c * M[r][i]
    for j in range(n):
        unit = cfg(rng.randrange(1, cfg.p), rng.randrange(cfg.p))
        for r in range(n):
            M[r][j] = M[r][j] * unit
    return M


def _transformed_gram(G: Sequence[Sequence[FieldElement]], M: Matrix) -> Matrix:
    """M^T G conj(M): the Gram matrix in the basis given by the columns of M."""
    n = len(M)
    GM = [[sum((G[i][k] * M[k][j].conj() for k in range(n)), M[0][0].cfg.zero) for j in range(n)]
          for i in range(n)]
    return [[sum((M[k][i] * GM[k][j] for k in range(n)), M[0][0].cfg.zero) for j in range(n)] for i in range(n)]


class Scrambled:
    """A block-diagonal model moved to random coordinates.

    ``space`` has Gram M^T G conj(M); a vector v in block coordinates becomes
    M^{-1} v.
    """

    def __init__(self, rng: random.Random, model: HermSpace, scramble: bool = True):
        cfg = model.cfg
        n = model.dim
        if scramble:
            M = random_unimodular(rng, cfg, n)
        else:
            M = [[cfg.one if i == j else cfg.zero for j in range(n)] for i in range(n)]
        self.model = model
        self.space = HermSpace(cfg, _transformed_gram(model.gram, M))
        self.Minv = mat_inv(M)
        self.rng = rng
        self.scramble = scramble

    def image(self, v: Sequence[FieldElement]) -> Vector:
        n = len(v)
        cfg = self.space.cfg
        return tuple(sum((self.Minv[i][k] * v[k] for k in range(n)), cfg.zero) for i in range(n))

    def lattice(self, indices: Sequence[int]) -> HermLattice:
        """The lattice spanned by the given block-coordinate axes, with a scrambled basis."""
        cols = [self.image(self.model.unit_vector(i)) for i in indices]
        k = len(cols)
        if self.scramble and k:
            V = random_unimodular(self.rng, self.space.cfg, k)
            cols = [self._combine(cols, [V[r][j] for r in range(k)]) for j in range(k)]
        return HermLattice(self.space, cols)

    def _combine(self, cols: list[Vector], coeffs: Sequence[FieldElement]) -> Vector:
        out = self.space.zero_vector()
        for c, v in zip(coeffs, cols):
            out = vaxpy(c, v, out)
        return out


def random_invariants(rng: random.Random, n: int, max_val: int, min_type: int = 0,
                      need_odd: bool = False) -> list[int]:
    """Invariants of a block sum: odd entries single, even entries in pairs."""
    for _ in range(1000):
        inv: list[int] = []
        while len(inv) < n:
            if n - len(inv) >= 2 and rng.random() < 0.35:
                c = rng.randrange(0, max_val // 4 + 2)
                inv += [2 * c, 2 * c]
            else:
                inv.append(2 * rng.randrange(0, (max_val + 1) // 2 + 1) + 1)
        if sum(inv) > max_val:
            continue
        if sum(1 for a in inv if a) < min_type:
            continue
        if need_odd and not any(a % 2 for a in inv):
            continue
        return sorted(inv)
    raise ValueError("no invariants satisfy the constraints")


def random_lattice(rng: random.Random, cfg: FieldConfig, n: int, max_val: int, *,
                   nonsplit: bool | None = None, min_type: int = 0, scramble: bool = True) -> HermLattice:
    """Random integral lattice of rank n and val at most max_val.

    With nonsplit set, the ambient space (of even dimension) has that class.
    """
    need_odd = nonsplit is True
    inv = random_invariants(rng, n, max_val, min_type, need_odd)
    odd = [a for a in inv if a % 2]
    betas = [rng.choice(unit_classes(cfg.p)) for _ in odd]
    model = block_space(cfg, inv, betas)
    if nonsplit is not None and n % 2 == 0 and model.is_nonsplit() != nonsplit:
        if not betas:
            raise ValueError("a split/nonsplit flip needs an odd invariant")
        nr = smallest_nonresidue(cfg.p)
        betas[0] = 1 if betas[0] != 1 else nr
        model = block_space(cfg, inv, betas)
    sc = Scrambled(rng, model, scramble)
    return sc.lattice(range(n))


class CorankOnePair:
    """L_flat of rank n-1 in a nonsplit space of dimension n, plus the complement axis."""

    def __init__(self, Lflat: HermLattice, axis: Vector):
        self.Lflat = Lflat
        self.axis = axis


def random_corank1(rng: random.Random, cfg: FieldConfig, n: int, max_val: int, *,
                   min_type: int = 0, scramble: bool = True) -> CorankOnePair:
    """Integral L_flat of rank n-1 whose ambient space is nonsplit of dimension n."""
    inv = random_invariants(rng, n - 1, max_val, min_type)
    odd = [a for a in inv if a % 2]
    betas = [rng.choice(unit_classes(cfg.p)) for _ in odd]
    model = block_space(cfg, inv, betas)
    beta = rng.choice(unit_classes(cfg.p))
    full = HermSpace.block_diagonal(cfg, [list(map(list, model.gram)), [[cfg(beta)]]])
    if not full.is_nonsplit():
        beta = smallest_nonresidue(cfg.p) if beta == 1 else 1
        full = HermSpace.block_diagonal(cfg, [list(map(list, model.gram)), [[cfg(beta)]]])
    sc = Scrambled(rng, full, scramble)
    Lflat = sc.lattice(range(n - 1))
    axis = sc.image(full.unit_vector(n - 1))
    return CorankOnePair(Lflat, axis)


def random_vector_near(rng: random.Random, pair: CorankOnePair, lam_vals: Sequence[int] = (0, 1, 2),
                       dual_part: bool = True) -> Vector:
    """x = (random element of dual(L_flat)) + u^d * unit * axis."""
    Lflat = pair.Lflat
    cfg = Lflat.cfg
    x = Lflat.space.zero_vector()
    src = Lflat.dual.basis if dual_part else Lflat.basis
    for v in src:
        c = cfg(rng.randrange(cfg.p), rng.randrange(cfg.p))
        if c:
            x = vaxpy(c, v, x)
    d = rng.choice(list(lam_vals))
    unit = cfg(rng.randrange(1, cfg.p), rng.randrange(cfg.p))
    return vaxpy(unit * cfg.u_pow(d), pair.axis, x)


def rng_for(seed: int, *labels) -> random.Random:
    """Independent deterministic stream per (seed, label)."""
    return random.Random(repr((seed,) + labels))
