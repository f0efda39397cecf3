"""Sizes of parabolic coset spaces GL_g(O/p^m) / P(O/p^m) and their tower law."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Composition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if not parts or any(x < 0 for x in parts):
            raise ValueError("a composition needs at least one nonnegative part")
        object.__setattr__(self, "parts", parts)

    @property
    def g(self) -> int:
        return sum(self.parts)

    @property
    def off_block(self) -> int:
        """sum_{i<j} g_i g_j, the dimension of the unipotent radical."""
        ps = self.parts
        return sum(ps[i] * ps[j] for i in range(len(ps)) for j in range(i + 1, len(ps)))


def _comp(x) -> Composition:
    return x if isinstance(x, Composition) else Composition(tuple(x))


def gaussian_multinomial(parts: Sequence[int], p: int) -> int:
    def fact(n: int) -> int:
        out = 1
        for i in range(1, n + 1):
            out *= (p**i - 1) // (p - 1)
        return out

    num = fact(sum(parts))
    for x in parts:
        num //= fact(x)
    return num


def c_m(parts, m: int, p: int) -> int:
    """p^{(m-1) d} times the Gaussian multinomial at p."""
    if m < 1:
        raise ValueError("m must be at least 1")
    comp = _comp(parts)
    return p ** ((m - 1) * comp.off_block) * gaussian_multinomial(comp.parts, p)


# ---------------------------------------------------------------------------
# Group-order oracle


def _det_mod(mats: np.ndarray, mod: int) -> np.ndarray:
    g = mats.shape[1]
    if g == 1:
        return mats[:, 0, 0] % mod
    if g == 2:
        return (mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]) % mod
    if g == 3:
        a = mats
        return (a[:, 0, 0] * (a[:, 1, 1] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 1])
                - a[:, 0, 1] * (a[:, 1, 0] * a[:, 2, 2] - a[:, 1, 2] * a[:, 2, 0])
                + a[:, 0, 2] * (a[:, 1, 0] * a[:, 2, 1] - a[:, 1, 1] * a[:, 2, 0])) % mod
    raise ValueError("block size above 3 is not supported")


def _free_positions(comp: Composition) -> list[tuple[int, int]]:
    """Matrix positions allowed to be nonzero in the block upper-triangular parabolic."""
    starts = list(itertools.accumulate((0,) + comp.parts))
    block = {}
    for b, (s, e) in enumerate(zip(starts, starts[1:])):
        for i in range(s, e):
            block[i] = b
    g = comp.g
    return [(i, j) for i in range(g) for j in range(g) if block[i] <= block[j]]


def _count_invertible(g: int, positions: list[tuple[int, int]], mod: int, p: int) -> int:
    k = len(positions)
    if g == 0:
        return 1
    vals = np.indices((mod,) * k).reshape(k, -1).T.astype(np.int64)
    mats = np.zeros((len(vals), g, g), dtype=np.int64)
    for c, (i, j) in enumerate(positions):
        mats[:, i, j] = vals[:, c]
    d = _det_mod(mats, mod)
    return int(np.count_nonzero(d % p))


def group_order(comp, m: int, p: int) -> int:
    """|P(Z/p^m)| for the parabolic of the composition (GL_g for a single part).

    Counts invertible matrices by brute force over Z/p^m when that is small and
    otherwise over F_p, multiplied by the size of the kernel of reduction.
    """
    comp = _comp(comp)
    g = comp.g
    pos = _free_positions(comp)
    if (p**m) ** len(pos) <= 3_000_000:
        return _count_invertible(g, pos, p**m, p)
    return _count_invertible(g, pos, p, p) * p ** ((m - 1) * len(pos))


def c_m_by_group_order(parts, m: int, p: int) -> int:
    comp = _comp(parts)
    big = group_order(Composition((comp.g,)), m, p)
    small = group_order(comp, m, p)
    if big % small:
        raise ArithmeticError("parabolic order does not divide the group order")
    return big // small


# ---------------------------------------------------------------------------
# Tower identity


@dataclass(frozen=True)
class RefinementCheck:
    ok: bool
    refined: int
    coarse: int
    factors: tuple[int, ...]


def refinement_identity(coarse, refinements: Sequence, m: int, p: int) -> RefinementCheck:
    """C(refined) = C(coarse) * prod over blocks of C(block refinement)."""
    coarse = _comp(coarse)
    refs = [_comp(r) for r in refinements]
    if len(refs) != len(coarse.parts) or any(r.g != b for r, b in zip(refs, coarse.parts)):
        raise ValueError("each refinement must partition the matching coarse block")
    refined = Composition(tuple(x for r in refs for x in r.parts))
    lhs = c_m(refined, m, p)
    c0 = c_m(coarse, m, p)
    factors = tuple(c_m(r, m, p) for r in refs)
    rhs = c0
    for f in factors:
        rhs *= f
    return RefinementCheck(lhs == rhs, lhs, c0, factors)
