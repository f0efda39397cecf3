"""The twelve acceptance checks, each at full size and with its time budget.

Every check prints one line of the form
    PASS  3 hom-count oracle  (12.4 s of 120 s)  30/30 cases
directly to the terminal, so the lines show up even without ``-s``.
"""

from __future__ import annotations

import time
from typing import Callable

import pytest

from hermlat import corpus
from hermlat import verify as V
from hermlat.efield import FieldConfig
from hermlat.enumerate import integral_overlattices
from hermlat.lattice import HermLattice, HermSpace, add_vectors, dual, orthogonal_sum, rescale
from hermlat.oracle import coset_count_vint, naive_integral_overlattices
from hermlat.schwartz import LatticeFunction, fourier

SEED = 7


def run_specs(specs: list[tuple]) -> list[dict]:
    return V.run_cases(specs)


def summarize(cases: list[dict]) -> tuple[bool, str]:
    failed = [c for c in cases if not c["pass"]]
    detail = f"{len(cases) - len(failed)}/{len(cases)} cases"
    if failed:
        c = failed[0]
        detail += f"; first failure {c['id']}: expected {c['expected']!r}, got {c['actual']!r}"
    return bool(cases) and not failed, detail


# ---------------------------------------------------------------------------
# criteria


def rank2_closed_formula() -> tuple[bool, str]:
    cases = []
    for p in (3, 5):
        for eps0 in corpus.unit_classes(p):
            P = V.VerifyParams(p=p, eps0=eps0, seed=SEED)
            specs = [s for s in V.plan_density(P) if s[1] == "rank2"]
            covered = {(s[4], s[5]) for s in specs}
            # every 0 <= b1 <= b2 <= 3 must have a nonsplit unit-class representative
            assert len(covered) == 10, (p, eps0, covered)
            cases += run_specs(specs)
    return summarize(cases)


def central_vanishing() -> tuple[bool, str]:
    specs = [("density", "central", 3, 1, 4, SEED, i) for i in range(200)]
    ranks = {V.central_lattice(3, 1, 4, SEED, i).rank for i in range(200)}
    ok, detail = summarize(run_specs(specs))
    return ok and ranks == {2, 4}, f"{detail}; ranks {sorted(ranks)}"


def hom_count_oracle() -> tuple[bool, str]:
    P = V.VerifyParams(p=3, eps0=1, seed=SEED)
    specs = [s for s in V.plan_density(P) if s[1] in ("homraw", "homcount")]
    assert ("density", "homraw", 3, 1) in specs
    return summarize(run_specs(specs))


def symplectic_counts() -> tuple[bool, str]:
    specs = V.plan_isom(V.VerifyParams(p=3, seed=SEED))
    assert ("isom", "symp", 2, 0, 1, 3) in specs  # |Sp_2(F_3)| = 24
    return summarize(run_specs(specs))


def coset_identity() -> tuple[bool, str]:
    cases = run_specs(V.plan_coset(V.VerifyParams(p=3, eps0=1, max_val=5, seed=SEED)))
    ok, detail = summarize(cases)
    L = HermSpace.diagonal(FieldConfig(3, 1), [1, 1, 1]).standard_lattice()
    big, small = coset_count_vint(L, 0), coset_count_vint(L, 1)
    fixed = (big, small) == (9, 1)
    return ok and fixed, f"{detail}; unit diagonal rank 3: {big} = 9 * {small}"


def corank1_vanishing() -> tuple[bool, str]:
    specs = V.plan_vanishing(V.VerifyParams(p=3, eps0=1, max_val=4, seed=SEED, count=30))
    return summarize(run_specs(specs))


def fourier_support() -> tuple[bool, str]:
    specs = []
    for p in (3, 5):
        specs += V.plan_ft(V.VerifyParams(p=p, eps0=1, max_val=5, seed=SEED, count=10))
    return summarize(run_specs(specs))


def geometric_shadow() -> tuple[bool, str]:
    cases = []
    for p in (3, 5):
        cases += run_specs(V.plan_geom3(V.VerifyParams(p=p, eps0=1, seed=SEED)))
    return summarize(cases)


def reduction_machinery() -> tuple[bool, str]:
    P = V.VerifyParams(p=3, eps0=1, max_val=5, seed=SEED, count=50)
    cases = run_specs(V.plan_reduction(P) + V.plan_special(P))
    specials = sum(1 for i in range(50) if V.special_data(V.reduction_pair(3, 1, 5, SEED, i)[0]).count == 2)
    ok, detail = summarize(cases)
    return ok, f"{detail}; {specials} special lattices"


def split_consistency() -> tuple[bool, str]:
    specs = [("density", "split", 3, 1, 3, SEED, i) for i in range(50)]
    integral = sum(1 for i in range(50) if add_vectors(*_pair(V.split_pair(3, 1, 3, SEED, i))).integral)
    ok, detail = summarize(run_specs(specs))
    return ok, f"{detail}; {integral} with integral Lflat + <x>"


def _pair(t):
    Lflat, x = t
    return Lflat, [x]


def glcount_identities() -> tuple[bool, str]:
    specs = V.plan_glcount(V.VerifyParams(seed=SEED))
    assert ("glcount", "fixed", (1, 1, 1), 1, 3, 52) in specs
    assert ("glcount", "fixed", (1, 1), 2, 3, 12) in specs
    return summarize(run_specs(specs))


# -- property suite ----------------------------------------------------------


def _fresh(L: HermLattice) -> HermLattice:
    return HermLattice.from_json(L.to_json())


def _random(i: int, label: str, n: int | None = None, max_val: int = 5, p: int | None = None) -> HermLattice:
    rng = corpus.rng_for(SEED, "property", label, i)
    p = p or rng.choice((3, 5))
    cfg = FieldConfig(p, rng.choice(corpus.unit_classes(p)))
    return corpus.random_lattice(rng, cfg, n or rng.randrange(1, 5), max_val)


def prop_dual_involution(i: int) -> bool:
    L = _random(i, "dual")
    return dual(dual(_fresh(L))) == L and dual(_fresh(L)).contains(L)


def prop_fourier_inversion(i: int) -> bool:
    rng = corpus.rng_for(SEED, "property", "fourier-coef", i)
    A = _random(i, "fourier-a", n=rng.choice((2, 4)), p=3)
    B = rescale(_fresh(A), A.cfg.u_pow(rng.randrange(-1, 3)))
    f = LatticeFunction(A.space, [(rng.randrange(-5, 6), A), (rng.randrange(1, 6), B)])
    once = LatticeFunction.from_json(fourier(f).to_json()) if fourier(f) else fourier(f)
    return fourier(once).same_terms(f)


def prop_parity(i: int) -> bool:
    L = _random(i, "parity")
    inv = L.invariants
    return inv.t % 2 == L.rank % 2 and inv.val % 2 == L.rank % 2


def prop_orthogonal_merge(i: int) -> bool:
    rng = corpus.rng_for(SEED, "property", "merge", i)
    p = rng.choice((3, 5))
    A = _random(i, "merge-a", n=rng.randrange(1, 3), p=p)
    B = _random(i, "merge-b", n=rng.randrange(1, 3), p=p)
    if A.cfg != B.cfg:
        B = corpus.random_lattice(rng, A.cfg, B.rank, 5)
    return orthogonal_sum(A, B).invariants.a == tuple(sorted(A.invariants.a + B.invariants.a))


def prop_unit_rescale(i: int) -> bool:
    rng = corpus.rng_for(SEED, "property", "unit", i)
    L = _random(i, "unit")
    cfg = L.cfg
    unit = cfg(rng.randrange(1, cfg.p), rng.randrange(cfg.p))
    same_lattice = rescale(L, unit) == L
    # scaling the form by a unit of O_F keeps the invariants
    beta = rng.choice(corpus.unit_classes(cfg.p)) * rng.choice((1, -1))
    scaled = HermSpace(cfg, [[beta * e for e in row] for row in L.space.gram])
    M = HermLattice(scaled, L.basis)
    return same_lattice and M.invariants == L.invariants


def prop_enumerate_vs_naive(i: int) -> bool:
    L = _random(i, "naive", max_val=4, p=3)
    return integral_overlattices(_fresh(L)) == naive_integral_overlattices(_fresh(L))


PROPERTIES: list[Callable[[int], bool]] = [
    prop_dual_involution,
    prop_fourier_inversion,
    prop_parity,
    prop_orthogonal_merge,
    prop_unit_rescale,
    prop_enumerate_vs_naive,
]


def property_suite() -> tuple[bool, str]:
    failures = []
    for i in range(500):
        prop = PROPERTIES[i % len(PROPERTIES)]
        try:
            ok = prop(i)
        except Exception as exc:  # report, do not abort the suite
            ok = False
            prop = f"{prop.__name__} raised {type(exc).__name__}: {exc}"
        if not ok:
            failures.append((i, getattr(prop, "__name__", prop)))
    detail = f"{500 - len(failures)}/500 cases"
    if failures:
        detail += f"; first failure {failures[0]}"
    return not failures, detail


# ---------------------------------------------------------------------------

CRITERIA = [
    (1, "rank-2 closed formula", rank2_closed_formula, 10),
    (2, "central value vanishes", central_vanishing, 60),
    (3, "hom-count oracle", hom_count_oracle, 120),
    (4, "symplectic embedding counts", symplectic_counts, 60),
    (5, "coset identity", coset_identity, 60),
    (6, "corank-one vanishing", corank1_vanishing, 120),
    (7, "Fourier support and constancy", fourier_support, 300),
    (8, "geometric shadow function", geometric_shadow, 60),
    (9, "reduction and special lattices", reduction_machinery, 120),
    (10, "horizontal + vertical split", split_consistency, 120),
    (11, "parabolic coset counts", glcount_identities, 10),
    (12, "property suite", property_suite, 120),
]


@pytest.mark.parametrize("number,name,check,budget", CRITERIA, ids=[f"criterion{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, check, budget, capsys):
    start = time.perf_counter()
    try:
        ok, detail = check()
    except Exception as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    in_time = elapsed < budget
    status = "PASS" if ok and in_time else "FAIL"
    with capsys.disabled():
        print(f"\n{status} {number:2d} {name}  ({elapsed:.1f} s of {budget} s)  {detail}")
    assert ok, detail
    assert in_time, f"took {elapsed:.1f} s, budget {budget} s"
