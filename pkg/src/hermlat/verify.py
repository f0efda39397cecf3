"""Verification suites: seeded case plans, per-case evaluation, and reports.

A plan is a list of plain tuples, so cases can be shipped to worker processes
and merged back in plan order.  Every comparison is an exact equality of
JSON-ready values.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

from . import corpus
from .density import dden, dden_rank2_closed, dden_split, den_hs, int_number, mu, siegel_series
from .efield import FieldConfig, frac_str, smallest_nonresidue
from .enumerate import (
    Corank1Frame,
    integral_overlattices,
    reduce_pair,
    s_region_membership,
    slice_extensions,
    special_data,
    vertex_overlattices,
)
from .glcount import c_m, c_m_by_group_order, refinement_identity
from .lattice import HermLattice, HermSpace, add_vectors, lattice_val, vaxpy
from .oracle import count_herm_homs, count_symplectic_isoms, coset_count_vint, symplectic_isom_formula
from .schwartz import (
    dden_v_function,
    evaluate,
    fourier,
    int_vlambda_function,
    local_constancy_check,
    support_outside_vint,
)

SUITES = ("density", "isom", "coset", "vanishing", "ft", "geom3", "reduction", "special", "glcount")


@dataclass(frozen=True)
class VerifyParams:
    p: int = 3
    eps0: int = 1
    max_val: int = 4
    seed: int = 0
    count: int | None = None  # overrides the per-suite default number of random cases


def digest(obj: Any) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _case(cid: str, inputs: Any, expected: Any, actual: Any) -> dict:
    return {
        "id": cid,
        "inputs": digest(inputs),
        "expected": expected,
        "actual": actual,
        "pass": expected == actual,
    }


def _cfg(p: int, eps0: int) -> FieldConfig:
    return FieldConfig(p, eps0)


# ---------------------------------------------------------------------------
# density


def _rank2_lattice(cfg: FieldConfig, b1: int, b2: int, beta1: int, beta2: int) -> HermLattice:
    return HermSpace.diagonal(cfg, [beta1 * cfg.p**b1, beta2 * cfg.p**b2]).standard_lattice()


def plan_density(P: VerifyParams) -> list[tuple]:
    out = []
    cfg = _cfg(P.p, P.eps0)
    units = corpus.unit_classes(P.p)
    for b1, b2 in itertools.combinations_with_replacement(range(4), 2):
        for beta1, beta2 in itertools.product(units, repeat=2):
            if _rank2_lattice(cfg, b1, b2, beta1, beta2).space.is_nonsplit():
                out.append(("density", "rank2", P.p, P.eps0, b1, b2, beta1, beta2))
    for i in range(P.count or 20):
        out.append(("density", "central", P.p, P.eps0, P.max_val, P.seed, i))
    if P.p == 3:
        out.append(("density", "homraw", P.p, P.eps0))
        for b, beta, s in itertools.product((0, 1), units, (1, 2)):
            out.append(("density", "homcount", P.p, P.eps0, b, beta, s))
    for i in range(P.count or 10):
        out.append(("density", "split", P.p, P.eps0, min(P.max_val, 3), P.seed, i))
    return out


def central_lattice(p: int, eps0: int, max_val: int, seed: int, i: int) -> HermLattice:
    rng = corpus.rng_for(seed, "central", p, eps0, i)
    n = rng.choice((2, 4))
    return corpus.random_lattice(rng, _cfg(p, eps0), n, max_val, nonsplit=True)


def split_pair(p: int, eps0: int, max_val: int, seed: int, i: int):
    """Corank-one pair whose full lattice is integral when one can be found quickly."""
    rng = corpus.rng_for(seed, "split", p, eps0, i)
    cfg = _cfg(p, eps0)
    pair = corpus.random_corank1(rng, cfg, 4, max_val, min_type=2)
    x = None
    for _ in range(30):
        x = corpus.random_vector_near(rng, pair, lam_vals=(0, 1), dual_part=rng.random() < 0.5)
        if add_vectors(pair.Lflat, [x]).integral:
            break
    return pair.Lflat, x


def run_density(spec: tuple) -> dict:
    kind = spec[1]
    if kind == "rank2":
        _, _, p, eps0, b1, b2, beta1, beta2 = spec
        L = _rank2_lattice(_cfg(p, eps0), b1, b2, beta1, beta2)
        closed = dden_rank2_closed(b1, b2, p)
        return _case(f"rank2/p{p}/e{eps0}/b{b1},{b2}/u{beta1},{beta2}", spec,
                     {"dden": closed, "int": closed}, {"dden": dden(L, p), "int": int_number(L, p)})
    if kind == "central":
        L = central_lattice(*spec[2:])
        return _case(f"central/p{spec[2]}/{spec[-1]}", L.to_json(), "0/1", frac_str(siegel_series(L, spec[2])(1)))
    if kind == "homraw":
        _, _, p, eps0 = spec
        r = count_herm_homs([[1]], 1, 1, p, eps0)
        return _case(f"homcount/p{p}/raw-unit-s1-N1", spec, 24, r.raw_count)
    if kind == "homcount":
        _, _, p, eps0, b, beta, s = spec
        cfg = _cfg(p, eps0)
        L = HermSpace.diagonal(cfg, [beta * p**b]).standard_lattice()
        expected = frac_str(den_hs(L, s, p))
        levels = [frac_str(count_herm_homs([[beta * p**b]], s, N, p, eps0).normalized) for N in (2, 3)]
        return _case(f"homcount/p{p}/b{b}/u{beta}/s{s}", spec, [expected, expected], levels)
    if kind == "split":
        Lflat, x = split_pair(*spec[2:])
        p = spec[2]
        L = add_vectors(Lflat, [x])
        h, v = dden_split(Lflat, x, p)
        return _case(f"split/p{p}/{spec[-1]}", {"L": Lflat.to_json(), "x": [e.to_json() for e in x]},
                     dden(L, p) if L.integral else 0, h + v)
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# isom


def plan_isom(P: VerifyParams) -> list[tuple]:
    q = P.p
    if q > 3:
        return []
    out = []
    for m in range(1, 4):
        for t in range(m % 2, m + 1, 2):
            for s in range(1, 4):
                out.append(("isom", "symp", m, t, s, q))
    return out


def run_isom(spec: tuple) -> dict:
    _, _, m, t, s, q = spec
    return _case(f"symp/q{q}/m{m}/t{t}/s{s}", spec, frac_str(symplectic_isom_formula(m, t, s, q)),
                 frac_str(count_symplectic_isoms(m, t, s, q)))


# ---------------------------------------------------------------------------
# coset


def _full_type_patterns(rank: int, max_val: int) -> list[tuple[int, ...]]:
    out = set()
    for inv in itertools.combinations_with_replacement(range(1, max_val + 1), rank):
        if sum(inv) > max_val:
            continue
        try:
            corpus.block_space(_cfg(3, 1), inv)
        except ValueError:
            continue
        out.add(inv)
    return sorted(out)


def plan_coset(P: VerifyParams) -> list[tuple]:
    out = []
    units = corpus.unit_classes(P.p)
    for rank in (1, 3):
        for inv in _full_type_patterns(rank, P.max_val):
            n_odd = sum(1 for a in inv if a % 2)
            for betas in itertools.product(units, repeat=n_odd):
                out.append(("coset", "vint", P.p, P.eps0, inv, betas, P.seed))
    return out


def run_coset(spec: tuple) -> dict:
    _, _, p, eps0, inv, betas, seed = spec
    cfg = _cfg(p, eps0)
    rng = corpus.rng_for(seed, "coset", p, eps0, inv, betas)
    model = corpus.block_space(cfg, inv, betas)
    L = corpus.Scrambled(rng, model).lattice(range(len(inv)))
    m = (len(inv) - 1) // 2
    big = coset_count_vint(L, 0)
    small = coset_count_vint(L, 1)
    return _case(f"coset/p{p}/a{','.join(map(str, inv))}/u{','.join(map(str, betas))}", L.to_json(),
                 big, cfg.q ** (2 * m) * small)


# ---------------------------------------------------------------------------
# vanishing


def vanishing_pair(p: int, eps0: int, max_val: int, seed: int, i: int):
    rng = corpus.rng_for(seed, "vanishing", p, eps0, i)
    cfg = _cfg(p, eps0)
    while True:
        pair = corpus.random_corank1(rng, cfg, 4, max_val, min_type=2)
        slices = [S for S in integral_overlattices(pair.Lflat) if S.invariants.t > 1]
        if slices:
            return pair.Lflat, rng.choice(slices)


def plan_vanishing(P: VerifyParams) -> list[tuple]:
    return [("vanishing", "layer0", P.p, P.eps0, P.max_val, P.seed, i) for i in range(P.count or 30)]


def run_vanishing(spec: tuple) -> dict:
    Lflat, S = vanishing_pair(*spec[2:])
    frame = Corank1Frame(Lflat)
    exts = slice_extensions(frame, S, 0, 0)
    total = sum(mu(e.type, Lflat.cfg.q) for e in exts)
    jumps = all(abs(e.type - S.invariants.t) == 1 for e in exts)
    return _case(f"layer0/p{spec[2]}/{spec[-1]}", {"L": Lflat.to_json(), "S": S.to_json()},
                 {"sum": 0, "type_jump": True}, {"sum": total, "type_jump": jumps})


# ---------------------------------------------------------------------------
# ft


def plan_ft(P: VerifyParams) -> list[tuple]:
    return [("ft", "support", P.p, P.eps0, P.max_val, P.seed, i) for i in range(P.count or 10)]


def ft_lattice(p: int, eps0: int, max_val: int, seed: int, i: int):
    rng = corpus.rng_for(seed, "ft", p, eps0, i)
    # every other case forces type 3, where the vertical function is nonzero
    pair = corpus.random_corank1(rng, _cfg(p, eps0), 4, max_val, min_type=2 if i % 2 == 0 else 0)
    y = corpus.random_vector_near(rng, pair, lam_vals=(0,))
    y = Corank1Frame(pair.Lflat).split(y)[0]
    return pair.Lflat, y


def run_ft(spec: tuple) -> dict:
    Lflat, y = ft_lattice(*spec[2:])
    frame = Corank1Frame(Lflat)
    g = dden_v_function(Lflat)
    witness = support_outside_vint(fourier(g), direction=frame.w0)
    const = local_constancy_check(Lflat, y, extension=g)
    return _case(f"ft/p{spec[2]}/{spec[-1]}", {"L": Lflat.to_json(), "y": [e.to_json() for e in y]},
                 {"witness": None, "locally_constant": True},
                 {"witness": None if witness is None else [e.to_json() for e in witness], "locally_constant": const})


# ---------------------------------------------------------------------------
# geom3


def vertex_type4(p: int, eps0: int, seed: int) -> HermLattice:
    cfg = _cfg(p, eps0)
    nr = smallest_nonresidue(p)
    rng = corpus.rng_for(seed, "geom3", p, eps0)
    for last in (1, nr):
        model = HermSpace.diagonal(cfg, [1, 1, 1, last])
        if model.is_nonsplit():
            return corpus.Scrambled(rng, model).lattice(range(4))
    raise AssertionError("no nonsplit unit diagonal")


def plan_geom3(P: VerifyParams) -> list[tuple]:
    return [("geom3", kind, P.p, P.eps0, P.seed) for kind in ("count", "values", "fourier")]


def run_geom3(spec: tuple) -> dict:
    _, kind, p, eps0, seed = spec
    Lam = vertex_type4(p, eps0, seed)
    q = Lam.cfg.q
    proper = [L for L in vertex_overlattices(Lam) if L != Lam]
    cid = f"geom3/p{p}/e{eps0}/{kind}"
    if kind == "count":
        return _case(cid, Lam.to_json(), q * q + 1, len(proper))
    f = int_vlambda_function(Lam)
    if kind == "values":
        inside = evaluate(f, Lam.space.zero_vector())
        # a generator of each proper overlattice outside Lambda
        mids = set()
        for L in proper:
            g = next(v for v in L.basis if not Lam.contains_vector(v))
            mids.add(evaluate(f, g))
        outs = {evaluate(f, vaxpy(Lam.cfg.u_pow(-1), Lam.dual.basis[0], Lam.space.zero_vector()))}
        for v in Lam.dual.basis:
            if not any(L.contains_vector(v) for L in proper):
                outs.add(evaluate(f, v))
        actual = {"lambda": frac_str(inside), "proper": sorted(frac_str(v) for v in mids),
                  "outside": sorted(frac_str(v) for v in outs)}
        expected = {"lambda": frac_str(1 - q), "proper": ["1/1"], "outside": ["0/1"]}
        return _case(cid, Lam.to_json(), expected, actual)
    return _case(cid, Lam.to_json(), True, fourier(f) == f.scale(-1))


# ---------------------------------------------------------------------------
# reduction / special


def reduction_pair(p: int, eps0: int, max_val: int, seed: int, i: int):
    """(Lflat, x) with x outside span(Lflat) and outside the S region."""
    rng = corpus.rng_for(seed, "reduction", p, eps0, i)
    cfg = _cfg(p, eps0)
    while True:
        pair = corpus.random_corank1(rng, cfg, 4, max_val, min_type=1)
        for _ in range(20):
            x = corpus.random_vector_near(rng, pair, lam_vals=(-1, 0, 1, 2), dual_part=True)
            if not pair.Lflat.in_span(x) and not s_region_membership(pair.Lflat, x):
                return pair.Lflat, x


def plan_reduction(P: VerifyParams) -> list[tuple]:
    return [("reduction", "rewrite", P.p, P.eps0, P.max_val, P.seed, i) for i in range(P.count or 50)]


def run_reduction(spec: tuple) -> dict:
    Lflat, x = reduction_pair(*spec[2:])
    L = add_vectors(Lflat, [x])
    try:
        Lp, xp = reduce_pair(Lflat, x)
        actual = {"same_lattice": add_vectors(Lp, [xp]) == L,
                  "val_drops": lattice_val(Lp) < lattice_val(Lflat)}
    except (ValueError, AssertionError) as exc:
        actual = {"error": str(exc)}
    return _case(f"reduce/p{spec[2]}/{spec[-1]}", {"L": Lflat.to_json(), "x": [e.to_json() for e in x]},
                 {"same_lattice": True, "val_drops": True}, actual)


def plan_special(P: VerifyParams) -> list[tuple]:
    return [("special", "count", P.p, P.eps0, P.max_val, P.seed, i) for i in range(P.count or 50)]


def run_special(spec: tuple) -> dict:
    Lflat, _ = reduction_pair(*spec[2:])
    data = special_data(Lflat)
    actual = {"count_ok": data.count in (0, 2), "checks": all(data.checks.values()) if data.count == 2 else True}
    return _case(f"special/p{spec[2]}/{spec[-1]}", Lflat.to_json(), {"count_ok": True, "checks": True}, actual)


# ---------------------------------------------------------------------------
# glcount


def _compositions(g: int):
    for k in range(1, g + 1):
        for parts in itertools.product(range(1, g + 1), repeat=k):
            if sum(parts) == g:
                yield parts


REFINEMENT_CHAINS = [
    ((2, 1), ((1, 1), (1,))),
    ((1, 2), ((1,), (1, 1))),
    ((3,), ((1, 2),)),
    ((3,), ((2, 1),)),
    ((3,), ((1, 1, 1),)),
    ((2, 1), ((2,), (1,))),
    ((2,), ((1, 1),)),
]


def plan_glcount(P: VerifyParams) -> list[tuple]:
    out = []
    for g in range(1, 4):
        for parts in _compositions(g):
            for m in (1, 2):
                for p in (2, 3):
                    out.append(("glcount", "order", parts, m, p))
    for coarse, refs in REFINEMENT_CHAINS:
        for m in (1, 2):
            for p in (2, 3):
                out.append(("glcount", "refine", coarse, refs, m, p))
    out.append(("glcount", "fixed", (1, 1, 1), 1, 3, 52))
    out.append(("glcount", "fixed", (1, 1), 2, 3, 12))
    return out


def run_glcount(spec: tuple) -> dict:
    kind = spec[1]
    if kind == "order":
        _, _, parts, m, p = spec
        return _case(f"order/{'-'.join(map(str, parts))}/m{m}/p{p}", spec,
                     c_m(parts, m, p), c_m_by_group_order(parts, m, p))
    if kind == "refine":
        _, _, coarse, refs, m, p = spec
        chk = refinement_identity(coarse, refs, m, p)
        prod = chk.coarse
        for f in chk.factors:
            prod *= f
        return _case(f"refine/{coarse}/{refs}/m{m}/p{p}", spec, chk.refined, prod)
    _, _, parts, m, p, value = spec
    return _case(f"fixed/{'-'.join(map(str, parts))}/m{m}/p{p}", spec, value, c_m_by_group_order(parts, m, p))


# ---------------------------------------------------------------------------
# driver

PLANS: dict[str, Callable[[VerifyParams], list[tuple]]] = {
    "density": plan_density,
    "isom": plan_isom,
    "coset": plan_coset,
    "vanishing": plan_vanishing,
    "ft": plan_ft,
    "geom3": plan_geom3,
    "reduction": plan_reduction,
    "special": plan_special,
    "glcount": plan_glcount,
}

RUNNERS: dict[str, Callable[[tuple], dict]] = {
    "density": run_density,
    "isom": run_isom,
    "coset": run_coset,
    "vanishing": run_vanishing,
    "ft": run_ft,
    "geom3": run_geom3,
    "reduction": run_reduction,
    "special": run_special,
    "glcount": run_glcount,
}


def run_case(spec: tuple) -> dict:
    try:
        return RUNNERS[spec[0]](spec)
    except Exception as exc:  # a crash is a failed case, not a crashed report
        return {"id": f"{spec[0]}/{spec[1]}/error", "inputs": digest(repr(spec)), "expected": "no error",
                "actual": f"{type(exc).__name__}: {exc}", "pass": False}


def run_cases(specs: list[tuple], jobs: int = 1) -> list[dict]:
    if jobs <= 1 or len(specs) <= 1:
        return [run_case(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_case, specs))


def verify(suite: str, params: VerifyParams, jobs: int = 1, timing: bool = True) -> dict:
    """Run one suite (or "all") and return a VerifyReport dictionary."""
    names = SUITES if suite == "all" else (suite,)
    if any(n not in PLANS for n in names):
        raise ValueError(f"unknown suite {suite!r}")
    start = time.perf_counter()
    specs = [s for n in names for s in PLANS[n](params)]
    cases = run_cases(specs, jobs)
    elapsed = int((time.perf_counter() - start) * 1000)
    return {
        "suite": suite,
        "cases": cases,
        "summary": {
            "total": len(cases),
            "passed": sum(1 for c in cases if c["pass"]),
            "seed": params.seed,
            "runtime_ms": elapsed if timing else 0,
        },
    }

