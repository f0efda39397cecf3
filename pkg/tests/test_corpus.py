import pytest
from hypothesis import given, strategies as st

from hermlat import corpus
from hermlat.efield import FieldConfig
from hermlat.lattice import dual


@given(st.integers(0, 10**6), st.integers(1, 5), st.sampled_from([3, 5]))
def test_random_lattice_bounds(seed, n, p):
    rng = corpus.rng_for(seed, "corpus")
    L = corpus.random_lattice(rng, FieldConfig(p, 1), n, 5)
    assert L.rank == n and L.integral
    assert L.invariants.val <= 5


@given(st.integers(0, 10**6), st.sampled_from([2, 4]), st.booleans())
def test_random_lattice_class(seed, n, nonsplit):
    rng = corpus.rng_for(seed, "corpus-class")
    L = corpus.random_lattice(rng, FieldConfig(3, 1), n, 5, nonsplit=nonsplit)
    assert L.space.is_nonsplit() is nonsplit


@given(st.integers(0, 10**6))
def test_random_corank1(seed):
    rng = corpus.rng_for(seed, "corpus-corank1")
    pair = corpus.random_corank1(rng, FieldConfig(3, 1), 4, 5, min_type=2)
    assert pair.Lflat.rank == 3 and pair.Lflat.space.is_nonsplit()
    assert pair.Lflat.integral and pair.Lflat.invariants.t >= 2
    assert not pair.Lflat.in_span(pair.axis)
    assert all(not pair.Lflat.space.pair(v, pair.axis) for v in pair.Lflat.basis)


def test_scrambling_preserves_invariants():
    cfg = FieldConfig(3, 1)
    model = corpus.block_space(cfg, [1, 2, 2, 3], [1, 2])
    L0 = corpus.Scrambled(corpus.rng_for(0, "x"), model, scramble=False).lattice(range(4))
    L1 = corpus.Scrambled(corpus.rng_for(1, "x"), model).lattice(range(4))
    assert L0.invariants.a == L1.invariants.a == (1, 2, 2, 3)
    assert dual(L1).contains(L1)


def test_unpaired_even_invariant_rejected():
    with pytest.raises(ValueError):
        corpus.block_space(FieldConfig(3, 1), [1, 2])


def test_streams_are_deterministic_and_independent():
    a = [corpus.rng_for(5, "a").random() for _ in range(3)]
    b = [corpus.rng_for(5, "a").random() for _ in range(3)]
    c = [corpus.rng_for(5, "b").random() for _ in range(3)]
    assert a == b and a != c
