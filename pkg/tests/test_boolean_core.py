import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpkit.boolean_core import (
    AlgebraError,
    BSetError,
    FiniteBSet,
    FiniteBooleanAlgebra,
    Partition,
    check_bset,
    conditioned_disjunction,
    glue,
    ideal_generator,
    is_ideal,
    partitions_of,
    patch,
    pushforward_partition,
    refine_partition,
)

B2 = FiniteBooleanAlgebra(("a1", "a2"))
B3 = FiniteBooleanAlgebra(("a1", "a2", "a3"))


def el(B, *atoms):
    return B.element(atoms)


def test_conditioned_disjunction_extremes():
    c, d = el(B2, "a1"), el(B2, "a2")
    assert conditioned_disjunction(B2.one, c, d) == c
    assert conditioned_disjunction(B2.zero, c, d) == d


def test_conditioned_disjunction_three_atoms():
    b, c, d = el(B3, "a1", "a2"), el(B3, "a2", "a3"), el(B3, "a1", "a3")
    assert conditioned_disjunction(b, c, d) == el(B3, "a2", "a3")


subsets3 = st.sets(st.sampled_from(B3.atoms)).map(B3.element)


@given(subsets3, subsets3, subsets3)
def test_conditioned_disjunction_is_pointwise(b, c, d):
    r = conditioned_disjunction(b, c, d)
    for a in B3.atoms:
        expect = (a in c.atomset) if a in b.atomset else (a in d.atomset)
        assert (a in r.atomset) == expect


def test_refine_trivial_partition():
    one = B2.one
    p = Partition.trivial(one)
    q = {one: Partition.atoms_of(one)}
    assert refine_partition(p, q) == Partition.atoms_of(one)


def test_refine_by_trivial_is_identity():
    p = Partition.of(B3.one, [el(B3, "a1"), el(B3, "a2", "a3")])
    assert refine_partition(p, {b: Partition.trivial(b) for b in p.blocks}) == p


def test_refine_mixed():
    b12, b3 = el(B3, "a1", "a2"), el(B3, "a3")
    p = Partition.of(B3.one, [b12, b3])
    q = {b12: Partition.atoms_of(b12), b3: Partition.trivial(b3)}
    assert refine_partition(p, q) == Partition.atoms_of(B3.one)


def test_refine_missing_block_raises():
    p = Partition.atoms_of(B2.one)
    with pytest.raises(AlgebraError):
        refine_partition(p, {})


def test_pushforward():
    p = Partition.atoms_of(B3.one)
    assert pushforward_partition(p, {b: b for b in p.blocks}) == p
    assert pushforward_partition(p, {b: 0 for b in p.blocks}) == Partition.trivial(B3.one)
    lab = {el(B3, "a1"): "x", el(B3, "a2"): "x", el(B3, "a3"): "y"}
    assert pushforward_partition(p, lab) == Partition.of(B3.one, [el(B3, "a1", "a2"), el(B3, "a3")])


def test_partition_validation():
    with pytest.raises(AlgebraError):
        Partition.of(B2.one, [el(B2, "a1")])
    with pytest.raises(AlgebraError):
        Partition.of(B2.one, [B2.one, el(B2, "a1")])
    with pytest.raises(AlgebraError):
        Partition.of(B2.one, [B2.zero, B2.one])


def test_partition_counts_are_bell_numbers():
    B = FiniteBooleanAlgebra(tuple(range(5)))
    assert [sum(1 for _ in partitions_of(B.element(range(k)))) for k in range(6)] == [1, 1, 2, 5, 15, 52]


def test_algebra_needs_an_atom():
    with pytest.raises(AlgebraError):
        FiniteBooleanAlgebra(())


def test_ideals():
    down = [b for b in B2.elements() if b <= el(B2, "a1")]
    assert is_ideal(B2, down)
    assert ideal_generator(B2, down) == el(B2, "a1")
    assert not is_ideal(B2, [el(B2, "a1")])
    assert ideal_generator(B2, [B2.zero, el(B2, "a1"), el(B2, "a2")]) is None


@pytest.fixture
def grid():
    return FiniteBSet.product(B2, {"a1": "st", "a2": "uv"})


def test_glue_laws_on_product(grid):
    x, y = ("s", "u"), ("t", "v")
    assert glue(B2.one, x, y, grid) == x
    assert glue(el(B2, "a1"), x, x, grid) == x
    assert glue(el(B2, "a1"), x, y, grid) == ("s", "v")


def test_patch_on_product(grid):
    P = Partition.atoms_of(B2.one)
    fam = {el(B2, "a1"): ("s", "u"), el(B2, "a2"): ("t", "v")}
    assert patch(P, fam, grid) == ("s", "v")
    assert patch(Partition.trivial(B2.one), {B2.one: ("t", "u")}, grid) == ("t", "u")
    for x in grid.carrier:
        assert patch(P, {b: x for b in P.blocks}, grid) == x


def test_check_bset_product_passes(grid):
    assert check_bset(grid).ok


def test_check_bset_three_points_over_two_atoms_fails():
    X = FiniteBSet(B2, "xyz", {"a1": [0, 0, 1], "a2": [0, 1, 0]})
    rep = check_bset(X)
    assert not rep.ok
    assert "realised by 0" in rep.first_failure


def test_check_bset_single_atom():
    B1 = FiniteBooleanAlgebra(("a",))
    assert check_bset(FiniteBSet(B1, "xyz", {"a": "xyz"})).ok
    assert not check_bset(FiniteBSet(B1, "xyz", {"a": "xxz"})).ok


def test_bset_constructor_errors():
    with pytest.raises(BSetError):
        FiniteBSet(B2, "xx", {"a1": [0, 1], "a2": [0, 1]})
    with pytest.raises(BSetError):
        FiniteBSet(B2, "xy", {"a1": [0, 1]})
    with pytest.raises(BSetError):
        FiniteBSet(B2, "xy", {"a1": [0], "a2": [0, 1]})


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 2), min_size=n, max_size=n),
    st.lists(st.integers(0, 2), min_size=n, max_size=n))))
def test_check_bset_matches_product_oracle(labels):
    l1, l2 = labels
    X = FiniteBSet(B2, range(len(l1)), {"a1": l1, "a2": l2})
    vecs = list(zip(l1, l2))
    oracle = sorted(vecs) == sorted(itertools.product(set(l1), set(l2)))
    assert check_bset(X, equations=True).ok == oracle
