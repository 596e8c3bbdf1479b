import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpkit.path_space import parse_point, point_prefix, random_point
from mpkit.selfsimilar import (
    MachineError,
    MealyMachine,
    NekMap,
    apply_point,
    check_machine,
    check_zappa_szep,
    faithful_to_depth,
    groupoidal_witness,
    invertible_states,
    nek_apply,
    nek_compose,
    nek_identity,
    nek_normalize,
    odometer,
    reversed_word,
    random_nek,
    random_zs,
    restrict_to_group,
    restrict_word,
    run,
    separated,
    separatedness_check,
    show_word,
    star_word,
    zs_mul,
    zs_unit,
)

ODO = odometer()


def pt(text, m=ODO):
    return parse_point(m.graph, text)


def test_odometer_unfolding():
    w = reversed_word("10")
    assert w == ("0", "1")
    assert restrict_word(ODO, ("a",), w) == ()
    assert star_word(ODO, w, ("a",)) == reversed_word("11")
    assert show_word(reversed_word("11")) == "11"
    assert show_word(()) == "ε"


def test_identity_state_acts_trivially():
    for w in itertools.product("01", repeat=3):
        assert restrict_word(ODO, (), w) == ()
        assert star_word(ODO, w, ()) == w


def test_odometer_points():
    assert apply_point(ODO, ("a",), pt("ε;1")) == pt("ε;0")
    assert apply_point(ODO, ("a",), pt("0;1")) == pt("1;1")
    assert apply_point(ODO, ("a",), pt("0;1")) == pt("ε;1")
    W = pt("01;001")
    assert apply_point(ODO, (), W) == W


def test_odometer_counts_in_binary():
    # a^k adds k to the least significant bits read first
    for k in range(8):
        w = ("0",) * 3
        out = star_word(ODO, w, ("a",) * k)
        assert int("".join(reversed(out)), 2) == k


def test_machine_checks():
    assert check_machine(ODO, 3).ok
    assert separated(ODO, ("a",), (), 1)
    assert separated(ODO, ("a", "a"), (), 2)
    assert faithful_to_depth(ODO, 2).ok


def test_duplicate_states_collide():
    delta = {("0", "e"): ("e", "0"), ("1", "e"): ("e", "1"),
             ("0", "a"): ("e", "1"), ("1", "a"): ("a", "0"),
             ("0", "b"): ("e", "1"), ("1", "b"): ("a", "0")}
    m = MealyMachine("01", "eab", delta)
    rep = faithful_to_depth(m, 1)
    assert not rep.ok and "collision" in rep.first_failure


def test_machine_validation():
    with pytest.raises(MachineError):
        MealyMachine("01", "ea", {("0", "e"): ("e", "0")})
    with pytest.raises(MachineError):
        MealyMachine("01", "a", {("0", "a"): ("a", "1"), ("1", "a"): ("a", "0")})


def test_zappa_szep_relation():
    assert zs_mul(ODO, ((), ("0",)), (("a",), ())) == ((), ("1",))
    x = (("a",), ("1", "0"))
    assert zs_mul(ODO, zs_unit(ODO), x) == x == zs_mul(ODO, x, zs_unit(ODO))
    rep = check_zappa_szep(ODO, length=3, samples=200, seed=1)
    assert rep.ok, rep


def test_nek_examples():
    add1 = NekMap(ODO, (((), ("a",), ()),))
    assert nek_compose(add1, nek_identity(ODO)) == add1
    assert nek_compose(nek_identity(ODO), add1) == add1
    assert nek_compose(add1, add1).table == (((), ("a", "a"), ()),)
    # one-step expansion of add1 collapses back
    split = nek_normalize(ODO, [(("0",), (), ("1",)), (("1",), ("a",), ("0",))])
    assert split == add1
    assert nek_apply(add1, pt("ε;1")) == pt("ε;0")


def test_nek_rejects_overlap():
    with pytest.raises(MachineError):
        nek_normalize(ODO, [((), (), ()), (("0",), (), ())])


def _reset():
    # c writes 0 and resets, b swaps letters and may reach c forever
    delta = {("0", "e"): ("e", "0"), ("1", "e"): ("e", "1"),
             ("0", "c"): ("e", "0"), ("1", "c"): ("e", "0"),
             ("0", "b"): ("b", "1"), ("1", "b"): ("c", "0")}
    return MealyMachine("01", "ebc", delta)


def test_invertible_states():
    assert invertible_states(ODO) == {"e", "a"}
    m = _reset()
    assert invertible_states(m) == {"e"}
    assert restrict_to_group(m).states == ("e",)


def test_groupoidal_witnesses():
    w = groupoidal_witness(ODO, ("a",), 1)
    assert w.found and w.basis == [()]
    m = _reset()
    w = groupoidal_witness(m, ("c",), 3)
    assert w.found and sorted(w.basis) == [("0",), ("1",)]
    for d in range(1, 6):
        assert not groupoidal_witness(m, ("b",), d).found
    assert str(groupoidal_witness(m, ("b",), 2)) == "undecided at depth 2"


def test_groupoidal_with_unreachable_bad_state():
    delta = {("0", "e"): ("e", "0"), ("1", "e"): ("e", "1"),
             ("0", "a"): ("e", "1"), ("1", "a"): ("a", "0"),
             ("0", "z"): ("e", "0"), ("1", "z"): ("z", "0")}
    m = MealyMachine("01", "eaz", delta)
    assert "z" not in invertible_states(m)
    w = groupoidal_witness(m, ("a",), 3)
    assert w.found and w.basis == [()]
    # brute force: every restriction of a by words up to length 3 is invertible
    inv = invertible_states(m)
    for n in range(4):
        for u in itertools.product("01", repeat=n):
            assert set(restrict_word(m, ("a",), u)) <= inv


def test_separatedness():
    assert separated(ODO, ("a",), (), 1)
    assert star_word(ODO, ("0",), ("a",)) != star_word(ODO, ("0",), ())
    assert separatedness_check(ODO, 3, samples=100).ok


@st.composite
def machines(draw):
    k = draw(st.integers(1, 3))
    n = draw(st.integers(1, 3))
    alphabet = [str(i) for i in range(k)]
    states = ["e"] + [f"q{i}" for i in range(n)]
    delta = {(a, "e"): ("e", a) for a in alphabet}
    for q in states[1:]:
        for a in alphabet:
            delta[(a, q)] = (draw(st.sampled_from(states)), draw(st.sampled_from(alphabet)))
    return MealyMachine(alphabet, states, delta, "e")


def _words(m, rng, n):
    return tuple(rng.choice(m.alphabet) for _ in range(rng.randint(0, n)))


def _sw(m, rng, n):
    return tuple(rng.choice(m.states[1:]) for _ in range(rng.randint(0, n)))


@settings(max_examples=100, deadline=None)
@given(machines(), st.integers(0, 10 ** 6))
def test_action_laws_on_random_machines(m, seed):
    assert check_machine(m, 2).ok
    rng = random.Random(seed)
    for _ in range(20):
        p, q = _sw(m, rng, 2), _sw(m, rng, 2)
        w, u = _words(m, rng, 3), _words(m, rng, 3)
        # star(w, pq) = star(star(w, p), q)
        assert star_word(m, w, p + q) == star_word(m, star_word(m, w, p), q)
        # (pq)|w = p|w . q|(w*p)
        assert restrict_word(m, p + q, w) == m.word(*(restrict_word(m, p, w) + restrict_word(m, q, star_word(m, w, p))))
        # w u * p = (w*p)(u*p|w)
        assert star_word(m, w + u, p) == star_word(m, w, p) + star_word(m, u, restrict_word(m, p, w))
        assert run(m, p, w + u)[1] == restrict_word(m, restrict_word(m, p, w), u)


@settings(max_examples=60, deadline=None)
@given(machines(), st.integers(0, 10 ** 6))
def test_zappa_szep_associativity_random(m, seed):
    rng = random.Random(seed)
    one = zs_unit(m)
    for _ in range(20):
        x, y, z = (random_zs(m, rng, 3) for _ in range(3))
        assert zs_mul(m, zs_mul(m, x, y), z) == zs_mul(m, x, zs_mul(m, y, z))
        assert zs_mul(m, one, x) == x == zs_mul(m, x, one)


@settings(max_examples=60, deadline=None)
@given(machines(), st.integers(0, 10 ** 6))
def test_point_action_matches_prefixes(m, seed):
    rng = random.Random(seed)
    g = m.graph
    W = random_point(g, rng)
    p = _sw(m, rng, 2)
    img = apply_point(m, p, W)
    for n in range(8):
        pre = point_prefix(g, W, n).edges
        assert point_prefix(g, img, n).edges == star_word(m, pre, p)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_nek_compose_matches_point_oracle(seed):
    rng = random.Random(seed)
    f, h = random_nek(ODO, rng), random_nek(ODO, rng)
    fh = nek_compose(f, h)
    for _ in range(10):
        W = random_point(ODO.graph, rng)
        y = nek_apply(f, W)
        expect = nek_apply(h, y) if y is not None else None
        assert nek_apply(fh, W) == expect
