import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpkit.path_space import (
    DirectedGraph,
    Path,
    closure,
    cofinal_vertices,
    complement,
    cylinder,
    format_path,
    parse_path,
    parse_point,
    paths_of_length,
    point_prefix,
    random_graph,
    random_point,
    top,
)
from mpkit.prefix_maps import (
    MapError,
    PrefixMonoid,
    act_clopen,
    apply_point,
    compose,
    degree,
    domain,
    etale_decomposition,
    germ_at,
    germ_compose,
    germ_equal,
    germ_identity,
    germ_inverse,
    glue_maps,
    identity,
    idem,
    is_partial_iso,
    join_disjoint,
    leq,
    letter,
    letter_star,
    normalize,
    parse_entries,
    partial_inverse,
    random_map,
    random_map_at,
    random_partial_iso,
    restriction,
    topos_witness,
    zero_map,
    check_presentation,
)
from mpkit.suites import three_vertex_graph

LR = DirectedGraph.bouquet("lr")
GRAPHS = [LR, three_vertex_graph()]


def M(*pairs, g=LR):
    return parse_entries(g, pairs)


def C(*texts, g=LR):
    return closure([parse_path(g, t) for t in texts], g)


def raw(table, x):
    """First-match evaluation of a table on a finite path, written out by hand."""
    for u, v in table:
        if x.start == u.start and x.edges[:len(u.edges)] == u.edges:
            return Path(v.start, v.edges + x.edges[len(u.edges):])
    return None


def agree_on_cylinders(f, h, depth):
    return all(raw(f.table, x) == raw(h.table, x) for x in paths_of_length(f.graph, depth))


def test_normalize_examples():
    assert M(("l", "l"), ("r", "r")) == identity(LR)
    assert M(("l", "rl"), ("r", "rr")) == M(("ε", "r"))
    assert M(("ε", "l")).table == ((parse_path(LR, "ε"), parse_path(LR, "l")),)


def test_normalize_rejects_bad_tables():
    with pytest.raises(MapError):
        M(("ε", "l"), ("l", "r"))
    g = three_vertex_graph()
    with pytest.raises(Exception):
        normalize([(parse_path(g, "a"), parse_path(g, "b"))], g)


def test_compose_examples():
    l, ls, rs = letter(LR, "l"), letter_star(LR, "l"), letter_star(LR, "r")
    assert compose(l, ls) == identity(LR)
    assert compose(l, rs) == zero_map(LR)
    assert compose(ls, l) == M(("l", "l"))


def test_restriction_and_order_examples():
    assert restriction(M(("ε", "l"))) == identity(LR)
    assert restriction(M(("l", "ε"))) == M(("l", "l"))
    assert leq(M(("l", "ll")), M(("ε", "l")))
    assert not leq(M(("ε", "l")), M(("l", "ll")))


def test_join_examples():
    ll = compose(letter_star(LR, "l"), letter(LR, "l"))
    rr = compose(letter_star(LR, "r"), letter(LR, "r"))
    assert join_disjoint([ll, rr]) == identity(LR)
    f = M(("l", "r"))
    assert join_disjoint([f, zero_map(LR)]) == f
    with pytest.raises(MapError):
        join_disjoint([identity(LR), f])


def test_partial_inverse_examples():
    f = M(("ε", "l"))
    assert partial_inverse(f) == M(("l", "ε"))
    assert is_partial_iso(f)
    assert partial_inverse(identity(LR)) == identity(LR)
    assert partial_inverse(M(("l", "ε"), ("r", "ε"))) is None


def test_etale_decomposition_examples():
    assert etale_decomposition(identity(LR)) == [identity(LR)]
    assert etale_decomposition(M(("l", "r"), ("r", "l"))) == [M(("l", "r")), M(("r", "l"))]
    assert etale_decomposition(zero_map(LR)) == []


def test_act_clopen_examples():
    m = M(("ε", "l"))
    assert act_clopen(m, C("l")) == top(LR)
    assert act_clopen(m, C("r")).is_zero
    b = C("lr", "r")
    assert act_clopen(identity(LR), b) == b


def test_glue_examples():
    one, l, r = identity(LR), M(("ε", "l")), M(("ε", "r"))
    assert glue_maps(top(LR), l, r) == l
    assert glue_maps(C("l"), one, one) == one
    h = glue_maps(C("l"), l, r)
    assert h == M(("l", "ll"), ("r", "rr"))
    assert agree_on_cylinders(h, M(("l", "ll"), ("r", "rr")), 3)


def test_apply_point_examples():
    W = parse_point(LR, "ε;r")
    assert apply_point(M(("ε", "l")), W) == parse_point(LR, "l;r")
    assert apply_point(identity(LR), W) == W
    assert apply_point(M(("l", "ε")), parse_point(LR, "l;r")) == W
    with pytest.raises(MapError):
        apply_point(M(("l", "ε")), W)


def test_topos_witness_examples():
    w = topos_witness(C("l"))
    assert w.ok and w.map == M(("ε", "l"))
    assert topos_witness(top(LR)).map == identity(LR)
    loops = DirectedGraph(["u", "v"], {"a": ("u", "u"), "b": ("v", "v")})
    bad = topos_witness(cylinder(loops, Path("u", ())))
    assert not bad.ok and bad.vertex not in cofinal_vertices(loops)
    with pytest.raises(MapError):
        topos_witness(C())


def test_germ_examples():
    W = parse_point(LR, "ε;r")
    assert degree(germ_at(M(("ε", "l")), W)) == 1
    e = germ_identity(LR, W)
    assert degree(e) == 0
    a = germ_at(M(("ε", "l")), W)
    assert germ_equal(germ_compose(e, a), a)
    V = parse_point(LR, "ε;l")
    assert germ_equal(germ_at(identity(LR), V), germ_at(M(("l", "l"), ("r", "l")), V))
    assert not germ_equal(germ_at(identity(LR), V), germ_at(M(("ε", "l")), V))


@pytest.mark.parametrize("letters", ["a", "lr", "abc", "abcd"])
def test_presentation_relations(letters):
    g = DirectedGraph.bouquet(letters)
    rep = check_presentation(g)
    assert rep.ok, rep


def test_one_letter_bouquet_letter_is_invertible():
    g = DirectedGraph.bouquet("a")
    a, s = letter(g, "a"), letter_star(g, "a")
    assert compose(a, s) == identity(g) and compose(s, a) == identity(g)


seeds = st.integers(0, 10 ** 6)


@settings(max_examples=80, deadline=None)
@given(seeds, st.sampled_from(GRAPHS))
def test_compose_matches_pointwise_evaluation(seed, g):
    rng = random.Random(seed)
    f, h = random_map(g, rng, 3), random_map(g, rng, 3)
    fh = compose(f, h)
    D = f.depth() + h.depth() + 2
    for x in paths_of_length(g, D):
        y = raw(f.table, x)
        expect = raw(h.table, y) if y is not None else None
        assert raw(fh.table, x) == expect


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(GRAPHS))
def test_monoid_laws(seed, g):
    rng = random.Random(seed)
    s, t, u = (random_map(g, rng, 3) for _ in range(3))
    one = identity(g)
    assert compose(compose(s, t), u) == compose(s, compose(t, u))
    assert compose(one, s) == s == compose(s, one)
    assert compose(zero_map(g), s) == zero_map(g) == compose(s, zero_map(g))
    # restriction axioms
    sp = restriction(s)
    assert compose(sp, s) == s
    assert compose(sp, restriction(t)) == compose(restriction(t), sp)
    assert restriction(compose(sp, t)) == compose(sp, restriction(t))
    assert compose(s, restriction(t)) == compose(restriction(compose(s, t)), s)


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(GRAPHS))
def test_join_distributes(seed, g):
    rng = random.Random(seed)
    s, t = random_map(g, rng, 3), random_map(g, rng, 3)
    c = domain(t)
    u = compose(idem(complement(c)), random_map(g, rng, 3))
    S = PrefixMonoid(g)
    tu = S.join(t, u)
    assert tu is not None
    assert compose(s, tu) == S.join(compose(s, t), compose(s, u))
    assert compose(tu, s) == join_disjoint([compose(t, s), compose(u, s)])


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(GRAPHS))
def test_partial_isos_and_decomposition(seed, g):
    rng = random.Random(seed)
    f = random_partial_iso(g, rng, 3)
    t = partial_inverse(f)
    assert compose(f, t) == restriction(f)
    assert compose(t, f) == restriction(t)
    h = random_map(g, rng, 3)
    parts = etale_decomposition(h)
    assert all(is_partial_iso(p) for p in parts)
    assert (join_disjoint(parts) if parts else zero_map(g)) == h


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(GRAPHS))
def test_apply_point_matches_prefix_evaluation(seed, g):
    rng = random.Random(seed)
    W = random_point(g, rng)
    f = random_map_at(g, rng, W, 3)
    img = apply_point(f, W)
    for n in range(f.depth(), f.depth() + 5):
        y = raw(f.table, point_prefix(g, W, n))
        assert y is not None
        assert point_prefix(g, img, len(y)) == y


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(GRAPHS))
def test_germ_degree_and_inverse(seed, g):
    rng = random.Random(seed)
    W = random_point(g, rng)
    f = random_map_at(g, rng, W, 3)
    a = germ_at(f, W)
    h = random_map_at(g, rng, a.target, 3)
    b = germ_at(h, a.target)
    assert degree(germ_compose(a, b)) == degree(a) + degree(b)
    inv = germ_inverse(a)
    assert germ_equal(germ_compose(a, inv), germ_identity(g, W))
    assert germ_equal(germ_compose(inv, a), germ_identity(g, a.target))


def test_format_of_maps():
    assert repr(M(("l", "ll"), ("r", "rr"))) == "{l->ll, r->rr}"
    g = three_vertex_graph()
    assert format_path(g, parse_path(g, "a.b")) == "a.b"
