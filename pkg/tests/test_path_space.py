import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpkit.path_space import (
    DirectedGraph,
    GraphError,
    Path,
    closure,
    clopens_of_depth,
    cofinal_vertices,
    complement,
    contains_path,
    cylinder,
    format_path,
    format_point,
    is_dense,
    is_minimal,
    is_partition_of_clopens,
    leq,
    make_point,
    meet,
    join,
    parse_path,
    parse_point,
    paths_of_length,
    point_drop,
    point_in,
    point_prefix,
    random_clopen,
    random_graph,
    random_point,
    top,
    zero,
)

LR = DirectedGraph.bouquet("lr")


def P(text, g=LR):
    return parse_path(g, text)


def C(*texts, g=LR):
    return closure([P(t, g) for t in texts], g)


def cells(c, depth):
    """Cylinder semantics: the depth-``depth`` paths lying in c."""
    return {p for p in paths_of_length(c.graph, depth) if contains_path(c, p)}


def test_closure_examples():
    assert C("ll", "lr") == C("l")
    assert C("l", "lr") == C("l")
    assert C("l", "rl", "rr") == top(LR)
    assert C() == zero(LR)


def test_density_examples():
    assert is_dense([P("l"), P("rl"), P("rr")], LR)
    assert not is_dense([P("l")], LR)
    assert is_dense([P("ε")], LR)
    assert not is_dense([], LR)


def test_complement_examples():
    assert complement(C("l")) == C("r")
    assert complement(top(LR)) == zero(LR)
    assert complement(C("ll")) == C("r", "lr")


def test_meet_join_examples():
    assert meet(C("l"), C("r")).is_zero
    assert join(C("l"), C("r")).is_top
    assert meet(C("l"), C("lr")) == C("lr")
    assert leq(C("lr"), C("l")) and not leq(C("l"), C("lr"))


def test_partition_examples():
    one = top(LR)
    assert is_partition_of_clopens([C("l"), C("rl"), C("rr")], one)
    assert not is_partition_of_clopens([C("l"), C("lr")], one)
    assert is_partition_of_clopens([one], one)


def test_depth_two_clopen_count():
    assert len(clopens_of_depth(LR, 2)) == 16
    seen = {c for d in range(3) for c in clopens_of_depth(LR, d)}
    assert len(seen) == 16


def test_cofinality_examples():
    assert is_minimal(DirectedGraph.bouquet("abc"))
    loops = DirectedGraph(["u", "v"], {"a": ("u", "u"), "b": ("v", "v")})
    assert cofinal_vertices(loops) == set()
    arrow = DirectedGraph(["u", "v"], {"a": ("u", "v"), "b": ("v", "v")})
    assert cofinal_vertices(arrow) == {"u", "v"}


def test_point_membership_and_normal_form():
    W = parse_point(LR, "ε;r")
    assert point_in(C("r"), W)
    assert not point_in(C("l"), W)
    assert make_point(LR, P("l"), P("rr")) == make_point(LR, P("l"), P("r"))
    # tail absorbed into the rotated cycle
    assert format_point(LR, make_point(LR, P("lr"), P("lr"))) == "ε;lr"


def test_point_prefix_and_drop():
    W = parse_point(LR, "l;rl")
    assert format_path(LR, point_prefix(LR, W, 4)) == "lrlr"
    assert point_drop(LR, W, 1) == parse_point(LR, "ε;rl")
    assert point_drop(LR, W, 2) == parse_point(LR, "ε;lr")


def test_path_errors():
    g = DirectedGraph(["x", "y"], {"a": ("x", "y"), "b": ("y", "x")})
    with pytest.raises(GraphError):
        parse_path(g, "a.a")
    with pytest.raises(GraphError):
        parse_path(g, "ε")
    assert parse_path(g, "@y") == Path("y", ())
    assert format_path(g, parse_path(g, "a.b")) == "a.b"
    with pytest.raises(GraphError):
        DirectedGraph(["x", "y"], {"a": ("x", "y")})
    with pytest.raises(GraphError):
        parse_point(LR, "ε")


def _graph_and_clopens(seed, depth=3):
    rng = random.Random(seed)
    g = random_graph(rng, 3, 5)
    return g, random_clopen(g, rng, depth), random_clopen(g, rng, depth)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_boolean_operations_match_cylinder_sets(seed):
    g, c, d = _graph_and_clopens(seed)
    D = max(c.depth(), d.depth())
    every = set(paths_of_length(g, D))
    sc, sd = cells(c, D), cells(d, D)
    assert cells(meet(c, d), D) == sc & sd
    assert cells(join(c, d), D) == sc | sd
    assert cells(complement(c), D) == every - sc
    assert leq(c, d) == (sc <= sd)
    assert complement(complement(c)) == c
    # normal form is canonical: equal sets, equal bases
    assert (sc == sd) == (c == d)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_density_matches_enumeration(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 3, 5)
    basis = [p for p in paths_of_length(g, rng.randint(0, 3)) if rng.random() < 0.8]
    basis += [p for p in paths_of_length(g, 1) if rng.random() < 0.3]
    N = max((len(p) for p in basis), default=0)
    oracle = all(any(p.edges[:len(b)] == b.edges and p.start == b.start for b in basis)
                 for p in paths_of_length(g, N))
    assert is_dense(basis, g) == oracle


def _cofinal_oracle(g, v):
    # an infinite path avoiding everything v reaches exists iff a path of
    # |V| edges stays outside that set
    reach = set()
    todo = [v]
    while todo:
        w = todo.pop()
        if w not in reach:
            reach.add(w)
            todo.extend(g.tgt(e) for e in g.out[w])
    n = len(g.vertices)
    for p in paths_of_length(g, n):
        visited = {p.start} | {g.tgt(e) for e in p.edges}
        if not visited & reach:
            return False
    return True


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cofinal_vertices_match_path_enumeration(seed):
    g = random_graph(random.Random(seed), 5, 8)
    assert cofinal_vertices(g) == {v for v in g.vertices if _cofinal_oracle(g, v)}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_point_roundtrip_and_membership(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 3, 5)
    W = random_point(g, rng)
    assert parse_point(g, format_point(g, W)) == W
    c = random_clopen(g, rng, 3)
    assert point_in(c, W) == contains_path(c, point_prefix(g, W, max(c.depth(), 1)))
    assert point_in(c, W) != point_in(complement(c), W)


def test_cylinder_of_empty_path_is_vertex_block():
    g = DirectedGraph(["x", "y"], {"a": ("x", "y"), "b": ("y", "x"), "c": ("y", "y")})
    cx = cylinder(g, Path("x", ()))
    assert complement(cx) == cylinder(g, Path("y", ()))
    assert join(cx, complement(cx)) == top(g)
