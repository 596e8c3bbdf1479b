"""Prefix-exchange partial maps on a path space.

An entry ``u -> v`` sends every infinite path ``u.y`` to ``v.y``; both ends
of an entry finish at the same vertex.  Products are diagrammatic:
``compose(f, g)`` applies f first, then g.  Tables are kept in the normal
form obtained by collapsing complete sibling families
``{u.e -> v.e : e leaving t(u)}`` into ``u -> v``, so equality of maps is
equality of tables.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .path_space import (Clopen, DirectedGraph, GraphError, Path, PointSpec, check_path, closure, complement,
                         concat, cylinder, drop, end, extend, format_path, format_point, is_prefix, meet,
                         normalize_point, parse_path, path_key, point_drop, point_in, point_prefix, prepend,
                         random_path, random_point, random_tree_leaves, top)

Entry = tuple  # (Path, Path)


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class PrefixMap:
    graph: DirectedGraph
    table: tuple

    def __repr__(self) -> str:
        g = self.graph
        if not self.table:
            return "{}"
        return "{" + ", ".join(f"{format_path(g, u)}->{format_path(g, v)}" for u, v in self.table) + "}"

    def depth(self) -> int:
        return max((max(len(u), len(v)) for u, v in self.table), default=0)

    def domain_depth(self) -> int:
        return max((len(u) for u, _ in self.table), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.table

    def __mul__(self, other: "PrefixMap") -> "PrefixMap":
        return compose(self, other)


def _entry_key(g: DirectedGraph, e: Entry) -> tuple:
    return (path_key(g, e[0]), path_key(g, e[1]))


def normalize(entries: Iterable[Entry], g: DirectedGraph) -> PrefixMap:
    """Validate a raw table and collapse sibling families to a fixpoint."""
    entries = list(dict.fromkeys(entries))
    for u, v in entries:
        check_path(g, u)
        check_path(g, v)
        if end(g, u) != end(g, v):
            raise MapError(f"entry {format_path(g, u)} -> {format_path(g, v)} ends at different vertices")
    seen: dict = {}
    for u, _ in entries:
        if u in seen:
            raise MapError(f"domain {format_path(g, u)} given twice")
        seen[u] = True
    for u, _ in entries:
        for k in range(len(u.edges)):
            w = Path(u.start, u.edges[:k])
            if w in seen:
                raise MapError(f"domains {format_path(g, w)} and {format_path(g, u)} overlap")
    return _collapsed(dict(entries), g)


def _collapsed(cur: dict, g: DirectedGraph) -> PrefixMap:
    """Collapse full sibling families of a valid prefix-free table."""
    changed = True
    while changed:
        changed = False
        groups: dict = {}
        for u, v in cur.items():
            if u.edges and v.edges and u.edges[-1] == v.edges[-1]:
                key = (Path(u.start, u.edges[:-1]), Path(v.start, v.edges[:-1]))
                groups.setdefault(key, set()).add(u.edges[-1])
        # each entry has one parent, so full families are disjoint
        for (u0, v0), kids in groups.items():
            if len(kids) == len(g.out[end(g, u0)]):
                for e in kids:
                    del cur[extend(u0, e)]
                cur[u0] = v0
                changed = True
    table = tuple(sorted(cur.items(), key=lambda e: _entry_key(g, e)))
    return PrefixMap(g, table)


def parse_entries(g: DirectedGraph, pairs: Iterable[tuple[str, str]]) -> PrefixMap:
    return normalize([(parse_path(g, u), parse_path(g, v)) for u, v in pairs], g)


def identity(g: DirectedGraph) -> PrefixMap:
    return PrefixMap(g, tuple((Path(v, ()), Path(v, ())) for v in g.vertices))


def zero_map(g: DirectedGraph) -> PrefixMap:
    return PrefixMap(g, ())


def idem(c: Clopen) -> PrefixMap:
    """The identity restricted to c."""
    return _collapsed({u: u for u in c.basis}, c.graph)


def compose(f: PrefixMap, g: PrefixMap) -> PrefixMap:
    """Apply f, then g."""
    if f.graph != g.graph:
        raise MapError("maps over different graphs")
    G = f.graph
    out = []
    for u, v in f.table:
        for u2, v2 in g.table:
            if v.start != u2.start:
                continue
            if is_prefix(u2, v):
                out.append((u, concat(v2, drop(G, v, len(u2)))))
            elif is_prefix(v, u2):
                z = drop(G, u2, len(v))
                out.append((concat(u, z), v2))
    # domains of f are disjoint and so are those of g: the output is valid
    return _collapsed(dict(out), G)


def evaluate(f: PrefixMap, x: Path) -> Path | None:
    """Image of the finite path x, or None when undecided or outside the domain.

    Only meaningful once x is at least as long as the domain entries it
    meets; the oracles use paths deeper than every table.
    """
    for u, v in f.table:
        if is_prefix(u, x):
            return concat(v, drop(f.graph, x, len(u)))
    return None


def domain(f: PrefixMap) -> Clopen:
    return closure([u for u, _ in f.table], f.graph)


def restriction(f: PrefixMap) -> PrefixMap:
    return _collapsed({u: u for u, _ in f.table}, f.graph)


def is_total(f: PrefixMap) -> bool:
    return domain(f) == top(f.graph)


def leq(f: PrefixMap, g: PrefixMap) -> bool:
    return compose(restriction(f), g) == f


def disjoint(f: PrefixMap, g: PrefixMap) -> bool:
    return meet(domain(f), domain(g)).is_zero


def join_disjoint(fs: Sequence[PrefixMap]) -> PrefixMap:
    fs = list(fs)
    if not fs:
        raise MapError("join of an empty family needs a graph; use zero_map")
    g = fs[0].graph
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            if not disjoint(fs[i], fs[j]):
                raise MapError(f"domains of {fs[i]!r} and {fs[j]!r} overlap")
    return _collapsed(dict(e for f in fs for e in f.table), g)


def partial_inverse(f: PrefixMap) -> PrefixMap | None:
    imgs = [v for _, v in f.table]
    for i, v in enumerate(imgs):
        for j, w in enumerate(imgs):
            if i != j and is_prefix(v, w):
                return None
    return _collapsed({v: u for u, v in f.table}, f.graph)


def is_partial_iso(f: PrefixMap) -> bool:
    t = partial_inverse(f)
    return t is not None and compose(f, t) == restriction(f) and compose(t, f) == restriction(t)


def etale_decomposition(f: PrefixMap) -> list[PrefixMap]:
    return [_collapsed(dict([e]), f.graph) for e in f.table]


def act_clopen(s: PrefixMap, b: Clopen) -> Clopen:
    """Domain of s followed by the identity on b."""
    return domain(compose(s, idem(b)))


def glue_maps(b: Clopen, m: PrefixMap, n: PrefixMap) -> PrefixMap:
    return join_disjoint([compose(idem(b), m), compose(idem(complement(b)), n)])


def restrict_to(c: Clopen, f: PrefixMap) -> PrefixMap:
    return compose(idem(c), f)


def apply_point(f: PrefixMap, W: PointSpec) -> PointSpec:
    g = f.graph
    for u, v in f.table:
        if is_prefix(u, point_prefix(g, W, len(u))):
            return prepend(g, v, point_drop(g, W, len(u)))
    raise MapError(f"point {format_point(g, W)} outside the domain of {f!r}")


# ---------------------------------------------------------------------------
# the Boolean restriction monoid, for the generic checkers


class PrefixMonoid:
    """Operations of the Boolean restriction monoid of prefix maps on g."""

    def __init__(self, g: DirectedGraph):
        self.graph = g
        self.one = identity(g)
        self.zero = zero_map(g)

    def mul(self, s: PrefixMap, t: PrefixMap) -> PrefixMap:
        return compose(s, t)

    def plus(self, s: PrefixMap) -> PrefixMap:
        return restriction(s)

    def join(self, s: PrefixMap, t: PrefixMap) -> PrefixMap | None:
        if not disjoint(s, t):
            return None
        return _collapsed(dict(s.table + t.table), self.graph)

    def complement(self, e: PrefixMap) -> PrefixMap:
        return idem(complement(domain(e)))


class PathPairView:
    """Clopens and total maps seen as an (infinite) matched pair."""

    def __init__(self, g: DirectedGraph):
        self.graph = g
        self.unit = identity(g)

    def star(self, m: PrefixMap, b: Clopen) -> Clopen:
        return act_clopen(m, b)

    def glue(self, b: Clopen, m: PrefixMap, n: PrefixMap) -> PrefixMap:
        return glue_maps(b, m, n)

    def mul(self, m: PrefixMap, n: PrefixMap) -> PrefixMap:
        return compose(m, n)

    def equiv(self, b: Clopen, m: PrefixMap, n: PrefixMap) -> bool:
        return restrict_to(b, m) == restrict_to(b, n)


def matched_pair_view(g: DirectedGraph) -> PathPairView:
    return PathPairView(g)


def check_pair_view_samples(view: PathPairView, samples: Iterable[tuple]):
    """The matched-pair laws on sampled (b, c, m, n, p) tuples."""
    from .report import Report
    rep = Report("path-space matched pair (sampled)")
    for b, c, m, n, p in samples:
        star, glue, mul = view.star, view.glue, view.mul
        rep.check(star(view.unit, b) == b, lambda b=b: f"1*{b!r} != {b!r}")
        rep.check(star(mul(m, n), b) == star(m, star(n, b)), lambda: f"(mn)*b != m*(n*b) at {m!r},{n!r},{b!r}")
        rep.check(star(m, b & c) == star(m, b) & star(m, c), lambda: f"m* does not preserve meets at {m!r}")
        rep.check(star(m, ~b) == ~star(m, b), lambda: f"m* does not preserve complements at {m!r},{b!r}")
        g = glue(b, m, n)
        rep.check(view.equiv(b, g, m) and view.equiv(~b, g, n), lambda: f"b(m,n) does not agree with m on b, n off b")
        rep.check(mul(g, p) == glue(b, mul(m, p), mul(n, p)), lambda: f"b(m,n)p != b(mp,np) at {b!r}")
        rep.check(star(g, c) == (b & star(m, c)) | (~b & star(n, c)), lambda: f"b(m,n)*c != b(m*c,n*c) at {b!r},{c!r}")
        if view.equiv(b, m, n):
            rep.check(view.equiv(b, mul(m, p), mul(n, p)), lambda: f"m ~ n on b but mp !~ np at {b!r}")
            rep.check(b & star(m, c) == b & star(n, c), lambda: f"m ~ n on b but b ^ m*c != b ^ n*c at {b!r}")
        if view.equiv(b, n, p):
            rep.check(view.equiv(star(m, b), mul(m, n), mul(m, p)), lambda: f"n ~ p on b but mn !~ mp on m*b")
    return rep


# ---------------------------------------------------------------------------
# presentations


def letter(g: DirectedGraph, a: Hashable) -> PrefixMap:
    """The generator x -> a.x on a bouquet."""
    return normalize([(Path(g.src(a), ()), Path(g.src(a), (a,)))], g)


def letter_star(g: DirectedGraph, a: Hashable) -> PrefixMap:
    """The generator a.x -> x."""
    return normalize([(Path(g.src(a), (a,)), Path(g.src(a), ()))], g)


def check_presentation(g: DirectedGraph):
    """a a* = 1, a b* = 0 for a != b, and the join of the a* a is 1."""
    from .report import Report
    if not g.is_bouquet:
        raise GraphError("presentation check needs a bouquet")
    rep = Report(f"presentation of {g!r}")
    one, zero = identity(g), zero_map(g)
    letters = list(g.out[g.vertices[0]])
    for a in letters:
        aa = compose(letter(g, a), letter_star(g, a))
        rep.check(aa == one, lambda a=a, aa=aa: f"{a}{a}* = {aa!r}, not 1")
        for b in letters:
            if b != a:
                ab = compose(letter(g, a), letter_star(g, b))
                rep.check(ab == zero, lambda a=a, b=b, ab=ab: f"{a}{b}* = {ab!r}, not 0")
    parts = [compose(letter_star(g, a), letter(g, a)) for a in letters]
    for a, p in zip(letters, parts):
        rep.check(p == restriction(p) and p == restriction(letter_star(g, a)),
                  lambda a=a: f"{a}*{a} is not the restriction of {a}*")
    rep.check(join_disjoint(parts) == one, "join of a*a is not 1")
    return rep


# ---------------------------------------------------------------------------
# topos witnesses


@dataclass
class ToposWitness:
    ok: bool
    map: PrefixMap | None
    vertex: Hashable | None


def _shortest_paths(g: DirectedGraph, v: Hashable) -> dict:
    paths = {v: Path(v, ())}
    todo = [v]
    while todo:
        nxt = []
        for x in todo:
            for e in g.out[x]:
                y = g.tgt(e)
                if y not in paths:
                    paths[y] = extend(paths[x], e)
                    nxt.append(y)
        todo = nxt
    return paths


def _witness_through(g: DirectedGraph, p: Path) -> PrefixMap | None:
    reach = _shortest_paths(g, end(g, p))
    dom = []
    for v in g.vertices:
        todo = [Path(v, ())]
        while todo:
            q = todo.pop()
            if end(g, q) in reach:
                dom.append(q)
            elif len(q) > len(g.vertices):
                return None  # an infinite path avoids the reachable set
            else:
                todo.extend(extend(q, e) for e in g.out[end(g, q)])
    return normalize([(q, concat(p, reach[end(g, q)])) for q in dom], g)


def topos_witness(b: Clopen) -> ToposWitness:
    """A total m sending every point into b, or a vertex that is not cofinal."""
    if b.is_zero:
        raise MapError("topos witness for the zero clopen")
    g = b.graph
    for p in b.basis:
        m = _witness_through(g, p)
        if m is not None:
            if not (is_total(m) and act_clopen(m, b).is_top):
                raise AssertionError("constructed witness fails")
            return ToposWitness(True, m, None)
    return ToposWitness(False, None, end(g, b.basis[0]))


# ---------------------------------------------------------------------------
# germs


@dataclass(frozen=True)
class Germ:
    at: PointSpec
    rep: PrefixMap

    @property
    def target(self) -> PointSpec:
        return apply_point(self.rep, self.at)

    def __repr__(self) -> str:
        g = self.rep.graph
        return f"({format_point(g, self.at)}, {degree(self)}, {format_point(g, self.target)})"


def germ_at(f: PrefixMap, W: PointSpec) -> Germ:
    W = normalize_point(f.graph, W)
    if not point_in(domain(f), W):
        raise MapError(f"point {format_point(f.graph, W)} outside the domain of {f!r}")
    return Germ(W, f)


def _entry_at(f: PrefixMap, W: PointSpec) -> Entry:
    g = f.graph
    for u, v in f.table:
        if is_prefix(u, point_prefix(g, W, len(u))):
            return u, v
    raise MapError("point outside domain")


def degree(germ: Germ) -> int:
    u, v = _entry_at(germ.rep, germ.at)
    return len(v) - len(u)


def local_rep(germ: Germ, depth: int | None = None) -> PrefixMap:
    """The representative restricted to the cylinder of the point at the given depth.

    At depth L >= the table depth the restriction is a single entry
    W_L -> v.(W_L after u), and maps agreeing near W agree there.
    """
    L = germ.rep.domain_depth() if depth is None else depth
    g = germ.rep.graph
    return restrict_to(cylinder(g, point_prefix(g, germ.at, L)), germ.rep)


def germ_equal(a: Germ, b: Germ) -> bool:
    if a.at != b.at:
        return False
    L = max(a.rep.domain_depth(), b.rep.domain_depth())
    return local_rep(a, L) == local_rep(b, L)


def germ_compose(a: Germ, b: Germ) -> Germ:
    """a first, then b; needs the target of a to be the point of b."""
    if a.target != b.at:
        raise MapError("germs are not composable")
    return Germ(a.at, compose(a.rep, b.rep))


def germ_identity(g: DirectedGraph, W: PointSpec) -> Germ:
    return Germ(normalize_point(g, W), identity(g))


def germ_inverse(a: Germ) -> Germ:
    """Every germ is locally a single entry, hence a partial isomorphism."""
    loc = normalize([_entry_at(a.rep, a.at)], a.rep.graph)
    inv = partial_inverse(loc)
    assert inv is not None
    return Germ(a.target, inv)


# ---------------------------------------------------------------------------
# random generation


def _random_image(g: DirectedGraph, rng: random.Random, w: Hashable, max_len: int) -> Path:
    """A random path ending at w, grown backwards along incoming edges."""
    edges: list = []
    v = w
    for _ in range(rng.randint(0, max_len)):
        if not g.inc[v]:
            break
        e = rng.choice(g.inc[v])
        edges.insert(0, e)
        v = g.src(e)
    return Path(v, tuple(edges))


def random_map(g: DirectedGraph, rng: random.Random, depth: int = 4, total: float = 0.4,
               keep: float = 0.75) -> PrefixMap:
    """Random table with domain and image paths of length at most ``depth``."""
    leaves = random_tree_leaves(g, rng, depth, split=rng.uniform(0.2, 0.7))
    if rng.random() >= total:
        leaves = [p for p in leaves if rng.random() < keep]
    entries = [(u, _random_image(g, rng, end(g, u), depth)) for u in leaves]
    return normalize(entries, g)


def random_partial_iso(g: DirectedGraph, rng: random.Random, depth: int = 4) -> PrefixMap:
    for _ in range(100):
        f = random_map(g, rng, depth)
        if partial_inverse(f) is not None:
            return f
        # fall back to a sub-table with prefix-free images
        keep: list = []
        for u, v in f.table:
            if all(not is_prefix(v, w) and not is_prefix(w, v) for _, w in keep):
                keep.append((u, v))
        if keep:
            return normalize(keep, g)
    return identity(g)


def random_map_at(g: DirectedGraph, rng: random.Random, W: PointSpec, depth: int = 4) -> PrefixMap:
    """A random map whose domain contains W."""
    for _ in range(100):
        f = random_map(g, rng, depth, total=0.5)
        if point_in(domain(f), W):
            return f
    return identity(g)


def max_path_len(fs: Sequence[PrefixMap]) -> int:
    return max((f.depth() for f in fs), default=0)


__all__ = [
    "PrefixMap", "MapError", "normalize", "parse_entries", "identity", "zero_map", "idem", "compose",
    "evaluate", "domain", "restriction", "is_total", "leq", "disjoint", "join_disjoint", "partial_inverse",
    "is_partial_iso", "etale_decomposition", "act_clopen", "glue_maps", "restrict_to", "apply_point",
    "PrefixMonoid", "PathPairView", "matched_pair_view", "check_pair_view_samples", "letter", "letter_star",
    "check_presentation", "ToposWitness", "topos_witness", "Germ", "germ_at", "degree", "local_rep",
    "germ_equal", "germ_compose", "germ_identity", "germ_inverse", "random_map", "random_partial_iso",
    "random_map_at", "random_point", "random_path",
]
