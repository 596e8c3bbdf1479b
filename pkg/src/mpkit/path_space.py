"""Directed graphs, finite paths and the clopen algebra of the infinite-path space.

Paths are stored in traversal order ``e1 e2 ... en`` with ``t(ei) = s(ei+1)``,
so an initial segment of a path is a prefix.  An empty path remembers its
vertex.  A finitely generated ideal is kept as a prefix-free basis; the
cylinder [u] is the set of infinite paths starting with u.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, NamedTuple, Sequence

BOUQUET_VERTEX = "*"


class GraphError(ValueError):
    pass


class DirectedGraph:
    def __init__(self, vertices: Sequence[Hashable], edges: dict):
        self.vertices = tuple(vertices)
        if not self.vertices:
            raise GraphError("graph has no vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("repeated vertex")
        self.edges = dict(edges)
        self._vidx = {v: i for i, v in enumerate(self.vertices)}
        out: dict = {v: [] for v in self.vertices}
        inc: dict = {v: [] for v in self.vertices}
        for e, (s, t) in self.edges.items():
            if s not in self._vidx or t not in self._vidx:
                raise GraphError(f"edge {e} has an unknown endpoint")
            out[s].append(e)
            inc[t].append(e)
        for v in self.vertices:
            if not out[v]:
                raise GraphError(f"vertex {v} emits no edge (sinks are not supported)")
        self.out = {v: tuple(sorted(es, key=str)) for v, es in out.items()}
        self.inc = {v: tuple(sorted(es, key=str)) for v, es in inc.items()}
        self.is_bouquet = self.vertices == (BOUQUET_VERTEX,)

    @classmethod
    def bouquet(cls, letters: Iterable[str]) -> "DirectedGraph":
        letters = list(letters)
        if not letters:
            raise GraphError("bouquet needs at least one letter")
        return cls([BOUQUET_VERTEX], {a: (BOUQUET_VERTEX, BOUQUET_VERTEX) for a in letters})

    def src(self, e: Hashable) -> Hashable:
        return self.edges[e][0]

    def tgt(self, e: Hashable) -> Hashable:
        return self.edges[e][1]

    def vindex(self, v: Hashable) -> int:
        return self._vidx[v]

    def reachable(self, v: Hashable) -> set:
        seen, todo = {v}, [v]
        while todo:
            x = todo.pop()
            for e in self.out[x]:
                y = self.tgt(e)
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DirectedGraph) and self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertices, tuple(sorted(self.edges.items(), key=str))))

    def __repr__(self) -> str:
        if self.is_bouquet:
            return f"bouquet:{''.join(map(str, self.out[BOUQUET_VERTEX]))}"
        return f"DirectedGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


class Path(NamedTuple):
    start: Hashable
    edges: tuple

    def __len__(self) -> int:  # type: ignore[override]
        return len(self.edges)


def empty_path(v: Hashable) -> Path:
    return Path(v, ())


def make_path(g: DirectedGraph, edges: Sequence[Hashable], start: Hashable | None = None) -> Path:
    edges = tuple(edges)
    if not edges:
        if start is None:
            if not g.is_bouquet:
                raise GraphError("empty path needs a vertex")
            start = BOUQUET_VERTEX
        if start not in g.vertices:
            raise GraphError(f"unknown vertex {start}")
        return Path(start, ())
    for e in edges:
        if e not in g.edges:
            raise GraphError(f"unknown edge {e}")
    s = g.src(edges[0])
    if start is not None and start != s:
        raise GraphError(f"path starts at {s}, not {start}")
    for e, f in zip(edges, edges[1:]):
        if g.tgt(e) != g.src(f):
            raise GraphError(f"edges {e} and {f} do not compose")
    return Path(s, edges)


def check_path(g: DirectedGraph, p: Path) -> None:
    make_path(g, p.edges, p.start)


def end(g: DirectedGraph, p: Path) -> Hashable:
    return g.tgt(p.edges[-1]) if p.edges else p.start


def concat(p: Path, q: Path) -> Path:
    return Path(p.start, p.edges + q.edges)


def extend(p: Path, *edges: Hashable) -> Path:
    return Path(p.start, p.edges + tuple(edges))


def is_prefix(p: Path, q: Path) -> bool:
    return p.start == q.start and q.edges[:len(p.edges)] == p.edges


def drop(g: DirectedGraph, p: Path, k: int) -> Path:
    """The suffix of p after its first k edges."""
    if k == 0:
        return p
    return Path(g.tgt(p.edges[k - 1]), p.edges[k:])


def path_key(g: DirectedGraph, p: Path) -> tuple:
    return (g.vindex(p.start), len(p.edges), tuple(map(str, p.edges)))


def format_path(g: DirectedGraph, p: Path) -> str:
    if not p.edges:
        return "ε" if g.is_bouquet else f"@{p.start}"
    if g.is_bouquet and all(len(str(e)) == 1 for e in g.edges):
        return "".join(map(str, p.edges))
    return ".".join(map(str, p.edges))


def parse_path(g: DirectedGraph, text: str) -> Path:
    text = text.strip()
    if text in ("ε", ""):
        if not g.is_bouquet:
            raise GraphError("empty path needs a vertex: write @v")
        return Path(BOUQUET_VERTEX, ())
    if text.startswith("@"):
        return make_path(g, (), text[1:])
    if "." in text:
        parts = text.split(".")
    elif text in g.edges:
        parts = [text]
    elif g.is_bouquet:
        parts = list(text)
    else:
        raise GraphError(f"unknown edge {text}")
    return make_path(g, parts)


def paths_of_length(g: DirectedGraph, n: int, start: Hashable | None = None) -> Iterator[Path]:
    starts = [start] if start is not None else list(g.vertices)
    for v in starts:
        layer = [Path(v, ())]
        for _ in range(n):
            layer = [extend(p, e) for p in layer for e in g.out[end(g, p)]]
        yield from layer


# ---------------------------------------------------------------------------
# ideals and clopens


def minimal_basis(g: DirectedGraph, paths: Iterable[Path]) -> list[Path]:
    """Drop repeated paths and any path with a proper prefix in the set."""
    ps = sorted(set(paths), key=lambda p: path_key(g, p))
    out: list[Path] = []
    for p in ps:
        if not any(is_prefix(q, p) for q in out):
            out.append(p)
    return out


def is_prefix_free(paths: Sequence[Path]) -> bool:
    for p, q in itertools.permutations(paths, 2):
        if is_prefix(p, q):
            return False
    return len(set(paths)) == len(paths)


def _collapse(g: DirectedGraph, basis: list[Path]) -> list[Path]:
    cur = set(basis)
    changed = True
    while changed:
        changed = False
        parents: dict = {}
        for p in cur:
            if p.edges:
                parents.setdefault(Path(p.start, p.edges[:-1]), set()).add(p.edges[-1])
        for u, kids in parents.items():
            if len(kids) == len(g.out[end(g, u)]):
                for e in kids:
                    cur.discard(extend(u, e))
                cur.add(u)
                changed = True
                break
    return sorted(cur, key=lambda p: path_key(g, p))


@dataclass(frozen=True)
class Clopen:
    graph: DirectedGraph
    basis: tuple

    def __repr__(self) -> str:
        if not self.basis:
            return "{}"
        return "{" + ", ".join(format_path(self.graph, p) for p in self.basis) + "}"

    @property
    def is_zero(self) -> bool:
        return not self.basis

    @property
    def is_top(self) -> bool:
        return self == top(self.graph)

    def depth(self) -> int:
        return max((len(p) for p in self.basis), default=0)

    def __and__(self, other: "Clopen") -> "Clopen":
        return meet(self, other)

    def __or__(self, other: "Clopen") -> "Clopen":
        return join(self, other)

    def __invert__(self) -> "Clopen":
        return complement(self)

    def __le__(self, other: "Clopen") -> bool:
        return leq(self, other)


def closure(basis: Iterable[Path], g: DirectedGraph) -> Clopen:
    """The closed ideal generated by ``basis``, in collapsed normal form."""
    basis = list(basis)
    for p in basis:
        check_path(g, p)
    return Clopen(g, tuple(_collapse(g, minimal_basis(g, basis))))


def top(g: DirectedGraph) -> Clopen:
    return Clopen(g, tuple(Path(v, ()) for v in g.vertices))


def zero(g: DirectedGraph) -> Clopen:
    return Clopen(g, ())


def cylinder(g: DirectedGraph, p: Path) -> Clopen:
    return closure([p], g)


def _trie(paths: Iterable[Path]) -> dict:
    """start vertex -> nested dict of edges; a terminal node is None."""
    roots: dict = {}
    for p in paths:
        node = roots.setdefault(p.start, {})
        if node is None:
            continue
        for i, e in enumerate(p.edges):
            if i == len(p.edges) - 1:
                node[e] = None
            else:
                nxt = node.get(e, {})
                if nxt is None:
                    break
                node[e] = nxt
                node = nxt
        else:
            if not p.edges:
                roots[p.start] = None
    return roots


def is_dense(basis: Iterable[Path], g: DirectedGraph) -> bool:
    """Every infinite path has a prefix in the ideal.

    Walk the trie of the basis: an infinite path avoids the ideal exactly
    when it leaves the trie at an internal node, which happens iff some
    internal node is missing an outgoing edge (every vertex emits, so the
    escaping path continues forever).
    """
    roots = _trie(basis)
    for v in g.vertices:
        if v not in roots:
            return False
        todo = [(v, roots[v])]
        while todo:
            w, node = todo.pop()
            if node is None:
                continue
            for e in g.out[w]:
                if e not in node:
                    return False
                todo.append((g.tgt(e), node[e]))
    return True


def complement(c: Clopen) -> Clopen:
    """Paths whose cylinder misses c, in normal form."""
    g = c.graph
    roots = _trie(c.basis)
    found: list[Path] = []
    for v in g.vertices:
        if v not in roots:
            found.append(Path(v, ()))
            continue
        todo = [(Path(v, ()), roots[v])]
        while todo:
            p, node = todo.pop()
            if node is None:
                continue
            for e in g.out[end(g, p)]:
                if e not in node:
                    found.append(extend(p, e))
                else:
                    todo.append((extend(p, e), node[e]))
    return closure(found, g)


def meet(c: Clopen, d: Clopen) -> Clopen:
    if c.graph != d.graph:
        raise GraphError("clopens over different graphs")
    out = []
    for u in c.basis:
        for w in d.basis:
            if is_prefix(u, w):
                out.append(w)
            elif is_prefix(w, u):
                out.append(u)
    return closure(out, c.graph)


def join(c: Clopen, d: Clopen) -> Clopen:
    if c.graph != d.graph:
        raise GraphError("clopens over different graphs")
    return closure(c.basis + d.basis, c.graph)


def leq(c: Clopen, d: Clopen) -> bool:
    return meet(c, d) == c


def contains_path(c: Clopen, p: Path) -> bool:
    """Is the cylinder [p] inside c?"""
    return any(is_prefix(u, p) for u in c.basis)


def is_partition_of_clopens(blocks: Sequence[Clopen], base: Clopen) -> bool:
    if any(b.is_zero for b in blocks):
        return False
    for b, d in itertools.combinations(blocks, 2):
        if not meet(b, d).is_zero:
            return False
    acc = zero(base.graph)
    for b in blocks:
        acc = join(acc, b)
    return acc == base


def clopens_of_depth(g: DirectedGraph, depth: int) -> list[Clopen]:
    """All clopens generated by sets of paths of exactly ``depth`` edges."""
    cyl = list(paths_of_length(g, depth))
    seen = {}
    for mask in range(1 << len(cyl)):
        c = closure([p for i, p in enumerate(cyl) if mask >> i & 1], g)
        seen[c.basis] = c
    return list(seen.values())


# ---------------------------------------------------------------------------
# cofinality


def _has_cycle(g: DirectedGraph, allowed: set) -> bool:
    colour = {v: 0 for v in allowed}

    def visit(v) -> bool:
        colour[v] = 1
        for e in g.out[v]:
            w = g.tgt(e)
            if w not in allowed:
                continue
            if colour[w] == 1 or (colour[w] == 0 and visit(w)):
                return True
        colour[v] = 2
        return False

    return any(colour[v] == 0 and visit(v) for v in sorted(allowed, key=g.vindex))


def is_cofinal(g: DirectedGraph, v: Hashable) -> bool:
    rest = set(g.vertices) - g.reachable(v)
    return not _has_cycle(g, rest)


def cofinal_vertices(g: DirectedGraph) -> set:
    return {v for v in g.vertices if is_cofinal(g, v)}


def is_minimal(g: DirectedGraph) -> bool:
    return len(cofinal_vertices(g)) == len(g.vertices)


# ---------------------------------------------------------------------------
# eventually periodic points


class PointSpec(NamedTuple):
    tail: Path
    cycle: Path


def make_point(g: DirectedGraph, tail: Path, cycle: Path) -> PointSpec:
    check_path(g, tail)
    check_path(g, cycle)
    if not cycle.edges:
        raise GraphError("cycle must be nonempty")
    if cycle.start != end(g, tail) or end(g, cycle) != cycle.start:
        raise GraphError("cycle must be a closed path at the end of the tail")
    return normalize_point(g, PointSpec(tail, cycle))


def normalize_point(g: DirectedGraph, W: PointSpec) -> PointSpec:
    tail, cyc = W.tail.edges, W.cycle.edges
    n = len(cyc)
    for d in range(1, n + 1):
        if n % d == 0 and cyc == cyc[:d] * (n // d):
            cyc = cyc[:d]
            break
    while tail and tail[-1] == cyc[-1]:
        tail = tail[:-1]
        cyc = cyc[-1:] + cyc[:-1]
    start = W.tail.start
    tp = Path(start, tail)
    return PointSpec(tp, Path(end(g, tp), cyc))


def point_prefix(g: DirectedGraph, W: PointSpec, n: int) -> Path:
    edges = W.tail.edges
    cyc = W.cycle.edges
    if n <= len(edges):
        return Path(W.tail.start, edges[:n])
    k = n - len(edges)
    reps = k // len(cyc) + 1
    return Path(W.tail.start, edges + (cyc * reps)[:k])


def point_drop(g: DirectedGraph, W: PointSpec, k: int) -> PointSpec:
    """The point after its first k edges."""
    tail, cyc = W.tail, W.cycle
    if k <= len(tail):
        return normalize_point(g, PointSpec(drop(g, tail, k), cyc))
    r = (k - len(tail)) % len(cyc)
    e = cyc.edges
    rot = e[r:] + e[:r]
    start = g.tgt(e[r - 1]) if r else cyc.start
    return normalize_point(g, PointSpec(Path(start, ()), Path(start, rot)))


def prepend(g: DirectedGraph, p: Path, W: PointSpec) -> PointSpec:
    if end(g, p) != W.tail.start:
        raise GraphError("path does not end where the point starts")
    return normalize_point(g, PointSpec(concat(p, W.tail), W.cycle))


def point_in(c: Clopen, W: PointSpec) -> bool:
    g = c.graph
    return any(is_prefix(u, point_prefix(g, W, len(u))) for u in c.basis)


def format_point(g: DirectedGraph, W: PointSpec) -> str:
    return f"{format_path(g, W.tail)};{format_path(g, W.cycle)}"


def parse_point(g: DirectedGraph, text: str) -> PointSpec:
    if ";" not in text:
        raise GraphError("point syntax is tail;cycle")
    t, c = text.split(";", 1)
    tail = parse_path(g, t)
    cyc = parse_path(g, c)
    if not tail.edges and not g.is_bouquet and not t.strip().startswith("@"):
        tail = Path(cyc.start, ())
    return make_point(g, tail, cyc)


# ---------------------------------------------------------------------------
# random generation


def random_walk_point(g: DirectedGraph, rng: random.Random, start: Hashable | None = None) -> PointSpec:
    v = rng.choice(g.vertices) if start is None else start
    visited = {v: 0}
    edges: list = []
    while True:
        e = rng.choice(g.out[v])
        edges.append(e)
        v = g.tgt(e)
        if v in visited:
            i = visited[v]
            s = g.src(edges[0])
            tail = Path(s, tuple(edges[:i]))
            return normalize_point(g, PointSpec(tail, Path(v, tuple(edges[i:]))))
        visited[v] = len(edges)


def random_point(g: DirectedGraph, rng: random.Random, max_tail: int = 4) -> PointSpec:
    """A walk prefix followed by a walk-until-repeat cycle."""
    v = rng.choice(g.vertices)
    pre = []
    for _ in range(rng.randint(0, max_tail)):
        e = rng.choice(g.out[v])
        pre.append(e)
        v = g.tgt(e)
    W = random_walk_point(g, rng, v)
    if pre:
        return prepend(g, Path(g.src(pre[0]), tuple(pre)), W)
    return W


def random_path(g: DirectedGraph, rng: random.Random, max_len: int, start: Hashable | None = None) -> Path:
    v = rng.choice(g.vertices) if start is None else start
    p = Path(v, ())
    for _ in range(rng.randint(0, max_len)):
        p = extend(p, rng.choice(g.out[end(g, p)]))
    return p


def random_tree_leaves(g: DirectedGraph, rng: random.Random, depth: int, split: float = 0.5) -> list[Path]:
    """Leaves of a random finite sibling-complete tree at every vertex."""
    out = []
    for v in g.vertices:
        todo = [Path(v, ())]
        while todo:
            p = todo.pop()
            if len(p) < depth and rng.random() < split:
                todo.extend(extend(p, e) for e in g.out[end(g, p)])
            else:
                out.append(p)
    return out


def random_clopen(g: DirectedGraph, rng: random.Random, depth: int, keep: float = 0.5) -> Clopen:
    leaves = random_tree_leaves(g, rng, depth)
    return closure([p for p in leaves if rng.random() < keep], g)


def random_graph(rng: random.Random, max_vertices: int = 5, max_edges: int = 8) -> DirectedGraph:
    n = rng.randint(1, max_vertices)
    vs = [f"v{i}" for i in range(n)]
    m = rng.randint(n, max(n, max_edges))
    edges = {}
    for i, v in enumerate(vs):
        edges[f"e{i}"] = (v, rng.choice(vs))
    for j in range(n, m):
        edges[f"e{j}"] = (rng.choice(vs), rng.choice(vs))
    return DirectedGraph(vs, edges)
