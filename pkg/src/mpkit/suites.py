"""Property suites shared by ``mpkit selftest`` and the acceptance tests.

Each suite takes explicit sizes and a seed and returns a Report.  ``PLANS``
maps a selftest depth to suite sizes; depth 4 is the acceptance scale.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable

from .catalog import bjm_iso_classes, enumerate_bjm, enumerate_pairs
from .matched_finite import (FiniteCategory, FiniteMonoid, PairError, build_brm, check_adjunction, check_bjm,
                             check_brm_axioms, check_collapse_iso, check_conjugation_iso, exponential,
                             from_finite_category, group_category, is_groupoidal, is_topos, monoid_pair,
                             regular, roundtrip_check, terminal, theta)
from .path_space import (Clopen, DirectedGraph, Path, closure, cofinal_vertices, complement, cylinder, end,
                         is_prefix, make_point, paths_of_length, point_prefix, prepend, random_clopen,
                         random_graph, random_point, random_walk_point)
from .prefix_maps import (PrefixMap, PrefixMonoid, check_presentation, compose, degree, domain,
                          etale_decomposition, evaluate, germ_at, germ_compose, germ_equal, germ_identity,
                          germ_inverse, is_partial_iso, join_disjoint, normalize, random_map, random_map_at,
                          random_partial_iso, restrict_to, topos_witness, zero_map)
from .report import Report
from .selfsimilar import (MealyMachine, apply_point, check_machine, check_zappa_szep, invertible_states,
                          nek_apply, nek_compose, odometer, reversed_word, random_nek, random_state_word,
                          restrict_to_group, star_word)


# ---------------------------------------------------------------------------
# fixtures


def three_vertex_graph() -> DirectedGraph:
    return DirectedGraph(["x", "y", "z"], {"a": ("x", "y"), "b": ("y", "z"), "c": ("z", "x"),
                                           "d": ("x", "x"), "e": ("y", "x")})


def two_loops() -> DirectedGraph:
    return DirectedGraph(["u", "v"], {"a": ("u", "u"), "b": ("v", "v")})


def _codiscrete(objects) -> FiniteCategory:
    arr = {(s, t): (s, t) for s in objects for t in objects}
    comp = {(g, f): (f[0], g[1]) for f in arr for g in arr if g[0] == f[1]}
    return FiniteCategory(objects, arr, comp, identities={a: (a, a) for a in objects})


def category_fixtures() -> dict[str, FiniteCategory]:
    """Small categories with at most three objects."""
    out = {
        "cyclic2": group_category([0, 1], lambda x, y: (x + y) % 2, 0),
        "cyclic3": group_category([0, 1, 2], lambda x, y: (x + y) % 3, 0),
        "idempotent": FiniteCategory(["*"], {"e": ("*", "*")}, {("e", "e"): "e"}),
        "arrow": FiniteCategory(["a", "b"], {"f": ("a", "b")}, {}),
        "discrete2": FiniteCategory(["a", "b"], {}, {}),
        "parallel": FiniteCategory(["a", "b"], {"f": ("a", "b"), "g": ("a", "b")}, {}),
        "codiscrete2": _codiscrete(["a", "b"]),
        "chain3": FiniteCategory(["a", "b", "c"], {"f": ("a", "b"), "g": ("b", "c"), "h": ("a", "c")},
                                 {("g", "f"): "h"}),
        "span": FiniteCategory(["a", "b", "c"], {"f": ("a", "b"), "g": ("a", "c")}, {}),
        "codiscrete3": _codiscrete(["a", "b", "c"]),
    }
    return out


def idempotent_monoid() -> FiniteMonoid:
    return FiniteMonoid.from_rows([1, "e"], [[1, "e"], ["e", "e"]], 1)


def cyclic_monoid(n: int) -> FiniteMonoid:
    return FiniteMonoid.from_rows(list(range(n)), [[(i + j) % n for j in range(n)] for i in range(n)], 0)


def broken_odometer() -> MealyMachine:
    """Negative control: the carry out of state a is lost."""
    delta = {("0", "e"): ("e", "0"), ("1", "e"): ("e", "1"),
             ("0", "a"): ("e", "1"), ("1", "a"): ("e", "0")}
    return MealyMachine(("0", "1"), ("e", "a"), delta, "e")


def _strongly_connected(A: FiniteCategory) -> bool:
    reach = {a: {a} for a in A.objects}
    changed = True
    while changed:
        changed = False
        for f in A.arrows:
            s, t = A.src(f), A.tgt(f)
            for a in A.objects:
                if s in reach[a] and t not in reach[a]:
                    reach[a].add(t)
                    changed = True
    return all(reach[a] == set(A.objects) for a in A.objects)


# ---------------------------------------------------------------------------
# 1. restriction monoid laws on prefix maps


def restriction_suite(seed: int = 0, samples: int = 1000, depth: int = 4) -> Report:
    rep = Report("restriction monoid laws")
    rng = random.Random(seed)
    for g in (DirectedGraph.bouquet("lr"), three_vertex_graph()):
        S = PrefixMonoid(g)
        maps = [random_map(g, rng, depth=depth) for _ in range(samples)]
        maps += [S.one, S.zero]
        triples = []
        n = len(maps)
        for i in range(n):
            s, t, u = maps[i], maps[(i + 1) % n], maps[(i + 2) % n]
            triples.append((s, t, u))
            # force the disjoint cases the join laws need
            triples.append((s, t, restrict_to(complement(domain(t)), u)))
            triples.append((s, restrict_to(complement(domain(s)), t), u))
        sub = check_brm_axioms(S, maps, triples)
        rep.merge(sub, f"{g!r}: ")
        rep.note(f"{g!r}: {n} maps, {len(triples)} triples")
    return rep


# ---------------------------------------------------------------------------
# 2. presentation and etale decomposition


def presentation_suite(seed: int = 0, samples: int = 50, depth: int = 4) -> Report:
    rep = Report("presentation relations")
    rng = random.Random(seed)
    for letters in ("a", "lr", "abc", "abcd"):
        g = DirectedGraph.bouquet(letters)
        rep.merge(check_presentation(g), f"{letters}: ")
    for g in (DirectedGraph.bouquet("lr"), DirectedGraph.bouquet("abc"), three_vertex_graph()):
        for _ in range(samples):
            f = random_map(g, rng, depth=depth)
            parts = etale_decomposition(f)
            rep.check(all(is_partial_iso(p) for p in parts), lambda f=f: f"non-invertible piece in {f!r}")
            joined = join_disjoint(parts) if parts else zero_map(g)
            rep.check(joined == f, lambda f=f: f"{f!r} is not the join of its decomposition")
    return rep


# ---------------------------------------------------------------------------
# 3. round trip through Boolean restriction monoids


def roundtrip_suite(names: list[str] | None = None, exhaustive_limit: int = 30) -> Report:
    rep = Report("round trip via Boolean restriction monoids")
    cats = category_fixtures()
    for name in names or list(cats):
        A = cats[name]
        p = from_finite_category(A)
        rt = roundtrip_check(p)
        rep.check(rt.ok, lambda name=name, rt=rt: f"{name}: {rt.witness}")
        S = build_brm(p, validate=False)
        if len(S.elements) <= exhaustive_limit:
            rep.merge(check_brm_axioms(S), f"{name}: ")
        top = is_topos(p).ok
        rep.check(top == _strongly_connected(A),
                  lambda name=name, top=top: f"{name}: is_topos={top} but strong connectivity differs")
        rep.note(f"{name}: |B|={2 ** len(p.atoms)} |M|={len(p.M)} |S|={len(S.elements)}")
    return rep


# ---------------------------------------------------------------------------
# 4. topos criterion


def _sieves_oracle(p) -> bool:
    """Only 0 and 1 are closed under pulling back along every m."""
    atoms = list(p.atoms)
    for r in range(1, len(atoms)):
        for c in itertools.combinations(atoms, r):
            cs = set(c)
            if all({a for a in atoms if p.act[m][a] in cs} <= cs for m in p.M.elements):
                return False
    return True


def _cylinders(g: DirectedGraph, depth: int):
    for n in range(depth + 1):
        for q in paths_of_length(g, n):
            yield cylinder(g, q)


def topos_suite(seed: int = 0, graphs: int = 100, depth: int = 3, extra_clopens: int = 20,
                max_monoid: int = 5, max_atoms: int = 4) -> Report:
    rep = Report("topos criterion")
    rng = random.Random(seed)
    all_cofinal_count = 0
    for i in range(graphs):
        g = random_graph(rng, 5, 8)
        cof = cofinal_vertices(g)
        everywhere = cof == set(g.vertices)
        all_cofinal_count += everywhere
        # monotone: a witness for a cylinder inside b is a witness for b,
        # and every nonzero clopen of depth <= d contains such a cylinder
        cands = list(_cylinders(g, depth))
        cands += [c for c in (random_clopen(g, rng, depth) for _ in range(extra_clopens)) if not c.is_zero]
        succeeded = True
        for c in cands:
            w = topos_witness(c)
            if not w.ok:
                succeeded = False
                rep.check(w.vertex not in cof, lambda g=g, w=w: f"graph {i}: reported vertex {w.vertex} is cofinal")
        rep.check(succeeded == everywhere,
                  lambda g=g, s=succeeded, e=everywhere: f"graph {g!r}: witnesses {s}, all cofinal {e}")
    rep.note(f"{graphs} graphs, {all_cofinal_count} with every vertex cofinal")
    npairs = ntopos = 0
    for p in enumerate_pairs(max_monoid, max_atoms):
        npairs += 1
        try:
            v = is_topos(p).ok
        except PairError as exc:
            rep.fail(f"is_topos inconsistent: {exc}")
            continue
        ntopos += v
        rep.check(v == _sieves_oracle(p), lambda p=p, v=v: f"pair {p.M.elements}/{p.atoms}: is_topos={v}")
    rep.note(f"{npairs} pairs, {ntopos} toposes")
    return rep


# ---------------------------------------------------------------------------
# 5. groupoidality


def groupoidal_suite(max_monoid: int = 4, max_atoms: int = 3, max_carrier: int = 3) -> Report:
    rep = Report("groupoidality criterion")
    count = grp = sets = 0
    for k in range(1, max_atoms + 1):
        for p in enumerate_pairs(max_monoid, k, k):
            count += 1
            g = is_groupoidal(p).ok
            grp += g
            rep.check(theta(p, regular(p)).bijective == g, lambda p=p, g=g: f"theta on M disagrees (groupoidal={g})")
            all_bij = True
            for s in range(max_carrier + 1):
                for X in enumerate_bjm(p, s):
                    sets += 1
                    if not theta(p, X).bijective:
                        all_bij = False
                        break
                if not all_bij:
                    break
            rep.check(all_bij == g, lambda p=p, g=g: f"theta on small sets disagrees (groupoidal={g})")
    for M, expect in ((cyclic_monoid(2), True), (cyclic_monoid(3), True), (idempotent_monoid(), False)):
        p = monoid_pair(M)
        rep.check(is_groupoidal(p).ok == expect, lambda M=M: f"B=2 with {M.elements}: expected {expect}")
        rep.check(theta(p, regular(p)).bijective == expect, lambda M=M: f"theta for B=2 with {M.elements}")
    rep.note(f"{count} pairs ({grp} groupoidal), {sets} <B|M>-sets examined")
    return rep


# ---------------------------------------------------------------------------
# 6. exponentials


def exponential_suite(max_monoid: int = 2, max_atoms: int = 2, max_carrier: int = 3,
                      conj_carrier: int = 3) -> Report:
    rep = Report("exponential adjunction")
    n = 0
    for p in enumerate_pairs(max_monoid, max_atoms):
        xs = bjm_iso_classes(p, max_carrier)
        for Y in xs:
            for Z in xs:
                E = exponential(Y, Z)
                rep.merge(check_bjm(E.bjm), "Z^Y: ", notes=False)
                for X in xs:
                    n += 1
                    rep.merge(check_adjunction(X, Y, Z, others=[terminal(p)], E=E), notes=False)
    rep.note(f"{n} adjunction instances")
    groups = [from_finite_category(category_fixtures()[k]) for k in ("cyclic2", "codiscrete2")]
    groups.append(monoid_pair(cyclic_monoid(3)))
    groups += [p for p in enumerate_pairs(max_monoid, max_atoms) if is_groupoidal(p).ok]
    m = 0
    for p in groups:
        v = is_groupoidal(p)
        if not rep.check(v.ok, "group pair is not groupoidal"):
            continue
        xs = bjm_iso_classes(p, conj_carrier)
        for Y in xs:
            for Z in xs:
                m += 1
                rep.merge(check_conjugation_iso(Y, Z, v.witnesses), "conjugation: ", notes=False)
    rep.note(f"{m} conjugation comparisons over {len(groups)} group pairs")
    return rep


# ---------------------------------------------------------------------------
# 7. sheaf collapse


def sheaf_suite(max_carrier: int = 4, names: tuple = ("arrow", "discrete2", "parallel", "codiscrete2")) -> Report:
    rep = Report("sheaf collapse")
    n = 0
    for name in names:
        p = from_finite_category(category_fixtures()[name])
        for s in range(max_carrier + 1):
            for X in enumerate_bjm(p, s):
                n += 1
                rep.merge(check_collapse_iso(X), f"{name}: ", notes=False)
    rep.note(f"{n} <B|M>-sets")
    return rep


# ---------------------------------------------------------------------------
# 8. self-similar actions


def selfsimilar_suite(seed: int = 0, samples: int = 1000, nek_samples: int = 300, length: int = 3,
                      negative_control: bool = False) -> Report:
    rep = Report("self-similar actions")
    m = broken_odometer() if negative_control else odometer()
    g = m.graph
    a = m.word("a")
    rep.check(star_word(m, reversed_word("10"), a) == reversed_word("11"), "10 * a != 11")
    ones = make_point(g, Path("*", ()), Path("*", ("1",)))
    zeros = make_point(g, Path("*", ()), Path("*", ("0",)))
    rep.check(apply_point(m, a, ones) == zeros, "a does not send all-ones to all-zeros")
    rep.merge(check_machine(m, length))
    rep.merge(check_zappa_szep(m, length, samples, seed))
    rng = random.Random(seed)
    bad = 0
    for _ in range(nek_samples):
        f, h = random_nek(m, rng), random_nek(m, rng)
        c = nek_compose(f, h)
        W = random_point(g, rng)
        x = nek_apply(f, W)
        y = nek_apply(h, x) if x is not None else None
        bad += not rep.check(nek_apply(c, W) == y, lambda f=f, h=h: f"nek composite of {f!r} and {h!r} disagrees")
    for _ in range(samples // 10):
        p, q = random_state_word(m, rng, 3), random_state_word(m, rng, 3)
        W = random_point(g, rng)
        rep.check(apply_point(m, p + q, W) == apply_point(m, q, apply_point(m, p, W)),
                  lambda p=p, q=q: f"(pq)(W) != q(p(W)) for {p}, {q}")
    G = restrict_to_group(m)
    rep.merge(check_machine(G, length), "group part: ")
    rep.check(set(G.states) - {G.identity} <= invertible_states(G), "group part has a non-invertible state")
    return rep


# ---------------------------------------------------------------------------
# 9. germs


def _germ_oracle(f: PrefixMap, h: PrefixMap, W) -> bool:
    """Compare both maps on every finite path through the point's cylinder."""
    g = f.graph
    D = max(f.domain_depth(), h.domain_depth())
    base = point_prefix(g, W, D)
    layer = [base]
    for _ in range(4):
        for x in layer:
            if evaluate(f, x) != evaluate(h, x):
                return False
        layer = [Path(x.start, x.edges + (e,)) for x in layer for e in g.out[end(g, x)]]
    return True


def _point_in_domain(f: PrefixMap, rng: random.Random):
    g = f.graph
    u, _ = rng.choice(f.table)
    return prepend(g, u, random_walk_point(g, rng, end(g, u)))


def germ_suite(seed: int = 0, samples: int = 500, depth: int = 3) -> Report:
    rep = Report("germs")
    rng = random.Random(seed)
    graphs = (DirectedGraph.bouquet("lr"), three_vertex_graph())
    eq_count = 0
    for i in range(samples):
        g = graphs[i % 2]
        W = random_point(g, rng)
        f = random_map_at(g, rng, W, depth)
        a = germ_at(f, W)
        h = random_map_at(g, rng, a.target, depth)
        b = germ_at(h, a.target)
        ab = germ_compose(a, b)
        rep.check(degree(ab) == degree(a) + degree(b), lambda f=f, h=h: f"degree not additive for {f!r}, {h!r}")
        rep.check(ab.target == b.target, "composite lands elsewhere")
        # equality: half the time keep f near W and change it elsewhere
        if rng.random() < 0.5:
            k = f.domain_depth() + rng.randint(0, 2)
            C = cylinder(g, point_prefix(g, W, k))
            other = restrict_to(complement(C), random_map(g, rng, depth))
            f2 = join_disjoint([restrict_to(C, f), other])
        else:
            f2 = random_map_at(g, rng, W, depth)
        got = germ_equal(a, germ_at(f2, W))
        eq_count += got
        rep.check(got == _germ_oracle(f, f2, W), lambda f=f, f2=f2: f"germ equality of {f!r}, {f2!r} disagrees with oracle")
    rep.note(f"{samples} samples, {eq_count} equal germs")
    for i in range(samples):
        g = graphs[i % 2]
        f = random_partial_iso(g, rng, depth)
        if f.is_zero:
            continue
        W = _point_in_domain(f, rng)
        a = germ_at(f, W)
        inv = germ_inverse(a)
        rep.check(germ_equal(germ_compose(a, inv), germ_identity(g, W)), lambda f=f: f"a a^-1 != 1 for {f!r}")
        rep.check(germ_equal(germ_compose(inv, a), germ_identity(g, a.target)), lambda f=f: f"a^-1 a != 1 for {f!r}")
        rep.check(degree(inv) == -degree(a), "inverse degree")
    return rep


# ---------------------------------------------------------------------------
# 10. oracle equivalence of compose and normalize


def _raw_eval(entries, x: Path) -> Path | None:
    for u, v in entries:
        if is_prefix(u, x):
            return Path(v.start, v.edges + x.edges[len(u.edges):])
    return None


def _split(g: DirectedGraph, entries, rng: random.Random, rounds: int = 2) -> list:
    """Replace random entries by their one-edge refinements (same partial function)."""
    out = list(entries)
    for _ in range(rounds):
        nxt = []
        for u, v in out:
            if rng.random() < 0.4:
                for e in g.out[end(g, u)]:
                    nxt.append((Path(u.start, u.edges + (e,)), Path(v.start, v.edges + (e,))))
            else:
                nxt.append((u, v))
        out = nxt
    return out


def oracle_suite(seed: int = 0, samples: int = 1000, depth: int = 3) -> Report:
    rep = Report("compose and normalize against pointwise evaluation")
    rng = random.Random(seed)
    graphs = (DirectedGraph.bouquet("lr"), three_vertex_graph())
    for i in range(samples):
        g = graphs[i % 2]
        f, h = random_map(g, rng, depth), random_map(g, rng, depth)
        c = compose(f, h)
        # long enough that f(x) reaches past the domain of h
        D = max(f.depth() + h.depth(), c.depth()) + 2
        ok = True
        for x in paths_of_length(g, D):
            y = evaluate(f, x)
            want = evaluate(h, y) if y is not None else None
            if evaluate(c, x) != want:
                ok = False
                break
        rep.check(ok, lambda f=f, h=h: f"compose({f!r}, {h!r}) disagrees at depth {D}")
        raw = _split(g, f.table, rng)
        rng.shuffle(raw)
        n = normalize(raw, g)
        D = max(len(u) for u, _ in raw) + 2 if raw else 2
        rep.check(all(evaluate(n, x) == _raw_eval(raw, x) for x in paths_of_length(g, D)),
                  lambda raw=raw: f"normalize changed the map given by {raw}")
        rep.check(n == f, lambda f=f: f"normal form of a refinement of {f!r} differs")
    return rep


# ---------------------------------------------------------------------------
# module extras


def clopen_suite(seed: int = 0, samples: int = 200, depth: int = 4) -> Report:
    rep = Report("clopen algebra")
    rng = random.Random(seed)
    for i in range(samples):
        g = random_graph(rng, 5, 8) if i % 2 else DirectedGraph.bouquet("lr")
        b, c, d = (random_clopen(g, rng, depth) for _ in range(3))
        rep.check(closure(b.basis, g) == b, "closure not idempotent")
        rep.check(complement(complement(b)) == b, "complement not an involution")
        rep.check((b & ~b).is_zero and (b | ~b).is_top, "b and its complement")
        rep.check(~(b & c) == (~b | ~c), "De Morgan")
        rep.check(b & (c | d) == (b & c) | (b & d), "distributivity")
        rep.check((b | c) | d == b | (c | d), "associativity")
    return rep


# ---------------------------------------------------------------------------
# registry


@dataclass
class Suite:
    key: str
    title: str
    run: Callable[..., Report]
    budget: float


SUITES = [
    Suite("restriction", "1. restriction monoid laws", restriction_suite, 10.0),
    Suite("presentation", "2. presentation relations", presentation_suite, 1.0),
    Suite("roundtrip", "3. round trip", roundtrip_suite, 5.0),
    Suite("topos", "4. topos criterion", topos_suite, 60.0),
    Suite("groupoidal", "5. groupoidality criterion", groupoidal_suite, 60.0),
    Suite("exponential", "6. exponential adjunction", exponential_suite, 30.0),
    Suite("sheaf", "7. sheaf collapse", sheaf_suite, 10.0),
    Suite("selfsimilar", "8. self-similar actions", selfsimilar_suite, 20.0),
    Suite("germ", "9. germs", germ_suite, 20.0),
    Suite("oracle", "10. oracle equivalence", oracle_suite, 20.0),
    Suite("clopen", "clopen algebra", clopen_suite, 10.0),
]

_SEEDED = {"restriction", "presentation", "topos", "selfsimilar", "germ", "oracle", "clopen"}

# sizes per selftest depth; 4 is the acceptance scale
PLANS = {
    1: {"restriction": dict(samples=20, depth=2), "presentation": dict(samples=5, depth=2),
        "roundtrip": dict(names=["cyclic2", "arrow"]), "topos": dict(graphs=5, depth=1, max_monoid=2, max_atoms=2),
        "groupoidal": dict(max_monoid=2, max_atoms=1, max_carrier=2),
        "exponential": dict(max_monoid=1, max_atoms=1, max_carrier=2, conj_carrier=1),
        "sheaf": dict(max_carrier=2, names=("arrow",)), "selfsimilar": dict(samples=50, nek_samples=10, length=2),
        "germ": dict(samples=20, depth=2), "oracle": dict(samples=20, depth=2), "clopen": dict(samples=10, depth=2)},
    2: {"restriction": dict(samples=30, depth=2), "presentation": dict(samples=10, depth=2),
        "roundtrip": dict(names=["cyclic2", "arrow", "idempotent"]),
        "topos": dict(graphs=10, depth=2, max_monoid=2, max_atoms=2),
        "groupoidal": dict(max_monoid=2, max_atoms=2, max_carrier=2),
        "exponential": dict(max_monoid=1, max_atoms=2, max_carrier=2, conj_carrier=1),
        "sheaf": dict(max_carrier=2), "selfsimilar": dict(samples=100, nek_samples=20, length=2),
        "germ": dict(samples=40, depth=2), "oracle": dict(samples=40, depth=2), "clopen": dict(samples=20, depth=3)},
    3: {"restriction": dict(samples=200, depth=3), "presentation": dict(samples=20, depth=3),
        "roundtrip": dict(), "topos": dict(graphs=30, depth=2, max_monoid=3, max_atoms=3),
        "groupoidal": dict(max_monoid=3, max_atoms=2, max_carrier=3),
        "exponential": dict(max_monoid=2, max_atoms=1, max_carrier=3, conj_carrier=2),
        "sheaf": dict(max_carrier=3), "selfsimilar": dict(samples=300, nek_samples=100),
        "germ": dict(samples=150), "oracle": dict(samples=200), "clopen": dict(samples=100)},
    4: {k: {} for k in ("restriction", "presentation", "roundtrip", "topos", "groupoidal", "exponential",
                        "sheaf", "selfsimilar", "germ", "oracle", "clopen")},
}


def run_suite(suite: Suite, seed: int = 0, depth: int = 4, **extra) -> tuple[Report, float]:
    kw = dict(PLANS[max(1, min(depth, 4))][suite.key])
    if suite.key in _SEEDED:
        kw["seed"] = seed
    kw.update(extra)
    t0 = time.perf_counter()
    rep = suite.run(**kw)
    return rep, time.perf_counter() - t0


def selftest(seed: int = 0, depth: int = 3, negative_control: bool = False) -> list[tuple[Suite, Report, float]]:
    out = []
    for s in SUITES:
        extra = {"negative_control": True} if negative_control and s.key == "selfsimilar" else {}
        rep, dt = run_suite(s, seed, depth, **extra)
        out.append((s, rep, dt))
    return out
