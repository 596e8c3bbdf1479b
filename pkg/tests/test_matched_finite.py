import itertools

import pytest

from mpkit.boolean_core import FiniteBSet
from mpkit.matched_finite import (
    FiniteMonoid,
    FiniteRestrictionMonoid,
    PairError,
    algebra_bjm,
    boolean_hom_from_atoms,
    brm_downarrow,
    build_brm,
    check_adjunction,
    check_bjm,
    check_brm_axioms,
    check_collapse_iso,
    check_conjugation_iso,
    check_free_universal,
    check_m_equiv,
    check_matched_pair,
    check_pair_hom,
    check_restriction_axioms,
    check_sheaf,
    check_tensor,
    classifying_category,
    classifying_cofunctor,
    collapse,
    decompose_total,
    empty_bjm,
    exponential,
    exponential_conjugation,
    extend_hom,
    free_bjm,
    from_finite_category,
    group_category,
    is_groupoidal,
    is_topos,
    m_equiv,
    monoid_pair,
    pair_from_tables,
    regular,
    roundtrip_check,
    sheafify,
    tensor,
    terminal,
    theta,
)
from mpkit.suites import category_fixtures, cyclic_monoid, idempotent_monoid

CATS = category_fixtures()


@pytest.fixture(scope="module")
def pairs():
    return {name: from_finite_category(A) for name, A in CATS.items()}


def z2_swap():
    # Z2 swapping two atoms; |M| = 2 forces one relation to collapse
    return pair_from_tables(["a1", "a2"], [0, 1], [[0, 1], [1, 0]],
                            {0: {"a1": "a1", "a2": "a2"}, 1: {"a1": "a2", "a2": "a1"}},
                            {"a1": [0, 0], "a2": [0, 1]}, unit=0)


def end2():
    # End({1, 2}) acting by preimage on subsets of {a1, a2}; (mn) applies m first
    maps = [(1, 2), (1, 1), (2, 2), (2, 1)]
    names = ["id", "c1", "c2", "sw"]
    by = dict(zip(maps, names))
    rows = [[by[tuple(n[m[i] - 1] for i in range(2))] for n in maps] for m in maps]
    atom = {1: "a1", 2: "a2"}
    act = {by[m]: {"a1": atom[m[0]], "a2": atom[m[1]]} for m in maps}
    return pair_from_tables(["a1", "a2"], names, rows, act,
                            {"a1": [m[0] for m in maps], "a2": [m[1] for m in maps]}, unit="id")


# ---------------------------------------------------------------------------
# matched pairs


def test_one_atom_pairs_pass():
    for M in (cyclic_monoid(3), idempotent_monoid(), cyclic_monoid(1)):
        assert check_matched_pair(monoid_pair(M)).ok


def test_endomorphisms_by_preimage_pass():
    assert check_matched_pair(end2()).ok


def test_swap_with_collapsed_relation_fails_axiom_three():
    rep = check_matched_pair(z2_swap())
    assert not rep.ok
    assert rep.first_failure.startswith("axiom 3")


def test_pair_from_group_category():
    p = from_finite_category(CATS["cyclic3"])
    assert len(p.atoms) == 1 and len(p.M) == 3
    assert all(p.M.inverse(m) is not None for m in p.M.elements)


def test_pair_from_discrete_category():
    p = from_finite_category(CATS["discrete2"])
    assert len(p.M) == 1 and len(p.atoms) == 2


def test_pair_from_arrow():
    p = from_finite_category(CATS["arrow"])
    assert len(p.M) == 2
    m = next(x for x in p.M.elements if x != p.unit)
    assert p.mul(m, m) == m
    assert p.star(m, p.B.atom("a")) == p.B.one
    assert p.star(m, p.B.atom("b")) == p.B.zero


def test_category_sections_count(pairs):
    # section count is the product of the numbers of arrows into each object
    for name, A in CATS.items():
        expect = 1
        for a in A.objects:
            expect *= len(A.into(a))
        assert len(pairs[name].M) == expect
        assert check_matched_pair(pairs[name]).ok, name


def test_categories_are_valid():
    for name, A in CATS.items():
        assert A.check().ok, name
    assert CATS["codiscrete2"].is_groupoid()
    assert not CATS["arrow"].is_groupoid()


# ---------------------------------------------------------------------------
# restriction monoids


def test_brm_of_group_has_zero_adjoined():
    p = monoid_pair(cyclic_monoid(3))
    S = build_brm(p)
    assert len(S) == 4
    assert S.zero == S.elem(p.B.zero, p.unit)
    assert all(S.mul(S.zero, s) == S.zero for s in S.elements)


def test_brm_of_arrow(pairs):
    p = pairs["arrow"]
    S = build_brm(p)
    # distinct (b, sections restricted to b)
    oracle = len({(b.atomset, tuple(m[i] for i, a in enumerate(p.atoms) if a in b.atomset))
                  for b in p.B.elements() for m in p.M.elements})
    assert len(S) == oracle == 6
    m = next(x for x in p.M.elements if x != p.unit)
    m1 = S.elem(p.B.one, m)
    assert S.mul(m1, m1) == m1


def test_brm_product_formula(pairs):
    for name in ("arrow", "parallel", "span"):
        p = pairs[name]
        S = build_brm(p)
        for b, c in itertools.product(p.B.elements(), repeat=2):
            for m in p.M.elements:
                assert S.mul(S.elem(b, m), S.elem(c, p.unit)) == S.elem(b & p.star(m, c), m)


def test_idempotents_and_totals_of_brm(pairs):
    for name in ("arrow", "chain3", "cyclic2"):
        p = pairs[name]
        S = build_brm(p)
        idems = {S.plus(s) for s in S.elements}
        assert idems == {S.elem(b, p.unit) for b in p.B.elements()}
        assert len(idems) == 2 ** len(p.atoms)
        tot = {s for s in S.elements if S.plus(s) == S.one}
        assert tot == {S.elem(p.B.one, m) for m in p.M.elements}
        assert len(tot) == len(p.M)


def test_build_brm_rejects_invalid_pair():
    with pytest.raises(PairError):
        build_brm(z2_swap())


@pytest.mark.parametrize("name", sorted(CATS))
def test_roundtrip(pairs, name):
    rt = roundtrip_check(pairs[name])
    assert rt.ok, rt.witness


def test_roundtrip_of_z2():
    assert roundtrip_check(monoid_pair(cyclic_monoid(2))).ok


def test_roundtrip_reports_corrupted_table():
    M = cyclic_monoid(3)
    rows = [[M.mul(a, b) for b in M.elements] for a in M.elements]
    rows[1][1] = 0
    bad = FiniteMonoid.from_rows(M.elements, rows, 0)
    rt = roundtrip_check(monoid_pair(bad))
    assert not rt.ok and rt.witness


@pytest.mark.parametrize("name", ["arrow", "parallel", "codiscrete2", "chain3", "span", "cyclic3"])
def test_brm_axioms_exhaustive(pairs, name):
    rep = check_brm_axioms(build_brm(pairs[name]))
    assert rep.ok, rep


def test_brm_axioms_sampled_on_largest_fixture(pairs):
    S = build_brm(pairs["codiscrete3"], validate=False)
    assert len(S) == 64
    els = S.elements
    triples = [(els[i % 64], els[(7 * i + 3) % 64], els[(13 * i + 5) % 64]) for i in range(400)]
    assert check_brm_axioms(S, triples=triples).ok


def test_downarrow_of_brm_matches_pair(pairs):
    p = pairs["span"]
    q = brm_downarrow(build_brm(p))
    assert len(q.M) == len(p.M) and len(q.atoms) == len(p.atoms)
    assert check_matched_pair(q).ok


def test_degenerate_restriction_control():
    M = cyclic_monoid(2)
    S = FiniteRestrictionMonoid(M.elements, M.mul, lambda s: 0, 0)
    assert check_restriction_axioms(S).ok
    rep = check_brm_axioms(S)
    assert not rep.ok
    assert any("degenerate" in n for n in rep.notes)


def test_decompose_total(pairs):
    p = pairs["arrow"]
    S = build_brm(p)
    for m in p.M.elements:
        s = S.elem(p.B.one, m)
        assert decompose_total(S, s) == (S.one, s)
    for b in p.B.elements():
        e = S.elem(b, p.unit)
        assert decompose_total(S, e) == (e, S.one)
        for m in p.M.elements:
            s = S.elem(b, m)
            assert decompose_total(S, s) == (e, S.elem(p.B.one, p.glue(b, m, p.unit)))


# ---------------------------------------------------------------------------
# homomorphisms and cofunctors


def _identity_hom(p):
    return {b: b for b in p.B.elements()}, {m: m for m in p.M.elements}


def test_identity_extends_to_identity(pairs):
    p = pairs["chain3"]
    S = build_brm(p)
    phi, f = _identity_hom(p)
    h = extend_hom(phi, f, S, S)
    assert h.ok and all(h.psi[s] == s for s in S.elements)


def test_map_to_terminal_pair():
    P = monoid_pair(cyclic_monoid(2))
    Q = monoid_pair(cyclic_monoid(1))
    phi = boolean_hom_from_atoms(P.B, Q.B, {"a": "a"})
    f = {m: 0 for m in P.M.elements}
    S, T = build_brm(P), build_brm(Q)
    h = extend_hom(phi, f, S, T)
    assert h.ok
    assert {h.psi[S.elem(P.B.one, m)] for m in P.M.elements} == {T.one}
    assert h.psi[S.zero] == T.zero


def test_non_boolean_phi_rejected(pairs):
    p = pairs["discrete2"]
    phi = {b: (b if not b.is_one else p.B.one) for b in p.B.elements()}
    a = p.B.atom("a")
    phi[a] = p.B.zero
    rep = check_pair_hom(p, p, phi, {m: m for m in p.M.elements})
    assert not rep.ok
    assert not extend_hom(phi, {m: m for m in p.M.elements}, build_brm(p), build_brm(p)).ok


def test_identity_cofunctor(pairs):
    for name in ("arrow", "codiscrete2", "chain3"):
        p = pairs[name]
        phi, f = _identity_hom(p)
        F = classifying_cofunctor(p, p, phi, f)
        assert F.ok
        assert all(F.object_map[a] == a for a in p.atoms)
        assert all(src == dst for src, dst in F.arrow_map.items())


def test_cofunctor_along_inclusion():
    P = monoid_pair(cyclic_monoid(1))
    Q = from_finite_category(CATS["discrete2"])
    phi = boolean_hom_from_atoms(P.B, Q.B, {"a": "a", "b": "a"})
    F = classifying_cofunctor(P, Q, phi, {0: Q.unit})
    assert F.ok
    assert F.object_map == {"a": "a", "b": "a"}


def test_classifying_category_of_section_pair(pairs):
    C = classifying_category(pairs["arrow"])
    assert C.check().ok
    assert sorted(map(str, C.objects)) == ["a", "b"]
    # a has only its identity, b has identity and the arrow from a
    assert len(C.arrows) == 3


# ---------------------------------------------------------------------------
# <B|M>-sets


@pytest.mark.parametrize("name", ["cyclic2", "arrow", "parallel", "codiscrete2"])
def test_canonical_bjm_sets(pairs, name):
    p = pairs[name]
    for X in (regular(p), terminal(p), algebra_bjm(p), empty_bjm(p)):
        assert check_bjm(X).ok


def test_free_sizes(pairs):
    p = pairs["arrow"]
    assert len(free_bjm(p, "g")[0]) == len(p.M)
    q = monoid_pair(cyclic_monoid(3))
    assert len(free_bjm(q, "gh")[0]) == 3 * 2
    d = pairs["discrete2"]
    assert len(free_bjm(d, "gh")[0]) == 4
    assert check_free_universal(p, "gh", [terminal(p), regular(p), algebra_bjm(p)]).ok


def test_exponential_sizes(pairs):
    p = pairs["arrow"]
    Z = algebra_bjm(p)
    assert len(exponential(terminal(p), Z).bjm) == len(Z)
    assert len(exponential(Z, terminal(p)).bjm) == 1
    q = monoid_pair(cyclic_monoid(2))
    assert len(exponential(regular(q), regular(q)).bjm) == 4


def test_adjunction_small(pairs):
    p = pairs["arrow"]
    X, Y, Z = regular(p), algebra_bjm(p), algebra_bjm(p)
    assert check_adjunction(X, Y, Z, others=[terminal(p)]).ok


def test_conjugation_form_for_groups():
    q = monoid_pair(cyclic_monoid(2))
    ws = is_groupoidal(q).witnesses
    for m in q.M.elements:
        assert [n for _, n, _ in ws[m]] == [q.M.inverse(m)]
    assert check_conjugation_iso(regular(q), regular(q), ws).ok
    C, rep = exponential_conjugation(terminal(q), terminal(q), ws)
    assert rep.ok and len(C) == 1


def test_m_equiv_examples(pairs):
    p = pairs["parallel"]
    X = algebra_bjm(p)
    for x in X.carrier:
        for m in p.M.elements:
            assert m_equiv(p, m, x, x, X) == p.B.one
    for x, y in itertools.product(X.carrier, repeat=2):
        assert m_equiv(p, p.unit, x, y, X) == X.bset.agreement(x, y)
    assert check_m_equiv(p, X).ok


def test_m_equiv_nowhere():
    p = monoid_pair(cyclic_monoid(2))
    X = regular(p)
    assert m_equiv(p, 1, 0, 1, X) == p.B.zero


def test_tensor_sizes(pairs):
    q = monoid_pair(cyclic_monoid(3))
    X = FiniteBSet(q.B, "xy", {"a": "xy"})
    assert len(tensor(q, X)[0]) == 3 * 2
    p = pairs["arrow"]
    one = FiniteBSet(p.B, ["*"], {a: [0] for a in p.atoms})
    assert len(tensor(p, one)[0]) == len(p.M)
    grid = FiniteBSet.product(p.B, {"a": "st", "b": "uv"})
    assert check_tensor(p, grid, [terminal(p), algebra_bjm(p)]).ok


def test_theta_examples(pairs):
    q = monoid_pair(cyclic_monoid(3))
    assert theta(q, regular(q), check_hom=True).bijective
    z = monoid_pair(idempotent_monoid())
    th = theta(z, regular(z))
    assert not th.surjective
    assert ("e", 1) not in set(th.mapping.values())
    assert theta(z, empty_bjm(z)).bijective


def test_topos_examples(pairs):
    for M in (cyclic_monoid(2), idempotent_monoid()):
        v = is_topos(monoid_pair(M))
        assert v.ok and v.witness == {"a": M.unit}
    v = is_topos(pairs["arrow"])
    assert not v.ok and v.failing_atom == "b"
    assert is_topos(pairs["cyclic3"]).ok


def test_groupoidal_examples(pairs):
    q = monoid_pair(cyclic_monoid(3))
    assert is_groupoidal(q).ok
    v = is_groupoidal(monoid_pair(idempotent_monoid()))
    assert not v.ok and v.failing == "e"
    assert is_groupoidal(pairs["codiscrete2"]).ok
    assert not is_groupoidal(pairs["arrow"]).ok


def test_sheaf_examples(pairs):
    p = pairs["arrow"]
    Y = sheafify(terminal(p))
    assert all(len(Y.over(b)) == 1 for b in p.B.elements() if not b.is_zero)
    q = monoid_pair(cyclic_monoid(3))
    assert len(sheafify(regular(q)).over(q.B.one)) == 3
    for X in (regular(p), algebra_bjm(p), terminal(p), empty_bjm(p)):
        assert check_sheaf(sheafify(X)).ok
        assert check_collapse_iso(X).ok
        assert len(collapse(sheafify(X))) == len(X)


def test_group_category_composition_order():
    # g o f is f first: with a non-commutative table the order shows
    S3 = list(itertools.permutations(range(3)))
    mul = lambda f, g: tuple(g[f[i]] for i in range(3))  # noqa: E731
    A = group_category(S3, mul, (0, 1, 2))
    assert A.check().ok
    p = from_finite_category(A)
    assert check_matched_pair(p).ok and is_groupoidal(p).ok


def test_monoid_validation():
    with pytest.raises(PairError):
        FiniteMonoid([0, 1], {(0, 0): 0}, 0)
    with pytest.raises(PairError):
        FiniteMonoid.from_rows([0, 1], [[1, 0], [0, 0]])
    with pytest.raises(PairError):
        pair_from_tables(["a"], [0], [[0]], {}, {"a": [0]})
