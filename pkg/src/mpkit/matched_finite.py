"""Finite matched pairs <B|M> and everything computed from them by exhaustion.

Conventions
-----------
* B is the powerset of a tuple of atoms; ``m*b`` is the preimage of b under
  an atom map ``a -> m.a``.  Since ``(mn)*b = m*(n*b)`` the atom maps compose
  as ``(mn).a = n.(m.a)``.
* The B-set structure on M is stored per atom (``FiniteBSet``).
* Elements of the Boolean restriction monoid built from a pair are written
  ``m|b``: a domain b and the least representative of the class of m.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .boolean_core import (BElement, BSetError, FiniteBSet, FiniteBooleanAlgebra,
                           Partition, check_bset, join_all, partitions_of)
from .report import Report


class PairError(ValueError):
    pass


# ---------------------------------------------------------------------------
# monoids and categories


class FiniteMonoid:
    def __init__(self, elements: Sequence[Hashable], table: Mapping[tuple, Hashable], unit: Hashable):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise PairError("monoid has repeated elements")
        if unit not in self.elements:
            raise PairError(f"unit {unit!r} is not an element")
        self.unit = unit
        self.table = dict(table)
        for m in self.elements:
            for n in self.elements:
                if (m, n) not in self.table:
                    raise PairError(f"product {m}*{n} missing")
                if self.table[(m, n)] not in self.elements:
                    raise PairError(f"product {m}*{n} = {self.table[(m, n)]!r} is not an element")
        self._order = {m: i for i, m in enumerate(self.elements)}

    @classmethod
    def from_rows(cls, elements: Sequence[Hashable], rows: Sequence[Sequence[Hashable]],
                  unit: Hashable | None = None) -> "FiniteMonoid":
        els = tuple(elements)
        table = {(m, n): rows[i][j] for i, m in enumerate(els) for j, n in enumerate(els)}
        if unit is None:
            units = [u for u in els if all(table[(u, x)] == x and table[(x, u)] == x for x in els)]
            if not units:
                raise PairError("no unit in multiplication table")
            unit = units[0]
        return cls(els, table, unit)

    def mul(self, m: Hashable, n: Hashable) -> Hashable:
        return self.table[(m, n)]

    def order(self, m: Hashable) -> int:
        return self._order[m]

    def __len__(self) -> int:
        return len(self.elements)

    def check(self) -> Report:
        rep = Report("monoid")
        e, mul = self.unit, self.mul
        for m in self.elements:
            rep.check(mul(e, m) == m and mul(m, e) == m, lambda m=m: f"unit law fails at {m}")
        for a, b, c in itertools.product(self.elements, repeat=3):
            rep.check(mul(mul(a, b), c) == mul(a, mul(b, c)),
                      lambda a=a, b=b, c=c: f"({a}{b}){c} != {a}({b}{c})")
        return rep

    def inverse(self, m: Hashable) -> Hashable | None:
        for n in self.elements:
            if self.mul(m, n) == self.unit and self.mul(n, m) == self.unit:
                return n
        return None


class FiniteCategory:
    """Objects, named arrows with source/target, and composition ``g o f``.

    ``compose[(g, f)]`` is g after f (f: a -> b, g: b -> c).  Identity
    arrows are added as ``id_<obj>`` unless supplied.
    """

    def __init__(self, objects: Sequence[Hashable], arrows: Mapping[Hashable, tuple],
                 compose: Mapping[tuple, Hashable], identities: Mapping[Hashable, Hashable] | None = None):
        self.objects = tuple(objects)
        if not self.objects:
            raise PairError("category needs at least one object")
        arr = dict(arrows)
        ids = dict(identities or {})
        for a in self.objects:
            if a not in ids:
                name = f"id_{a}"
                ids[a] = name
            arr.setdefault(ids[a], (a, a))
        self.arrows = arr
        self.identities = ids
        comp = dict(compose)
        for f, (s, t) in arr.items():
            if s not in self.objects or t not in self.objects:
                raise PairError(f"arrow {f} has unknown endpoint")
            comp.setdefault((ids[t], f), f)
            comp.setdefault((f, ids[s]), f)
        self.compose = comp

    def src(self, f: Hashable) -> Hashable:
        return self.arrows[f][0]

    def tgt(self, f: Hashable) -> Hashable:
        return self.arrows[f][1]

    def arrow_names(self) -> list:
        return sorted(self.arrows, key=str)

    def into(self, a: Hashable) -> list:
        return [f for f in self.arrow_names() if self.tgt(f) == a]

    def comp(self, g: Hashable, f: Hashable) -> Hashable:
        return self.compose[(g, f)]

    def check(self) -> Report:
        rep = Report("category")
        names = self.arrow_names()
        for f in names:
            for g in names:
                if self.src(g) != self.tgt(f):
                    continue
                if (g, f) not in self.compose:
                    rep.fail(f"composite {g} o {f} missing")
                    continue
                h = self.compose[(g, f)]
                rep.check(h in self.arrows and self.arrows[h] == (self.src(f), self.tgt(g)),
                          lambda: f"{g} o {f} = {h} has wrong endpoints")
        if not rep.ok:
            return rep
        for f in names:
            rep.check(self.comp(self.identities[self.tgt(f)], f) == f, lambda f=f: f"left identity at {f}")
            rep.check(self.comp(f, self.identities[self.src(f)]) == f, lambda f=f: f"right identity at {f}")
        for f, g, h in itertools.product(names, repeat=3):
            if self.src(g) == self.tgt(f) and self.src(h) == self.tgt(g):
                rep.check(self.comp(h, self.comp(g, f)) == self.comp(self.comp(h, g), f),
                          lambda f=f, g=g, h=h: f"associativity fails at {h},{g},{f}")
        return rep

    def is_strongly_connected(self) -> bool:
        adj = {a: set() for a in self.objects}
        for f in self.arrows:
            adj[self.src(f)].add(self.tgt(f))
        for a in self.objects:
            seen, todo = {a}, [a]
            while todo:
                x = todo.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
            if len(seen) != len(self.objects):
                return False
        return True

    def is_groupoid(self) -> bool:
        for f in self.arrows:
            s, t = self.arrows[f]
            if not any(self.src(g) == t and self.tgt(g) == s
                       and self.comp(g, f) == self.identities[s]
                       and self.comp(f, g) == self.identities[t] for g in self.arrows):
                return False
        return True


def group_category(elements: Sequence[Hashable], mul: Callable[[Any, Any], Any], unit: Hashable,
                   obj: Hashable = "*") -> FiniteCategory:
    """One-object category; composite g o f is mul(f, g) (f first)."""
    arrows = {m: (obj, obj) for m in elements}
    comp = {(g, f): mul(f, g) for f in elements for g in elements}
    return FiniteCategory([obj], arrows, comp, identities={obj: unit})


# ---------------------------------------------------------------------------
# matched pairs


class FiniteMatchedPair:
    def __init__(self, B: FiniteBooleanAlgebra, M: FiniteMonoid, act: Mapping[Hashable, Mapping[Hashable, Hashable]],
                 bset: FiniteBSet):
        self.B = B
        self.M = M
        self.atoms = B.atoms
        self._aidx = {a: i for i, a in enumerate(B.atoms)}
        amap = {}
        for m in M.elements:
            if m not in act:
                raise PairError(f"no atom map for {m!r}")
            row = dict(act[m])
            for a in B.atoms:
                if a not in row or row[a] not in self._aidx:
                    raise PairError(f"atom map of {m!r} undefined or invalid at {a!r}")
            amap[m] = row
        self.act = amap
        if bset.algebra != B or set(bset.carrier) != set(M.elements):
            raise PairError("B-set structure must live on the monoid's elements over the same algebra")
        self.bset = bset
        self._star: dict = {}
        self._rep: dict = {}

    # action of M on B
    def atom_map(self, m: Hashable, a: Hashable) -> Hashable:
        return self.act[m][a]

    def star(self, m: Hashable, b: BElement) -> BElement:
        key = (m, b.atomset)
        out = self._star.get(key)
        if out is None:
            row = self.act[m]
            out = BElement(self.B, frozenset(a for a in self.atoms if row[a] in b.atomset))
            self._star[key] = out
        return out

    def mul(self, m: Hashable, n: Hashable) -> Hashable:
        return self.M.table[(m, n)]

    @property
    def unit(self) -> Hashable:
        return self.M.unit

    def equiv(self, b: BElement, m: Hashable, n: Hashable) -> bool:
        return self.bset.equiv(b, m, n)

    def glue(self, b: BElement, m: Hashable, n: Hashable) -> Hashable:
        return self.bset.glue(b, m, n)

    def maxfix(self, k: Hashable) -> BElement:
        """Largest b with k equivalent to 1 over b."""
        return self.bset.agreement(k, self.M.unit)

    def rep(self, b: BElement, m: Hashable) -> Hashable:
        """Least element (in monoid order) of the class of m over b."""
        key = (b.atomset, m)
        out = self._rep.get(key)
        if out is None:
            for n in self.M.elements:
                if self.bset.equiv(b, m, n):
                    out = n
                    break
            self._rep[key] = out
        return out

    def classes(self, b: BElement) -> list:
        return sorted({self.rep(b, m) for m in self.M.elements}, key=self.M.order)

    def __repr__(self) -> str:
        return f"FiniteMatchedPair(|M|={len(self.M)}, atoms={self.atoms})"


def pair_from_tables(atoms: Sequence[Hashable], elements: Sequence[Hashable], rows: Sequence[Sequence[Hashable]],
                     act: Mapping[Hashable, Mapping[Hashable, Hashable]],
                     classes: Mapping[Hashable, Sequence[Hashable]], unit: Hashable | None = None) -> FiniteMatchedPair:
    """Convenience constructor: ``classes[a]`` labels the elements in order."""
    B = FiniteBooleanAlgebra(tuple(atoms))
    M = FiniteMonoid.from_rows(elements, rows, unit)
    return FiniteMatchedPair(B, M, act, FiniteBSet(B, M.elements, classes))


def monoid_pair(M: FiniteMonoid, atom: Hashable = "a") -> FiniteMatchedPair:
    """B = 2, any monoid, trivial glueing."""
    B = FiniteBooleanAlgebra((atom,))
    bset = FiniteBSet(B, M.elements, {atom: list(range(len(M)))})
    return FiniteMatchedPair(B, M, {m: {atom: atom} for m in M.elements}, bset)


def check_matched_pair(p: FiniteMatchedPair) -> Report:
    rep = Report("matched pair")
    rep.merge(p.M.check(), "monoid: ")
    rep.merge(check_bset(p.bset), "B-set on M: ")
    if not rep.ok:
        return rep
    B, M = p.B, p.M
    els = list(B.elements())
    one, zero = B.one, B.zero
    u = M.unit
    for a in p.atoms:
        rep.check(p.atom_map(u, a) == a, lambda a=a: f"1 moves atom {a}")
    for m, n in itertools.product(M.elements, repeat=2):
        mn = M.mul(m, n)
        for a in p.atoms:
            rep.check(p.atom_map(mn, a) == p.atom_map(n, p.atom_map(m, a)),
                      lambda m=m, n=n, a=a: f"({m}{n})* != {m}* {n}* at atom {a}")
    if not rep.ok:
        return rep
    for m in M.elements:
        rep.check(p.star(m, one) == one and p.star(m, zero) == zero, lambda m=m: f"{m}* fails on 0 or 1")
        for b in els:
            rep.check(p.star(m, ~b) == ~p.star(m, b), lambda m=m, b=b: f"{m}* does not preserve complement of {b!r}")
            for c in els:
                rep.check(p.star(m, b & c) == p.star(m, b) & p.star(m, c),
                          lambda m=m, b=b, c=c: f"{m}* does not preserve {b!r} ^ {c!r}")
    for b in els:
        for m, n in itertools.product(M.elements, repeat=2):
            if p.equiv(b, m, n):
                for q in M.elements:
                    rep.check(p.equiv(b, M.mul(m, q), M.mul(n, q)),
                              lambda b=b, m=m, n=n, q=q: f"axiom 1: {m}~{n} on {b!r} but {m}{q} !~ {n}{q}")
                for c in els:
                    rep.check(b & p.star(m, c) == b & p.star(n, c),
                              lambda b=b, m=m, n=n, c=c: f"axiom 3: {m}~{n} on {b!r} but {b!r}^{m}*{c!r} != {b!r}^{n}*{c!r}")
        for m in M.elements:
            mb = p.star(m, b)
            for n, q in itertools.product(M.elements, repeat=2):
                if p.equiv(b, n, q):
                    rep.check(p.equiv(mb, M.mul(m, n), M.mul(m, q)),
                              lambda b=b, m=m, n=n, q=q: f"axiom 2: {n}~{q} on {b!r} but {m}{n} !~ {m}{q} on {mb!r}")
    # the equational forms, which follow from the above; checked as a guard
    for b in els:
        for m, n in itertools.product(M.elements, repeat=2):
            g = p.glue(b, m, n)
            for c in els:
                rep.check(p.star(g, c) == (b & p.star(m, c)) | (~b & p.star(n, c)),
                          lambda b=b, m=m, n=n, c=c: f"{b!r}({m},{n})*{c!r} != {b!r}({m}*{c!r},{n}*{c!r})")
            for q in M.elements:
                rep.check(M.mul(g, q) == p.glue(b, M.mul(m, q), M.mul(n, q)),
                          lambda b=b, m=m, n=n, q=q: f"{b!r}({m},{n}){q} != {b!r}({m}{q},{n}{q})")
                rep.check(M.mul(q, g) == p.glue(p.star(q, b), M.mul(q, m), M.mul(q, n)),
                          lambda b=b, m=m, n=n, q=q: f"{q}{b!r}({m},{n}) != ({q}*{b!r})({q}{m},{q}{n})")
    return rep


# ---------------------------------------------------------------------------
# pairs from categories


def from_finite_category(A: FiniteCategory) -> FiniteMatchedPair:
    """Admissible sections: one arrow into each object.

    A section f is a tuple ``(f_a)`` in object order; ``f*a`` is the source
    of ``f_a``, and ``(fg)_a = f_a o g_{f*a}``.
    """
    objs = A.objects
    into = [A.into(a) for a in objs]
    sections = list(itertools.product(*into))
    oidx = {a: i for i, a in enumerate(objs)}
    unit = tuple(A.identities[a] for a in objs)
    # put the unit first so it is the least class representative
    sections.remove(unit)
    sections.insert(0, unit)

    def mul(f, g):
        return tuple(A.comp(f[i], g[oidx[A.src(f[i])]]) for i in range(len(objs)))

    table = {(f, g): mul(f, g) for f in sections for g in sections}
    M = FiniteMonoid(sections, table, unit)
    B = FiniteBooleanAlgebra(objs)
    act = {f: {a: A.src(f[i]) for i, a in enumerate(objs)} for f in sections}
    bset = FiniteBSet(B, sections, {a: [f[i] for f in sections] for i, a in enumerate(objs)})
    return FiniteMatchedPair(B, M, act, bset)


def section_name(f: tuple) -> str:
    return "<" + ",".join(map(str, f)) + ">"


# ---------------------------------------------------------------------------
# restriction monoids


@dataclass(frozen=True)
class BrmElement:
    domain: BElement
    rep: Hashable

    def __repr__(self) -> str:
        r = section_name(self.rep) if isinstance(self.rep, tuple) else str(self.rep)
        return f"{r}|{self.domain!r}"


class FiniteBRM:
    """The Boolean restriction monoid of a finite matched pair."""

    def __init__(self, pair: FiniteMatchedPair):
        self.pair = pair
        p = pair
        els = []
        for b in p.B.elements():
            for m in p.classes(b):
                els.append(BrmElement(b, m))
        self.elements = els
        self.one = self.elem(p.B.one, p.unit)
        self.zero = self.elem(p.B.zero, p.unit)

    def elem(self, b: BElement, m: Hashable) -> BrmElement:
        return BrmElement(b, self.pair.rep(b, m))

    def mul(self, s: BrmElement, t: BrmElement) -> BrmElement:
        p = self.pair
        return self.elem(s.domain & p.star(s.rep, t.domain), p.mul(s.rep, t.rep))

    def plus(self, s: BrmElement) -> BrmElement:
        return self.elem(s.domain, self.pair.unit)

    def leq(self, s: BrmElement, t: BrmElement) -> bool:
        return self.mul(self.plus(s), t) == s

    def join(self, s: BrmElement, t: BrmElement) -> BrmElement | None:
        if not (s.domain & t.domain).is_zero:
            return None
        return self.elem(s.domain | t.domain, self.pair.glue(s.domain, s.rep, t.rep))

    def complement(self, e: BrmElement) -> BrmElement:
        return self.elem(~e.domain, self.pair.unit)

    def __len__(self) -> int:
        return len(self.elements)


def build_brm(p: FiniteMatchedPair, validate: bool = True) -> FiniteBRM:
    if validate:
        rep = check_matched_pair(p)
        if not rep.ok:
            raise PairError(f"not a matched pair: {rep.first_failure}")
    return FiniteBRM(p)


class FiniteRestrictionMonoid:
    """A finite monoid with a restriction operation; joins, zero and
    complements are found by search in the induced order."""

    def __init__(self, elements: Sequence[Hashable], mul: Callable, plus: Callable, one: Hashable):
        self.elements = list(elements)
        self._mul, self._plus = mul, plus
        self.one = one
        self.idempotents = sorted({plus(s) for s in self.elements}, key=self.elements.index)
        lows = [e for e in self.idempotents if all(self.leq(e, f) for f in self.idempotents)]
        self.zero = lows[0] if lows else None

    @classmethod
    def of(cls, S: Any) -> "FiniteRestrictionMonoid":
        return cls(S.elements, S.mul, S.plus, S.one)

    def mul(self, s, t):
        return self._mul(s, t)

    def plus(self, s):
        return self._plus(s)

    def leq(self, s, t) -> bool:
        return self._mul(self._plus(s), t) == s

    def join(self, s, t):
        ups = [u for u in self.elements if self.leq(s, u) and self.leq(t, u)]
        least = [u for u in ups if all(self.leq(u, v) for v in ups)]
        return least[0] if least else None

    def complement(self, e):
        for f in self.idempotents:
            if self._mul(e, f) == self.zero and self.join(e, f) == self.one:
                return f
        return None


def check_restriction_axioms(S: Any, elements: Sequence | None = None,
                             pairs: Iterable[tuple] | None = None) -> Report:
    rep = Report("restriction axioms")
    els = list(S.elements if elements is None else elements)
    mul, plus = S.mul, S.plus
    for s in els:
        rep.check(mul(plus(s), s) == s, lambda s=s: f"s+ s != s for s={s!r}")
    todo = pairs if pairs is not None else itertools.product(els, repeat=2)
    for s, t in todo:
        ps, pt = plus(s), plus(t)
        st = mul(s, t)
        rep.check(plus(mul(ps, t)) == mul(ps, pt), lambda: f"(s+t)+ != s+t+ for s={s!r}, t={t!r}")
        rep.check(mul(ps, pt) == mul(pt, ps), lambda: f"s+t+ != t+s+ for s={s!r}, t={t!r}")
        rep.check(mul(s, pt) == mul(plus(st), s), lambda: f"st+ != (st)+s for s={s!r}, t={t!r}")
        rep.check(plus(mul(s, pt)) == plus(st), lambda: f"(st+)+ != (st)+ for s={s!r}, t={t!r}")
    return rep


def check_brm_axioms(S: Any, elements: Sequence | None = None, triples: Sequence[tuple] | None = None,
                     exhaustive: bool | None = None) -> Report:
    """Restriction axioms plus every Boolean restriction law.

    With ``triples`` the laws are checked on those instances only (sampled
    mode).  Otherwise all pairs/triples of ``elements`` are used and joins
    and complements are additionally confirmed to be least upper bounds
    and Boolean complements by search.
    """
    els = list(S.elements if elements is None else elements)
    sampled = triples is not None
    if exhaustive is None:
        exhaustive = not sampled
    mul, plus, join, comp = S.mul, S.plus, S.join, S.complement
    zero, one = S.zero, S.one
    pairs = [(s, t) for s, t, _ in triples] if sampled else None
    rep = check_restriction_axioms(S, els, pairs)
    rep.title = "Boolean restriction axioms"
    leq = lambda s, t: mul(plus(s), t) == s  # noqa: E731

    def disjoint(s, t):
        return mul(plus(s), plus(t)) == zero

    if zero is None:
        rep.fail("no least restriction idempotent")
        return rep
    rep.check(plus(zero) == zero, "0+ != 0")
    if zero == one:
        rep.note("E(S) is degenerate (0 = 1)")
    # E(S) as a Boolean algebra
    if sampled:
        idems = list(dict.fromkeys(plus(x) for tr in triples for x in tr))
    else:
        idems = list(dict.fromkeys(plus(s) for s in els))

    def bjoin(e, f):
        ce, cf = comp(e), comp(f)
        if ce is None or cf is None:
            return None
        return comp(mul(ce, cf))

    for e in idems:
        ce = comp(e)
        if not rep.check(ce is not None, lambda e=e: f"no complement for {e!r}"):
            continue
        rep.check(plus(ce) == ce, lambda e=e: f"complement of {e!r} is not a restriction idempotent")
        rep.check(mul(e, ce) == zero, lambda e=e: f"e e' != 0 for e={e!r}")
        rep.check(join(e, ce) == one, lambda e=e: f"e v e' != 1 for e={e!r}")
        rep.check(comp(ce) == e, lambda e=e: f"e'' != e for e={e!r}")
    idem_triples = ([(plus(s), plus(t), plus(u)) for s, t, u in triples] if sampled
                    else itertools.product(idems, repeat=3))
    for e, f, g in idem_triples:
        ef = bjoin(e, f)
        if not rep.check(ef is not None, lambda: f"no join of {e!r}, {f!r} in E(S)"):
            continue
        rep.check(leq(e, ef) and leq(f, ef), lambda: f"{e!r} v {f!r} is not an upper bound")
        fg = bjoin(f, g)
        if fg is not None:
            rep.check(mul(e, fg) == bjoin(mul(e, f), mul(e, g)),
                      lambda: f"E(S) not distributive at {e!r},{f!r},{g!r}")
    # zero is least and absorbing
    for s in els:
        rep.check(leq(zero, s), lambda s=s: f"0 is not below {s!r}")
        rep.check(mul(s, zero) == zero, lambda s=s: f"s0 != 0 for s={s!r}")
        rep.check(mul(zero, s) == zero, lambda s=s: f"0s != 0 for s={s!r}")
    todo = triples if sampled else itertools.product(els, repeat=3)
    seen_pairs: set = set()
    for s, t, u in todo:
        # joins of disjoint pairs: (t,u) for left distributivity, (s,t) for right
        for x, y in ((t, u), (s, t)):
            if (x, y) in seen_pairs or not disjoint(x, y):
                continue
            seen_pairs.add((x, y))
            j = join(x, y)
            if not rep.check(j is not None, lambda x=x, y=y: f"disjoint {x!r}, {y!r} have no join"):
                continue
            rep.check(leq(x, j) and leq(y, j), lambda x=x, y=y, j=j: f"{j!r} is not above {x!r}, {y!r}")
            rep.check(plus(j) == bjoin(plus(x), plus(y)), lambda x=x, y=y: f"(x v y)+ != x+ v y+ for {x!r}, {y!r}")
            if exhaustive:
                for v in els:
                    if leq(x, v) and leq(y, v):
                        rep.check(leq(j, v), lambda x=x, y=y, v=v, j=j: f"join {j!r} of {x!r}, {y!r} not below upper bound {v!r}")
        if disjoint(t, u):
            tu = join(t, u)
            st, su = mul(s, t), mul(s, u)
            if tu is not None and rep.check(disjoint(st, su), lambda: f"st, su not disjoint for s={s!r}, t={t!r}, u={u!r}"):
                rep.check(mul(s, tu) == join(st, su), lambda: f"s(t v u) != st v su for s={s!r}, t={t!r}, u={u!r}")
        if disjoint(s, t):
            sv = join(s, t)
            su, tu2 = mul(s, u), mul(t, u)
            if sv is not None and rep.check(disjoint(su, tu2), lambda: f"su, tu not disjoint for s={s!r}, t={t!r}, u={u!r}"):
                rep.check(mul(sv, u) == join(su, tu2), lambda: f"(s v t)u != su v tu for s={s!r}, t={t!r}, u={u!r}")
    if exhaustive:
        # the supplied operations must agree with the order-theoretic ones
        found = FiniteRestrictionMonoid(els, mul, plus, one)
        rep.check(found.zero == zero, f"supplied zero {zero!r} differs from least idempotent {found.zero!r}")
        for e in idems:
            rep.check(found.complement(e) == comp(e), lambda e=e: f"supplied complement of {e!r} is not the Boolean one")
    return rep


def decompose_total(S: Any, s: Hashable) -> tuple:
    """(s+, s v s-) where s- is the complement of s+."""
    e = S.plus(s)
    total = S.join(s, S.complement(e))
    if total is None:
        raise PairError(f"{s!r} and its complement domain have no join")
    return e, total


def brm_downarrow(S: Any) -> FiniteMatchedPair:
    """The matched pair (E(S), Tot(S)) of a finite Boolean restriction monoid."""
    els = list(S.elements)
    mul, plus = S.mul, S.plus
    zero, one = S.zero, S.one
    E = list(dict.fromkeys(plus(s) for s in els))
    leq = lambda s, t: mul(plus(s), t) == s  # noqa: E731
    atoms = [e for e in E if e != zero and all(f == zero or f == e or not leq(f, e) for f in E)]
    if not atoms:
        raise PairError("E(S) has no atoms")
    B = FiniteBooleanAlgebra(tuple(atoms))

    def to_b(e) -> BElement:
        return BElement(B, frozenset(a for a in atoms if leq(a, e)))

    tot = [s for s in els if plus(s) == one]
    if one in tot:
        tot.remove(one)
        tot.insert(0, one)
    table = {(m, n): mul(m, n) for m in tot for n in tot}
    for (m, n), k in table.items():
        if k not in tot:
            raise PairError(f"product of total elements {m!r}, {n!r} is not total")
    M = FiniteMonoid(tot, table, one)
    act = {}
    for m in tot:
        row = {}
        pre = {a2: to_b(plus(mul(m, a2))) for a2 in atoms}
        for a in atoms:
            hits = [a2 for a2 in atoms if a in pre[a2].atomset]
            if len(hits) != 1:
                raise PairError(f"{m!r}* is not a Boolean homomorphism (atom {a!r} covered {len(hits)} times)")
            row[a] = hits[0]
        act[m] = row
    labels = {a: [mul(a, m) for m in tot] for a in atoms}
    return FiniteMatchedPair(B, M, act, FiniteBSet(B, tot, labels))


@dataclass
class RoundTrip:
    ok: bool
    phi: dict = field(default_factory=dict)
    f: dict = field(default_factory=dict)
    witness: str | None = None
    pair: FiniteMatchedPair | None = None


def roundtrip_check(p: FiniteMatchedPair) -> RoundTrip:
    """Check p against (E(S), Tot(S)) for S built from p, via b -> 1|b, m -> m|1."""
    rep = check_matched_pair(p)
    if not rep.ok:
        return RoundTrip(False, witness=rep.first_failure)
    S = FiniteBRM(p)
    q = brm_downarrow(S)
    phi_atom = {a: S.elem(p.B.atom(a), p.unit) for a in p.atoms}
    if set(phi_atom.values()) != set(q.atoms):
        return RoundTrip(False, witness="b -> 1|b does not carry atoms onto atoms", pair=q)

    def phi(b: BElement) -> BElement:
        return BElement(q.B, frozenset(phi_atom[a] for a in b.atomset))

    # phi agrees with b -> 1|b on every element
    for b in p.B.elements():
        img = S.elem(b, p.unit)
        lower = frozenset(a for a in q.atoms if S.mul(S.plus(a), img) == a)
        if lower != phi(b).atomset:
            return RoundTrip(False, witness=f"1|{b!r} is not the join of the images of its atoms", pair=q)
    f = {m: S.elem(p.B.one, m) for m in p.M.elements}
    if len(set(f.values())) != len(p.M) or set(f.values()) != set(q.M.elements):
        return RoundTrip(False, witness="m -> m|1 is not a bijection onto Tot(S)", pair=q)
    if f[p.unit] != q.unit:
        return RoundTrip(False, witness="unit not preserved", pair=q)
    for m, n in itertools.product(p.M.elements, repeat=2):
        if f[p.mul(m, n)] != q.mul(f[m], f[n]):
            return RoundTrip(False, witness=f"f({m}{n}) != f({m})f({n})", pair=q)
    for b in p.B.elements():
        pb = phi(b)
        for m in p.M.elements:
            if q.star(f[m], pb) != phi(p.star(m, b)):
                return RoundTrip(False, witness=f"f({m})*(phi({b!r})) != phi({m}*{b!r})", pair=q)
            for n in p.M.elements:
                if f[p.glue(b, m, n)] != q.glue(pb, f[m], f[n]):
                    return RoundTrip(False, witness=f"f({b!r}({m},{n})) != phi({b!r})(f({m}),f({n}))", pair=q)
                if p.equiv(b, m, n) != q.equiv(pb, f[m], f[n]):
                    return RoundTrip(False, witness=f"equivalence of {m},{n} over {b!r} not preserved", pair=q)
    return RoundTrip(True, {b: phi(b) for b in p.B.elements()}, f, None, q)


# ---------------------------------------------------------------------------
# homomorphisms of pairs


def boolean_hom_from_atoms(source: FiniteBooleanAlgebra, target: FiniteBooleanAlgebra,
                           g: Mapping[Hashable, Hashable]) -> dict:
    """phi(b) = {a' : g(a') in b}, the Boolean map dual to g: atoms' -> atoms."""
    return {b: BElement(target, frozenset(a2 for a2 in target.atoms if g[a2] in b.atomset))
            for b in source.elements()}


def check_pair_hom(P: FiniteMatchedPair, Q: FiniteMatchedPair, phi: Mapping[BElement, BElement],
                   f: Mapping[Hashable, Hashable]) -> Report:
    rep = Report("pair homomorphism")
    els = list(P.B.elements())
    for b in els:
        if not rep.check(b in phi and phi[b].algebra == Q.B, lambda b=b: f"phi undefined at {b!r}"):
            return rep
    rep.check(phi[P.B.zero] == Q.B.zero and phi[P.B.one] == Q.B.one, "phi does not preserve 0 and 1")
    for b in els:
        rep.check(phi[~b] == ~phi[b], lambda b=b: f"phi does not preserve the complement of {b!r}")
        for c in els:
            rep.check(phi[b & c] == phi[b] & phi[c], lambda b=b, c=c: f"phi does not preserve {b!r} ^ {c!r}")
    for m in P.M.elements:
        if not rep.check(m in f and f[m] in Q.M.elements, lambda m=m: f"f undefined at {m}"):
            return rep
    rep.check(f[P.unit] == Q.unit, "f does not preserve the unit")
    for m, n in itertools.product(P.M.elements, repeat=2):
        rep.check(f[P.mul(m, n)] == Q.mul(f[m], f[n]), lambda m=m, n=n: f"f({m}{n}) != f({m})f({n})")
    if not rep.ok:
        return rep
    for b in els:
        for m in P.M.elements:
            rep.check(Q.star(f[m], phi[b]) == phi[P.star(m, b)],
                      lambda b=b, m=m: f"f({m})*(phi({b!r})) != phi({m}*{b!r})")
            for n in P.M.elements:
                if P.equiv(b, m, n):
                    rep.check(Q.equiv(phi[b], f[m], f[n]),
                              lambda b=b, m=m, n=n: f"{m}~{n} on {b!r} but f-images differ on phi({b!r})")
    return rep


@dataclass
class BrmHom:
    ok: bool
    psi: dict = field(default_factory=dict)
    witness: str | None = None


def extend_hom(phi: Mapping[BElement, BElement], f: Mapping[Hashable, Hashable], S: FiniteBRM, T: FiniteBRM) -> BrmHom:
    """psi(m|b) = phi(b) f(b(m,1)), checked to be a Boolean restriction monoid map."""
    P, Q = S.pair, T.pair
    rep = check_pair_hom(P, Q, phi, f)
    if not rep.ok:
        return BrmHom(False, witness=rep.first_failure)
    psi = {}
    for s in S.elements:
        b, m = s.domain, s.rep
        psi[s] = T.mul(T.elem(phi[b], Q.unit), T.elem(Q.B.one, f[P.glue(b, m, P.unit)]))
    # independence of the representative
    for b in P.B.elements():
        for m in P.M.elements:
            alt = T.mul(T.elem(phi[b], Q.unit), T.elem(Q.B.one, f[P.glue(b, m, P.unit)]))
            if alt != psi[S.elem(b, m)]:
                return BrmHom(False, psi, f"psi depends on the representative of {m}|{b!r}")
    checks = [(psi[S.one] == T.one, "unit"), (psi[S.zero] == T.zero, "zero")]
    for ok, what in checks:
        if not ok:
            return BrmHom(False, psi, f"psi does not preserve the {what}")
    for s in S.elements:
        if psi[S.plus(s)] != T.plus(psi[s]):
            return BrmHom(False, psi, f"psi does not preserve restriction at {s!r}")
        for t in S.elements:
            if psi[S.mul(s, t)] != T.mul(psi[s], psi[t]):
                return BrmHom(False, psi, f"psi({s!r}{t!r}) != psi({s!r})psi({t!r})")
            j = S.join(s, t)
            if j is not None and psi[j] != T.join(psi[s], psi[t]):
                return BrmHom(False, psi, f"psi does not preserve the join of {s!r}, {t!r}")
    return BrmHom(True, psi)


# ---------------------------------------------------------------------------
# classifying category and cofunctors


def classifying_category(p: FiniteMatchedPair) -> FiniteCategory:
    """Objects are atoms; arrows (a, [m]_a): a -> m.a compose as (a, mn)."""
    arrows, comp = {}, {}
    for a in p.atoms:
        for m in p.classes(p.B.atom(a)):
            arrows[(a, m)] = (a, p.atom_map(m, a))
    for (a, m), (_, t) in arrows.items():
        for (a2, n), _ in arrows.items():
            if a2 == t:
                comp[((a2, n), (a, m))] = (a, p.rep(p.B.atom(a), p.mul(m, n)))
    ids = {a: (a, p.rep(p.B.atom(a), p.unit)) for a in p.atoms}
    return FiniteCategory(p.atoms, arrows, comp, identities=ids)


@dataclass
class Cofunctor:
    object_map: dict
    arrow_map: dict
    report: Report

    @property
    def ok(self) -> bool:
        return self.report.ok


def classifying_cofunctor(P: FiniteMatchedPair, Q: FiniteMatchedPair, phi: Mapping[BElement, BElement],
                          f: Mapping[Hashable, Hashable]) -> Cofunctor:
    hom = check_pair_hom(P, Q, phi, f)
    if not hom.ok:
        raise PairError(f"not a pair homomorphism: {hom.first_failure}")
    rep = Report("cofunctor")
    # with finite B an ultrafilter is an atom; phi^* of the atom a' is the
    # unique atom a of P with a' in phi({a})
    obj = {}
    for a2 in Q.atoms:
        hits = [a for a in P.atoms if a2 in phi[P.B.atom(a)].atomset]
        rep.check(len(hits) == 1, lambda a2=a2: f"phi^* of {a2} is not an atom")
        obj[a2] = hits[0]
    arrows = {}
    for a2 in Q.atoms:
        a = obj[a2]
        ba, ba2 = P.B.atom(a), Q.B.atom(a2)
        for m in P.M.elements:
            img = Q.rep(ba2, f[m])
            key = (a2, P.rep(ba, m))
            rep.check(arrows.setdefault(key, img) == img, lambda m=m, a2=a2: f"arrow map not well defined at ({a2},{m})")
            # targets: the object over the target of F(m) is the target of m
            rep.check(obj[Q.atom_map(f[m], a2)] == P.atom_map(m, a),
                      lambda m=m, a2=a2: f"phi^*(f({m}).{a2}) != {m}.phi^*({a2})")
        rep.check(arrows[(a2, P.rep(ba, P.unit))] == Q.rep(ba2, Q.unit), lambda a2=a2: f"identity at {a2} not preserved")
    for a2 in Q.atoms:
        a = obj[a2]
        for m, n in itertools.product(P.M.elements, repeat=2):
            d2 = Q.atom_map(f[m], a2)
            first = arrows[(a2, P.rep(P.B.atom(a), m))]
            second = arrows[(d2, P.rep(P.B.atom(obj[d2]), n))]
            composite = Q.rep(Q.B.atom(a2), Q.mul(first, second))
            whole = arrows[(a2, P.rep(P.B.atom(a), P.mul(m, n)))]
            rep.check(composite == whole, lambda m=m, n=n, a2=a2: f"F({n}) o F({m}) != F({m}{n}) at {a2}")
    return Cofunctor(obj, {(a2, m): (a2, v) for (a2, m), v in arrows.items()}, rep)


# ---------------------------------------------------------------------------
# <B|M>-sets


class FiniteBJMSet:
    def __init__(self, pair: FiniteMatchedPair, bset: FiniteBSet, act: Mapping[tuple, Hashable]):
        if bset.algebra != pair.B:
            raise PairError("B-set over a different algebra")
        self.pair = pair
        self.bset = bset
        self.carrier = bset.carrier
        self.act = dict(act)
        for m in pair.M.elements:
            for x in self.carrier:
                y = self.act.get((m, x))
                if y is None or y not in bset:
                    raise PairError(f"action {m}.{x} undefined or outside the carrier")

    def __len__(self) -> int:
        return len(self.carrier)

    def dot(self, m: Hashable, x: Hashable) -> Hashable:
        return self.act[(m, x)]

    def __repr__(self) -> str:
        return f"FiniteBJMSet({len(self.carrier)} elements)"


def bjm_key(X: FiniteBJMSet) -> tuple:
    """A hashable description of X with its carrier order."""
    p = X.pair
    return (tuple(tuple(X.bset.classes[a]) for a in p.atoms),
            tuple(tuple(X.carrier.index(X.dot(m, x)) for x in X.carrier) for m in p.M.elements))


def regular(p: FiniteMatchedPair) -> FiniteBJMSet:
    M = p.M
    return FiniteBJMSet(p, p.bset, {(m, n): M.mul(m, n) for m in M.elements for n in M.elements})


def terminal(p: FiniteMatchedPair) -> FiniteBJMSet:
    bs = FiniteBSet(p.B, ["*"], {a: [0] for a in p.atoms})
    return FiniteBJMSet(p, bs, {(m, "*"): "*" for m in p.M.elements})


def empty_bjm(p: FiniteMatchedPair) -> FiniteBJMSet:
    return FiniteBJMSet(p, FiniteBSet(p.B, [], {a: [] for a in p.atoms}), {})


def algebra_bjm(p: FiniteMatchedPair) -> FiniteBJMSet:
    """B itself, glued by conditioned disjunction and acted on by m*."""
    els = list(p.B.elements())
    bs = FiniteBSet(p.B, els, {a: [a in b.atomset for b in els] for a in p.atoms})
    return FiniteBJMSet(p, bs, {(m, b): p.star(m, b) for m in p.M.elements for b in els})


def product_bjm(X: FiniteBJMSet, Y: FiniteBJMSet) -> FiniteBJMSet:
    p = X.pair
    carrier = [(x, y) for x in X.carrier for y in Y.carrier]
    labels = {a: [(X.bset.cls(a, x), Y.bset.cls(a, y)) for x, y in carrier] for a in p.atoms}
    act = {(m, (x, y)): (X.dot(m, x), Y.dot(m, y)) for m in p.M.elements for x, y in carrier}
    return FiniteBJMSet(p, FiniteBSet(p.B, carrier, labels), act)


def check_bjm(X: FiniteBJMSet, equations: bool | None = None) -> Report:
    p = X.pair
    M = p.M
    rep = Report("<B|M>-set")
    rep.merge(check_bset(X.bset, equations), "B-set: ")
    for x in X.carrier:
        rep.check(X.dot(M.unit, x) == x, lambda x=x: f"1.{x} != {x}")
        for m, n in itertools.product(M.elements, repeat=2):
            rep.check(X.dot(M.mul(m, n), x) == X.dot(m, X.dot(n, x)),
                      lambda m=m, n=n, x=x: f"({m}{n}).{x} != {m}.({n}.{x})")
    els = list(p.B.elements())
    for b in els:
        for m, n in itertools.product(M.elements, repeat=2):
            if p.equiv(b, m, n):
                for x in X.carrier:
                    rep.check(X.bset.equiv(b, X.dot(m, x), X.dot(n, x)),
                              lambda b=b, m=m, n=n, x=x: f"{m}~{n} on {b!r} but {m}.{x} !~ {n}.{x}")
        for x, y in itertools.product(X.carrier, repeat=2):
            if X.bset.equiv(b, x, y):
                for m in M.elements:
                    rep.check(X.bset.equiv(p.star(m, b), X.dot(m, x), X.dot(m, y)),
                              lambda b=b, m=m, x=x, y=y: f"{x}~{y} on {b!r} but {m}.{x} !~ {m}.{y} on {m}*{b!r}")
    return rep


def homomorphisms(X: FiniteBJMSet | FiniteBSet, Y: FiniteBJMSet | FiniteBSet,
                  fixed: Mapping[Hashable, Hashable] | None = None) -> Iterator[dict]:
    """All maps X -> Y preserving every equivalence (and the action, when
    both are <B|M>-sets), optionally extending ``fixed``."""
    equivariant = isinstance(X, FiniteBJMSet) and isinstance(Y, FiniteBJMSet)
    XB = X.bset if isinstance(X, FiniteBJMSet) else X
    YB = Y.bset if isinstance(Y, FiniteBJMSet) else Y
    xs, ys = list(XB.carrier), list(YB.carrier)
    k = len(XB.algebra.atoms)
    xv = {x: XB.vector(x) for x in xs}
    yv = {y: YB.vector(y) for y in ys}
    mons = list(X.pair.M.elements) if equivariant else []
    assign: dict = {}
    classmap: list[dict] = [dict() for _ in range(k)]
    trail: list = []

    def push(x0, y0) -> bool:
        stack = [(x0, y0)]
        while stack:
            x, y = stack.pop()
            got = assign.get(x)
            if got is not None:
                if got != y:
                    return False
                continue
            assign[x] = y
            trail.append((None, x))
            vx, vy = xv[x], yv[y]
            for i in range(k):
                cm = classmap[i]
                c = cm.get(vx[i])
                if c is None:
                    cm[vx[i]] = vy[i]
                    trail.append((i, vx[i]))
                elif c != vy[i]:
                    return False
            for m in mons:
                stack.append((X.act[(m, x)], Y.act[(m, y)]))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            i, key = trail.pop()
            if i is None:
                del assign[key]
            else:
                del classmap[i][key]

    if not xs:
        yield {}
        return
    for x, y in (fixed or {}).items():
        if not push(x, y):
            return

    def rec() -> Iterator[dict]:
        x = next((x for x in xs if x not in assign), None)
        if x is None:
            yield dict(assign)
            return
        for y in ys:
            mark = len(trail)
            if push(x, y):
                yield from rec()
            undo(mark)

    yield from rec()


# ---------------------------------------------------------------------------
# free <B|M>-sets


def free_bjm(p: FiniteMatchedPair, G: Sequence[Hashable]) -> tuple[FiniteBJMSet, dict]:
    """M x (atoms -> G) with unit x -> (1, constant x)."""
    G = tuple(G)
    if not G:
        raise PairError("free <B|M>-set on an empty set")
    atoms = p.atoms
    k = len(atoms)
    aidx = {a: i for i, a in enumerate(atoms)}
    carrier = [(m, w) for m in p.M.elements for w in itertools.product(G, repeat=k)]
    labels = {a: [(p.bset.cls(a, m), w[i]) for m, w in carrier] for i, a in enumerate(atoms)}
    act = {}
    for n in p.M.elements:
        idx = [aidx[p.atom_map(n, a)] for a in atoms]
        for m, w in carrier:
            act[(n, (m, w))] = (p.mul(n, m), tuple(w[j] for j in idx))
    F = FiniteBJMSet(p, FiniteBSet(p.B, carrier, labels), act)
    return F, {g: (p.unit, (g,) * k) for g in G}


def check_free_universal(p: FiniteMatchedPair, G: Sequence[Hashable], targets: Iterable[FiniteBJMSet]) -> Report:
    """Every set map G -> Y extends along the unit to exactly one homomorphism."""
    F, eta = free_bjm(p, G)
    rep = Report("free <B|M>-set universal property")
    for Y in targets:
        for imgs in itertools.product(Y.carrier, repeat=len(G)):
            fixed = {eta[g]: y for g, y in zip(G, imgs)}
            n = sum(1 for _ in homomorphisms(F, Y, fixed))
            rep.check(n == 1, lambda Y=Y, imgs=imgs, n=n: f"{n} extensions of G -> {imgs} into {Y!r}")
    return rep


# ---------------------------------------------------------------------------
# exponentials


@dataclass
class Exponential:
    Y: FiniteBJMSet
    Z: FiniteBJMSet
    domain: FiniteBJMSet          # M x Y
    bjm: FiniteBJMSet             # Z^Y; elements are tuples over domain.carrier
    _dpos: dict

    def value(self, f: tuple, n: Hashable, y: Hashable) -> Hashable:
        return f[self._dpos[(n, y)]]

    def eval(self, f: tuple, y: Hashable) -> Hashable:
        return self.value(f, self.Y.pair.unit, y)

    def transpose(self, X: FiniteBJMSet, h: Mapping[tuple, Hashable]) -> dict:
        """x -> ((n, y) -> h(n.x, y))."""
        return {x: tuple(h[(X.dot(n, x), y)] for n, y in self.domain.carrier) for x in X.carrier}

    def untranspose(self, X: FiniteBJMSet, k: Mapping[Hashable, tuple]) -> dict:
        return {(x, y): self.eval(k[x], y) for x in X.carrier for y in self.Y.carrier}


def exponential(Y: FiniteBJMSet, Z: FiniteBJMSet) -> Exponential:
    p = Y.pair
    MY = product_bjm(regular(p), Y)
    dpos = {d: i for i, d in enumerate(MY.carrier)}
    homs = [tuple(h[d] for d in MY.carrier) for h in homomorphisms(MY, Z)]
    homs.sort(key=lambda f: tuple(Z.carrier.index(z) for z in f))
    act = {}
    for m in p.M.elements:
        idx = [dpos[(p.mul(n, m), y)] for n, y in MY.carrier]
        for f in homs:
            act[(m, f)] = tuple(f[j] for j in idx)
    labels = {}
    for a in p.atoms:
        rows = []
        up = [p.star(n, p.B.atom(a)) for n, _ in MY.carrier]
        for f in homs:
            rows.append(tuple(tuple(Z.bset.cls(a2, z) for a2 in p.atoms if a2 in u.atomset)
                              for z, u in zip(f, up)))
        labels[a] = rows
    bjm = FiniteBJMSet(p, FiniteBSet(p.B, homs, labels), act)
    return Exponential(Y, Z, MY, bjm, dpos)


def check_adjunction(X: FiniteBJMSet, Y: FiniteBJMSet, Z: FiniteBJMSet,
                     others: Sequence[FiniteBJMSet] = (), E: Exponential | None = None) -> Report:
    """hom(X x Y, Z) = hom(X, Z^Y) by transposition, with triangle identities
    and naturality along every homomorphism from each of ``others`` into X.

    When ``E`` is supplied its <B|M>-set laws are taken as already checked.
    """
    rep = Report("exponential adjunction")
    if E is None:
        E = exponential(Y, Z)
        rep.merge(check_bjm(E.bjm), "Z^Y: ")
    XY = product_bjm(X, Y)
    xy_pos = {d: i for i, d in enumerate(XY.carrier)}
    # position of (n.x, y) for each x and each (n, y) of M x Y
    spread = {x: [xy_pos[(X.dot(n, x), y)] for n, y in E.domain.carrier] for x in X.carrier}
    one_pos = [E._dpos[(Y.pair.unit, y)] for y in Y.carrier]
    exp_set = set(E.bjm.carrier)
    xs = X.carrier

    def transpose_t(h: tuple) -> tuple:
        return tuple(tuple(h[i] for i in spread[x]) for x in xs)

    def untranspose_t(k: tuple) -> tuple:
        # X x Y carrier order is x-major
        return tuple(f[j] for f in k for j in one_pos)

    left = [tuple(h[d] for d in XY.carrier) for h in homomorphisms(XY, Z)]
    right = {tuple(k[x] for x in xs) for k in homomorphisms(X, E.bjm)}
    trans = set()
    for h in left:
        k = transpose_t(h)
        trans.add(k)
        if not rep.check(all(f in exp_set for f in k), "transpose leaves Z^Y"):
            continue
        rep.check(untranspose_t(k) == h, "eval . (transpose h x Y) != h")
    rep.check(len(trans) == len(left), "transpose is not injective")
    rep.check(trans == right, lambda: f"transposes ({len(trans)}) differ from hom(X, Z^Y) ({len(right)})")
    for k in right:
        rep.check(transpose_t(untranspose_t(k)) == k, "transpose(eval . (k x Y)) != k")
    # transpose of eval is the identity of Z^Y
    ev = {(f, y): E.eval(f, y) for f in E.bjm.carrier for y in Y.carrier}
    tev = E.transpose(E.bjm, ev)
    rep.check(all(tev[f] == f for f in E.bjm.carrier), "transpose(eval) is not the identity")
    xpos = {x: i for i, x in enumerate(xs)}
    ny = len(Y.carrier)
    for X2 in others:
        for u in homomorphisms(X2, X):
            for h in left:
                hk = transpose_t(h)
                hu = {(x2, y): h[xpos[u[x2]] * ny + j] for x2 in X2.carrier for j, y in enumerate(Y.carrier)}
                t1 = E.transpose(X2, hu)
                rep.check(all(t1[x2] == hk[xpos[u[x2]]] for x2 in X2.carrier), "transpose not natural in X")
    return rep


def exponential_conjugation(Y: FiniteBJMSet, Z: FiniteBJMSet,
                            witnesses: Mapping[Hashable, Sequence[tuple]]) -> tuple[FiniteBJMSet, Report]:
    """B-set maps Y -> Z with (m.f)(y) equal to m.f(n_i.y) over each block b_i."""
    p = Y.pair
    rep = Report("conjugation exponential")
    one = p.B.one
    for m in p.M.elements:
        ws = witnesses.get(m)
        if not rep.check(bool(ws), lambda m=m: f"no witnesses for {m}"):
            continue
        blocks = [b for b, _, _ in ws]
        try:
            Partition.of(one, blocks)
        except Exception as exc:  # noqa: BLE001
            rep.fail(f"witness blocks for {m} are not a partition: {exc}")
        for b, n, c in ws:
            rep.check(p.equiv(b, p.mul(m, n), p.unit), lambda m=m, n=n, b=b: f"{m}{n} !~ 1 on {b!r}")
            rep.check(p.equiv(c, p.mul(n, m), p.unit), lambda m=m, n=n, c=c: f"{n}{m} !~ 1 on {c!r}")
            rep.check(b <= p.star(m, c), lambda m=m, b=b, c=c: f"{b!r} not below {m}*{c!r}")
    if not rep.ok:
        return empty_bjm(p), rep
    maps = [tuple(h[y] for y in Y.carrier) for h in homomorphisms(Y.bset, Z.bset)]
    maps.sort(key=lambda f: tuple(Z.carrier.index(z) for z in f))
    ypos = {y: i for i, y in enumerate(Y.carrier)}
    aidx = {a: i for i, a in enumerate(p.atoms)}
    act = {}
    for m in p.M.elements:
        for f in maps:
            out = []
            for y in Y.carrier:
                v = [None] * len(p.atoms)
                for b, n, _ in witnesses[m]:
                    z = Z.dot(m, f[ypos[Y.dot(n, y)]])
                    vz = Z.bset.vector(z)
                    for a in b.atomset:
                        v[aidx[a]] = vz[aidx[a]]
                out.append(Z.bset.from_vector(tuple(v)))
            act[(m, f)] = tuple(out)
    labels = {a: [tuple(Z.bset.cls(a, z) for z in f) for f in maps] for a in p.atoms}
    X = FiniteBJMSet(p, FiniteBSet(p.B, maps, labels), act)
    return X, rep


def check_conjugation_iso(Y: FiniteBJMSet, Z: FiniteBJMSet, witnesses: Mapping) -> Report:
    """Compare Z^Y with the conjugation form via f -> f(1, -)."""
    E = exponential(Y, Z)
    C, rep = exponential_conjugation(Y, Z, witnesses)
    if not rep.ok:
        return rep
    rep.merge(check_bjm(C), "conjugation form: ")
    p = Y.pair
    iso = {f: tuple(E.eval(f, y) for y in Y.carrier) for f in E.bjm.carrier}
    rep.check(len(set(iso.values())) == len(iso) and set(iso.values()) == set(C.carrier),
              lambda: f"f -> f(1,-) is not a bijection ({len(E.bjm)} vs {len(C)})")
    for f in E.bjm.carrier:
        for m in p.M.elements:
            rep.check(iso[E.bjm.dot(m, f)] == C.dot(m, iso[f]), lambda m=m: f"action of {m} not matched")
        for g in E.bjm.carrier:
            for a in p.atoms:
                ba = p.B.atom(a)
                rep.check(E.bjm.bset.equiv(ba, f, g) == C.bset.equiv(ba, iso[f], iso[g]),
                          lambda a=a: f"equivalence at {a} not matched")
    return rep


# ---------------------------------------------------------------------------
# tensor M (x)_B X and theta


def m_equiv(p: FiniteMatchedPair, m: Hashable, x: Hashable, y: Hashable, X: FiniteBJMSet | FiniteBSet) -> BElement:
    """m*(largest b with x equivalent to y over b)."""
    XB = X.bset if isinstance(X, FiniteBJMSet) else X
    return p.star(m, XB.agreement(x, y))


def m_equiv_generated(p: FiniteMatchedPair, m: Hashable, x: Hashable, y: Hashable, X: FiniteBJMSet | FiniteBSet) -> BElement:
    """Close {m*b : x ~_b y} under down-sets and joins; return its top."""
    XB = X.bset if isinstance(X, FiniteBJMSet) else X
    els = list(p.B.elements())
    gen = {p.star(m, b) for b in els if XB.equiv(b, x, y)}
    closed = set(gen)
    changed = True
    while changed:
        changed = False
        for c in list(closed):
            for d in els:
                if d <= c and d not in closed:
                    closed.add(d)
                    changed = True
            for d in list(closed):
                if (c | d) not in closed:
                    closed.add(c | d)
                    changed = True
    top = join_all(p.B, closed)
    if {d for d in els if d <= top} != closed:
        raise PairError("generated family is not principal")
    return top


def check_m_equiv(p: FiniteMatchedPair, X: FiniteBJMSet) -> Report:
    rep = Report("m-relative equivalence")
    M = p.M
    els = list(p.B.elements())

    def R(m, b, x, y):
        return b <= m_equiv(p, m, x, y, X)

    for m in M.elements:
        for x, y in itertools.product(X.carrier, repeat=2):
            me = m_equiv(p, m, x, y, X)
            rep.check(me == m_equiv_generated(p, m, x, y, X), lambda: f"closed form differs from generated ideal at {m},{x},{y}")
            for b in els:
                if X.bset.equiv(b, x, y):
                    rep.check(R(m, p.star(m, b), x, y), lambda b=b: f"(i) fails at {m},{b!r},{x},{y}")
                if R(m, b, x, y):
                    for c in els:
                        if c <= b:
                            rep.check(R(m, c, x, y), lambda b=b, c=c: f"(ii) fails at {m},{b!r},{c!r}")
                        if R(m, c, x, y):
                            rep.check(R(m, b | c, x, y), lambda b=b, c=c: f"(iii) fails at {m},{b!r},{c!r}")
                    for n in M.elements:
                        rep.check(R(M.mul(n, m), p.star(n, b), x, y), lambda b=b, n=n: f"(iv) fails at {m},{n},{b!r}")
                    rep.check(X.bset.equiv(b, X.dot(m, x), X.dot(m, y)), lambda b=b: f"(v) fails at {m},{b!r},{x},{y}")
            for n in M.elements:
                for b in els:
                    if p.equiv(b, m, n):
                        for c in els:
                            if c <= b:
                                rep.check(R(m, c, x, y) == R(n, c, x, y), lambda b=b, c=c, n=n: f"(vi) fails at {m},{n},{c!r}")
    return rep


class Tensor:
    """Classes of M x (atoms -> X) under the congruence of the left adjoint."""

    def __init__(self, p: FiniteMatchedPair, X: FiniteBSet):
        self.pair, self.X = p, X
        atoms = p.atoms
        k = len(atoms)
        self.aidx = {a: i for i, a in enumerate(atoms)}
        xs = X.carrier
        omegas = list(itertools.product(xs, repeat=k))
        self.omegas = omegas
        blocks_of = {w: {x: p.B.element(a for a, wx in zip(atoms, w) if wx == x) for x in xs} for w in omegas}
        self.rep_of: dict = {}
        for m in p.M.elements:
            me = {(x, y): m_equiv(p, m, x, y, X) for x in xs for y in xs}
            # union-find on omegas
            parent = list(range(len(omegas)))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for i, w in enumerate(omegas):
                bw = blocks_of[w]
                for j in range(i + 1, len(omegas)):
                    g = omegas[j]
                    bg = blocks_of[g]
                    if all((bw[x] & bg[y]) <= me[(x, y)] for x in xs for y in xs):
                        ri, rj = find(i), find(j)
                        if ri != rj:
                            parent[max(ri, rj)] = min(ri, rj)
            for i, w in enumerate(omegas):
                self.rep_of[(m, w)] = (m, omegas[find(i)])
        self.carrier = sorted(set(self.rep_of.values()), key=lambda c: (p.M.order(c[0]), omegas.index(c[1])))

    def cls(self, m: Hashable, w: tuple) -> tuple:
        return self.rep_of[(m, w)]

    def related(self, u: tuple, v: tuple) -> bool:
        return self.rep_of[u] == self.rep_of[v]

    def act_raw(self, n: Hashable, u: tuple) -> tuple:
        p = self.pair
        m, w = u
        return (p.mul(n, m), tuple(w[self.aidx[p.atom_map(n, a)]] for a in p.atoms))

    def glue_raw(self, b: BElement, u: tuple, v: tuple) -> tuple:
        p = self.pair
        m = p.glue(b, u[0], v[0])
        return (m, tuple(u[1][i] if a in b.atomset else v[1][i] for i, a in enumerate(p.atoms)))

    def bjm(self) -> FiniteBJMSet:
        p = self.pair
        labels = {}
        for a in p.atoms:
            ba = p.B.atom(a)
            # [u] ~_a [v] iff [a(u, v)] = [v]
            lab: dict = {}
            nxt = 0
            out = []
            for u in self.carrier:
                found = None
                for v, l in lab.items():
                    if self.rep_of[self.glue_raw(ba, u, v)] == v:
                        found = l
                        break
                if found is None:
                    found = nxt
                    nxt += 1
                lab[u] = found
                out.append(found)
            labels[a] = out
        act = {(n, u): self.rep_of[self.act_raw(n, u)] for n in p.M.elements for u in self.carrier}
        return FiniteBJMSet(p, FiniteBSet(p.B, self.carrier, labels), act)

    def unit(self) -> dict:
        k = len(self.pair.atoms)
        return {x: self.rep_of[(self.pair.unit, (x,) * k)] for x in self.X.carrier}


def tensor(p: FiniteMatchedPair, X: FiniteBSet) -> tuple[FiniteBJMSet, dict]:
    T = Tensor(p, X)
    return T.bjm(), T.unit()


def check_tensor(p: FiniteMatchedPair, X: FiniteBSet, targets: Iterable[FiniteBJMSet] = ()) -> Report:
    """Congruence laws, the quotient structure, and the bounded universal property."""
    rep = Report("tensor")
    T = Tensor(p, X)
    raw = [(m, w) for m in p.M.elements for w in T.omegas]
    # equivalence relation and compatibility with the structure
    for u in raw:
        rep.check(T.related(u, u), lambda u=u: f"not reflexive at {u}")
    for u, v in itertools.product(raw, repeat=2):
        if not T.related(u, v):
            continue
        rep.check(T.related(v, u), lambda: f"not symmetric at {u},{v}")
        for n in p.M.elements:
            rep.check(T.related(T.act_raw(n, u), T.act_raw(n, v)), lambda n=n: f"action of {n} does not respect {u}~{v}")
        for b in p.B.elements():
            for w in raw:
                rep.check(T.related(T.glue_raw(b, u, w), T.glue_raw(b, v, w)),
                          lambda b=b, w=w: f"glue by {b!r} does not respect {u}~{v}")
    TX = T.bjm()
    rep.merge(check_bjm(TX), "quotient: ")
    eta = T.unit()
    for Y in targets:
        for g in homomorphisms(X, Y.bset):
            fixed = {eta[x]: g[x] for x in X.carrier}
            n = sum(1 for _ in homomorphisms(TX, Y, fixed))
            rep.check(n == 1, lambda Y=Y, n=n: f"{n} extensions along the unit into {Y!r}")
    return rep


@dataclass
class Theta:
    mapping: dict
    injective: bool
    surjective: bool
    witness: str | None

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective


def theta(p: FiniteMatchedPair, X: FiniteBJMSet, check_hom: bool = False) -> Theta:
    """[(m, w)] -> (m, z) with z equal to m.w(a) over each atom a."""
    T = Tensor(p, X.bset)
    aidx = T.aidx
    mapping = {}
    for m in p.M.elements:
        for w in T.omegas:
            v = tuple(X.bset.vector(X.dot(m, w[aidx[a]]))[aidx[a]] for a in p.atoms)
            img = (m, X.bset.from_vector(v))
            c = T.rep_of[(m, w)]
            if mapping.setdefault(c, img) != img:
                raise PairError(f"theta not well defined on the class of {(m, w)}")
    imgs = list(mapping.values())
    injective = len(set(imgs)) == len(imgs)
    target = [(m, x) for m in p.M.elements for x in X.carrier]
    missing = [t for t in target if t not in set(imgs)]
    witness = None
    if not injective:
        seen: dict = {}
        for c, t in mapping.items():
            if t in seen:
                witness = f"classes {seen[t]} and {c} both map to {t}"
                break
            seen[t] = c
    elif missing:
        witness = f"{missing[0]} has no preimage"
    if check_hom:
        MX = product_bjm(regular(p), X)
        TX = T.bjm()
        for c in TX.carrier:
            for n in p.M.elements:
                if mapping[TX.dot(n, c)] != MX.dot(n, mapping[c]):
                    raise PairError(f"theta does not commute with {n}")
            for c2 in TX.carrier:
                for a in p.atoms:
                    if TX.bset.equiv_atom(a, c, c2) and not MX.bset.equiv_atom(a, mapping[c], mapping[c2]):
                        raise PairError("theta does not preserve equivalence")
    return Theta(mapping, injective, not missing, witness)


# ---------------------------------------------------------------------------
# topos and groupoidality


@dataclass
class ToposVerdict:
    ok: bool
    witness: dict
    failing_atom: Hashable | None
    sieves: list

    def __bool__(self) -> bool:
        return self.ok


def open_sieves(p: FiniteMatchedPair) -> list[BElement]:
    """Elements c with m*c <= c for all m (down-sets closed under pulling back)."""
    return [c for c in p.B.elements() if all(p.star(m, c) <= c for m in p.M.elements)]


def is_topos(p: FiniteMatchedPair) -> ToposVerdict:
    witness, failing = {}, None
    for a in p.atoms:
        hit = next((m for m in p.M.elements if all(p.atom_map(m, x) == a for x in p.atoms)), None)
        if hit is None:
            failing = a if failing is None else failing
        else:
            witness[a] = hit
    ok = failing is None
    sieves = open_sieves(p)
    minimal = all(c.is_zero or c.is_one for c in sieves)
    if minimal != ok:
        raise PairError("topos criterion and open-sieve minimality disagree")
    return ToposVerdict(ok, witness, failing, sieves)


@dataclass
class GroupoidalVerdict:
    ok: bool
    witnesses: dict
    failing: Hashable | None = None
    deficit: BElement | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_groupoidal(p: FiniteMatchedPair) -> GroupoidalVerdict:
    """For each m: the join over n of maxfix(mn) ^ m*(maxfix(nm)) must be 1."""
    M = p.M
    witnesses = {}
    for m in M.elements:
        cover = p.B.zero
        choice: dict = {}
        for n in M.elements:
            piece = p.maxfix(M.mul(m, n)) & p.star(m, p.maxfix(M.mul(n, m)))
            for a in piece.atomset:
                choice.setdefault(a, n)
            cover = cover | piece
        if not cover.is_one:
            return GroupoidalVerdict(False, witnesses, m, ~cover)
        by_n: dict = {}
        for a in p.atoms:
            by_n.setdefault(choice[a], []).append(a)
        ws = []
        for n in sorted(by_n, key=M.order):
            ws.append((p.B.element(by_n[n]), n, p.maxfix(M.mul(n, m))))
        witnesses[m] = ws
    return GroupoidalVerdict(True, witnesses)


# ---------------------------------------------------------------------------
# sheaves


class BJMSheaf:
    """Sections over each nonzero b with restriction, action and patching.

    ``sections[b]`` lists section labels; ``restrict_table[(b, c, s)]``
    gives b ^ s in X(b ^ c); ``act_table[(m, c, s)]`` gives m.s in X(m*c);
    ``patch_fn(c, P, family)`` patches a family over a partition P of c.
    """

    def __init__(self, pair: FiniteMatchedPair, sections: Mapping[frozenset, Sequence[Hashable]],
                 restrict_table: Mapping[tuple, Hashable], act_table: Mapping[tuple, Hashable],
                 patch_fn: Callable[[BElement, Partition, Mapping[BElement, Hashable]], Hashable]):
        self.pair = pair
        self.sections = {k: tuple(v) for k, v in sections.items()}
        self.restrict_table = dict(restrict_table)
        self.act_table = dict(act_table)
        self.patch_fn = patch_fn

    def over(self, b: BElement) -> tuple:
        return self.sections[b.atomset]

    def restrict(self, b: BElement, c: BElement, s: Hashable) -> Hashable:
        return self.restrict_table[(b.atomset, c.atomset, s)]

    def act(self, m: Hashable, c: BElement, s: Hashable) -> Hashable:
        return self.act_table[(m, c.atomset, s)]

    def patch(self, c: BElement, P: Partition, family: Mapping[BElement, Hashable]) -> Hashable:
        return self.patch_fn(c, P, family)


def sheafify(X: FiniteBJMSet) -> BJMSheaf:
    """(B ^ X)(b) = X / ~_b; a section is (b, least representative)."""
    p = X.pair
    XB = X.bset
    nonzero = [b for b in p.B.elements() if not b.is_zero]
    order = {x: i for i, x in enumerate(X.carrier)}

    def rep(b, x):
        for y in X.carrier:
            if XB.equiv(b, x, y):
                return y
        raise AssertionError

    sections = {b.atomset: sorted({rep(b, x) for x in X.carrier}, key=order.get) for b in nonzero}
    restrict, act = {}, {}
    for c in nonzero:
        for s in sections[c.atomset]:
            for b in nonzero:
                bc = b & c
                if not bc.is_zero:
                    restrict[(b.atomset, c.atomset, s)] = rep(bc, s)
            for m in p.M.elements:
                mc = p.star(m, c)
                if not mc.is_zero:
                    act[(m, c.atomset, s)] = rep(mc, X.dot(m, s))

    def patch_fn(c, P, family):
        # glue representatives over the blocks; anything outside c is irrelevant
        vec = [0] * len(p.atoms)
        base = X.carrier[0]
        bv = XB.vector(base)
        for i, a in enumerate(p.atoms):
            vec[i] = bv[i]
        for blk in P.blocks:
            v = XB.vector(family[blk])
            for a in blk.atomset:
                i = p.B.index(a)
                vec[i] = v[i]
        return rep(c, XB.from_vector(tuple(vec)))

    return BJMSheaf(p, sections, restrict, act, patch_fn)


def check_sheaf(Y: BJMSheaf) -> Report:
    p = Y.pair
    rep = Report("<B|M>-sheaf")
    nonzero = [b for b in p.B.elements() if not b.is_zero]
    M = p.M
    for c in nonzero:
        for x in Y.over(c):
            rep.check(Y.restrict(c, c, x) == x, lambda c=c, x=x: f"c ^ x != x for {x} over {c!r}")
            for a in nonzero:
                for b in nonzero:
                    if not (a & b & c).is_zero:
                        rep.check(Y.restrict(a & b, c, x) == Y.restrict(a, b & c, Y.restrict(b, c, x)),
                                  lambda a=a, b=b, c=c, x=x: f"(a^b)^x != a^(b^x) at {a!r},{b!r},{x} over {c!r}")
            rep.check(Y.act(M.unit, c, x) == x, lambda c=c, x=x: f"1.x != x for {x} over {c!r}")
            for m, n in itertools.product(M.elements, repeat=2):
                nc = p.star(n, c)
                if not nc.is_zero and not p.star(m, nc).is_zero:
                    rep.check(Y.act(M.mul(m, n), c, x) == Y.act(m, nc, Y.act(n, c, x)),
                              lambda m=m, n=n, c=c, x=x: f"(mn).x != m.(n.x) at {m},{n},{x} over {c!r}")
            for m in M.elements:
                mc = p.star(m, c)
                for b in nonzero:
                    bc = b & c
                    if bc.is_zero or p.star(m, bc).is_zero:
                        continue
                    rep.check(Y.act(m, bc, Y.restrict(b, c, x)) == Y.restrict(p.star(m, b), mc, Y.act(m, c, x)),
                              lambda m=m, b=b, c=c, x=x: f"m.(b^x) != m*b ^ m.x at {m},{b!r},{x} over {c!r}")
            for b in nonzero:
                for m, n in itertools.product(M.elements, repeat=2):
                    if not p.equiv(b, m, n):
                        continue
                    mc, nc = p.star(m, c), p.star(n, c)
                    if (b & mc).is_zero:
                        continue
                    rep.check(Y.restrict(b, mc, Y.act(m, c, x)) == Y.restrict(b, nc, Y.act(n, c, x)),
                              lambda b=b, m=m, n=n, c=c, x=x: f"{m}~{n} on {b!r} but b^(m.x) != b^(n.x) at {x}")
        # patching
        for P in partitions_of(c):
            blocks = P.sorted_blocks()
            for fam in itertools.product(*(Y.over(b) for b in blocks)):
                family = dict(zip(blocks, fam))
                z = Y.patch(c, P, family)
                rep.check(z in Y.over(c), lambda: f"patch over {P!r} is not a section over {c!r}")
                for b in blocks:
                    rep.check(Y.restrict(b, c, z) == family[b], lambda b=b, P=P: f"b ^ P(x) != x_b at {b!r} in {P!r}")
            for x in Y.over(c):
                rep.check(Y.patch(c, P, {b: Y.restrict(b, c, x) for b in blocks}) == x,
                          lambda P=P, x=x: f"P(b ^ x) != x for {x} over {P!r}")
    return rep


def collapse(Y: BJMSheaf) -> FiniteBJMSet:
    """Global sections Y(1) with x ~_a y iff a ^ x = a ^ y."""
    p = Y.pair
    nonzero = [b for b in p.B.elements() if not b.is_zero]
    sizes = {b.atomset: len(Y.over(b)) for b in nonzero}
    top = p.B.one
    glob = Y.over(top)
    if not glob and any(sizes.values()):
        raise PairError("sheaf has local sections but no global section")
    labels = {a: [Y.restrict(p.B.atom(a), top, x) for x in glob] for a in p.atoms}
    act = {(m, x): Y.act(m, top, x) for m in p.M.elements for x in glob}
    return FiniteBJMSet(p, FiniteBSet(p.B, glob, labels), act)


def check_collapse_iso(X: FiniteBJMSet) -> Report:
    """collapse(sheafify(X)) against X via x -> its class over 1."""
    rep = Report("collapse of sheafification")
    Y = sheafify(X)
    rep.merge(check_sheaf(Y), "sheaf: ")
    C = collapse(Y)
    p = X.pair
    top = p.B.one
    iso: dict = {}
    glob = Y.over(top)
    for x in X.carrier:
        match = [s for s in glob if X.bset.equiv(top, s, x)]
        iso[x] = match[0] if len(match) == 1 else None
    rep.check(all(v is not None for v in iso.values()) and len(set(iso.values())) == len(X.carrier) == len(C.carrier),
              "x -> [x] over 1 is not a bijection")
    if not rep.ok:
        return rep
    for x in X.carrier:
        for m in p.M.elements:
            rep.check(iso[X.dot(m, x)] == C.dot(m, iso[x]), lambda m=m, x=x: f"action of {m} at {x} not preserved")
        for y in X.carrier:
            for a in p.atoms:
                rep.check(X.bset.equiv_atom(a, x, y) == C.bset.equiv_atom(a, iso[x], iso[y]),
                          lambda a=a, x=x, y=y: f"equivalence at {a} of {x},{y} not preserved")
    nonempty = len(X.carrier) > 0
    supported = all(len(Y.over(b)) > 0 for b in p.B.elements() if not b.is_zero)
    rep.check(supported == nonempty, "well-supportedness does not match non-emptiness")
    return rep
