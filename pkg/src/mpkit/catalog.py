"""Exhaustive enumeration of small monoids, matched pairs and <B|M>-sets."""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator, Sequence

from .boolean_core import FiniteBSet, FiniteBooleanAlgebra
from .matched_finite import FiniteBJMSet, FiniteMatchedPair, FiniteMonoid


def _rgs(n: int, k: int) -> Iterator[tuple]:
    """Restricted growth strings: set partitions of range(n) into exactly k blocks."""
    def rec(i, cur, m):
        if i == n:
            if m == k:
                yield tuple(cur)
            return
        for b in range(min(m + 1, k)):
            cur.append(b)
            yield from rec(i + 1, cur, max(m, b + 1))
            cur.pop()
    if n == 0:
        if k == 0:
            yield ()
        return
    yield from rec(0, [], 0)


def _factorizations(n: int, k: int) -> list[tuple]:
    """Ordered k-tuples of positive integers with product n."""
    if k == 0:
        return [()] if n == 1 else []
    out = []
    for d in range(1, n + 1):
        if n % d == 0:
            out.extend((d,) + rest for rest in _factorizations(n // d, k - 1))
    return out


@lru_cache(maxsize=None)
def bset_structures(k: int, n: int) -> tuple:
    """All label tuples (one restricted growth string per atom) making range(n) a product."""
    out = []
    for sizes in _factorizations(n, k):
        per = [list(_rgs(n, s)) for s in sizes]
        for combo in itertools.product(*per):
            vecs = set(zip(*combo)) if n else set()
            if len(vecs) == n:
                out.append(combo)
    return tuple(out)


# ---------------------------------------------------------------------------
# monoids


def _associative_tables(n: int) -> Iterator[list]:
    if n == 1:
        yield [[0]]
        return
    t = [[None] * n for _ in range(n)]
    for i in range(n):
        t[0][i] = i
        t[i][0] = i
    cells = [(i, j) for i in range(1, n) for j in range(1, n)]

    def consistent() -> bool:
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                if ab is None:
                    continue
                for c in range(n):
                    bc = t[b][c]
                    if bc is None:
                        continue
                    l, r = t[ab][c], t[a][bc]
                    if l is not None and r is not None and l != r:
                        return False
        return True

    def rec(idx):
        if idx == len(cells):
            yield [row[:] for row in t]
            return
        i, j = cells[idx]
        for v in range(n):
            t[i][j] = v
            if consistent():
                yield from rec(idx + 1)
        t[i][j] = None

    yield from rec(0)


def _relabel(table: list, perm: Sequence[int]) -> tuple:
    """Table of the monoid with element x renamed perm[x]."""
    n = len(table)
    inv = [0] * n
    for x, y in enumerate(perm):
        inv[y] = x
    return tuple(tuple(perm[table[inv[a]][inv[b]]] for b in range(n)) for a in range(n))


def _canonical_table(table: list) -> tuple:
    n = len(table)
    best = None
    for rest in itertools.permutations(range(1, n)):
        cand = _relabel(table, (0,) + rest)
        if best is None or cand < best:
            best = cand
    return best


@lru_cache(maxsize=None)
def monoid_tables(n: int) -> tuple:
    """Multiplication tables of the monoids of order n up to isomorphism (unit 0)."""
    seen = set()
    for t in _associative_tables(n):
        seen.add(_canonical_table(t))
    return tuple(sorted(seen))


def monoid_from_table(table: Sequence[Sequence[int]]) -> FiniteMonoid:
    n = len(table)
    return FiniteMonoid.from_rows(list(range(n)), table, 0)


def monoid_catalog(n: int) -> list[FiniteMonoid]:
    return [monoid_from_table(t) for t in monoid_tables(n)]


def automorphisms(table: Sequence[Sequence[int]]) -> list[tuple]:
    n = len(table)
    t = tuple(tuple(r) for r in table)
    return [(0,) + rest for rest in itertools.permutations(range(1, n)) if _relabel(t, (0,) + rest) == t]


# ---------------------------------------------------------------------------
# matched pairs


def _actions_ok(n: int, k: int, mul, labels, act) -> bool:
    """Atom-level matched-pair axioms for ``act[m][a]`` (atom indices)."""
    lab = labels
    for a in range(k):
        if act[0][a] != a:
            return False
    for m in range(n):
        for p in range(n):
            mp = mul[m][p]
            for a in range(k):
                if act[mp][a] != act[p][act[m][a]]:
                    return False
    for a in range(k):
        la = lab[a]
        for m in range(n):
            for q in range(n):
                if la[m] != la[q]:
                    continue
                # equivalent over a: same atom image, and right multiples stay equivalent
                if act[m][a] != act[q][a]:
                    return False
                if any(la[mul[m][p]] != la[mul[q][p]] for p in range(n)):
                    return False
    for m in range(n):
        for c in range(k):
            t = act[m][c]
            lt, lc = lab[t], lab[c]
            for x in range(n):
                for y in range(n):
                    if lt[x] == lt[y] and lc[mul[m][x]] != lc[mul[m][y]]:
                        return False
    return True


def _pair_key(n: int, k: int, labels, act, autos) -> tuple:
    best = None
    for alpha in autos:
        inv = [0] * n
        for x, y in enumerate(alpha):
            inv[y] = x
        for sigma in itertools.permutations(range(k)):
            sinv = [0] * k
            for x, y in enumerate(sigma):
                sinv[y] = x
            lab = []
            for a2 in range(k):
                raw = labels[sinv[a2]]
                seq = [raw[inv[m2]] for m2 in range(n)]
                seen: dict = {}
                lab.append(tuple(seen.setdefault(v, len(seen)) for v in seq))
            ac = tuple(tuple(sigma[act[inv[m2]][sinv[a2]]] for a2 in range(k)) for m2 in range(n))
            cand = (tuple(lab), ac)
            if best is None or cand < best:
                best = cand
    return best


def enumerate_pairs(max_monoid: int, max_atoms: int, min_atoms: int = 1,
                    monoid_sizes: Sequence[int] | None = None) -> Iterator[FiniteMatchedPair]:
    """Every matched pair with the given bounds, up to isomorphism."""
    sizes = monoid_sizes or range(1, max_monoid + 1)
    for k in range(min_atoms, max_atoms + 1):
        atoms = tuple(f"a{i}" for i in range(k))
        B = FiniteBooleanAlgebra(atoms)
        for n in sizes:
            for table in monoid_tables(n):
                autos = automorphisms(table)
                seen = set()
                for labels in bset_structures(k, n):
                    # m.a depends only on the class of m over a; trivial atoms are fixed
                    choices = []
                    for a in range(k):
                        ncls = max(labels[a]) + 1
                        if ncls == 1:
                            choices.append([(a,)])
                        else:
                            choices.append(list(itertools.product(range(k), repeat=ncls)))
                    for pick in itertools.product(*choices):
                        act = [[pick[a][labels[a][m]] if len(pick[a]) > 1 else a for a in range(k)] for m in range(n)]
                        if not _actions_ok(n, k, table, labels, act):
                            continue
                        key = _pair_key(n, k, labels, act, autos)
                        if key in seen:
                            continue
                        seen.add(key)
                        lab, ac = key
                        M = monoid_from_table(table)
                        bset = FiniteBSet(B, M.elements, {atoms[a]: lab[a] for a in range(k)})
                        amap = {m: {atoms[a]: atoms[ac[m][a]] for a in range(k)} for m in range(n)}
                        yield FiniteMatchedPair(B, M, amap, bset)


# ---------------------------------------------------------------------------
# <B|M>-sets


def enumerate_bjm(p: FiniteMatchedPair, size: int) -> Iterator[FiniteBJMSet]:
    """Every <B|M>-set structure on the carrier range(size)."""
    atoms = p.atoms
    k = len(atoms)
    M = p.M
    els = list(M.elements)
    mi = {m: i for i, m in enumerate(els)}
    n = len(els)
    mul = [[mi[M.mul(a, b)] for b in els] for a in els]
    u = mi[M.unit]
    mlab = [[p.bset.cls(a, m) for m in els] for a in atoms]
    aidx = {a: i for i, a in enumerate(atoms)}
    amap = [[aidx[p.atom_map(m, a)] for a in atoms] for m in els]
    # pairs (m, q) equivalent over atom a
    eq_pairs = [[(m, q) for m in range(n) for q in range(n) if m < q and mlab[a][m] == mlab[a][q]] for a in range(k)]
    if size == 0:
        yield FiniteBJMSet(p, FiniteBSet(p.B, [], {a: [] for a in atoms}), {})
        return
    order = [m for m in range(n) if m != u]
    for labels in bset_structures(k, size):
        act = [[None] * size for _ in range(n)]
        act[u] = list(range(size))

        def ok() -> bool:
            for m in range(n):
                row = act[m]
                for x in range(size):
                    y = row[x]
                    if y is None:
                        continue
                    for q in range(n):
                        z = act[q][y]
                        if z is None:
                            continue
                        w = act[mul[q][m]][x]
                        if w is not None and w != z:
                            return False
            for a in range(k):
                la = labels[a]
                for m, q in eq_pairs[a]:
                    for x in range(size):
                        y1, y2 = act[m][x], act[q][x]
                        if y1 is not None and y2 is not None and la[y1] != la[y2]:
                            return False
            for m in range(n):
                row = act[m]
                for c in range(k):
                    lt, lc = labels[amap[m][c]], labels[c]
                    for x in range(size):
                        if row[x] is None:
                            continue
                        for y in range(x + 1, size):
                            if row[y] is not None and lt[x] == lt[y] and lc[row[x]] != lc[row[y]]:
                                return False
            return True

        cells = [(m, x) for m in order for x in range(size)]

        def rec(i):
            if i == len(cells):
                yield [r[:] for r in act]
                return
            m, x = cells[i]
            for y in range(size):
                act[m][x] = y
                if ok():
                    yield from rec(i + 1)
            act[m][x] = None

        carrier = list(range(size))
        bs = FiniteBSet(p.B, carrier, {atoms[a]: labels[a] for a in range(k)})
        for table in rec(0):
            yield FiniteBJMSet(p, bs, {(els[m], x): table[m][x] for m in range(n) for x in range(size)})


def iso_key(X: FiniteBJMSet) -> tuple:
    """Canonical description of X up to relabelling its carrier."""
    p = X.pair
    xs = list(X.carrier)
    best = None
    for perm in itertools.permutations(range(len(xs))):
        name = {x: perm[i] for i, x in enumerate(xs)}
        inv = sorted(xs, key=name.get)
        labs = []
        for a in p.atoms:
            seen: dict = {}
            labs.append(tuple(seen.setdefault(X.bset.cls(a, x), len(seen)) for x in inv))
        act = tuple(tuple(name[X.dot(m, x)] for x in inv) for m in p.M.elements)
        cand = (tuple(labs), act)
        if best is None or cand < best:
            best = cand
    return best


def bjm_iso_classes(p: FiniteMatchedPair, max_size: int) -> list[FiniteBJMSet]:
    """One <B|M>-set per isomorphism class with carrier at most max_size."""
    out = []
    for size in range(max_size + 1):
        seen = set()
        for X in enumerate_bjm(p, size):
            k = iso_key(X)
            if k not in seen:
                seen.add(k)
                out.append(X)
    return out
