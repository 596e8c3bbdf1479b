"""Finite Boolean algebras (powersets of atoms), partitions, and finite B-sets.

A B-set is stored by its per-atom equivalence relations.  For a finite
algebra the relation for a general element b is the conjunction of the
relations of the atoms below b, so nothing is lost.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from .report import Report


class AlgebraError(ValueError):
    pass


class BSetError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteBooleanAlgebra:
    """The powerset of a nonempty ordered tuple of atoms."""

    atoms: tuple

    def __post_init__(self) -> None:
        if not self.atoms:
            raise AlgebraError("a Boolean algebra needs at least one atom (0 != 1)")
        if len(set(self.atoms)) != len(self.atoms):
            raise AlgebraError(f"repeated atoms in {self.atoms!r}")

    def element(self, atoms: Iterable[Hashable]) -> "BElement":
        s = frozenset(atoms)
        bad = s - set(self.atoms)
        if bad:
            raise AlgebraError(f"unknown atoms {sorted(map(str, bad))}")
        return BElement(self, s)

    @property
    def zero(self) -> "BElement":
        return BElement(self, frozenset())

    @property
    def one(self) -> "BElement":
        return BElement(self, frozenset(self.atoms))

    def atom(self, a: Hashable) -> "BElement":
        return self.element([a])

    def elements(self) -> Iterator["BElement"]:
        """All 2^n elements, in order of increasing size then atom order."""
        for k in range(len(self.atoms) + 1):
            for combo in itertools.combinations(self.atoms, k):
                yield BElement(self, frozenset(combo))

    def index(self, a: Hashable) -> int:
        return self.atoms.index(a)

    def __len__(self) -> int:
        return 1 << len(self.atoms)


@dataclass(frozen=True)
class BElement:
    algebra: FiniteBooleanAlgebra
    atomset: frozenset

    def _same(self, other: "BElement") -> None:
        if not isinstance(other, BElement) or other.algebra != self.algebra:
            raise AlgebraError("operands belong to different algebras")

    def __and__(self, other: "BElement") -> "BElement":
        self._same(other)
        return BElement(self.algebra, self.atomset & other.atomset)

    def __or__(self, other: "BElement") -> "BElement":
        self._same(other)
        return BElement(self.algebra, self.atomset | other.atomset)

    def __invert__(self) -> "BElement":
        return BElement(self.algebra, frozenset(self.algebra.atoms) - self.atomset)

    def __le__(self, other: "BElement") -> bool:
        self._same(other)
        return self.atomset <= other.atomset

    def __lt__(self, other: "BElement") -> bool:
        self._same(other)
        return self.atomset < other.atomset

    @property
    def is_zero(self) -> bool:
        return not self.atomset

    @property
    def is_one(self) -> bool:
        return len(self.atomset) == len(self.algebra.atoms)

    def sorted_atoms(self) -> list:
        return [a for a in self.algebra.atoms if a in self.atomset]

    def key(self) -> tuple:
        idx = self.algebra.index
        return (len(self.atomset), sorted(idx(a) for a in self.atomset))

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.sorted_atoms())) + "}"


def meet_all(B: FiniteBooleanAlgebra, xs: Iterable[BElement]) -> BElement:
    out = B.one
    for x in xs:
        out = out & x
    return out


def join_all(B: FiniteBooleanAlgebra, xs: Iterable[BElement]) -> BElement:
    out = B.zero
    for x in xs:
        out = out | x
    return out


def conditioned_disjunction(b: BElement, c: BElement, d: BElement) -> BElement:
    """b(c, d) = (b and c) or (not b and d)."""
    return (b & c) | (~b & d)


@dataclass(frozen=True)
class Partition:
    base: BElement
    blocks: frozenset

    def __post_init__(self) -> None:
        B = self.base.algebra
        seen: set = set()
        for blk in self.blocks:
            if not isinstance(blk, BElement) or blk.algebra != B:
                raise AlgebraError("partition block from another algebra")
            if blk.is_zero:
                raise AlgebraError("partition blocks must be nonzero")
            if seen & blk.atomset:
                raise AlgebraError(f"blocks overlap at {sorted(map(str, seen & blk.atomset))}")
            seen |= blk.atomset
        if seen != self.base.atomset:
            raise AlgebraError("blocks do not cover the base")

    @classmethod
    def of(cls, base: BElement, blocks: Iterable[BElement]) -> "Partition":
        return cls(base, frozenset(blocks))

    @classmethod
    def atoms_of(cls, base: BElement) -> "Partition":
        B = base.algebra
        return cls(base, frozenset(B.atom(a) for a in base.atomset))

    @classmethod
    def trivial(cls, base: BElement) -> "Partition":
        return cls(base, frozenset([base]) if not base.is_zero else frozenset())

    def sorted_blocks(self) -> list[BElement]:
        return sorted(self.blocks, key=BElement.key)

    def __repr__(self) -> str:
        return "{" + ", ".join(map(repr, self.sorted_blocks())) + "}"


def partitions_of(base: BElement) -> Iterator[Partition]:
    """Every partition of base (set partitions of its atoms)."""
    B = base.algebra
    atoms = base.sorted_atoms()

    def rec(rest: list, blocks: list[list]) -> Iterator[list[list]]:
        if not rest:
            yield blocks
            return
        head, tail = rest[0], rest[1:]
        for i in range(len(blocks)):
            blocks[i].append(head)
            yield from rec(tail, blocks)
            blocks[i].pop()
        blocks.append([head])
        yield from rec(tail, blocks)
        blocks.pop()

    for blocks in rec(atoms, []):
        yield Partition(base, frozenset(B.element(bl) for bl in blocks))


def refine_partition(p: Partition, q: Mapping[BElement, Partition]) -> Partition:
    """The partition {b and c : b in p, c in q[b]} with zeros dropped."""
    blocks = set()
    for b in p.blocks:
        if b not in q:
            raise AlgebraError(f"no refinement given for block {b!r}")
        for c in q[b].blocks:
            meet = b & c
            if not meet.is_zero:
                blocks.add(meet)
    return Partition(p.base, frozenset(blocks))


def pushforward_partition(p: Partition, assignment: Mapping[BElement, Hashable]) -> Partition:
    """Join the blocks of p along the fibres of a labelling."""
    fibres: dict = {}
    for b in p.blocks:
        if b not in assignment:
            raise AlgebraError(f"block {b!r} has no label")
        lab = assignment[b]
        fibres[lab] = fibres.get(lab, p.base.algebra.zero) | b
    return Partition(p.base, frozenset(fibres.values()))


def is_ideal(B: FiniteBooleanAlgebra, family: Iterable[BElement]) -> bool:
    fam = set(family)
    if B.zero not in fam:
        return False
    for x in fam:
        for y in B.elements():
            if y <= x and y not in fam:
                return False
        for y in fam:
            if (x | y) not in fam:
                return False
    return True


def ideal_generator(B: FiniteBooleanAlgebra, family: Iterable[BElement]) -> BElement | None:
    """If family is the principal down-set of some c, return c."""
    fam = set(family)
    top = join_all(B, fam)
    down = {y for y in B.elements() if y <= top}
    return top if down == fam else None


class FiniteBSet:
    """A finite set with one equivalence relation per atom.

    ``classes[a]`` labels each carrier element (in carrier order) with its
    class under the relation for atom a.  Construction does not insist on
    the product condition; ``check_bset`` reports on it and ``glue`` raises
    when no unique glued element exists.
    """

    def __init__(self, algebra: FiniteBooleanAlgebra, carrier: Sequence[Hashable],
                 classes: Mapping[Hashable, Sequence[Hashable]]):
        self.algebra = algebra
        self.carrier = tuple(carrier)
        if len(set(self.carrier)) != len(self.carrier):
            raise BSetError("carrier has repeated elements")
        self._pos = {x: i for i, x in enumerate(self.carrier)}
        cls: dict = {}
        for a in algebra.atoms:
            if a not in classes:
                raise BSetError(f"no classes given for atom {a}")
            labels = tuple(classes[a])
            if len(labels) != len(self.carrier):
                raise BSetError(f"atom {a}: {len(labels)} labels for {len(self.carrier)} elements")
            # relabel to 0,1,2,... in order of first appearance
            seen: dict = {}
            cls[a] = tuple(seen.setdefault(lab, len(seen)) for lab in labels)
        self.classes: dict = cls
        self._vec = {x: tuple(cls[a][i] for a in algebra.atoms) for i, x in enumerate(self.carrier)}
        table: dict = {}
        for x, v in self._vec.items():
            table.setdefault(v, []).append(x)
        self._table = table

    @classmethod
    def from_partitions(cls, algebra: FiniteBooleanAlgebra, carrier: Sequence[Hashable],
                        parts: Mapping[Hashable, Iterable[Iterable[Hashable]]]) -> "FiniteBSet":
        labels = {}
        for a in algebra.atoms:
            lab = {}
            for i, block in enumerate(parts[a]):
                for x in block:
                    lab[x] = i
            missing = [x for x in carrier if x not in lab]
            if missing:
                raise BSetError(f"atom {a}: elements {missing} in no class")
            labels[a] = [lab[x] for x in carrier]
        return cls(algebra, carrier, labels)

    @classmethod
    def product(cls, algebra: FiniteBooleanAlgebra, factors: Mapping[Hashable, Sequence[Hashable]]) -> "FiniteBSet":
        """Carrier = tuples indexed by atoms, classes = coordinates."""
        atoms = algebra.atoms
        carrier = list(itertools.product(*(tuple(factors[a]) for a in atoms)))
        return cls(algebra, carrier, {a: [x[i] for x in carrier] for i, a in enumerate(atoms)})

    def __len__(self) -> int:
        return len(self.carrier)

    def __contains__(self, x: Any) -> bool:
        return x in self._pos

    def cls(self, a: Hashable, x: Hashable) -> int:
        return self.classes[a][self._pos[x]]

    def vector(self, x: Hashable) -> tuple:
        return self._vec[x]

    def class_count(self, a: Hashable) -> int:
        return len(set(self.classes[a]))

    def equiv(self, b: BElement, x: Hashable, y: Hashable) -> bool:
        vx, vy = self._vec[x], self._vec[y]
        idx = self.algebra.index
        return all(vx[idx(a)] == vy[idx(a)] for a in b.atomset)

    def equiv_atom(self, a: Hashable, x: Hashable, y: Hashable) -> bool:
        return self.cls(a, x) == self.cls(a, y)

    def agreement(self, x: Hashable, y: Hashable) -> BElement:
        """The largest b with x equivalent to y over b."""
        vx, vy = self._vec[x], self._vec[y]
        return BElement(self.algebra, frozenset(
            a for i, a in enumerate(self.algebra.atoms) if vx[i] == vy[i]))

    def from_vector(self, v: tuple) -> Hashable:
        hits = self._table.get(tuple(v), [])
        if len(hits) != 1:
            raise BSetError(f"class vector {v} matches {len(hits)} elements, not exactly one")
        return hits[0]

    def has_vector(self, v: tuple) -> bool:
        return len(self._table.get(tuple(v), [])) == 1

    def glue(self, b: BElement, x: Hashable, y: Hashable) -> Hashable:
        """b(x, y): agree with x on the atoms of b and with y elsewhere."""
        if b.algebra != self.algebra:
            raise AlgebraError("glue with an element of another algebra")
        vx, vy = self._vec[x], self._vec[y]
        v = tuple(vx[i] if a in b.atomset else vy[i] for i, a in enumerate(self.algebra.atoms))
        return self.from_vector(v)

    def patch(self, p: Partition, family: Mapping[BElement, Hashable]) -> Hashable:
        if not p.base.is_one:
            raise AlgebraError("patch needs a partition of 1")
        v = [None] * len(self.algebra.atoms)
        for blk in p.blocks:
            vx = self._vec[family[blk]]
            for a in blk.atomset:
                i = self.algebra.index(a)
                v[i] = vx[i]
        return self.from_vector(tuple(v))

    def class_members(self, a: Hashable) -> list[list]:
        groups: dict = {}
        for x in self.carrier:
            groups.setdefault(self.cls(a, x), []).append(x)
        return [groups[k] for k in sorted(groups)]

    def __repr__(self) -> str:
        return f"FiniteBSet({len(self.carrier)} elements over {len(self.algebra.atoms)} atoms)"


def glue(b: BElement, x: Hashable, y: Hashable, X: FiniteBSet) -> Hashable:
    return X.glue(b, x, y)


def patch(p: Partition, family: Mapping[BElement, Hashable], X: FiniteBSet) -> Hashable:
    return X.patch(p, family)


# above this carrier size only the product condition is checked; the
# glue equations follow from it and cost cubic time
EQUATION_LIMIT = 16


def check_bset(X: FiniteBSet, equations: bool | None = None) -> Report:
    """Exhaustive check of the B-set equations and the product condition."""
    if equations is None:
        equations = len(X.carrier) <= EQUATION_LIMIT
    B = X.algebra
    rep = Report("B-set")
    atoms = B.atoms
    # unique patching over the atom partition; covers existence and
    # uniqueness for every partition since all relations are per atom
    values = [sorted(set(X.classes[a])) for a in atoms]
    for v in itertools.product(*values):
        n = len(X._table.get(v, []))
        rep.check(n == 1, lambda v=v, n=n: f"class vector {dict(zip(atoms, v))} realised by {n} elements")
    if not X.carrier:
        return rep
    if not equations:
        rep.note(f"glue equations skipped for {len(X.carrier)} elements; product condition checked")
        return rep
    # the relation for 1 is equality
    for x, y in itertools.combinations(X.carrier, 2):
        rep.check(not X.equiv(B.one, x, y), lambda x=x, y=y: f"{x} and {y} are equal on 1 but distinct")
    # existence of patches for every partition of 1
    for P in partitions_of(B.one):
        blocks = P.sorted_blocks()
        for fam in itertools.product(X.carrier, repeat=len(blocks)):
            family = dict(zip(blocks, fam))
            found = [z for z in X.carrier if all(X.equiv(blk, z, family[blk]) for blk in blocks)]
            rep.check(len(found) == 1, lambda P=P, fam=fam, n=len(found):
                      f"partition {P!r} with family {fam}: {n} patches")
    if not rep.ok:
        return rep

    def g(b, x, y):
        return X.glue(b, x, y)

    els = list(B.elements())
    for b in els:
        for x in X.carrier:
            rep.check(g(b, x, x) == x, lambda: f"{b!r}({x},{x}) != {x}")
            for y in X.carrier:
                rep.check(g(B.one, x, y) == x, lambda: f"1({x},{y}) != {x}")
                rep.check(g(~b, x, y) == g(b, y, x), lambda: f"{b!r}'({x},{y}) != {b!r}({y},{x})")
                for z in X.carrier:
                    rep.check(g(b, g(b, x, y), z) == g(b, x, z),
                              lambda: f"{b!r}({b!r}({x},{y}),{z}) != {b!r}({x},{z})")
                    rep.check(g(b, x, g(b, y, z)) == g(b, x, z),
                              lambda: f"{b!r}({x},{b!r}({y},{z})) != {b!r}({x},{z})")
                for c in els:
                    rep.check(g(b & c, x, y) == g(b, g(c, x, y), y),
                              lambda c=c: f"({b!r}^{c!r})({x},{y}) != {b!r}({c!r}({x},{y}),{y})")
    # relations derived from glue: x ~_b y iff b(x,y) = y; down-closed,
    # and joins of agreeing elements agree
    for x in X.carrier:
        for y in X.carrier:
            agree = {b for b in els if g(b, x, y) == y}
            rep.check(agree == {b for b in els if X.equiv(b, x, y)},
                      lambda: f"glue-derived relation for ({x},{y}) differs from stored classes")
            rep.check(B.zero in agree, lambda: f"{x},{y} not equal on 0")
            for b in agree:
                for c in els:
                    if c <= b:
                        rep.check(c in agree, lambda b=b, c=c: f"{x}~{y} on {b!r} but not on {c!r}")
                for c in agree:
                    rep.check((b | c) in agree, lambda b=b, c=c: f"{x}~{y} on {b!r},{c!r} but not on join")
    return rep
