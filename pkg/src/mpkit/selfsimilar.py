"""Self-similar actions given by Mealy machines.

Words are tuples of letters in the order they are read: the first letter is
consumed first.  Strings written the other way round (last letter first)
convert with ``reversed_word``.  A state word ``(q1, ..., qk)`` acts by q1 first,
then q2, and so on; the identity state is dropped from state words.

``run(m, p, w)`` returns ``(w * p, p|w)``: the output word and the state
word left after reading w.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Hashable, Iterator, Sequence

from .path_space import BOUQUET_VERTEX, DirectedGraph, Path, PointSpec, normalize_point, point_drop, point_prefix
from .report import Report

Word = tuple
StateWord = tuple


class MachineError(ValueError):
    pass


class MealyMachine:
    def __init__(self, alphabet: Sequence[Hashable], states: Sequence[Hashable],
                 delta: dict, identity: Hashable | None = None):
        self.alphabet = tuple(alphabet)
        self.states = tuple(states)
        if not self.alphabet:
            raise MachineError("empty alphabet")
        if len(set(self.states)) != len(self.states) or len(set(self.alphabet)) != len(self.alphabet):
            raise MachineError("repeated state or letter")
        self.delta = dict(delta)
        for a in self.alphabet:
            for q in self.states:
                got = self.delta.get((a, q))
                if got is None:
                    raise MachineError(f"transition for letter {a} at state {q} missing")
                r, b = got
                if r not in self.states or b not in self.alphabet:
                    raise MachineError(f"transition {a},{q} -> {r}/{b} leaves the machine")
        trivial = [q for q in self.states if all(self.delta[(a, q)] == (q, a) for a in self.alphabet)]
        if identity is None:
            if "e" in trivial:
                identity = "e"
            elif trivial:
                identity = trivial[0]
            else:
                raise MachineError("machine has no identity state")
        elif identity not in trivial:
            raise MachineError(f"state {identity} does not act as the identity")
        self.identity = identity
        self.graph = DirectedGraph.bouquet(self.alphabet)

    def step(self, a: Hashable, q: Hashable) -> tuple:
        return self.delta[(a, q)]

    def word(self, *states: Hashable) -> StateWord:
        return tuple(q for q in states if q != self.identity)

    def __repr__(self) -> str:
        return f"MealyMachine(alphabet={self.alphabet}, states={self.states})"


def reversed_word(s: str) -> Word:
    """Letters written last-read-first, as a tuple in reading order."""
    return tuple(reversed(s))


def show_word(w: Word) -> str:
    """Reading order, matching the path syntax."""
    return "".join(map(str, w)) or "ε"


def run(m: MealyMachine, p: StateWord, w: Word) -> tuple[Word, StateWord]:
    out = []
    cur = list(p)
    for a in w:
        x = a
        for i, q in enumerate(cur):
            cur[i], x = m.delta[(x, q)]
        out.append(x)
    return tuple(out), m.word(*cur)


def restrict_word(m: MealyMachine, p: StateWord, w: Word) -> StateWord:
    return run(m, p, w)[1]


def star_word(m: MealyMachine, w: Word, p: StateWord) -> Word:
    return run(m, p, w)[0]


def apply_point(m: MealyMachine, p: StateWord, W: PointSpec) -> PointSpec:
    """Image of an eventually periodic point; the cycle is found by tracking the state word."""
    g = m.graph
    out, cur = run(m, p, W.tail.edges)
    cyc = W.cycle.edges
    seen: dict = {}
    blocks: list = []
    while cur not in seen:
        seen[cur] = len(blocks)
        o, cur = run(m, cur, cyc)
        blocks.append(o)
        if len(blocks) > max(1, len(m.states)) ** max(1, len(p)) + 1:
            raise AssertionError("cycle detection exceeded its bound")
    j = seen[cur]
    tail = out + tuple(itertools.chain(*blocks[:j]))
    cycle = tuple(itertools.chain(*blocks[j:]))
    return normalize_point(g, PointSpec(Path(BOUQUET_VERTEX, tail), Path(BOUQUET_VERTEX, cycle)))


def words_upto(alphabet: Sequence[Hashable], n: int) -> Iterator[Word]:
    for k in range(n + 1):
        yield from itertools.product(alphabet, repeat=k)


def state_words_upto(m: MealyMachine, n: int) -> list[StateWord]:
    non_id = [q for q in m.states if q != m.identity]
    return [w for k in range(n + 1) for w in itertools.product(non_id, repeat=k)]


def check_machine(m: MealyMachine, depth: int = 2) -> Report:
    """Action laws for all letters and state words up to ``depth``."""
    rep = Report("self-similar action")
    for a in m.alphabet:
        rep.check(m.step(a, m.identity) == (m.identity, a), lambda a=a: f"identity state moves letter {a}")
    sws = state_words_upto(m, depth)
    words = list(words_upto(m.alphabet, depth))
    for p, q in itertools.product(sws, repeat=2):
        pq = m.word(*(p + q))
        for a in m.alphabet:
            (ap,), pa = run(m, p, (a,))
            (apq,), qa = run(m, q, (ap,))
            (x,), r = run(m, pq, (a,))
            rep.check(x == apq, lambda p=p, q=q, a=a: f"{a}*(pq) != ({a}*p)*q at p={p}, q={q}")
            rep.check(r == m.word(*(pa + qa)), lambda p=p, q=q, a=a: f"(pq)|{a} != p|{a} q|({a}*p) at p={p}, q={q}")
        for w in words:
            rep.check(star_word(m, w, pq) == star_word(m, star_word(m, w, p), q),
                      lambda p=p, q=q, w=w: f"w*(pq) != (w*p)*q at w={w}")
    for p in sws:
        for w, w2 in itertools.product(words, repeat=2):
            if len(w) + len(w2) > depth:
                continue
            rep.check(restrict_word(m, p, w + w2) == restrict_word(m, restrict_word(m, p, w), w2),
                      lambda p=p, w=w, w2=w2: f"p|(ww') != (p|w)|w' at p={p}")
            rep.check(star_word(m, w + w2, p) == star_word(m, w, p) + star_word(m, w2, restrict_word(m, p, w)),
                      lambda p=p, w=w, w2=w2: f"(ww')*p != (w*p)(w'*p|w) at p={p}")
    return rep


def action_signature(m: MealyMachine, p: StateWord, depth: int) -> tuple:
    return tuple(star_word(m, w, p) for w in itertools.product(m.alphabet, repeat=depth))


def faithful_to_depth(m: MealyMachine, depth: int) -> Report:
    """Group state words of length <= depth by their action on words of length depth."""
    rep = Report(f"faithfulness to depth {depth}")
    groups: dict = {}
    for p in state_words_upto(m, depth):
        groups.setdefault(action_signature(m, p, depth), []).append(p)
    for sig, ps in groups.items():
        rep.check(len(ps) == 1, lambda ps=ps: "collision: " + " = ".join(".".join(map(str, p)) or m.identity for p in ps[:4]))
    if not rep.ok:
        rep.note("collisions at this depth may still separate deeper")
    return rep


def separated(m: MealyMachine, p: StateWord, q: StateWord, depth: int) -> bool:
    return action_signature(m, p, depth) != action_signature(m, q, depth)


# ---------------------------------------------------------------------------
# Zappa-Szep product on state words x words


def zs_mul(m: MealyMachine, x: tuple, y: tuple) -> tuple:
    """(p, u)(q, v) = (p q|u, (u*q) v) with words read first-letter-first."""
    p, u = x
    q, v = y
    out, qu = run(m, q, u)
    return (m.word(*(p + qu)), v + out)


def zs_unit(m: MealyMachine) -> tuple:
    return ((), ())


def check_zappa_szep(m: MealyMachine, length: int = 3, samples: int = 0, seed: int = 0) -> Report:
    rep = Report("Zappa-Szep product")
    sws = state_words_upto(m, min(length, 2))
    words = list(words_upto(m.alphabet, length))
    one = zs_unit(m)
    els = [(p, u) for p in sws for u in words]
    for x in els:
        rep.check(zs_mul(m, one, x) == x and zs_mul(m, x, one) == x, lambda x=x: f"unit law fails at {x}")
    for a in m.alphabet:
        for p in state_words_upto(m, length):
            (ap,), pa = run(m, p, (a,))
            lhs = zs_mul(m, ((), (a,)), (p, ()))
            rhs = zs_mul(m, (pa, ()), ((), (ap,)))
            rep.check(lhs == rhs, lambda a=a, p=p: f"(1,{a})({p},ε) != (p|{a},ε)(1,{a}*p) at p={p}")
    small = [(p, u) for p in state_words_upto(m, 1) for u in words_upto(m.alphabet, min(length, 2))]
    for x, y, z in itertools.product(small, repeat=3):
        rep.check(zs_mul(m, zs_mul(m, x, y), z) == zs_mul(m, x, zs_mul(m, y, z)),
                  lambda x=x, y=y, z=z: f"associativity fails at {x},{y},{z}")
    rng = random.Random(seed)
    for _ in range(samples):
        x, y, z = (random_zs(m, rng, length) for _ in range(3))
        rep.check(zs_mul(m, zs_mul(m, x, y), z) == zs_mul(m, x, zs_mul(m, y, z)),
                  lambda x=x, y=y, z=z: f"associativity fails at {x},{y},{z}")
    return rep


def random_state_word(m: MealyMachine, rng: random.Random, n: int) -> StateWord:
    non_id = [q for q in m.states if q != m.identity] or [m.identity]
    return m.word(*(rng.choice(non_id) for _ in range(rng.randint(0, n))))


def random_word(m: MealyMachine, rng: random.Random, n: int) -> Word:
    return tuple(rng.choice(m.alphabet) for _ in range(rng.randint(0, n)))


def random_zs(m: MealyMachine, rng: random.Random, n: int) -> tuple:
    return (random_state_word(m, rng, n), random_word(m, rng, n))


# ---------------------------------------------------------------------------
# Nekrashevych maps


@dataclass(frozen=True)
class NekMap:
    """Entries (u, p, v): the point u.W goes to v.p(W)."""
    machine: MealyMachine
    table: tuple

    def __repr__(self) -> str:
        ents = [f"{show_word(u)}|{'.'.join(map(str, p)) or self.machine.identity}|{show_word(v)}" for u, p, v in self.table]
        return "{" + ", ".join(ents) + "}"


def _prefix(u: Word, w: Word) -> bool:
    return w[:len(u)] == u


def _find_collapse(m: MealyMachine, kids: dict, limit: int) -> StateWord | None:
    """A state word p with p|a = kids[a][0] and a*p = kids[a][1] for every letter."""
    top = max(len(p) for p, _ in kids.values())
    non_id = [q for q in m.states if q != m.identity]
    for n in range(top, min(top + 1, limit) + 1):
        for p in itertools.product(non_id, repeat=n):
            if all(run(m, p, (a,)) == ((b,), pa) for a, (pa, b) in kids.items()):
                return p
    return None


def nek_normalize(m: MealyMachine, entries, limit: int = 4) -> NekMap:
    ents = list(dict.fromkeys((tuple(u), m.word(*p), tuple(v)) for u, p, v in entries))
    for i, (u, _, _) in enumerate(ents):
        for j, (w, _, _) in enumerate(ents):
            if i != j and _prefix(u, w):
                raise MachineError(f"domains {show_word(u)} and {show_word(w)} overlap")
    cur = {u: (p, v) for u, p, v in ents}
    n_letters = len(m.alphabet)
    changed = True
    while changed:
        changed = False
        groups: dict = {}
        for u, (p, v) in cur.items():
            if u and v:
                groups.setdefault((u[:-1], v[:-1]), {})[u[-1]] = (p, v[-1])
        for (u0, v0), kids in groups.items():
            if len(kids) != n_letters:
                continue
            p = _find_collapse(m, kids, limit)
            if p is None:
                continue
            for a in kids:
                del cur[u0 + (a,)]
            cur[u0] = (p, v0)
            changed = True
            break
    table = tuple(sorted(((u, p, v) for u, (p, v) in cur.items()), key=lambda e: (len(e[0]), tuple(map(str, e[0])))))
    return NekMap(m, table)


def nek_identity(m: MealyMachine) -> NekMap:
    return NekMap(m, (((), (), ()),))


def nek_compose(f: NekMap, g: NekMap) -> NekMap:
    """Apply f, then g."""
    m = f.machine
    out = []
    for u, p, v in f.table:
        for u2, q, v2 in g.table:
            if _prefix(u2, v):
                y = v[len(u2):]
                yq, qy = run(m, q, y)
                out.append((u, p + qy, v2 + yq))
            elif _prefix(v, u2):
                z = u2[len(v):]
                # letters x with x*p = z
                for x in itertools.product(m.alphabet, repeat=len(z)):
                    xp, px = run(m, p, x)
                    if xp == z:
                        out.append((u + x, px + q, v2))
    return nek_normalize(m, out)


def nek_apply(f: NekMap, W: PointSpec) -> PointSpec | None:
    m = f.machine
    g = m.graph
    for u, p, v in f.table:
        if point_prefix(g, W, len(u)).edges == u:
            rest = point_drop(g, W, len(u))
            img = apply_point(m, p, rest)
            return normalize_point(g, PointSpec(Path(BOUQUET_VERTEX, v + img.tail.edges), img.cycle))
    return None


def random_nek(m: MealyMachine, rng: random.Random, depth: int = 2, states: int = 2) -> NekMap:
    """Random prefix-free domain from a random letter tree, random state words and images."""
    leaves = []
    todo: list = [()]
    while todo:
        w = todo.pop()
        if len(w) < depth and rng.random() < 0.5:
            todo.extend(w + (a,) for a in m.alphabet)
        else:
            leaves.append(w)
    if rng.random() < 0.5:
        leaves = [w for w in leaves if rng.random() < 0.8]
    ents = [(u, random_state_word(m, rng, states), random_word(m, rng, depth)) for u in leaves]
    return nek_normalize(m, ents)


# ---------------------------------------------------------------------------
# invertibility and groupoidality


def invertible_states(m: MealyMachine) -> set:
    """Largest set of states with bijective letter maps, closed under restriction."""
    cur = set(m.states)
    while True:
        keep = set()
        for q in cur:
            outs = {m.step(a, q)[1] for a in m.alphabet}
            if len(outs) == len(m.alphabet) and all(m.step(a, q)[0] in cur for a in m.alphabet):
                keep.add(q)
        if keep == cur:
            return cur
        cur = keep


def restrict_to_group(m: MealyMachine) -> MealyMachine:
    qs = invertible_states(m) | {m.identity}
    states = [q for q in m.states if q in qs]
    delta = {(a, q): m.step(a, q) for a in m.alphabet for q in states}
    return MealyMachine(m.alphabet, states, delta, m.identity)


@dataclass
class GroupoidalWitness:
    basis: list | None
    depth: int

    @property
    def found(self) -> bool:
        return self.basis is not None

    def __str__(self) -> str:
        if self.basis is None:
            return f"undecided at depth {self.depth}"
        return "{" + ", ".join(show_word(w) for w in self.basis) + "}"


def groupoidal_witness(m: MealyMachine, p: StateWord, depth: int) -> GroupoidalWitness:
    """A prefix-free complete set of words of length <= depth on which every
    restriction of p consists of invertible states."""
    inv = invertible_states(m) | {m.identity}
    basis, todo = [], [()]
    while todo:
        w = todo.pop(0)
        if all(q in inv for q in restrict_word(m, p, w)):
            basis.append(w)
        elif len(w) < depth:
            todo.extend(w + (a,) for a in m.alphabet)
        else:
            return GroupoidalWitness(None, depth)
    return GroupoidalWitness(basis, depth)


def separatedness_check(m: MealyMachine, depth: int, samples: int = 200, seed: int = 0) -> Report:
    """Pairs separated at ``depth`` are told apart by one letter acting on the left."""
    rep = Report(f"separatedness at depth {depth}")
    rng = random.Random(seed)
    fixed = [(p, u) for p in state_words_upto(m, 1) for u in words_upto(m.alphabet, 1)]
    pairs = list(itertools.combinations(fixed, 2))
    for _ in range(samples):
        pairs.append((random_zs(m, rng, 2), random_zs(m, rng, 2)))

    def distinct(x, y, d):
        return x[1] != y[1] or separated(m, x[0], y[0], d)

    for x, y in pairs:
        if not distinct(x, y, depth):
            continue
        hit = any(distinct(zs_mul(m, ((), (a,)), x), zs_mul(m, ((), (a,)), y), depth - 1)
                  for a in m.alphabet)
        rep.check(hit, lambda x=x, y=y: f"no letter distinguishes {x} and {y}")
    return rep


def odometer() -> MealyMachine:
    """Binary adding machine: a adds one to the word read first-letter-first."""
    delta = {("0", "e"): ("e", "0"), ("1", "e"): ("e", "1"),
             ("0", "a"): ("e", "1"), ("1", "a"): ("a", "0")}
    return MealyMachine(("0", "1"), ("e", "a"), delta, "e")
