"""Line-oriented text formats read by the command line tool.

Every format ignores blank lines and ``#`` comments.  Errors are raised as
``FormatError`` carrying the line and column of the offending token.

pair::

    atoms: a b
    monoid: e s          # element list, unit first unless `unit:` is given
    row e: e s           # row m lists m*n for n in element order
    row s: s s
    act s: a->b b->b     # atom map of s; omitted atoms are fixed
    equiv a: e s | ...   # classes of M over atom a, blocks split by |

category::

    objects: x y
    arrow f: x -> y
    compose g f = h      # g after f

graph::

    vertices: u v
    edge e: u -> v
    bouquet: lr          # shorthand, also accepted by --graph

map::

    on: bouquet:lr       # or a graph file, relative to the map file
    entry: l -> ε

machine::

    alphabet: 0 1
    state e: 0 -> e/0, 1 -> e/1
    state a: 0 -> e/1, 1 -> a/0
    identity: e          # optional

nek (over a machine given separately)::

    entry: u | p | v     # p is a dot separated state word, `e` or ε for the identity

B-set and <B|M>-set::

    atoms: a b           # B-set files only
    elem x: class(a)=0 class(b)=1
    act s x = y          # <B|M>-set files only; unlisted actions of the unit are x
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Hashable, Iterator

from .boolean_core import BSetError, FiniteBooleanAlgebra, FiniteBSet
from .matched_finite import (FiniteBJMSet, FiniteCategory, FiniteMatchedPair, FiniteMonoid, PairError,
                             algebra_bjm, empty_bjm, from_finite_category, regular, terminal)
from .path_space import DirectedGraph, GraphError, parse_path
from .prefix_maps import MapError, PrefixMap, normalize
from .selfsimilar import MachineError, MealyMachine, NekMap, nek_normalize, odometer


class FormatError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = ""):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.source = source

    def __str__(self) -> str:
        where = self.source or "<input>"
        if not self.line:
            return f"{where}: {self.message}"
        return f"{where}:{self.line}:{self.col}: {self.message}"


@dataclass
class Line:
    no: int
    key: str
    name: str       # text between the keyword and the colon, may be empty
    body: str
    body_col: int   # 1-based column where body starts
    raw: str

    def error(self, message: str, token: str | None = None) -> FormatError:
        col = self.body_col
        if token:
            i = self.raw.find(token, self.body_col - 1)
            if i >= 0:
                col = i + 1
        return FormatError(message, self.no, col)

    def words(self) -> list[str]:
        return self.body.split()


_HEAD = re.compile(r"\s*([A-Za-z_]+)(?:\s+([^:]*?))?\s*:(.*)$")
_COMPOSE = re.compile(r"\s*compose\s+(\S+)\s+(\S+)\s*=\s*(\S+)\s*$")
_ACT_LINE = re.compile(r"\s*act\s+(\S+)\s+(\S+)\s*=\s*(\S+)\s*$")


def _lines(text: str) -> Iterator[Line]:
    for no, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        m = _COMPOSE.match(stripped)
        if m:
            yield Line(no, "compose", "", " ".join(m.groups()), m.start(1) + 1, raw)
            continue
        m = _ACT_LINE.match(stripped)
        if m and ":" not in stripped:
            yield Line(no, "act=", m.group(1), f"{m.group(2)} {m.group(3)}", m.start(2) + 1, raw)
            continue
        m = _HEAD.match(stripped)
        if not m:
            raise FormatError("expected `keyword: ...`", no, len(raw) - len(raw.lstrip()) + 1)
        yield Line(no, m.group(1), (m.group(2) or "").strip(), m.group(3).strip(),
                   m.start(3) + 1 + (len(m.group(3)) - len(m.group(3).lstrip())), raw)


def _wrap(source: str):
    """Attach the file name to FormatErrors and turn model errors into FormatErrors."""
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, tp, exc, tb):
            if exc is None:
                return False
            if isinstance(exc, FormatError):
                exc.source = exc.source or source
                return False
            if isinstance(exc, (PairError, BSetError, GraphError, MapError, MachineError)):
                raise FormatError(str(exc), 0, 0, source) from exc
            return False
    return _Ctx()


def _expect(lines: list[Line], allowed: set[str]) -> None:
    for ln in lines:
        if ln.key not in allowed:
            raise FormatError(f"unexpected keyword `{ln.key}`", ln.no, 1)


def _single(lines: list[Line], key: str, required: bool = True) -> Line | None:
    found = [ln for ln in lines if ln.key == key]
    if len(found) > 1:
        raise found[1].error(f"`{key}:` given twice")
    if not found:
        if required:
            raise FormatError(f"missing `{key}:` line", 1, 1)
        return None
    return found[0]


# ---------------------------------------------------------------------------
# graphs


def graph_from_spec(spec: str) -> DirectedGraph:
    """``bouquet:lr`` or ``bouquet:a,b,c`` names a bouquet."""
    if not spec.startswith("bouquet:"):
        raise FormatError(f"not a graph spec: {spec}", 1, 1)
    body = spec[len("bouquet:"):].strip()
    letters = [x for x in body.split(",") if x] if "," in body else list(body)
    if not letters:
        raise FormatError("bouquet needs at least one letter", 1, len("bouquet:") + 1)
    if len(set(letters)) != len(letters):
        raise FormatError("repeated letter in bouquet", 1, len("bouquet:") + 1)
    return DirectedGraph.bouquet(letters)


def parse_graph(text: str, source: str = "") -> DirectedGraph:
    with _wrap(source):
        lines = list(_lines(text))
        _expect(lines, {"vertices", "edge", "bouquet"})
        bq = _single(lines, "bouquet", required=False)
        if bq is not None:
            if len(lines) > 1:
                raise lines[1].error("a bouquet file has a single line")
            return graph_from_spec("bouquet:" + bq.body)
        vl = _single(lines, "vertices")
        vertices = vl.words()
        edges: dict = {}
        for ln in lines:
            if ln.key != "edge":
                continue
            if not ln.name:
                raise ln.error("edge needs a name: `edge e: u -> v`")
            if ln.name in edges:
                raise FormatError(f"edge {ln.name} defined twice", ln.no, ln.raw.find(ln.name) + 1)
            ends = [x.strip() for x in ln.body.split("->")]
            if len(ends) != 2 or not all(ends):
                raise ln.error("expected `u -> v`")
            for v in ends:
                if v not in vertices:
                    raise ln.error(f"unknown vertex {v}", v)
            edges[ln.name] = (ends[0], ends[1])
        try:
            return DirectedGraph(vertices, edges)
        except GraphError as exc:
            raise FormatError(str(exc), vl.no, vl.body_col) from exc


def load_graph(spec: str) -> DirectedGraph:
    if spec.startswith("bouquet:"):
        return graph_from_spec(spec)
    return parse_graph(_read(spec), spec)


# ---------------------------------------------------------------------------
# prefix maps


def parse_map(text: str, source: str = "", graph: DirectedGraph | None = None) -> PrefixMap:
    with _wrap(source):
        lines = list(_lines(text))
        _expect(lines, {"on", "entry"})
        on = _single(lines, "on", required=graph is None)
        if on is not None:
            spec = on.body
            if spec.startswith("bouquet:"):
                g = graph_from_spec(spec)
            else:
                path = os.path.join(os.path.dirname(source), spec) if source else spec
                try:
                    g = parse_graph(_read(path), path)
                except OSError as exc:
                    raise on.error(f"cannot read graph file {spec}") from exc
            if graph is not None and _graph_key(g) != _graph_key(graph):
                raise on.error("map is over a different graph")
        else:
            g = graph
        entries = []
        for ln in lines:
            if ln.key != "entry":
                continue
            parts = ln.body.split("->")
            if len(parts) != 2:
                raise ln.error("expected `u -> v`")
            try:
                u, v = (parse_path(g, x) for x in parts)
            except GraphError as exc:
                raise ln.error(str(exc)) from exc
            entries.append((u, v, ln))
        try:
            return normalize([(u, v) for u, v, _ in entries], g)
        except MapError as exc:
            ln = entries[-1][2] if entries else lines[0]
            raise FormatError(str(exc), ln.no, ln.body_col) from exc


def _graph_key(g: DirectedGraph) -> tuple:
    return g.vertices, tuple(sorted((str(e), s, t) for e, (s, t) in g.edges.items()))


def load_map(path: str, graph: DirectedGraph | None = None) -> PrefixMap:
    return parse_map(_read(path), path, graph)


# ---------------------------------------------------------------------------
# machines


def parse_machine(text: str, source: str = "") -> MealyMachine:
    with _wrap(source):
        lines = list(_lines(text))
        _expect(lines, {"alphabet", "state", "identity"})
        alphabet = _single(lines, "alphabet").words()
        states, delta = [], {}
        for ln in lines:
            if ln.key != "state":
                continue
            q = ln.name
            if not q:
                raise ln.error("state needs a name: `state q: ...`")
            if q in states:
                raise FormatError(f"state {q} defined twice", ln.no, ln.raw.find(q) + 1)
            states.append(q)
            for item in ln.body.split(","):
                item = item.strip()
                m = re.fullmatch(r"(\S+)\s*->\s*(\S+)/(\S+)", item)
                if not m:
                    raise ln.error("expected `letter -> state/letter`", item or None)
                a, r, b = m.groups()
                if a not in alphabet:
                    raise ln.error(f"unknown letter {a}", item)
                if (a, q) in delta:
                    raise ln.error(f"letter {a} given twice", item)
                delta[(a, q)] = (r, b)
        ident = _single(lines, "identity", required=False)
        try:
            return MealyMachine(alphabet, states, delta, ident.body if ident else None)
        except MachineError as exc:
            state_lines = [x for x in lines if x.key == "state"]
            ln = ident or (state_lines[0] if state_lines else lines[0])
            raise FormatError(str(exc), ln.no, ln.body_col) from exc


def load_machine(spec: str) -> MealyMachine:
    if spec == "odometer":
        return odometer()
    return parse_machine(_read(spec), spec)


def parse_word(m: MealyMachine, text: str) -> tuple:
    text = text.strip()
    if text in ("", "ε"):
        return ()
    parts = text.split(".") if "." in text else list(text)
    for a in parts:
        if a not in m.alphabet:
            raise MachineError(f"unknown letter {a}")
    return tuple(parts)


def parse_state_word(m: MealyMachine, text: str) -> tuple:
    text = text.strip()
    if text in ("", "ε"):
        return ()
    parts = text.split(".") if "." in text else (list(text) if all(len(q) == 1 for q in m.states) else [text])
    for q in parts:
        if q not in m.states:
            raise MachineError(f"unknown state {q}")
    return m.word(*parts)


def parse_nek(m: MealyMachine, text: str, source: str = "") -> NekMap:
    with _wrap(source):
        lines = list(_lines(text))
        _expect(lines, {"entry"})
        entries = []
        for ln in lines:
            parts = ln.body.split("|")
            if len(parts) != 3:
                raise ln.error("expected `u | p | v`")
            try:
                u, v = parse_word(m, parts[0]), parse_word(m, parts[2])
                p = parse_state_word(m, parts[1])
            except MachineError as exc:
                raise ln.error(str(exc)) from exc
            entries.append((u, p, v))
        try:
            return nek_normalize(m, entries)
        except MachineError as exc:
            raise FormatError(str(exc), lines[-1].no if lines else 0, 1) from exc


def load_nek(m: MealyMachine, path: str) -> NekMap:
    return parse_nek(m, _read(path), path)


# ---------------------------------------------------------------------------
# pairs and categories


def parse_pair(text: str, source: str = "") -> FiniteMatchedPair:
    with _wrap(source):
        lines = list(_lines(text))
        if any(ln.key == "objects" for ln in lines):
            return from_finite_category(_category(lines))
        _expect(lines, {"atoms", "monoid", "unit", "row", "act", "equiv"})
        atoms = _single(lines, "atoms").words()
        ml = _single(lines, "monoid")
        elements = ml.words()
        if not elements:
            raise ml.error("empty monoid")
        if len(set(elements)) != len(elements):
            raise ml.error("repeated element")
        ul = _single(lines, "unit", required=False)
        unit = ul.body if ul else elements[0]
        if unit not in elements:
            raise ul.error(f"unit {unit} is not an element")
        rows: dict = {}
        act: dict = {m: {a: a for a in atoms} for m in elements}
        parts: dict = {}
        for ln in lines:
            if ln.key == "row":
                if ln.name not in elements:
                    raise ln.error(f"row for unknown element {ln.name}")
                ws = ln.words()
                if len(ws) != len(elements):
                    raise ln.error(f"row needs {len(elements)} entries")
                for w in ws:
                    if w not in elements:
                        raise ln.error(f"unknown element {w}", w)
                rows[ln.name] = ws
            elif ln.key == "act":
                if ln.name not in elements:
                    raise ln.error(f"atom map for unknown element {ln.name}")
                for item in ln.words():
                    got = item.split("->")
                    if len(got) != 2 or got[0] not in atoms or got[1] not in atoms:
                        raise ln.error("expected `atom->atom`", item)
                    act[ln.name][got[0]] = got[1]
            elif ln.key == "equiv":
                if ln.name not in atoms:
                    raise ln.error(f"classes for unknown atom {ln.name}")
                blocks = [b.split() for b in ln.body.split("|")]
                lab: dict = {}
                for i, block in enumerate(blocks):
                    for x in block:
                        if x not in elements:
                            raise ln.error(f"unknown element {x}", x)
                        if x in lab:
                            raise ln.error(f"element {x} in two classes", x)
                        lab[x] = i
                missing = [x for x in elements if x not in lab]
                if missing:
                    raise ln.error(f"elements {' '.join(missing)} in no class")
                parts[ln.name] = [lab[x] for x in elements]
        missing = [m for m in elements if m not in rows]
        if missing:
            raise ml.error(f"no row for {' '.join(missing)}")
        for a in atoms:
            parts.setdefault(a, list(range(len(elements))))
        B = FiniteBooleanAlgebra(tuple(atoms))
        M = FiniteMonoid.from_rows(elements, [rows[m] for m in elements], unit)
        return FiniteMatchedPair(B, M, act, FiniteBSet(B, M.elements, parts))


def _category(lines: list[Line]) -> FiniteCategory:
    _expect(lines, {"objects", "arrow", "compose"})
    objects = _single(lines, "objects").words()
    arrows: dict = {}
    comp: dict = {}
    for ln in lines:
        if ln.key == "arrow":
            ends = [x.strip() for x in ln.body.split("->")]
            if not ln.name or len(ends) != 2:
                raise ln.error("expected `arrow f: a -> b`")
            for v in ends:
                if v not in objects:
                    raise ln.error(f"unknown object {v}", v)
            arrows[ln.name] = tuple(ends)
    ids = {a: f"id_{a}" for a in objects}
    known = set(arrows) | set(ids.values())
    for ln in lines:
        if ln.key == "compose":
            g, f, h = ln.body.split()
            for x in (g, f, h):
                if x not in known:
                    raise ln.error(f"unknown arrow {x}", x)
            comp[(g, f)] = h
    A = FiniteCategory(objects, arrows, comp)
    rep = A.check()
    if not rep.ok:
        raise FormatError(f"not a category: {rep.first_failure}", lines[0].no, 1)
    return A


def parse_category(text: str, source: str = "") -> FiniteCategory:
    with _wrap(source):
        return _category(list(_lines(text)))


def load_pair(path: str) -> FiniteMatchedPair:
    return parse_pair(_read(path), path)


# ---------------------------------------------------------------------------
# B-sets and <B|M>-sets


def _elems(lines: list[Line], atoms) -> tuple[list, dict]:
    carrier, labels = [], {a: [] for a in atoms}
    for ln in lines:
        if ln.key != "elem":
            continue
        if not ln.name:
            raise ln.error("elem needs a name")
        if ln.name in carrier:
            raise FormatError(f"element {ln.name} defined twice", ln.no, ln.raw.find(ln.name) + 1)
        carrier.append(ln.name)
        given = {}
        for item in ln.words():
            m = re.fullmatch(r"class\(([^)]+)\)=(\S+)", item)
            if not m or m.group(1) not in labels:
                raise ln.error("expected `class(atom)=label`", item)
            given[m.group(1)] = m.group(2)
        for a in atoms:
            labels[a].append(given.get(a, "0"))
    return carrier, labels


def parse_bset(text: str, source: str = "") -> FiniteBSet:
    with _wrap(source):
        lines = list(_lines(text))
        _expect(lines, {"atoms", "elem"})
        atoms = _single(lines, "atoms").words()
        carrier, labels = _elems(lines, atoms)
        return FiniteBSet(FiniteBooleanAlgebra(tuple(atoms)), carrier, labels)


def load_bset(path: str) -> FiniteBSet:
    return parse_bset(_read(path), path)


BUILTIN_BJM = {"regular": regular, "terminal": terminal, "algebra": algebra_bjm, "empty": empty_bjm}


def parse_bjm(p: FiniteMatchedPair, text: str, source: str = "") -> FiniteBJMSet:
    with _wrap(source):
        lines = list(_lines(text))
        _expect(lines, {"elem", "act="})
        carrier, labels = _elems(lines, p.atoms)
        bs = FiniteBSet(p.B, carrier, labels)
        act: dict = {(p.unit, x): x for x in carrier}
        for ln in lines:
            if ln.key != "act=":
                continue
            x, y = ln.words()
            if ln.name not in p.M.elements:
                raise ln.error(f"unknown monoid element {ln.name}")
            for z in (x, y):
                if z not in carrier:
                    raise ln.error(f"unknown element {z}", z)
            act[(ln.name, x)] = y
        for m in p.M.elements:
            for x in carrier:
                if (m, x) not in act:
                    raise FormatError(f"action of {m} on {x} not given", lines[-1].no if lines else 0, 1)
        return FiniteBJMSet(p, bs, act)


def load_bjm(p: FiniteMatchedPair, spec: str) -> FiniteBJMSet:
    if spec in BUILTIN_BJM:
        return BUILTIN_BJM[spec](p)
    return parse_bjm(p, _read(spec), spec)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read file: {exc.strerror}", 0, 0, path) from exc


def format_hashable(x: Hashable) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(format_hashable(y) for y in x) + ")"
    return str(x)
