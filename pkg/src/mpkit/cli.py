"""mpkit command line tool.

Exit status: 0 when the verdict holds or the computation succeeded, 1 when
the verdict is false (a witness is printed), 2 on input errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Sequence, TextIO

from . import __version__
from .boolean_core import BSetError
from .formats import (FormatError, format_hashable, load_bjm, load_bset, load_graph, load_machine, load_map,
                      load_nek, load_pair, parse_state_word)
from .matched_finite import (PairError, build_brm, check_adjunction, check_bjm, check_brm_axioms,
                             check_conjugation_iso, check_matched_pair, check_tensor, exponential, is_groupoidal,
                             is_topos, roundtrip_check, section_name, tensor, terminal)
from .path_space import (GraphError, closure, cofinal_vertices, complement, cylinder, format_path, format_point,
                         is_dense, parse_path, parse_point, paths_of_length)
from .prefix_maps import (MapError, PrefixMap, apply_point, check_presentation, compose, degree, germ_at,
                          germ_compose, topos_witness)
from .report import Report
from .selfsimilar import (MachineError, apply_point as machine_apply, check_machine, faithful_to_depth,
                          groupoidal_witness, invertible_states, nek_apply, nek_compose, show_word)
from .suites import selftest

OK, FALSE, INPUT = 0, 1, 2


class Out:
    """Plain ``key: value`` lines, or tab separated rows with ``--format tsv``."""

    def __init__(self, fmt: str, stream: TextIO):
        self.tsv = fmt == "tsv"
        self.stream = stream

    def _w(self, text: str) -> None:
        self.stream.write(text + "\n")

    def field(self, key: str, value) -> None:
        self._w(f"{key}\t{value}" if self.tsv else f"{key}: {value}")

    def rows(self, header: Sequence[str], rows: Sequence[Sequence], plain: Callable[[Sequence], str]) -> None:
        if self.tsv:
            self._w("\t".join(header))
            for r in rows:
                self._w("\t".join(map(str, r)))
        else:
            for r in rows:
                self._w("  " + plain(r))

    def report(self, rep: Report, limit: int = 10) -> None:
        if self.tsv:
            self._w(f"check\t{rep.title}\t{'PASS' if rep.ok else 'FAIL'}\t{rep.checked}\t{rep.failed}")
            for f in rep.failures[:limit]:
                self._w(f"witness\t{f}")
        else:
            for line in rep.lines(limit):
                self._w(line)


def _name(x) -> str:
    return section_name(x) if isinstance(x, tuple) else format_hashable(x)


def _map_rows(out: Out, f: PrefixMap) -> None:
    g = f.graph
    out.field("entries", len(f.table))
    out.rows(("from", "to"), [(format_path(g, u), format_path(g, v)) for u, v in f.table],
             lambda r: f"{r[0]} -> {r[1]}")


def _paths(g, texts: Sequence[str]) -> list:
    return [parse_path(g, t) for t in texts]


# ---------------------------------------------------------------------------
# verbs


def _valid_pair(path: str):
    """Load a pair that the verb's preconditions require to be valid."""
    p = load_pair(path)
    rep = check_matched_pair(p)
    if not rep.ok:
        raise FormatError(f"not a matched pair: {rep.first_failure}", 0, 0, path)
    return p


def cmd_check_pair(a, out: Out) -> int:
    p = load_pair(a.file)
    out.field("atoms", " ".join(map(str, p.atoms)))
    out.field("monoid", f"{len(p.M)} elements")
    rep = check_matched_pair(p)
    out.report(rep)
    return OK if rep.ok else FALSE


def cmd_brm(a, out: Out) -> int:
    p = _valid_pair(a.file)
    S = build_brm(p, validate=False)
    out.field("elements", len(S.elements))
    out.field("idempotents", 2 ** len(p.atoms))
    out.field("total", len(p.M))
    axioms = check_brm_axioms(S)
    out.report(axioms)
    rt = roundtrip_check(p)
    out.field("round trip", "isomorphic" if rt.ok else f"FAILED ({rt.witness})")
    if rt.ok:
        out.rows(("m", "image"), [(_name(m), repr(v)) for m, v in rt.f.items()], lambda r: f"{r[0]} -> {r[1]}")
    return OK if axioms.ok and rt.ok else FALSE


def cmd_compose(a, out: Out) -> int:
    f = load_map(a.first)
    g = load_map(a.second, f.graph)
    _map_rows(out, compose(f, g))
    return OK


def cmd_normalize(a, out: Out) -> int:
    _map_rows(out, load_map(a.file))
    return OK


def _graph(a):
    if not a.graph:
        raise FormatError("--graph is required for this verb", 0, 0, "argv")
    return load_graph(a.graph)


def _basis_rows(out: Out, c) -> None:
    g = c.graph
    out.field("basis", len(c.basis))
    out.rows(("path",), [(format_path(g, p),) for p in c.basis], lambda r: r[0])


def cmd_clopen(a, out: Out) -> int:
    g = _graph(a)
    c = closure(_paths(g, a.paths), g)
    _basis_rows(out, c)
    out.field("depth", c.depth())
    return OK


def cmd_dense(a, out: Out) -> int:
    g = _graph(a)
    ps = _paths(g, a.paths)
    dense = is_dense(ps, g)
    out.field("dense", "yes" if dense else "no")
    if not dense:
        missed = complement(closure(ps, g))
        out.field("missed cylinder", format_path(g, missed.basis[0]))
    return OK if dense else FALSE


def cmd_complement(a, out: Out) -> int:
    g = _graph(a)
    _basis_rows(out, complement(closure(_paths(g, a.paths), g)))
    return OK


def cmd_cofinal(a, out: Out) -> int:
    g = _graph(a)
    cof = cofinal_vertices(g)
    out.field("cofinal", " ".join(str(v) for v in g.vertices if v in cof) or "-")
    bad = [v for v in g.vertices if v not in cof]
    out.field("not cofinal", " ".join(map(str, bad)) or "-")
    return FALSE if bad else OK


def cmd_topos(a, out: Out) -> int:
    if a.file:
        p = _valid_pair(a.file)
        v = is_topos(p)
        out.field("topos", "yes" if v.ok else "no")
        if v.ok:
            out.rows(("atom", "m"), [(x, _name(m)) for x, m in v.witness.items()],
                     lambda r: f"{r[0]}: {r[1]} sends every atom to {r[0]}")
        else:
            out.field("failing atom", v.failing_atom)
            out.field("open sieves", " ".join(repr(c) for c in v.sieves))
        return OK if v.ok else FALSE
    g = _graph(a)
    depth = 3 if a.depth is None else a.depth
    n = 0
    for k in range(depth + 1):
        for q in paths_of_length(g, k):
            n += 1
            w = topos_witness(cylinder(g, q))
            if not w.ok:
                out.field("topos", "no")
                out.field("cylinder", format_path(g, q))
                out.field("non-cofinal vertex", w.vertex)
                return FALSE
    out.field("topos", "yes")
    out.field("cylinders checked", n)
    q0 = next(paths_of_length(g, min(1, depth)))
    w = topos_witness(cylinder(g, q0))
    out.field("total map into the cylinder of", format_path(g, q0))
    out.rows(("from", "to"), [(format_path(g, u), format_path(g, v)) for u, v in w.map.table],
             lambda r: f"{r[0]} -> {r[1]}")
    return OK


def _is_machine(path: str) -> bool:
    if path == "odometer":
        return True
    try:
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if line:
                    return line.startswith("alphabet")
    except OSError:
        return False
    return False


def cmd_groupoidal(a, out: Out) -> int:
    if _is_machine(a.file):
        m = load_machine(a.file)
        depth = 3 if a.depth is None else a.depth
        words = [parse_state_word(m, a.state)] if a.state else [m.word(q) for q in m.states if q != m.identity]
        found = True
        rows = []
        for p in words:
            w = groupoidal_witness(m, p, depth)
            found &= w.found
            rows.append((".".join(p) or m.identity, str(w)))
        out.field("groupoidal", "yes" if found else f"undecided at depth {depth}")
        out.rows(("state word", "witness"), rows, lambda r: f"{r[0]}: {r[1]}")
        return OK if found else FALSE
    p = _valid_pair(a.file)
    v = is_groupoidal(p)
    out.field("groupoidal", "yes" if v.ok else "no")
    if v.ok:
        rows = [(_name(m), repr(b), _name(n), repr(c)) for m, ws in v.witnesses.items() for b, n, c in ws]
        out.rows(("m", "block", "n", "fixed by nm"), rows, lambda r: f"{r[0]}: on {r[1]} inverse {r[2]} (nm fixes {r[3]})")
        return OK
    out.field("failing element", _name(v.failing))
    out.field("uncovered", repr(v.deficit))
    return FALSE


def cmd_germ(a, out: Out) -> int:
    f = load_map(a.file)
    g = f.graph
    if not a.point:
        raise FormatError("--point is required for germ", 0, 0, "argv")
    W = parse_point(g, a.point)
    try:
        ga = germ_at(f, W)
    except MapError as exc:
        out.field("germ", f"undefined ({exc})")
        return FALSE
    out.field("germ", repr(ga))
    if a.then:
        h = load_map(a.then, g)
        try:
            gb = germ_at(h, ga.target)
        except MapError as exc:
            out.field("composite", f"undefined ({exc})")
            return FALSE
        c = germ_compose(ga, gb)
        out.field("second", repr(gb))
        out.field("composite", repr(c))
        out.field("degree check", f"{degree(c)} = {degree(ga)} + {degree(gb)}")
    return OK


def cmd_exp(a, out: Out) -> int:
    p = _valid_pair(a.pair)
    Y, Z = load_bjm(p, a.y), load_bjm(p, a.z)
    for X, nm in ((Y, "Y"), (Z, "Z")):
        r = check_bjm(X)
        if not r.ok:
            r.title = f"{nm} is not a <B|M>-set"
            out.report(r)
            return FALSE
    E = exponential(Y, Z)
    out.field("elements", len(E.bjm))
    out.rows(("atom", "classes"), [(x, len(set(E.bjm.bset.classes[x]))) for x in p.atoms],
             lambda r: f"classes over {r[0]}: {r[1]}")
    ok = True
    reps = [check_bjm(E.bjm), check_adjunction(terminal(p), Y, Z, E=E), check_adjunction(Y, Y, Z, E=E)]
    reps[1].title = "adjunction at X = 1"
    reps[2].title = "adjunction at X = Y"
    for rep in reps:
        out.report(rep)
        ok &= rep.ok
    v = is_groupoidal(p)
    if v.ok:
        rep = check_conjugation_iso(Y, Z, v.witnesses)
        out.report(rep)
        ok &= rep.ok
    return OK if ok else FALSE


def cmd_tensor(a, out: Out) -> int:
    p = _valid_pair(a.pair)
    X = load_bset(a.bset)
    if X.algebra.atoms != p.B.atoms:
        raise FormatError("B-set atoms differ from the pair's atoms", 1, 1, a.bset)
    T, eta = tensor(p, X)
    out.field("elements", len(T))
    out.rows(("x", "unit"), [(x, format_hashable(eta[x])) for x in X.carrier], lambda r: f"{r[0]} -> {r[1]}")
    rep = check_tensor(p, X, [terminal(p)])
    out.report(rep)
    return OK if rep.ok else FALSE


def cmd_mealy(a, out: Out) -> int:
    m = load_machine(a.file)
    depth = 2 if a.depth is None else a.depth
    out.field("alphabet", " ".join(map(str, m.alphabet)))
    out.field("states", " ".join(map(str, m.states)))
    out.field("identity", m.identity)
    ok = True
    for rep in (check_machine(m, depth), faithful_to_depth(m, depth)):
        out.report(rep)
        ok &= rep.ok
    inv = invertible_states(m)
    out.field("invertible", " ".join(q for q in map(str, m.states) if q in inv) or "-")
    if a.point:
        W = parse_point(m.graph, a.point)
        rows = [(q, format_point(m.graph, machine_apply(m, m.word(q), W))) for q in m.states]
        out.rows(("state", "image"), rows, lambda r: f"{r[0]} -> {r[1]}")
    return OK if ok else FALSE


def cmd_nek(a, out: Out) -> int:
    m = load_machine(a.machine)
    f = load_nek(m, a.first)
    if a.second:
        f = nek_compose(f, load_nek(m, a.second))
    out.field("entries", len(f.table))
    rows = [(show_word(u), ".".join(map(str, p)) or m.identity, show_word(v)) for u, p, v in f.table]
    out.rows(("u", "p", "v"), rows, lambda r: f"{r[0]} | {r[1]} | {r[2]}")
    if a.point:
        W = parse_point(m.graph, a.point)
        img = nek_apply(f, W)
        out.field("image", "undefined" if img is None else format_point(m.graph, img))
    return OK


def cmd_presentation(a, out: Out) -> int:
    g = _graph(a)
    rep = check_presentation(g)
    out.report(rep)
    return OK if rep.ok else FALSE


def cmd_selftest(a, out: Out) -> int:
    depth = 3 if a.depth is None else a.depth
    results = selftest(a.seed, depth, a.negative_control)
    ok = True
    rows = []
    for s, rep, _ in results:
        ok &= rep.ok
        rows.append(("PASS" if rep.ok else "FAIL", s.title, rep.checked, rep.failed))
    out.field("seed", a.seed)
    out.field("depth", depth)
    out.rows(("verdict", "suite", "checks", "failed"), rows, lambda r: f"{r[0]} {r[1]} ({r[2]} checks, {r[3]} failed)")
    for s, rep, _ in results:
        if not rep.ok:
            out.report(rep, 3)
    out.field("result", "all suites pass" if ok else "FAILED")
    return OK if ok else FALSE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mpkit", description="Matched pairs, prefix maps and self-similar actions.")
    ap.add_argument("--version", action="version", version=f"mpkit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--point", default=None, help="point as tail;cycle")
    common.add_argument("--format", choices=("plain", "tsv"), default="plain")
    common.add_argument("--graph", default=None, help="graph file or bouquet:letters")
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    verb("check-pair", cmd_check_pair, "verify a matched pair or a category's pair").add_argument("file")
    verb("brm", cmd_brm, "Boolean restriction monoid of a pair and the round trip").add_argument("file")
    p = verb("compose", cmd_compose, "compose two prefix maps, first then second")
    p.add_argument("first")
    p.add_argument("second")
    verb("normalize", cmd_normalize, "normal form of a prefix map").add_argument("file")
    for name, fn, h in (("clopen", cmd_clopen, "closed ideal generated by paths"),
                        ("dense", cmd_dense, "is the generated ideal dense"),
                        ("complement", cmd_complement, "complement of the generated clopen")):
        verb(name, fn, h).add_argument("paths", nargs="*")
    verb("cofinal", cmd_cofinal, "cofinal vertices of a graph")
    verb("topos", cmd_topos, "topos criterion for a graph (--graph) or a pair file").add_argument("file", nargs="?")
    p = verb("groupoidal", cmd_groupoidal, "groupoidality of a pair, or witnesses for a machine")
    p.add_argument("file")
    p.add_argument("--state", default=None, help="state word for machine files")
    p = verb("germ", cmd_germ, "germ of a map at --point")
    p.add_argument("file")
    p.add_argument("then", nargs="?", help="second map, composed after the first")
    p = verb("exp", cmd_exp, "exponential Z^Y of two <B|M>-sets")
    p.add_argument("pair")
    p.add_argument("y")
    p.add_argument("z")
    p = verb("tensor", cmd_tensor, "tensor M (x)_B X of a B-set")
    p.add_argument("pair")
    p.add_argument("bset")
    verb("mealy", cmd_mealy, "checks on a Mealy machine").add_argument("file")
    p = verb("nek", cmd_nek, "normalize or compose Nekrashevych maps")
    p.add_argument("machine")
    p.add_argument("first")
    p.add_argument("second", nargs="?")
    verb("presentation", cmd_presentation, "generator relations on a bouquet")
    verb("selftest", cmd_selftest, "run every property suite").add_argument("--negative-control", action="store_true")
    return ap


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 2; --help and --version exit 0
        return int(exc.code or 0)
    out = Out(args.format, stdout)
    try:
        return args.fn(args, out)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (GraphError, MapError, MachineError, PairError, BSetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return INPUT


if __name__ == "__main__":
    sys.exit(main())
