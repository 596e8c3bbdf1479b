from pathlib import Path

import pytest

from mpkit import formats
from mpkit.formats import FormatError
from mpkit.matched_finite import check_matched_pair
from mpkit.path_space import DirectedGraph, parse_path
from mpkit.prefix_maps import identity, letter, letter_star
from mpkit.selfsimilar import odometer

FIX = Path(__file__).parent / "fixtures"


def f(name):
    return str(FIX / name)


def test_graph_files():
    assert formats.load_graph(f("lr.graph")) == DirectedGraph.bouquet("lr")
    g = formats.load_graph(f("three.graph"))
    assert g.vertices == ("x", "y", "z") and len(g.edges) == 5
    assert formats.load_graph("bouquet:a,b,c") == DirectedGraph.bouquet("abc")


@pytest.mark.parametrize("spec", ["lr", "bouquet:", "bouquet:aa"])
def test_bad_graph_specs(spec):
    with pytest.raises(FormatError):
        formats.graph_from_spec(spec)


def test_map_files():
    lr = DirectedGraph.bouquet("lr")
    assert formats.load_map(f("l.map")) == letter(lr, "l")
    assert formats.load_map(f("lstar.map")) == letter_star(lr, "l")
    # a full sibling family collapses
    assert formats.load_map(f("split.map")) is not None
    assert formats.parse_map("on: bouquet:lr\nentry: l -> l\nentry: r -> r\n") == identity(lr)


def test_map_over_wrong_graph():
    with pytest.raises(FormatError, match="different graph"):
        formats.parse_map("on: bouquet:ab\nentry: ε -> a\n", graph=DirectedGraph.bouquet("lr"))


def test_error_locations():
    with pytest.raises(FormatError) as exc:
        formats.load_pair(f("typo.pair"))
    assert "typo.pair:4:10:" in str(exc.value)
    with pytest.raises(FormatError) as exc:
        formats.load_map(f("overlap.map"))
    assert "overlap.map:3:8:" in str(exc.value)


def test_invalid_pair_parses_but_fails_check():
    p = formats.load_pair(f("broken.pair"))
    assert not check_matched_pair(p).ok


def test_missing_file_has_no_location():
    with pytest.raises(FormatError) as exc:
        formats.load_pair("no-such.pair")
    assert str(exc.value).startswith("no-such.pair: cannot read file")


@pytest.mark.parametrize("name", ["cyclic2.pair", "idempotent.pair", "merge.pair", "arrow.cat", "codiscrete2.cat"])
def test_pair_files(name):
    assert check_matched_pair(formats.load_pair(f(name))).ok


@pytest.mark.parametrize("text,where", [
    ("atoms: a\nmonoid: 0 1\nrow 0: 0 1\n", "2:9"),
    ("atoms: a\nmonoid: 0\nrow 0: 0\nact 0: a->b\n", "4:8"),
    ("atoms: a\nmonoid: 0\nrow 0: 0\nbogus: 1\n", "4:"),
    ("atoms: a\nmonoid: 0 0\n", "2:"),
])
def test_pair_syntax_errors(text, where):
    with pytest.raises(FormatError) as exc:
        formats.parse_pair(text, "t.pair")
    assert f"t.pair:{where}" in str(exc.value)


def test_machine_files():
    m = formats.load_machine(f("odometer.machine"))
    o = odometer()
    assert m.alphabet == o.alphabet and m.delta == o.delta
    assert formats.load_machine("odometer").delta == o.delta
    with pytest.raises(FormatError):
        formats.parse_machine("alphabet: 0 1\nstate e: 0 -> e/0\n")


def test_words():
    m = odometer()
    assert formats.parse_word(m, "01") == ("0", "1")
    assert formats.parse_word(m, "ε") == ()
    assert formats.parse_state_word(m, "aa") == ("a", "a")


def test_nek_files():
    m = odometer()
    add1 = formats.load_nek(m, f("add1.nek"))
    assert add1.table == (((), ("a",), ()),)
    assert formats.load_nek(m, f("branch.nek")) is not None


def test_bset_and_bjm_files():
    X = formats.load_bset(f("two.bset"))
    assert len(X) == 2
    grid = formats.load_bset(f("grid.bset"))
    assert len(grid) > 0
    p = formats.load_pair(f("cyclic2.pair"))
    flip = formats.load_bjm(p, f("flip.bjm"))
    assert len(flip) == 2
    for name in formats.BUILTIN_BJM:
        assert formats.load_bjm(p, name) is not None
    with pytest.raises(FormatError, match="action of 1 on y"):
        formats.parse_bjm(p, "elem x: class(a)=0\nelem y: class(a)=1\nact 1 x = y\n")


def test_format_hashable():
    assert formats.format_hashable(("a", (1, 2))) == "(a,(1,2))"
    assert formats.format_hashable(3) == "3"


def test_path_parsing_on_three_vertex_graph():
    g = formats.load_graph(f("three.graph"))
    assert parse_path(g, "a.b").edges == ("a", "b")
