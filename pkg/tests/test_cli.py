"""Golden tests for the command line.

Set MPKIT_UPDATE_GOLDEN=1 to rewrite the files under tests/golden.
"""
import io
import os
import time
from pathlib import Path

import pytest

from mpkit.cli import main

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
UPDATE = os.environ.get("MPKIT_UPDATE_GOLDEN") == "1"

# (case name, argv, expected exit code)
CASES = [
    ("check-pair-cyclic2", "check-pair cyclic2.pair", 0),
    ("check-pair-category", "check-pair arrow.cat", 0),
    ("check-pair-broken", "check-pair broken.pair", 1),
    ("check-pair-typo", "check-pair typo.pair", 2),
    ("check-pair-missing", "check-pair missing.pair", 2),
    ("brm-idempotent", "brm idempotent.pair", 0),
    ("brm-broken", "brm broken.pair", 2),
    ("compose-identity", "compose l.map lstar.map", 0),
    ("compose-idempotent", "compose lstar.map l.map", 0),
    ("compose-tsv", "compose swap.map swap.map --format tsv", 0),
    ("compose-mismatched-graphs", "compose swap.map cycle.map", 2),
    ("normalize-cycle", "normalize cycle.map --format tsv", 0),
    ("normalize-split", "normalize split.map", 0),
    ("normalize-overlap", "normalize overlap.map", 2),
    ("clopen", "clopen --graph bouquet:lr l rl", 0),
    ("dense-no", "dense --graph bouquet:lr l rl", 1),
    ("dense-yes", "dense --graph bouquet:lr l rl rr", 0),
    ("complement", "complement --graph bouquet:lr ll", 0),
    ("cofinal-three", "cofinal --graph three.graph", 0),
    ("cofinal-loops", "cofinal --graph two-loops.graph", 1),
    ("topos-bouquet", "topos --graph bouquet:lr", 0),
    ("topos-loops", "topos --graph two-loops.graph", 1),
    ("topos-pair", "topos cyclic2.pair", 0),
    ("groupoidal-odometer", "groupoidal odometer.machine --state a", 0),
    ("groupoidal-reset", "groupoidal reset.machine --state b --depth 3", 1),
    ("groupoidal-merge", "groupoidal merge.pair", 1),
    ("groupoidal-cyclic2", "groupoidal cyclic2.pair", 0),
    ("germ", "germ l.map --point ε;r", 0),
    ("germ-composite", "germ l.map lstar.map --point ε;r", 0),
    ("germ-outside", "germ lstar.map --point ε;r", 1),
    ("germ-no-point", "germ l.map", 2),
    ("exp", "exp cyclic2.pair regular flip.bjm", 0),
    ("tensor", "tensor cyclic2.pair two.bset", 0),
    ("mealy-odometer", "mealy odometer.machine", 0),
    ("mealy-reset", "mealy reset.machine", 1),
    ("nek-add1", "nek odometer add1.nek", 0),
    ("nek-compose", "nek odometer add1.nek branch.nek", 0),
    ("presentation", "presentation --graph bouquet:lr", 0),
    ("presentation-not-bouquet", "presentation --graph three.graph", 2),
    ("selftest-negative", "selftest --depth 1 --negative-control", 1),
]


def run(argv, capsys):
    buf = io.StringIO()
    code = main(argv, stdout=buf)
    err = capsys.readouterr().err
    return code, buf.getvalue() + err


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code, capsys, monkeypatch):
    monkeypatch.chdir(HERE / "fixtures")
    got_code, text = run(argv.split(), capsys)
    assert got_code == code, text
    path = GOLDEN / f"{name}.txt"
    if UPDATE or not path.exists():
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")


def test_quick_selftest(capsys):
    t = time.perf_counter()
    code, text = run(["selftest", "--depth", "2"], capsys)
    assert code == 0, text
    assert time.perf_counter() - t < 1.0
    assert text.count("PASS") >= 10


def test_usage_errors_exit_2(capsys, monkeypatch):
    monkeypatch.chdir(HERE / "fixtures")
    assert run(["compose", "l.map"], capsys)[0] == 2
    assert run(["no-such-verb"], capsys)[0] == 2
    assert run(["dense", "--graph", "bouquet:lr", "x"], capsys)[0] == 2


def test_compose_prints_identity(capsys, monkeypatch):
    monkeypatch.chdir(HERE / "fixtures")
    code, text = run(["compose", "l.map", "lstar.map"], capsys)
    assert code == 0
    assert "ε -> ε" in text
