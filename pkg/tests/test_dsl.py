"""The text format: parsing, positioned errors and printing."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uag import dsl
from uag.algebra import FiniteAlgebra, Signature
from uag.dsl import DslError, parse, print_algebra_standalone, print_document
from uag.equiv import QuasiIdentity
from uag.galois import EquationSystem
from uag.library import cyclic, f4_algebra, klein, left_zero_monoid, upper_triangular_monoid
from uag.terms import App, Var

CORPUS = Path(__file__).resolve().parent / "corpus"

Z2_TEXT = """
# the two-element group
algebra Z2 {
  carrier 2
  op add/2 table [[0,1],[1,0]]
  op neg/1 table [0,1]
  op zero/0 table [0]
}
system T over x { add(x,x) = zero }
quasi q over x { add(x,x) = zero => x = zero }
"""


def test_parse_example():
    doc = parse(Z2_TEXT)
    H = doc.algebras["Z2"]
    assert H == cyclic(2).renamed("Z2")
    assert doc.systems["T"] == EquationSystem(("x",), ((App("add", (Var("x"), Var("x"))), App("zero")),))
    q = doc.quasis["q"]
    assert isinstance(q, QuasiIdentity) and q.conclusion == (Var("x"), App("zero"))
    assert doc.spans["T"] == (9, 8)


def test_constants_versus_variables():
    T = parse("system T over x { f(x, c) = c }").first("system")
    assert T.pairs[0] == (App("f", (Var("x"), App("c"))), App("c"))


def test_flags_and_fields():
    doc = parse(print_algebra_standalone(f4_algebra()))
    H = next(iter(doc.algebras.values()))
    assert H.signature.product == "mul" and H.signature.scalars.order == 4
    assert H == f4_algebra().renamed(H.name)


ERRORS = [
    ("algebra A { carrier 2 op mul/2 table [[0,2],[1,0]] }", 1, 38, "entry 2 out of range"),
    ("algebra A { carrier 2 op mul/2 table [[0,1],[1]] }", 1, 38, "shape ragged"),
    ("algebra A { carrier 1 op c/0 table [0] }\nalgebra A { carrier 1 op c/0 table [0] }", 2, 9, "duplicate name 'A'"),
    ("algebra A { carrier 2 op f/1 table [0,1] op f/1 table [1,0] }", 1, 45, "duplicate operation 'f'"),
    ("system T over x,x { }", 1, 19, "duplicate variable"),
    ("quasi q over x { x = x }", 1, 24, "expected '=>'"),
    ("algebra A { carrier 2 op f/1 table [0,1] scalars P }", 1, 50, "unknown field 'P'"),
    ("algebra A { carrier 2 $ }", 1, 23, "unexpected character '$'"),
    ("system T over x { x(y) = x }", 1, 19, "variable 'x' applied"),
    ("algebra A { carrier 0 }", 1, 23, "carrier must be at least 1"),
    ("system T over x {\n  x = \n}", 3, 1, "expected a name"),
    ("hello", 1, 1, "expected 'algebra'"),
]


@pytest.mark.parametrize("text,line,col,msg", ERRORS, ids=[e[3] for e in ERRORS])
def test_positioned_errors(text, line, col, msg):
    with pytest.raises(DslError) as ei:
        parse(text)
    e = ei.value
    assert (e.line, e.col) == (line, col) and msg in e.msg
    assert str(e).startswith(f"line {line}, col {col}: ")


def test_missing_table():
    with pytest.raises(DslError, match="missing table|shape"):
        parse("algebra A { carrier 2 op f/1 table [] }")


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.uag")), ids=lambda p: p.stem)
def test_corpus_round_trip(path):
    doc = dsl.load(str(path))
    text = print_document(doc)
    again = parse(text)
    assert again == doc
    assert print_document(again) == text


@pytest.mark.parametrize("H", [cyclic(5), klein(), left_zero_monoid(2), upper_triangular_monoid(), f4_algebra()], ids=lambda H: H.name)
def test_library_round_trip(H):
    doc = parse(print_algebra_standalone(H))
    (G,) = doc.algebras.values()
    assert G.signature.ops == H.signature.ops
    for op, _ in H.signature.ops:
        assert np.array_equal(np.asarray(G.tables[op]), np.asarray(H.tables[op]))


def test_identifier():
    assert dsl.identifier("F4-alg") == "F4_alg"
    assert dsl.identifier("4x") == "_4x"
    assert dsl.identifier("") == "H"


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.data())
def test_random_algebra_round_trip(n, data):
    sig = Signature((("f", 2), ("g", 1), ("c", 0)))
    f = data.draw(st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n))
    g = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    c = data.draw(st.integers(0, n - 1))
    H = FiniteAlgebra(sig, n, {"f": np.array(f).reshape(n, n), "g": g, "c": c}, "R")
    assert parse(print_algebra_standalone(H)).algebras["R"] == H
