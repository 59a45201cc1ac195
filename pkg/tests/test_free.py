"""Free algebras of Var(H) and their morphisms."""

from __future__ import annotations

from itertools import product

import numpy as np
import pytest

from expected import FREE_SIZES
from helpers import galois_pool, term
from oracles import brute_free_functions, term_function
from uag.algebra import preserves_operations
from uag.config import Caps
from uag.errors import CapExceeded, UnboundVariable
from uag.free import all_morphisms, apply_morphism, build_free, compose, identity_morphism, morphism_from_terms
from uag.library import cyclic, trivial_group
from uag.terms import Var, depth

POOL = {**galois_pool(), "1": trivial_group()}
SIZES = sorted(FREE_SIZES)


@pytest.mark.parametrize("name,k", SIZES, ids=[f"{n}-{k}" for n, k in SIZES])
def test_free_sizes(name, k):
    H = POOL[name]
    X = ("x", "y")[:k]
    F = build_free(H, X)
    assert F.size == FREE_SIZES[(name, k)]
    if F.size <= 64:
        assert {tuple(r) for r in F.vectors.tolist()} == brute_free_functions(H, X)


@pytest.mark.parametrize("name", ["Z2", "Z4", "Klein", "LZ2"])
def test_witnesses_denote_their_elements(name):
    H = POOL[name]
    F = build_free(H, ("x", "y"))
    for e in range(F.size):
        t = F.canonical_term(e)
        assert term_function(t, H, ("x", "y")) == tuple(F.vectors[e].tolist())
        assert F.element(t) == e
        assert depth(t) == F.depths[e]
    # BFS order: depths never decrease
    assert list(F.depths) == sorted(F.depths)


def test_free_examples():
    Z4 = cyclic(4)
    F = build_free(Z4, ("x",))
    assert F.canonical_term(F.index_of([0, 2, 0, 2])) == term("add(x,x)", "x")
    assert F.canonical_term(F.generators[0]) == Var("x")
    F2 = build_free(cyclic(2), ("x",))
    assert F2.canonical_term(F2.index_of([0, 0])) == term("zero", "x")
    assert build_free(trivial_group(), ("x",)).size == 1


def test_free_errors():
    with pytest.raises(CapExceeded):
        build_free(cyclic(4), ("x", "y"), Caps(free=8))
    with pytest.raises(ValueError):
        build_free(cyclic(2), ())
    with pytest.raises(UnboundVariable):
        build_free(cyclic(2), ("x",)).element(term("add(x,y)"))


def test_free_operations_are_pointwise():
    H = cyclic(3)
    F = build_free(H, ("x", "y"))
    add = F.algebra.tables["add"]
    for a, b in product(range(F.size), repeat=2):
        assert np.array_equal(F.vectors[add[a, b]], H.tables["add"][F.vectors[a], F.vectors[b]])


def test_morphism_examples():
    F = build_free(cyclic(4), ("x",))
    x, two_x, three_x = F.element(term("x", "x")), F.element(term("add(x,x)", "x")), F.element(term("add(x,add(x,x))", "x"))
    dbl = morphism_from_terms(F, F, [term("add(x,x)", "x")])
    assert apply_morphism(dbl, x) == two_x
    zero = morphism_from_terms(F, F, [term("zero", "x")])
    assert apply_morphism(zero, three_x) == F.element(term("zero", "x"))
    ident = identity_morphism(F)
    assert all(apply_morphism(ident, e) == e for e in range(F.size))
    assert compose(ident, dbl) == dbl == compose(dbl, ident)
    assert compose(dbl, dbl) == zero


def test_end_counts_and_associativity():
    F2 = build_free(cyclic(2), ("x",))
    ends = all_morphisms(F2, F2)
    assert len(ends) == 2 and [s.describe() for s in ends] == ["x->x", "x->zero"]
    assert len(all_morphisms(build_free(cyclic(4), ("x",)), build_free(cyclic(4), ("x",)))) == 4
    W = build_free(cyclic(2), ("x", "y"))
    E = all_morphisms(W, W)
    assert len(E) == 16
    for a, b, c in product(E, repeat=3):
        assert compose(a, compose(b, c)) == compose(compose(a, b), c)


def test_morphisms_are_homomorphisms():
    H = cyclic(4)
    W1, W2 = build_free(H, ("x",)), build_free(H, ("x", "y"))
    for s in all_morphisms(W1, W2):
        assert preserves_operations(W1.algebra, W2.algebra, s.map.tolist())
