"""The relation functors on free algebras, automorphisms and the category slice."""

from __future__ import annotations

from itertools import product

import numpy as np
import pytest

from expected import SLICE
from helpers import galois_pool
from uag.algebra import Partition
from uag.fields import frobenius
from uag.free import FreeMorphism, build_free, morphism_from_terms
from uag.functors import (
    AutomorphismSpec,
    HomRelation,
    alpha,
    beta,
    build_category,
    cl_on_morphism,
    dual_hom,
    duality_check,
    generator_transposition,
    hom_index,
    hom_set,
    image_partition,
    rho,
    tau,
    verify_inner_equivalence,
)
from uag.galois import algebraic_set_lattice, is_closed
from uag.library import cyclic, f4_algebra, left_zero_monoid

Z2, Z4 = cyclic(2), cyclic(4)


def names(W):
    return [str(W.canonical_term(e)) for e in range(W.size)]


# --- beta, rho, tau ---------------------------------------------------------------------


def test_rho_examples():
    W = build_free(Z2, ("x",))
    assert [h.describe() for h in hom_set(W, W)] == ["x->x", "x->zero"]
    assert rho(W, Partition.identity(2)).relation.num_blocks == 2
    assert rho(W, Partition.full(2)).relation.num_blocks == 1


@pytest.mark.parametrize("name", ["Z2", "Z4", "Klein", "LZ2"])
def test_beta_matches_definition(name):
    H = galois_pool()[name]
    W1, W2 = build_free(H, ("x",)), build_free(H, ("x", "y"))
    for T in algebraic_set_lattice(H, ("x", "y")).congruences:
        r = beta(W1, W2, T)
        homs = hom_set(W1, W2)
        want = {(i, j) for i, j in product(range(len(homs)), repeat=2) if all(T.same(homs[i].map[w], homs[j].map[w]) for w in range(W1.size))}
        assert r.pairs == want


def test_beta_rejects_wrong_partition():
    W = build_free(Z2, ("x",))
    with pytest.raises(ValueError):
        beta(W, W, Partition.identity(3))


def test_hom_index_follows_hom_set_order():
    W1, W2 = build_free(Z4, ("x", "y")), build_free(Z4, ("x",))
    for n, s in enumerate(hom_set(W1, W2)):
        assert hom_index(s.images, W2.size) == n


def test_tau_inverts_rho_on_closed_congruences():
    for H in (Z2, Z4):
        for X in (("x",), ("x", "y")):
            L = algebraic_set_lattice(H, X)
            for T in L.congruences:
                res = tau(L.free, rho(L.free, T))
                assert res.partition == T


def test_tau_need_not_be_transitive():
    W = build_free(Z4, ("x",))
    e = {n: i for i, n in enumerate(names(W))}
    ends = hom_set(W, W)
    ident = [n for n, s in enumerate(ends) if s.describe() == "x->x"][0]
    dbl = [n for n, s in enumerate(ends) if s.describe() == "x->add(x,x)"][0]
    lab = list(range(len(ends)))
    lab[dbl] = lab[ident]
    r = rho(W, Partition.identity(4))
    rel = HomRelation(W, W, r.maps, Partition.from_labels(lab))
    res = tau(W, rel)
    assert res.partition is None
    assert (e["x"], e["add(x,x)"]) in res.pairs and (e["add(x,x)"], e["zero"]) in res.pairs
    assert (e["x"], e["zero"]) not in res.pairs
    with pytest.warns(UserWarning):
        strict = tau(W, rel, strict=True)
    assert strict.closed_transitively and strict.partition.same(e["x"], e["zero"])


def test_cl_on_morphism_is_preimage():
    W = build_free(Z4, ("x",))
    dbl = morphism_from_terms(W, W, [W.canonical_term(2)])
    P = cl_on_morphism(dbl, Partition.identity(4))
    assert sorted(sorted(names(W)[e] for e in b) for b in P.blocks()) == [["add(x,x)", "zero"], ["neg(x)", "x"]]
    assert is_closed(W, P)[0]
    with pytest.raises(ValueError):
        cl_on_morphism(dbl, Partition.identity(2))


# --- automorphisms ------------------------------------------------------------------------


def test_alpha_identity_fixes_closed_congruences():
    L = algebraic_set_lattice(Z4, ("x", "y"))
    for T in L.congruences:
        W2, A = alpha(AutomorphismSpec.identity(), L.free, T)
        assert W2 is L.free and A == T


@pytest.mark.parametrize("H", [Z2, Z4, left_zero_monoid(2)], ids=["Z2", "Z4", "LZ2+1"])
def test_transposition_is_inner(H):
    r = verify_inner_equivalence(generator_transposition(), H, 2)
    assert r.ok and r.checked == len(algebraic_set_lattice(H, ("x",))) + len(algebraic_set_lattice(H, ("x", "y")))


def test_inner_needs_bijective_family():
    W = build_free(Z4, ("x",))
    bad = AutomorphismSpec.inner(lambda W: FreeMorphism(W, W, (W.element(W.canonical_term(2)),)))
    with pytest.raises(ValueError, match="not an isomorphism"):
        bad.on_object(W)
    with pytest.raises(ValueError):
        verify_inner_equivalence(AutomorphismSpec.identity(), Z4, 1)


def test_alpha_twist_is_sigma_on_terms():
    H = f4_algebra()
    phi = AutomorphismSpec.twist(frobenius(H.signature.scalars))
    L = algebraic_set_lattice(H, ("x",))
    W2, c = phi.on_object(L.free)
    for T in L.congruences:
        W3, A = alpha(phi, L.free, T)
        assert W3 == W2 and A == image_partition(T, c, W2.size)


def test_alpha_mirror_and_composite():
    H = left_zero_monoid(2)
    L = algebraic_set_lattice(H, ("x", "y"))
    m = AutomorphismSpec.mirror()
    twice = AutomorphismSpec.composite(m, m)
    for T in L.congruences:
        W2, A = alpha(m, L.free, T)
        assert is_closed(W2, A)[0]
        W3, B = alpha(twice, L.free, T)
        assert B.labels == T.labels and W3.size == L.free.size


# --- category slice and duality ---------------------------------------------------------------


@pytest.mark.parametrize("name,k", sorted(SLICE), ids=[f"{n}-{k}" for n, k in sorted(SLICE)])
def test_slice_sizes(name, k):
    S = build_category(galois_pool()[name], k)
    assert (len(S.objects), len(S.skeleton)) == SLICE[(name, k)]


def test_slice_is_a_category():
    S = build_category(Z4, 1)
    n = len(S.objects)
    assert [o.points for o in S.objects] == [(0,), (0, 2), (0, 1, 2, 3)]
    for i in range(n):
        for j in range(n):
            for f in range(len(S.hom(i, j))):
                assert S.compose(i, i, j, S.identity(i), f) == f
                assert S.compose(i, j, j, f, S.identity(j)) == f
    for i, j, k, l in product(range(n), repeat=4):
        for f, g, h in product(range(len(S.hom(i, j))), range(len(S.hom(j, k))), range(len(S.hom(k, l)))):
            assert S.compose(i, k, l, S.compose(i, j, k, f, g), h) == S.compose(i, j, l, f, S.compose(j, k, l, g, h))


def test_z2_plane_slice_classes_by_dimension():
    S = build_category(Z2, 2)
    assert len(S.objects) == 7
    sizes = sorted(sorted(len(S.objects[i].points) for i in c) for c in S.skeleton)
    assert sizes == [[1, 1], [2, 2, 2, 2], [4]]  # the line over x is a line of the plane


@pytest.mark.parametrize("H", [Z2, Z4], ids=["Z2", "Z4"])
def test_duality(H):
    S = build_category(H, 1)
    rep = duality_check(S)
    assert rep.ok, rep.failures
    assert all(a == b for a, b in rep.counts.values())
    for arrows in S.arrows.values():
        for a in arrows:
            assert dual_hom(S, a).preserves()


def test_duality_on_quotients():
    S = build_category(Z4, 1)
    sizes = [o.dual.size for o in S.objects]
    assert sizes == [1, 2, 4]
    assert np.array_equal(S.objects[2].congruence.array(), np.arange(4))
