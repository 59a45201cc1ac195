"""Geometric equivalence, quasi-identities, opposites and scalar twists."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import system, term
from oracles import brute_quasi_holds, brute_separates, ev, random_term
from uag.algebra import FiniteAlgebra, Signature
from uag.equiv import (
    QuasiIdentity,
    almost_geo_equivalent,
    closure_oracle,
    geo_equivalent,
    mirror_closure_transport,
    mirror_closure_transport_all,
    mirror_system,
    opposite,
    quasi_identity_holds,
    replay_closure_witness,
    same_quasi_identities_up_to,
    twist,
    twist_closure_bijection,
)
from uag.errors import SignatureError
from uag.fields import frobenius, frobenius_automorphisms, gf
from uag.library import (
    cyclic,
    f4_algebra,
    field_algebra,
    klein,
    left_zero,
    right_zero,
    upper_triangular_monoid,
)

Z2, Z4 = cyclic(2), cyclic(4)
BIN = Signature((("f", 2), ("c", 0)))


@st.composite
def small_algebras(draw, max_size=3):
    n = draw(st.integers(1, max_size))
    f = draw(st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n))
    c = draw(st.integers(0, n - 1))
    return FiniteAlgebra(BIN, n, {"f": np.array(f).reshape(n, n), "c": c}, f"A{n}")


def q(premises: str, conclusion: str, variables: str = "x") -> QuasiIdentity:
    P = system(premises, variables).pairs if premises else ()
    C = system(conclusion, variables).pairs[0]
    return QuasiIdentity(tuple(variables.split(",")), P, C)


# --- quasi-identities ------------------------------------------------------------------


def test_quasi_identity_examples():
    torsion = q("add(x,x) = zero", "x = zero")
    ok, pt = quasi_identity_holds(torsion, Z4)
    assert not ok and pt.values == (2,)
    assert quasi_identity_holds(torsion, cyclic(3)) == (True, None)
    assert quasi_identity_holds(q("", "x = x"), Z4) == (True, None)
    assert quasi_identity_holds(q("add(x,x) = zero", "add(x,add(x,x)) = x"), Z2)[0]
    assert str(torsion) == "add(x,x) = zero => x = zero"


def test_quasi_identity_rejects_undeclared_variables():
    with pytest.raises(ValueError):
        QuasiIdentity(("x",), (), (term("add(x,y)"), term("x")))


@settings(max_examples=60, deadline=None)
@given(small_algebras(), st.randoms(use_true_random=False))
def test_quasi_identity_matches_oracle(H, rng):
    X = ("x", "y")
    ops = H.signature.ops
    prem = tuple((random_term(rng, ops, X, 2), random_term(rng, ops, X, 2)) for _ in range(rng.randint(0, 2)))
    qi = QuasiIdentity(X, prem, (random_term(rng, ops, X, 2), random_term(rng, ops, X, 2)))
    ok, pt = quasi_identity_holds(qi, H)
    assert ok == brute_quasi_holds(qi.premises, qi.conclusion, H, X)
    if not ok:
        env = pt.as_dict()
        assert all(ev(a, H, env) == ev(b, H, env) for a, b in qi.premises)
        assert ev(qi.conclusion[0], H, env) != ev(qi.conclusion[1], H, env)


def test_quasi_comparison_examples():
    r = same_quasi_identities_up_to(Z2, Z4, 2, 1)
    assert not r.same and r.holds_in == 1
    assert r.witness.premises == () and r.witness.conclusion == (term("add(x,x)", "x"), term("zero", "x"))
    assert same_quasi_identities_up_to(Z2, klein(), 2, 2).same
    assert same_quasi_identities_up_to(Z4, Z4, 2, 2).same
    with pytest.raises(ValueError):
        same_quasi_identities_up_to(Z2, Z4, 2, 1, max_premises=3)


def test_quasi_comparison_witness_replays():
    # the exponent tells Z3 from Z9 already without premises
    r = same_quasi_identities_up_to(cyclic(3), cyclic(9), 3, 1)
    assert not r.same
    ok1 = quasi_identity_holds(r.witness, cyclic(3))[0]
    ok2 = quasi_identity_holds(r.witness, cyclic(9))[0]
    assert (ok1, ok2) == ((True, False) if r.holds_in == 1 else (False, True))


# --- geometric equivalence -----------------------------------------------------------------


def test_geo_equivalence_examples():
    assert geo_equivalent(Z2, klein())
    assert geo_equivalent(Z4, Z4)
    v = geo_equivalent(Z2, Z4, oracle=True)
    assert not v and v.direction == "H2 not in SC(H1)" and v.inseparable == (0, 2)
    assert v.oracle_equivalent is False and v.system.pairs == () and v.pair_in == 1
    assert replay_closure_witness(Z2, Z4, v.system, v.pair, v.pair_in)
    assert not geo_equivalent(left_zero(2), right_zero(2))


def test_geo_equivalence_needs_common_signature():
    with pytest.raises(SignatureError):
        geo_equivalent(Z2, left_zero(2))


@settings(max_examples=40, deadline=None)
@given(small_algebras(), small_algebras())
def test_geo_equivalence_matches_oracles(A, B):
    v = geo_equivalent(A, B, oracle=True, oracle_vars=1)
    assert v.equivalent == (brute_separates(A, B) and brute_separates(B, A))
    # equivalent algebras have equal closures for every system
    if v.equivalent:
        assert v.oracle_equivalent
    if v.oracle_equivalent is False:
        assert not v.equivalent
        assert replay_closure_witness(A, B, v.system, v.pair, v.pair_in)


def test_closure_oracle_counts_systems():
    r = closure_oracle(Z2, klein(), max_vars=2)
    assert r.equivalent and r.systems_checked > 0
    with pytest.raises(ValueError):
        closure_oracle(Z2, Z4, max_pairs=3)


# --- opposites and mirrors -------------------------------------------------------------


def test_opposite_examples():
    assert opposite(left_zero(2)).tables["mul"].tolist() == right_zero(2).tables["mul"].tolist()
    assert opposite(opposite(left_zero(2))) == left_zero(2)
    M = upper_triangular_monoid()
    assert np.array_equal(opposite(M).tables["mul"], M.tables["mul"].T)
    with pytest.raises(SignatureError):
        opposite(Z2)


def test_mirror_system_examples():
    T = system("mul(x,y) = mul(z,x)", "x,y,z")
    assert mirror_system(T, left_zero(2)) == system("mul(y,x) = mul(x,z)", "x,y,z")
    assert mirror_system(mirror_system(T, "mul"), "mul") == T
    U = system("x = y", "x,y")
    assert mirror_system(U, "mul") == U


def test_mirror_transport_examples():
    H = left_zero(2)
    assert mirror_closure_transport(H, ("x", "y"), system("mul(x,y) = y", "x,y"))
    r = mirror_closure_transport_all(upper_triangular_monoid(), ("x",), 1)
    assert r.ok and r.checked > 0


# --- twists -------------------------------------------------------------------------------


def test_twist_examples():
    H = f4_algebra()
    P = H.signature.scalars
    s = frobenius(P)
    assert twist(H, frobenius_automorphisms(P)[0]) is H
    Hs = twist(H, s)
    # scale_w of the twist is scale_{w^2} of H (w = 2, w^2 = 3)
    assert np.array_equal(Hs.tables["scale_2"], H.tables["scale_3"])
    assert np.array_equal(Hs.tables["mul"], H.tables["mul"])
    assert twist(Hs, s) == H
    with pytest.raises(SignatureError):
        twist(Z2, s)
    with pytest.raises(SignatureError):
        twist(H, frobenius(gf(2, 3)))


def test_twist_bijection_one_variable():
    H = f4_algebra()
    r = twist_closure_bijection(H, frobenius(H.signature.scalars), ("x",))
    assert r.ok and r.nodes == (16, 16) and r.heights == (4, 4)
    assert sorted(r.mapping) == list(range(16))


def test_prime_field_has_only_identity_twist():
    H = field_algebra(gf(3, 1))
    (s,) = frobenius_automorphisms(H.signature.scalars)
    assert s.is_identity() and twist(H, s) is H


# --- almost equivalence ------------------------------------------------------------------


def test_almost_equivalence_examples():
    r = almost_geo_equivalent(left_zero(2), right_zero(2))
    assert r.ok and r.chain[1].startswith("opposite")
    assert almost_geo_equivalent(Z2, klein()).ok
    r = almost_geo_equivalent(Z2, Z4)
    assert not r.ok and r.tried == ["identity, twist id"]
    r = almost_geo_equivalent(f4_algebra(), f4_algebra())
    assert r.ok and r.chain[1] == "identity -> F4-alg"
