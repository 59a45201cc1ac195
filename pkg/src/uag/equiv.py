"""Geometric equivalence, quasi-identities, opposite algebras and scalar twists.

Finite algebras are geometrically noetherian, so geometric equivalence of H1
and H2 reduces to mutual membership in SC, decided by point separation. The
closure-comparison oracle recomputes the same verdict from the definition
(T''_{H1} = T''_{H2}) inside the common free algebra Free(Var(H1 x H2), X).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra, Partition, Point, point_array, product, separates_points, term_vector
from .config import DEFAULT_CAPS, Caps
from .errors import SignatureError
from .fields import FieldAutomorphism, frobenius_automorphisms  # noqa: F401  (re-exported)
from .free import FreeAlgebra, build_free
from .galois import EquationSystem, algebraic_set_lattice, closure_T
from .terms import Term, mirror_term, rename_ops, variables as term_variables

__all__ = [
    "QuasiIdentity",
    "EquivalenceVerdict",
    "quasi_identity_holds",
    "geo_equivalent",
    "closure_oracle",
    "same_quasi_identities_up_to",
    "opposite",
    "mirror_system",
    "mirror_closure_transport",
    "mirror_closure_transport_all",
    "twist",
    "twist_closure_bijection",
    "almost_geo_equivalent",
    "frobenius_automorphisms",
]


@dataclass(frozen=True)
class QuasiIdentity:
    variables: tuple[str, ...]
    premises: tuple[tuple[Term, Term], ...]
    conclusion: tuple[Term, Term]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "premises", tuple(tuple(p) for p in self.premises))
        object.__setattr__(self, "conclusion", tuple(self.conclusion))
        for a, b in self.premises + (self.conclusion,):
            for x in term_variables(a) + term_variables(b):
                if x not in self.variables:
                    raise ValueError(f"variable {x!r} not declared in {self.variables}")

    def __str__(self):
        prem = " & ".join(f"{a} = {b}" for a, b in self.premises)
        a, b = self.conclusion
        return f"{prem} => {a} = {b}" if prem else f"{a} = {b}"

    def system(self) -> EquationSystem:
        return EquationSystem(self.variables, self.premises)


def quasi_identity_holds(q: QuasiIdentity, H: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> tuple[bool, Point | None]:
    """Whether every point satisfying all premises satisfies the conclusion.

    On failure the lexicographically first counterexample point is returned.
    """
    X = q.variables
    pts = point_array(H.size, len(X), caps)
    ok = np.ones(len(pts), dtype=bool)
    for a, b in q.premises:
        ok &= term_vector(a, H, X, caps) == term_vector(b, H, X, caps)
    c0, c1 = q.conclusion
    bad = ok & (term_vector(c0, H, X, caps) != term_vector(c1, H, X, caps))
    idx = np.flatnonzero(bad)
    if idx.size:
        return False, Point(X, tuple(int(v) for v in pts[idx[0]]))
    return True, None


# --- the common free algebra ---------------------------------------------------


def component_vectors(F: FreeAlgebra, H: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> np.ndarray:
    """Values of every element of F, read as a term function of H, at all
    points of H^X. F must be free in a variety containing H."""
    if F.base.signature.ops != H.signature.ops:
        raise SignatureError("signatures differ")
    pts = point_array(H.size, len(F.variables), caps)
    out = np.empty((F.size, len(pts)), dtype=np.intp)
    for e, r in enumerate(F.recipes):
        if r[0] == "var":
            out[e] = pts[:, r[1]]
        elif r[0] == "const":
            out[e] = int(H.tables[r[1]])
        else:
            out[e] = H.tables[r[0]][tuple(out[x] for x in r[1])]
    return out


def _masks(V: np.ndarray, pairs: np.ndarray) -> list[int]:
    """Solution masks (bit i = point i) of the equations V[a] = V[b]."""
    if len(pairs) == 0:
        return []
    eq = V[pairs[:, 0]] == V[pairs[:, 1]]
    P = V.shape[1]
    if P <= 62:
        w = np.left_shift(np.int64(1), np.arange(P, dtype=np.int64))
        return (eq.astype(np.int64) @ w).tolist()
    return [int.from_bytes(np.packbits(r, bitorder="little").tobytes(), "little") for r in eq]


def _restricted(V: np.ndarray, mask: int) -> bytes:
    idx = [i for i in range(V.shape[1]) if mask >> i & 1]
    if not idx:
        return np.zeros(V.shape[0], dtype=np.int32).tobytes()
    return np.asarray(Partition.from_rows(V[:, idx]).labels, dtype=np.int32).tobytes()


class _Common:
    """Free(Var(H1 x H2), X) with the component value vectors in H1 and H2."""

    def __init__(self, H1: FiniteAlgebra, H2: FiniteAlgebra, X: tuple[str, ...], caps: Caps):
        P = product([H1, H2], caps, name=f"{H1.name}x{H2.name}")
        self.F = build_free(P, X, caps)
        self.V = (component_vectors(self.F, H1, caps), component_vectors(self.F, H2, caps))
        self.full = tuple((1 << V.shape[1]) - 1 for V in self.V)
        self._part: dict = {}

    def partition(self, side: int, mask: int) -> bytes:
        key = (side, mask)
        if key not in self._part:
            self._part[key] = _restricted(self.V[side], mask)
        return self._part[key]

    def equation_classes(self, elements: Sequence[int]):
        """Distinct (mask1, mask2) signatures of equations between the given
        elements, each with its first pair (a < b) in colex order."""
        els = sorted(elements)
        pairs = np.array([(a, b) for j, b in enumerate(els) for a in els[:j]], dtype=np.intp).reshape(-1, 2)
        m1, m2 = _masks(self.V[0], pairs), _masks(self.V[1], pairs)
        out: dict[tuple[int, int], tuple[int, int]] = {}
        for (a, b), s in zip(pairs.tolist(), zip(m1, m2)):
            if s not in out:
                out[s] = (a, b)
        return out

    def eq_terms(self, a: int, b: int) -> tuple[Term, Term]:
        """Equation between elements a < b, larger index on the left."""
        return self.F.canonical_term(b), self.F.canonical_term(a)


@dataclass
class EquivalenceVerdict:
    """Outcome of geo_equivalent.

    ``direction`` names the failing separation ("H1 not in SC(H2)" or the
    converse) and ``inseparable`` the pair of that algebra identified by every
    homomorphism. With the oracle enabled, ``system``/``pair`` give an
    EquationSystem T and a pair in T''_{H_in} but not in T''_{H_out}, where
    ``pair_in`` is 1 or 2.
    """

    equivalent: bool
    direction: str | None = None
    inseparable: tuple[int, int] | None = None
    system: EquationSystem | None = None
    pair: tuple[Term, Term] | None = None
    pair_in: int | None = None
    oracle_equivalent: bool | None = None

    def __bool__(self):
        return self.equivalent


@dataclass
class OracleResult:
    equivalent: bool
    system: EquationSystem | None = None
    pair: tuple[Term, Term] | None = None
    pair_in: int | None = None
    systems_checked: int = 0


def closure_oracle(
    H1: FiniteAlgebra, H2: FiniteAlgebra, max_vars: int = 2, max_pairs: int = 2, caps: Caps = DEFAULT_CAPS
) -> OracleResult:
    """Brute-force T''_{H1} = T''_{H2} over all systems of at most ``max_pairs``
    equations between elements of Free(Var(H1 x H2), X), |X| <= max_vars.

    T'' in H depends on T only through its solution set in H, so systems are
    grouped by their pair of solution masks and one representative of each
    group is compared. Variable sets are tried in increasing size, systems by
    size, and the first differing system is returned with its colex-first
    pair lying in exactly one of the two closures.
    """
    names = ("x", "y", "z", "u", "v", "w")
    checked = 0
    for k in range(1, max_vars + 1):
        C = _Common(H1, H2, names[:k], caps)
        singles = C.equation_classes(range(C.F.size))
        levels: list[list[tuple[tuple[int, int], tuple]]] = [[(C.full, ())]]
        if max_pairs >= 1:
            levels.append(sorted(((s, (p,)) for s, p in singles.items()), key=lambda t: (t[1][0][1], t[1][0][0])))
        if max_pairs >= 2:
            items = sorted(singles.items(), key=lambda t: (t[1][1], t[1][0]))
            seen = {s for s, _ in levels[0] + levels[1]}
            two = []
            for (s, p), (s2, p2) in combinations(items, 2):
                m = (s[0] & s2[0], s[1] & s2[1])
                if m not in seen:
                    seen.add(m)
                    two.append((m, (p, p2)))
            levels.append(two)
        if max_pairs > 2:
            raise ValueError("the oracle enumerates at most two pairs per system")
        for level in levels:
            for (m1, m2), pairs in level:
                checked += 1
                if C.partition(0, m1) == C.partition(1, m2):
                    continue
                l1 = np.frombuffer(C.partition(0, m1), dtype=np.int32)
                l2 = np.frombuffer(C.partition(1, m2), dtype=np.int32)
                for b in range(C.F.size):
                    hit = next((a for a in range(b) if (l1[a] == l1[b]) != (l2[a] == l2[b])), None)
                    if hit is not None:
                        a = hit
                        break
                T = EquationSystem(C.F.variables, tuple(C.eq_terms(*p) for p in pairs))
                return OracleResult(False, T, C.eq_terms(a, b), 1 if l1[a] == l1[b] else 2, checked)
    return OracleResult(True, systems_checked=checked)


def geo_equivalent(H1: FiniteAlgebra, H2: FiniteAlgebra, oracle: bool = False, caps: Caps = DEFAULT_CAPS, oracle_vars: int = 2) -> EquivalenceVerdict:
    """Mutual SC membership: homomorphisms H1 -> H2 separate the points of H1
    and vice versa."""
    if H1.signature.ops != H2.signature.ops:
        raise SignatureError("geometric equivalence needs a common signature")
    ok12, w12 = separates_points(H1, H2, caps)
    ok21, w21 = separates_points(H2, H1, caps) if ok12 else (True, None)
    verdict = EquivalenceVerdict(ok12 and ok21)
    if not ok12:
        verdict.direction, verdict.inseparable = "H1 not in SC(H2)", w12
    elif not ok21:
        verdict.direction, verdict.inseparable = "H2 not in SC(H1)", w21
    if oracle:
        r = closure_oracle(H1, H2, oracle_vars, 2, caps)
        verdict.oracle_equivalent = r.equivalent
        verdict.system, verdict.pair, verdict.pair_in = r.system, r.pair, r.pair_in
    return verdict


def replay_closure_witness(H1, H2, system: EquationSystem, pair, pair_in: int, caps: Caps = DEFAULT_CAPS) -> bool:
    """Re-check that ``pair`` lies in T'' for algebra ``pair_in`` only."""
    from .galois import membership

    inside, outside = (H1, H2) if pair_in == 1 else (H2, H1)
    return membership(pair[0], pair[1], system, inside, caps=caps) and not membership(
        pair[0], pair[1], system, outside, caps=caps
    )


# --- quasi-identities ------------------------------------------------------------


@dataclass
class QuasiComparison:
    same: bool
    witness: QuasiIdentity | None = None
    holds_in: int | None = None  # 1 or 2: the algebra where the witness holds
    classes_compared: int = 0


def same_quasi_identities_up_to(
    H1: FiniteAlgebra,
    H2: FiniteAlgebra,
    depth: int,
    nvars: int,
    max_premises: int = 2,
    caps: Caps = DEFAULT_CAPS,
) -> QuasiComparison:
    """Compare H1 and H2 on every quasi-identity with at most ``max_premises``
    premises, terms of depth <= ``depth`` and at most ``nvars`` variables.

    Terms are taken up to equality in Var(H1 x H2) (elements of the common
    free algebra whose least term depth is bounded); this loses nothing since
    equal terms there are equal in both algebras. Quasi-identities are ordered
    by (variable count, total depth, premise count, premises and conclusion as
    element-index pairs written larger index first). A quasi-identity holds iff the premise mask is
    contained in the conclusion mask, so only distinct mask signatures need
    comparing; each signature keeps its least representative.
    """
    if max_premises > 2:
        raise ValueError("at most two premises are supported")
    names = ("x", "y", "z", "u", "v", "w")
    for k in range(1, nvars + 1):
        C = _Common(H1, H2, names[:k], caps)
        d = C.F.depths
        els = [e for e in range(C.F.size) if d[e] <= depth]
        # equation classes with a least (depth, pair) representative
        pairs = np.array([(a, b) for j, b in enumerate(els) for a in els[:j]], dtype=np.intp).reshape(-1, 2)
        m1, m2 = _masks(C.V[0], pairs), _masks(C.V[1], pairs)
        eqs: dict[tuple[int, int], tuple[int, tuple[int, int]]] = {}
        for (a, b), s in zip(pairs.tolist(), zip(m1, m2)):
            key = (max(d[a], d[b]), (b, a))
            if s not in eqs or key < eqs[s]:
                eqs[s] = key
        # premise sets: key (depth sum, count, sorted pairs)
        prem: dict[tuple[int, int], tuple] = {C.full: (0, 0, ())}
        items = sorted(eqs.items(), key=lambda t: t[1])
        if max_premises >= 1:
            for s, (dd, p) in items:
                key = (dd, 1, (p,))
                if s not in prem or key < prem[s]:
                    prem[s] = key
        if max_premises >= 2:
            for (s, (da, pa)), (s2, (db, pb)) in combinations(items, 2):
                m = (s[0] & s2[0], s[1] & s2[1])
                key = (da + db, 2, tuple(sorted((pa, pb))))
                if m not in prem or key < prem[m]:
                    prem[m] = key
        best = None
        concl = [(s, key) for s, key in items]
        for (p1, p2), pkey in prem.items():
            for (c1, c2), (dc, pc) in concl:
                h1 = (p1 & c1) == p1
                h2 = (p2 & c2) == p2
                if h1 != h2:
                    key = (pkey[0] + dc, pkey[1], pkey[2], pc)
                    if best is None or key < best[0]:
                        best = (key, 1 if h1 else 2)
        if best is not None:
            (_, _, ps, pc), holds = best
            q = QuasiIdentity(C.F.variables, tuple(C.eq_terms(p[1], p[0]) for p in ps), C.eq_terms(pc[1], pc[0]))
            return QuasiComparison(False, q, holds, len(prem) * len(concl))
    return QuasiComparison(True)


# --- opposite algebras and mirror maps ---------------------------------------------


def _product_symbol(x) -> str:
    sig = x.signature if isinstance(x, FiniteAlgebra) else x
    if isinstance(sig, str):
        return sig
    if sig.product is None:
        raise SignatureError("no reversible product designated in the signature")
    return sig.product


def opposite(H: FiniteAlgebra) -> FiniteAlgebra:
    """H with the designated product reversed: a o b = b . a."""
    p = _product_symbol(H)
    name = H.name[:-3] if H.name.endswith("^op") else f"{H.name}^op"
    return H.with_tables(name, **{p: np.ascontiguousarray(H.tables[p].T)})


def mirror_system(T: EquationSystem, signature) -> EquationSystem:
    """Swap the operands of every product node, recursively.

    ``signature`` is a Signature, an algebra, or the product symbol itself.
    """
    p = _product_symbol(signature)
    return EquationSystem(T.variables, tuple((mirror_term(a, p), mirror_term(b, p)) for a, b in T.pairs))


def mirror_map(F: FreeAlgebra, Fop: FreeAlgebra) -> np.ndarray:
    """Element map Free(H,X) -> Free(H^op,X), u -> mirror(u) on canonical terms."""
    p = _product_symbol(F.base)
    return np.array([Fop.element(mirror_term(F.canonical_term(e), p)) for e in range(F.size)], dtype=np.intp)


def _image_partition(P: Partition, m: np.ndarray, n: int) -> Partition:
    """Blockwise image of P under an injective element map m into range(n)."""
    lab = np.full(n, -1, dtype=np.intp)
    lab[m] = P.array()
    if (lab < 0).any():
        raise ValueError("element map is not surjective")
    return Partition.from_labels(lab.tolist())


@dataclass
class TransportResult:
    ok: bool
    checked: int = 0
    failure: EquationSystem | None = None
    detail: str = ""


def mirror_closure_transport(H: FiniteAlgebra, X: Sequence[str], T: EquationSystem, caps: Caps = DEFAULT_CAPS) -> bool:
    """The mirror map carries T'' (in H) blockwise onto mirror(T)'' (in H^op)."""
    X = tuple(X)
    Hop = opposite(H)
    C1 = closure_T(T, H, X, caps)
    C2 = closure_T(mirror_system(T, H), Hop, X, caps)
    m = mirror_map(C1.free, C2.free)
    if len(set(m.tolist())) != C1.free.size or C1.free.size != C2.free.size:
        return False
    return _image_partition(C1.partition, m, C2.free.size).labels == C2.partition.labels


def mirror_closure_transport_all(H: FiniteAlgebra, X: Sequence[str], max_pairs: int = 2, caps: Caps = DEFAULT_CAPS) -> TransportResult:
    """mirror_closure_transport for every system of at most ``max_pairs``
    equations between canonical terms of Free(H, X).

    A system's solution set is the intersection of those of its equations,
    so the check runs in two stages: every single equation u = u' must have
    the same solution set in H as mirror(u) = mirror(u') in H^op, and then the
    closures are compared once per distinct intersection of at most
    ``max_pairs`` solution sets. ``checked`` counts the systems covered.
    """
    X = tuple(X)
    Hop = opposite(H)
    p = _product_symbol(H)
    F = build_free(H, X, caps)
    Fop = build_free(Hop, X, caps)
    m = mirror_map(F, Fop)
    if F.size != Fop.size or len(set(m.tolist())) != F.size:
        return TransportResult(False, 0, None, "mirror map is not a bijection of the free algebras")
    pairs = np.array([(a, b) for b in range(F.size) for a in range(b)], dtype=np.intp).reshape(-1, 2)
    ms = _masks(F.vectors, pairs)
    # the mirrored equation evaluated in H^op, through its own terms
    mop = [0] * len(pairs)
    for n, (a, b) in enumerate(pairs.tolist()):
        ta = mirror_term(F.canonical_term(a), p)
        tb = mirror_term(F.canonical_term(b), p)
        eq = term_vector(ta, Hop, X, caps) == term_vector(tb, Hop, X, caps)
        mop[n] = sum(1 << i for i in np.flatnonzero(eq).tolist())
        if mop[n] != ms[n]:
            T = EquationSystem(X, ((F.canonical_term(b), F.canonical_term(a)),))
            return TransportResult(False, n, T, "solution sets of an equation and its mirror differ")
    full = (1 << F.num_points) - 1
    masks = {full}
    level = {full}
    distinct = sorted(set(ms))
    for _ in range(max_pairs):
        level = {a & b for a in level for b in distinct}
        masks |= level
    for mk in sorted(masks):
        idx = [i for i in range(F.num_points) if mk >> i & 1]
        P1 = Partition.full(F.size) if not idx else Partition.from_rows(F.vectors[:, idx])
        P2 = Partition.full(Fop.size) if not idx else Partition.from_rows(Fop.vectors[:, idx])
        if _image_partition(P1, m, Fop.size).labels != P2.labels:
            return TransportResult(False, 0, None, f"closures differ on the solution set with mask {mk:#x}")
    E = len(pairs)
    total = sum(comb(E, r) for r in range(max_pairs + 1))
    return TransportResult(True, total, None, f"{len(masks)} distinct solution sets")


# --- scalar twists -------------------------------------------------------------


def twist(H: FiniteAlgebra, sigma: FieldAutomorphism) -> FiniteAlgebra:
    """H^sigma: scale_l of H^sigma is scale_{sigma^-1(l)} of H; the rest is unchanged."""
    P = H.signature.scalars
    if P is None:
        raise SignatureError("twist needs a scalar block")
    if sigma.field != P:
        raise SignatureError("automorphism of a different field")
    if sigma.is_identity():
        return H
    inv = sigma.inverse()
    changes = {P.scale_symbol(l): H.tables[P.scale_symbol(inv(l))] for l in range(P.order)}
    return H.with_tables(f"{H.name}^s{''.join(map(str, sigma.perm))}", **changes)


def sigma_on_terms(sigma: FieldAutomorphism):
    """sigma_W: apply sigma to the scalar symbols of a term."""
    P = sigma.field
    ren = {P.scale_symbol(l): P.scale_symbol(sigma(l)) for l in range(P.order)}
    return lambda t: rename_ops(t, ren)


@dataclass
class BijectionResult:
    ok: bool
    nodes: tuple[int, int] = (0, 0)
    heights: tuple[int, int] = (0, 0)
    detail: str = ""
    mapping: list[int] = field(default_factory=list)  # node i of H -> node of H^sigma


def twist_closure_bijection(H: FiniteAlgebra, sigma: FieldAutomorphism, X: Sequence[str], caps: Caps = DEFAULT_CAPS) -> BijectionResult:
    """Check that T -> sigma_W T maps the closed congruences of H onto those
    of H^sigma, preserving and reflecting inclusion."""
    X = tuple(X)
    Hs = twist(H, sigma)
    L1, L2 = algebraic_set_lattice(H, X, caps), algebraic_set_lattice(Hs, X, caps)
    F1, F2 = L1.free, L2.free
    sw = sigma_on_terms(sigma)
    m = np.array([F2.element(sw(F1.canonical_term(e))) for e in range(F1.size)], dtype=np.intp)
    res = BijectionResult(False, (len(L1), len(L2)), (L1.height, L2.height))
    if F1.size != F2.size or len(set(m.tolist())) != F1.size:
        res.detail = "sigma_W is not a bijection of the free algebras"
        return res
    pos = {c.labels: i for i, c in enumerate(L2.congruences)}
    mapping = []
    for i, c in enumerate(L1.congruences):
        img = _image_partition(c, m, F2.size)
        if img.labels not in pos:
            res.detail = f"image of closed congruence {i} is not closed for the twisted algebra"
            return res
        mapping.append(pos[img.labels])
    if sorted(mapping) != list(range(len(L2))):
        res.detail = "map on closed congruences is not a bijection"
        return res
    for i in range(len(L1)):
        for j in range(len(L1)):
            a = L1.congruences[i].refines(L1.congruences[j])
            b = L2.congruences[mapping[i]].refines(L2.congruences[mapping[j]])
            if a != b:
                res.detail = f"order not preserved between nodes {i} and {j}"
                return res
    res.ok, res.mapping, res.detail = True, mapping, "order-isomorphism verified"
    return res


# --- almost geometric equivalence ------------------------------------------------


@dataclass
class ChainReport:
    ok: bool
    chain: list[str]
    tried: list[str]


def almost_geo_equivalent(H1: FiniteAlgebra, H2: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> ChainReport:
    """Search H1 ~ H (identity or opposite), H -> H' = H^sigma, H' geo-equivalent to H2.

    Isomorphic copies of H1 are not enumerated: isomorphic algebras are
    geometrically equivalent, so they cannot produce new verdicts.
    """
    firsts = [("identity", H1)]
    if H1.signature.product is not None:
        firsts.append(("opposite", opposite(H1)))
    P = H1.signature.scalars
    sigmas = frobenius_automorphisms(P) if P is not None else [None]
    tried = []
    for how, H in firsts:
        for s in sigmas:
            Hp = H if s is None else twist(H, s)
            label = f"{how}, twist {'id' if s is None or s.is_identity() else 'perm' + str(s.perm)}"
            tried.append(label)
            if geo_equivalent(Hp, H2, caps=caps).equivalent:
                chain = [H1.name, f"{how} -> {H.name}"]
                if s is not None:
                    chain.append(f"twist by {s.perm} -> {Hp.name}")
                chain.append(f"geometrically equivalent to {H2.name}")
                return ChainReport(True, chain, tried)
    return ChainReport(False, [], tried)
