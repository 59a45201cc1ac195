"""Category-level constructions: beta, rho, tau, the functor Cl_H on arrows,
alpha(phi) for automorphisms of the category of free algebras, and a bounded
slice of the category of algebraic sets with its skeleton and duality.

Arrows W1 -> W2 are FreeMorphisms; a hom-set is enumerated once, in the
lexicographic order of generator images, and relations on it are kept as
partitions of hom indices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    Partition,
    UnionFind,
    enumerate_homs,
    is_isomorphic,
    quotient,
)
from .config import DEFAULT_CAPS, Caps
from .errors import CapExceeded
from .fields import FieldAutomorphism
from .free import FreeAlgebra, FreeMorphism, all_morphisms, build_free, morphism_maps
from .galois import algebraic_set_lattice, is_closed
from .terms import mirror_term, rename_ops


def hom_set(W1: FreeAlgebra, W2: FreeAlgebra, caps: Caps = DEFAULT_CAPS) -> list[FreeMorphism]:
    return all_morphisms(W1, W2, caps)


def _all_maps(W1: FreeAlgebra, W2: FreeAlgebra, caps: Caps) -> np.ndarray:
    """Element maps of every morphism W1 -> W2, rows in hom_set order."""
    k = len(W1.variables)
    count = W2.size**k
    if count > caps.homs:
        raise CapExceeded("hom-set size |W2|^|Y|", caps.homs, count)
    images = np.indices((W2.size,) * k).reshape(k, -1).T
    return morphism_maps(W1, W2, images)


def hom_index(images: Sequence[int], target_size: int) -> int:
    """Position of the morphism with these generator images in hom_set."""
    i = 0
    for x in images:
        i = i * target_size + int(x)
    return i


@dataclass(frozen=True, eq=False)
class HomRelation:
    """An equivalence relation on Hom(W1, W2), as a partition of hom indices."""

    source: FreeAlgebra
    target: FreeAlgebra
    maps: np.ndarray  # (|Hom|, |W1|) element maps
    relation: Partition

    @property
    def homs(self) -> list[FreeMorphism]:
        return all_morphisms(self.source, self.target, Caps(homs=len(self.maps)))

    def related(self, i: int, j: int) -> bool:
        return self.relation.same(i, j)

    @property
    def pairs(self) -> set[tuple[int, int]]:
        out = set()
        for blk in self.relation.blocks():
            out.update(iproduct(blk, blk))
        return out


def beta(W1: FreeAlgebra, W2: FreeAlgebra, T: Partition, caps: Caps = DEFAULT_CAPS) -> HomRelation:
    """s1 beta s2 iff s1(w) T s2(w) for every w in W1."""
    if T.n != W2.size:
        raise ValueError("T must be a partition of the target free algebra")
    M = _all_maps(W1, W2, caps)
    lab = T.array()[M]
    return HomRelation(W1, W2, M, Partition.from_rows(lab))


def rho(W: FreeAlgebra, T: Partition, caps: Caps = DEFAULT_CAPS) -> HomRelation:
    return beta(W, W, T, caps)


@dataclass
class TauResult:
    """The relation {(nu(w), nu'(w)) : nu r nu', w in W} on W.

    ``partition`` is set when the relation is an equivalence (or was closed
    transitively under ``strict``); ``closed_transitively`` records that the
    strict closure changed it.
    """

    matrix: np.ndarray
    partition: Partition | None
    closed_transitively: bool = False

    @property
    def pairs(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in zip(*np.nonzero(self.matrix))}


def _is_equivalence(R: np.ndarray) -> bool:
    if not R.diagonal().all() or not (R == R.T).all():
        return False
    Ri = R.astype(np.int64)
    return bool(((Ri @ Ri > 0) <= R).all())


def tau(W: FreeAlgebra, r: HomRelation, strict: bool = False) -> TauResult:
    """tau_W(r) on W, reported without forcing transitivity.

    With ``strict`` the relation is closed to an equivalence; a warning is
    issued when that changes it.
    """
    if r.source != W or r.target != W:
        raise ValueError("tau needs a relation on End(W)")
    N = W.size
    R = np.zeros((N, N), dtype=bool)
    for blk in r.relation.blocks():
        sub = r.maps[blk]  # (|blk|, N)
        for w in range(N):
            vals = np.unique(sub[:, w])
            R[np.ix_(vals, vals)] = True
    if _is_equivalence(R):
        labels = [int(np.argmax(R[i])) for i in range(N)]
        return TauResult(R, Partition.from_labels(labels))
    if not strict:
        return TauResult(R, None)
    uf = UnionFind(N)
    for a, b in zip(*np.nonzero(R)):
        uf.union(int(a), int(b))
    warnings.warn("tau: relation was not an equivalence; closed transitively", stacklevel=2)
    return TauResult(R, uf.partition(), True)


def cl_on_morphism(s: FreeMorphism, T: Partition) -> Partition:
    """Cl_H(s)(T) = s^-1 T on the source of s."""
    if T.n != s.target.size:
        raise ValueError("T must be a partition of the target of s")
    return Partition(Partition.from_labels(T.array()[s.map].tolist()).labels, True)


def image_partition(P: Partition, c: np.ndarray, n: int) -> Partition:
    """Blockwise image of P under a bijection c: range(P.n) -> range(n)."""
    lab = np.full(n, -1, dtype=np.intp)
    lab[c] = P.array()
    if (lab < 0).any():
        raise ValueError("map is not a bijection")
    return Partition.from_labels(lab.tolist())


# --- automorphisms of the category of free algebras ------------------------------


def _inverse(c: np.ndarray) -> np.ndarray:
    inv = np.empty_like(c)
    inv[c] = np.arange(len(c))
    return inv


@dataclass(frozen=True)
class AutomorphismSpec:
    """An automorphism phi of the (bounded) category of free algebras.

    kind is one of "identity", "inner", "twist", "mirror", "composite".
    Each acts on an object W through a bijection c_W: W -> phi(W) and on
    arrows by nu -> c nu c^-1:

    * inner: phi(W) = W and c_W = s_W, a bijective endomorphism from ``family``;
    * twist: phi(W) = Free(H^sigma, X), c_W = sigma_W applying sigma to scalars;
    * mirror: phi(W) = Free(H^op, X), c_W = the mirror map on canonical terms;
    * composite: ``parts`` applied left to right.
    """

    kind: str
    family: Callable[[FreeAlgebra], FreeMorphism] | None = None
    sigma: FieldAutomorphism | None = None
    parts: tuple["AutomorphismSpec", ...] = ()
    label: str = ""

    @staticmethod
    def identity() -> "AutomorphismSpec":
        return AutomorphismSpec("identity", label="id")

    @staticmethod
    def inner(family: Callable[[FreeAlgebra], FreeMorphism], label: str = "inner") -> "AutomorphismSpec":
        return AutomorphismSpec("inner", family=family, label=label)

    @staticmethod
    def twist(sigma: FieldAutomorphism) -> "AutomorphismSpec":
        return AutomorphismSpec("twist", sigma=sigma, label=f"twist{sigma.perm}")

    @staticmethod
    def mirror() -> "AutomorphismSpec":
        return AutomorphismSpec("mirror", label="mirror")

    @staticmethod
    def composite(*parts: "AutomorphismSpec") -> "AutomorphismSpec":
        return AutomorphismSpec("composite", parts=tuple(parts), label=" ; ".join(p.label for p in parts))

    def on_object(self, W: FreeAlgebra, caps: Caps = DEFAULT_CAPS) -> tuple[FreeAlgebra, np.ndarray]:
        if self.kind == "identity":
            return W, np.arange(W.size)
        if self.kind == "inner":
            s = self.family(W)
            if s.source != W or s.target != W:
                raise ValueError("inner family must give endomorphisms s_W of W")
            if not s.is_bijective():
                raise ValueError(f"s_W = ({s.describe()}) is not an isomorphism")
            return W, np.array(s.map)
        if self.kind == "twist":
            from .equiv import twist

            P = W.base.signature.scalars
            ren = {P.scale_symbol(l): P.scale_symbol(self.sigma(l)) for l in range(P.order)}
            W2 = build_free(twist(W.base, self.sigma), W.variables, caps)
            return W2, np.array([W2.element(rename_ops(W.canonical_term(e), ren)) for e in range(W.size)])
        if self.kind == "mirror":
            from .equiv import opposite

            p = W.base.signature.product
            W2 = build_free(opposite(W.base), W.variables, caps)
            return W2, np.array([W2.element(mirror_term(W.canonical_term(e), p)) for e in range(W.size)])
        if self.kind == "composite":
            cur, c = W, np.arange(W.size)
            for part in self.parts:
                cur, c2 = part.on_object(cur, caps)
                c = c2[c]
            return cur, c
        raise ValueError(f"unknown automorphism kind {self.kind!r}")

    def on_arrows(self, W: FreeAlgebra, maps: np.ndarray, caps: Caps = DEFAULT_CAPS) -> tuple[FreeAlgebra, np.ndarray]:
        """Images phi(nu) = c nu c^-1 of endomorphisms of W given by their
        element maps; returns phi(W) and the hom_set indices of the images.
        Each image is checked to be a morphism of phi(W)."""
        W2, c = self.on_object(W, caps)
        if len(set(c.tolist())) != W.size or W2.size != W.size:
            raise ValueError("object map is not a bijection")
        cinv = _inverse(c)
        conj = c[maps[:, cinv]]  # (m, |W2|)
        gens = list(W2.generators)
        images = conj[:, gens]
        if not np.array_equal(morphism_maps(W2, W2, images), conj):
            raise ValueError(f"{self.label}: conjugated arrow is not a morphism of {W2!r}")
        weights = np.array([W2.size ** (len(gens) - 1 - j) for j in range(len(gens))], dtype=np.int64)
        return W2, images.astype(np.int64) @ weights


def generator_transposition(i: int = 0, j: int = 1) -> AutomorphismSpec:
    """Inner automorphism with s_W swapping generators i and j (identity when
    W has fewer generators)."""

    def family(W: FreeAlgebra) -> FreeMorphism:
        g = list(W.generators)
        if max(i, j) < len(g):
            g[i], g[j] = g[j], g[i]
        return FreeMorphism(W, W, tuple(g))

    return AutomorphismSpec.inner(family, label=f"swap(x{i},x{j})")


def alpha(phi: AutomorphismSpec, W: FreeAlgebra, T: Partition, caps: Caps = DEFAULT_CAPS, check_closed: bool = True) -> tuple[FreeAlgebra, Partition]:
    """alpha(phi)_W(T) = tau_{phi(W)} phi(rho_W(T)).

    Returns phi(W) and the resulting partition, which is asserted to be a
    closed congruence there.
    """
    r = rho(W, T, caps)
    W2, idx = phi.on_arrows(W, r.maps, caps)
    M2 = _all_maps(W2, W2, caps)
    lab = np.empty(len(M2), dtype=np.intp)
    lab[idx] = r.relation.array()
    moved = HomRelation(W2, W2, M2, Partition.from_labels(lab.tolist()))
    res = tau(W2, moved)
    if res.partition is None:
        raise AssertionError("alpha: tau of a transported rho is not an equivalence")
    if check_closed:
        ok, why = is_closed(W2, res.partition, caps)
        if not ok:
            raise AssertionError(f"alpha: result is not a closed congruence ({why})")
    return W2, res.partition


@dataclass
class InnerReport:
    ok: bool
    checked: int
    failures: list[str] = field(default_factory=list)


def verify_inner_equivalence(phi: AutomorphismSpec, H: FiniteAlgebra, max_vars: int, caps: Caps = DEFAULT_CAPS) -> InnerReport:
    """For every W = Free(H, x1..xk), k <= max_vars, and every closed T on W:
    alpha(phi)_W(T) = s_W T, and s_W T is closed."""
    if phi.kind != "inner":
        raise ValueError("an inner automorphism is required")
    names = _var_names(max_vars)
    report = InnerReport(True, 0)
    for k in range(1, max_vars + 1):
        L = algebraic_set_lattice(H, names[:k], caps)
        W = L.free
        _, c = phi.on_object(W, caps)
        for n, T in enumerate(L.congruences):
            report.checked += 1
            sT = image_partition(T, c, W.size)
            _, a = alpha(phi, W, T, caps, check_closed=False)
            if a.labels != sT.labels:
                report.failures.append(f"|X|={k}, node {n}: alpha(phi)(T) != s_W T")
            elif not is_closed(W, sT, caps)[0]:
                report.failures.append(f"|X|={k}, node {n}: s_W T is not closed")
    report.ok = not report.failures
    return report


def _var_names(k: int) -> tuple[str, ...]:
    base = ("x", "y", "z", "u", "v", "w")
    return base[:k] if k <= len(base) else tuple(f"x{i}" for i in range(1, k + 1))


# --- a bounded slice of the category of algebraic sets --------------------------------


@dataclass
class SliceObject:
    variables: tuple[str, ...]
    points: tuple[int, ...]  # closed set, sorted point indices
    free: FreeAlgebra
    congruence: Partition  # A'
    dual: FiniteAlgebra  # W(X)/A'
    projection: Homomorphism
    label: str = ""

    def point_tuples(self) -> list[tuple[int, ...]]:
        pts = self.free.points
        return [tuple(int(v) for v in pts[i]) for i in self.points]


@dataclass
class Arrow:
    """An arrow [s]: (X,A) -> (Y,B), stored as its point map A -> B together
    with the first representative s: W(Y) -> W(X) inducing it."""

    source: int
    target: int
    point_map: tuple[int, ...]  # image of each point of A (in order) as a point index of H^Y
    rep: FreeMorphism


@dataclass
class CategorySlice:
    algebra: FiniteAlgebra
    max_vars: int
    objects: list[SliceObject]
    arrows: dict[tuple[int, int], list[Arrow]]
    skeleton: list[list[int]]
    composition: dict[tuple[int, int, int], dict[tuple[int, int], int]] = field(default_factory=dict)

    def hom(self, i: int, j: int) -> list[Arrow]:
        return self.arrows[(i, j)]

    def identity(self, i: int) -> int:
        A = self.objects[i]
        ident = tuple(A.points)
        return next(n for n, a in enumerate(self.arrows[(i, i)]) if a.point_map == ident)

    def compose(self, i: int, j: int, k: int, f: int, g: int) -> int:
        """g after f for f: i -> j, g: j -> k (arrow indices)."""
        fa, ga = self.arrows[(i, j)][f], self.arrows[(j, k)][g]
        B = self.objects[j].points
        pos = {p: n for n, p in enumerate(B)}
        pm = tuple(ga.point_map[pos[p]] for p in fa.point_map)
        for n, a in enumerate(self.arrows[(i, k)]):
            if a.point_map == pm:
                return n
        raise AssertionError("composite of arrows is not an arrow")

    def isomorphic(self, i: int, j: int) -> bool:
        for f in range(len(self.arrows[(i, j)])):
            for g in range(len(self.arrows[(j, i)])):
                if self.compose(i, j, i, f, g) == self.identity(i) and self.compose(j, i, j, g, f) == self.identity(j):
                    return True
        return False

    def class_of(self, i: int) -> int:
        return next(n for n, c in enumerate(self.skeleton) if i in c)


def _induced_point_maps(X_obj: SliceObject, Y_free: FreeAlgebra, H: FiniteAlgebra, caps: Caps):
    """For every s: W(Y) -> W(X) (generator images in W(X), lexicographic),
    the induced map on the points of A: nu -> nu s, as point indices in H^Y."""
    W = X_obj.free
    k = len(Y_free.variables)
    count = W.size**k
    if count > caps.homs:
        raise CapExceeded("hom-set size |W(X)|^|Y|", caps.homs, count)
    A = np.array(X_obj.points, dtype=np.intp)
    R = W.vectors[:, A]  # (|W|, |A|): element values at the points of A
    images = np.indices((W.size,) * k).reshape(k, -1).T  # (count, k)
    n = H.size
    weights = np.array([n ** (k - 1 - j) for j in range(k)], dtype=np.intp)
    # point of H^Y reached from a in A: (value of s(y_j) at a)_j
    pm = np.tensordot(R[images], weights, axes=([1], [0]))  # (count, |A|)
    return images, pm


def build_category(H: FiniteAlgebra, max_vars: int, caps: Caps = DEFAULT_CAPS) -> CategorySlice:
    """Objects (X, A) for X = x1..xk (k <= max_vars), A closed; arrows are
    the distinct point maps A -> B induced by morphisms s: W(Y) -> W(X) with
    nu s in B for all nu in A; skeleton classes by isomorphism."""
    names = _var_names(max_vars)
    objects: list[SliceObject] = []
    for k in range(1, max_vars + 1):
        L = algebraic_set_lattice(H, names[:k], caps)
        for i, pts in enumerate(L.nodes):
            cong = L.congruences[i]
            Q, proj = quotient(L.free.algebra, cong)
            objects.append(SliceObject(names[:k], tuple(sorted(pts)), L.free, cong, Q, proj, L.label_text(i)))
    arrows: dict[tuple[int, int], list[Arrow]] = {}
    for i, A in enumerate(objects):
        for j, B in enumerate(objects):
            images, pm = _induced_point_maps(A, B.free, H, caps)
            Bset = np.zeros(H.size ** len(B.variables), dtype=bool)
            Bset[list(B.points)] = True
            ok = Bset[pm].all(axis=1) if pm.shape[1] else np.ones(len(pm), dtype=bool)
            seen: dict[tuple[int, ...], Arrow] = {}
            for r in np.flatnonzero(ok):
                key = tuple(int(v) for v in pm[r])
                if key not in seen:
                    rep = FreeMorphism(B.free, A.free, tuple(int(v) for v in images[r]))
                    seen[key] = Arrow(i, j, key, rep)
            arrows[(i, j)] = list(seen.values())
    S = CategorySlice(H, max_vars, objects, arrows, [])
    S.skeleton = _skeleton(S, caps)
    return S


def _skeleton(S: CategorySlice, caps: Caps) -> list[list[int]]:
    n = len(S.objects)
    uf = UnionFind(n)
    for i in range(n):
        for j in range(i + 1, n):
            if uf.find(i) == uf.find(j):
                continue
            A, B = S.objects[i], S.objects[j]
            # dual quotients must be isomorphic; arrow search confirms
            if A.dual.size != B.dual.size or is_isomorphic(A.dual, B.dual, caps) is None:
                continue
            if S.isomorphic(i, j):
                uf.union(i, j)
    return uf.partition().blocks()


@dataclass
class DualityReport:
    ok: bool
    pairs_checked: int
    counts: dict[tuple[int, int], tuple[int, int]]
    failures: list[str] = field(default_factory=list)


def dual_hom(S: CategorySlice, a: Arrow, caps: Caps = DEFAULT_CAPS) -> Homomorphism:
    """The homomorphism W(Y)/B' -> W(X)/A' induced by the representative s of an
    arrow [s]: (X,A) -> (Y,B)."""
    A, B = S.objects[a.source], S.objects[a.target]
    s = a.rep
    reps = [blk[0] for blk in B.congruence.blocks()]
    m = tuple(int(A.projection.map[s.map[r]]) for r in reps)
    return Homomorphism(B.dual, A.dual, m)


def duality_check(S: CategorySlice, caps: Caps = DEFAULT_CAPS) -> DualityReport:
    """For every object pair, [s] -> (induced W(Y)/B' -> W(X)/A') must be a
    well-defined bijection onto Hom(W(Y)/B', W(X)/A'), reversing composition."""
    rep = DualityReport(True, 0, {})
    for (i, j), arrows in sorted(S.arrows.items()):
        A, B = S.objects[i], S.objects[j]
        homs = enumerate_homs(B.dual, A.dual, caps)
        rep.counts[(i, j)] = (len(arrows), len(homs))
        rep.pairs_checked += 1
        images = []
        for a in arrows:
            # well-defined: s maps B' into A'
            lab_a, sm = A.congruence.array(), a.rep.map
            for blk in B.congruence.blocks():
                if len({int(lab_a[sm[e]]) for e in blk}) != 1:
                    rep.failures.append(f"({i},{j}): representative does not respect B'")
                    break
            h = dual_hom(S, a, caps)
            if not h.preserves():
                rep.failures.append(f"({i},{j}): induced map is not a homomorphism")
            images.append(h.map)
        if len(set(images)) != len(images):
            rep.failures.append(f"({i},{j}): distinct arrows give the same homomorphism")
        if sorted(images) != sorted(h.map for h in homs):
            rep.failures.append(f"({i},{j}): arrows {len(arrows)} vs homomorphisms {len(homs)}")
    # contravariance on composable triples
    n = len(S.objects)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for f, fa in enumerate(S.arrows[(i, j)]):
                    for g, ga in enumerate(S.arrows[(j, k)]):
                        gf = S.arrows[(i, k)][S.compose(i, j, k, f, g)]
                        hf, hg, hgf = dual_hom(S, fa, caps), dual_hom(S, ga, caps), dual_hom(S, gf, caps)
                        if tuple(hf.map[x] for x in hg.map) != hgf.map:
                            rep.failures.append(f"composition not reversed at ({i},{j},{k})")
    rep.ok = not rep.failures
    return rep

