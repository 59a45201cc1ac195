"""The Galois correspondence between equation systems and point sets.

For an algebra H and variables X:

* ``solve`` sends a system T to its solution set T' in H^X;
* ``kernel_congruence`` sends a point set A to A', the congruence of
  Free(Var(H), X) relating elements that agree at every point of A;
* the closures are T'' and A''.

Systems are written over terms and mapped into the free algebra of Var(H) by
evaluation before any closure is taken.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, Partition, point_array, term_vector
from .config import DEFAULT_CAPS, Caps
from .errors import CapExceeded
from .free import FreeAlgebra, build_free
from .terms import Term, variables as term_variables


@dataclass(frozen=True)
class EquationSystem:
    variables: tuple[str, ...]
    pairs: tuple[tuple[Term, Term], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "pairs", tuple((a, b) for a, b in self.pairs))
        for a, b in self.pairs:
            for x in term_variables(a) + term_variables(b):
                if x not in self.variables:
                    raise ValueError(f"variable {x!r} not declared in {self.variables}")

    def __len__(self):
        return len(self.pairs)

    def union(self, other: "EquationSystem") -> "EquationSystem":
        vs = tuple(dict.fromkeys(self.variables + other.variables))
        return EquationSystem(vs, tuple(dict.fromkeys(self.pairs + other.pairs)))

    def __str__(self):
        eqs = "; ".join(f"{a} = {b}" for a, b in self.pairs) or "(empty)"
        return f"{{{eqs}}} over {','.join(self.variables)}"


@dataclass(frozen=True, eq=False)
class AlgebraicSet:
    """A set of points of H^X, as point indices in lexicographic order."""

    algebra: FiniteAlgebra
    variables: tuple[str, ...]
    points: frozenset[int]

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraicSet)
            and self.algebra == other.algebra
            and self.variables == other.variables
            and self.points == other.points
        )

    def __hash__(self):
        return hash((self.algebra, self.variables, self.points))

    def __le__(self, other: "AlgebraicSet") -> bool:
        return self.points <= other.points

    def __len__(self):
        return len(self.points)

    @property
    def num_points(self) -> int:
        return self.algebra.size ** len(self.variables)

    def tuples(self) -> list[tuple[int, ...]]:
        pts = point_array(self.algebra.size, len(self.variables), Caps(points=self.num_points))
        return [tuple(int(v) for v in pts[i]) for i in sorted(self.points)]

    def mask(self) -> int:
        return sum(1 << i for i in self.points)

    def is_full(self) -> bool:
        return len(self.points) == self.num_points


def point_set(H: FiniteAlgebra, variables: Sequence[str], tuples: Iterable[Sequence[int]]) -> AlgebraicSet:
    """An AlgebraicSet from explicit value tuples (closedness not implied)."""
    from .algebra import point_index

    X = tuple(variables)
    return AlgebraicSet(H, X, frozenset(point_index(t, H.size) for t in tuples))


def full_space(H: FiniteAlgebra, variables: Sequence[str]) -> AlgebraicSet:
    X = tuple(variables)
    return AlgebraicSet(H, X, frozenset(range(H.size ** len(X))))


@dataclass(frozen=True)
class ClosedCongruence:
    free: FreeAlgebra
    partition: Partition

    def same(self, a: int, b: int) -> bool:
        return self.partition.same(a, b)

    def blocks(self) -> list[list[int]]:
        return self.partition.blocks()

    def describe(self) -> list[list[str]]:
        return [[str(self.free.canonical_term(e)) for e in blk] for blk in self.blocks()]


def _solution_mask(T: EquationSystem, H: FiniteAlgebra, X: tuple[str, ...], caps: Caps) -> np.ndarray:
    pts = point_array(H.size, len(X), caps)
    ok = np.ones(len(pts), dtype=bool)
    cache: dict = {}
    for a, b in T.pairs:
        ok &= term_vector(a, H, X, caps, cache) == term_vector(b, H, X, caps, cache)
    return ok


def _vars_for(T: EquationSystem, X: Sequence[str] | None) -> tuple[str, ...]:
    if X is None:
        return T.variables
    X = tuple(X)
    missing = [x for x in T.variables if x not in X]
    if missing:
        raise ValueError(f"variables {missing} of the system are not in {X}")
    return X


def solve(T: EquationSystem, H: FiniteAlgebra, X: Sequence[str] | None = None, caps: Caps = DEFAULT_CAPS) -> AlgebraicSet:
    """T': all points at which every equation of T holds (T empty gives the whole space)."""
    X = _vars_for(T, X)
    ok = _solution_mask(T, H, X, caps)
    return AlgebraicSet(H, X, frozenset(int(i) for i in np.flatnonzero(ok)))


def _restricted_partition(F: FreeAlgebra, points: Iterable[int]) -> Partition:
    return _restricted_cached(F, frozenset(points))


@lru_cache(maxsize=4096)
def _restricted_cached(F: FreeAlgebra, points: frozenset[int]) -> Partition:
    idx = np.array(sorted(points), dtype=np.intp)
    if idx.size == 0:
        return Partition.full(F.size)
    return Partition.from_rows(F.vectors[:, idx])


def kernel_congruence(A: AlgebraicSet, caps: Caps = DEFAULT_CAPS) -> ClosedCongruence:
    """A': elements of Free(Var(H), X) identified when they agree on all of A.

    The empty set gives the full relation (the empty intersection of kernels).
    """
    F = build_free(A.algebra, A.variables, caps)
    return ClosedCongruence(F, Partition(_restricted_partition(F, A.points).labels, True))


def closure_T(T: EquationSystem, H: FiniteAlgebra, X: Sequence[str] | None = None, caps: Caps = DEFAULT_CAPS) -> ClosedCongruence:
    """T'' = (T')'."""
    return kernel_congruence(solve(T, H, X, caps), caps)


def read_back(C: ClosedCongruence) -> EquationSystem:
    """A system of canonical-term equations generating the partition:
    each block's least element equated with each other member."""
    F = C.free
    pairs = [(F.canonical_term(blk[0]), F.canonical_term(e)) for blk in C.blocks() for e in blk[1:]]
    return EquationSystem(F.variables, tuple(pairs))


def congruence_solutions(C: ClosedCongruence) -> AlgebraicSet:
    """C' for a congruence: the points at which every pair of C holds, i.e.
    where all vectors of each block agree. Same set as solve(read_back(C))."""
    F = C.free
    return AlgebraicSet(F.base, F.variables, _solutions_cached(F, C.partition.labels))


@lru_cache(maxsize=4096)
def _solutions_cached(F: FreeAlgebra, labels: tuple[int, ...]) -> frozenset[int]:
    lab = np.asarray(labels, dtype=np.intp)
    first = np.unique(lab, return_index=True)[1]
    ok = (F.vectors == F.vectors[first[lab]]).all(axis=0)
    return frozenset(int(i) for i in np.flatnonzero(ok))


def closure_A(A: AlgebraicSet, caps: Caps = DEFAULT_CAPS) -> AlgebraicSet:
    """A'' = (A')'."""
    return congruence_solutions(kernel_congruence(A, caps))


def membership(w0: Term, w1: Term, T: EquationSystem, H: FiniteAlgebra, X: Sequence[str] | None = None, caps: Caps = DEFAULT_CAPS) -> bool:
    """Whether the quasi-identity (AND of T) => w0 = w1 holds in H, equivalently
    whether (w0, w1) lies in T''."""
    X = _vars_for(T, X)
    for x in term_variables(w0) + term_variables(w1):
        if x not in X:
            raise ValueError(f"variable {x!r} not in {X}")
    ok = _solution_mask(T, H, X, caps)
    a = term_vector(w0, H, X, caps)
    b = term_vector(w1, H, X, caps)
    return bool(np.all(a[ok] == b[ok]))


def closure_contains(C: ClosedCongruence, w0: Term, w1: Term) -> bool:
    return C.same(C.free.element(w0), C.free.element(w1))


def is_closed(F: FreeAlgebra, P: Partition, caps: Caps = DEFAULT_CAPS) -> tuple[bool, str]:
    """Whether P is an H-closed congruence of F, i.e. P = P''.

    Returns (verdict, reason); the reason names the failing check.
    """
    if P.n != F.size:
        return False, "partition size does not match the free algebra"
    v = P.congruence_violation(F.algebra)
    if v is not None:
        op, a, b = v
        return False, f"not a congruence: {op} maps related arguments {a}, {b} to unrelated elements"
    sol = congruence_solutions(ClosedCongruence(F, P))
    closed = _restricted_partition(F, sol.points)
    if closed.labels != P.labels:
        return False, "congruence is not closed: its closure is strictly larger"
    return True, "closed"


# --- lattices ------------------------------------------------------------------


@dataclass
class LatticeReport:
    """Closed sets of H^X (ordered by size, then by point tuple) together with
    the anti-isomorphic lattice of closed congruences A -> A'."""

    algebra: FiniteAlgebra
    free: FreeAlgebra
    variables: tuple[str, ...]
    nodes: list[frozenset[int]]
    congruences: list[Partition]
    edges: list[tuple[int, int]]  # (i, j): node i covered by node j
    meet: list[list[int]]
    join: list[list[int]]
    labels: list[list[tuple[Term, Term]]] = field(default_factory=list)

    @property
    def height(self) -> int:
        return longest_chain(self)[0] - 1

    def __len__(self):
        return len(self.nodes)

    def algebraic_set(self, i: int) -> AlgebraicSet:
        return AlgebraicSet(self.algebra, self.variables, self.nodes[i])

    def index_of(self, points: Iterable[int]) -> int:
        return self.nodes.index(frozenset(points))

    def label_text(self, i: int) -> str:
        if not self.labels[i]:
            return "(whole space)"
        return " & ".join(f"{a} = {b}" for a, b in self.labels[i])

    def check_anti_isomorphism(self) -> bool:
        n = len(self.nodes)
        if len({c.labels for c in self.congruences}) != n:
            return False
        for i in range(n):
            for j in range(n):
                if (self.nodes[i] <= self.nodes[j]) != self.congruences[j].refines(self.congruences[i]):
                    return False
        return True


def _mask_to_set(mask: int) -> frozenset[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def single_equation_masks(F: FreeAlgebra, caps: Caps = DEFAULT_CAPS) -> dict[int, tuple[int, int]]:
    """Solution set (as a bit mask over points) of every equation e = e'
    between free elements, mapped to the first pair (e < e') producing it."""
    N, P = F.size, F.num_points
    if N * (N - 1) // 2 > caps.pairs:
        raise CapExceeded("element pairs", caps.pairs, N * (N - 1) // 2)
    weights = [1 << i for i in range(P)]
    out: dict[int, tuple[int, int]] = {}
    V = F.vectors
    for i in range(N - 1):
        eq = V[i + 1 :] == V[i]
        if P <= 62:
            masks = (eq.astype(np.int64) @ np.array(weights, dtype=np.int64)).tolist()
        else:
            masks = [int.from_bytes(np.packbits(r, bitorder="little").tobytes(), "little") for r in eq]
        for off, m in enumerate(masks):
            if m not in out:
                out[m] = (i, i + 1 + off)
    return out



def algebraic_set_lattice(H: FiniteAlgebra, X: Sequence[str], caps: Caps = DEFAULT_CAPS) -> LatticeReport:
    """All closed sets of H^X with their Hasse diagram.

    Closed sets are exactly the intersections of single-equation solution
    sets (T' is the intersection over the pairs of T), plus the whole space.
    """
    X = tuple(X)
    F = build_free(H, X, caps)
    P = F.num_points
    full = (1 << P) - 1
    singles = single_equation_masks(F, caps)
    gens = sorted(set(singles) | {full})
    closed = set(gens)
    frontier = list(closed)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                m = a & g
                if m not in closed:
                    closed.add(m)
                    nxt.append(m)
        frontier = nxt
    nodes = sorted((_mask_to_set(m) for m in closed), key=lambda s: (len(s), sorted(s)))
    masks = [sum(1 << i for i in s) for s in nodes]
    pos = {m: i for i, m in enumerate(masks)}
    n = len(nodes)
    below = [[(masks[i] & masks[j]) == masks[i] for j in range(n)] for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            if i != j and below[i][j] and not any(
                k not in (i, j) and below[i][k] and below[k][j] for k in range(n)
            ):
                edges.append((i, j))
    meet = [[pos[masks[i] & masks[j]] for j in range(n)] for i in range(n)]
    join = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            u = masks[i] | masks[j]
            join[i][j] = next(k for k in range(n) if (u & masks[k]) == u)
    congs = [Partition(_restricted_partition(F, s).labels, True) for s in nodes]
    labels = []
    single_items = sorted(singles.items(), key=lambda kv: kv[1])
    for m in masks:
        cur, chosen = full, []
        for sm, (a, b) in single_items:
            if m == cur:
                break
            if (sm & m) == m and (cur & sm) != cur:
                cur &= sm
                chosen.append((F.canonical_term(b), F.canonical_term(a)))
        labels.append(chosen)
    return LatticeReport(H, F, X, nodes, congs, edges, meet, join, labels)


def longest_chain(L: LatticeReport) -> tuple[int, list[int]]:
    """Length (in nodes) and witness of a longest chain, from the largest
    closed set down to the smallest, i.e. ascending in the congruences."""
    n = len(L.nodes)
    order = sorted(range(n), key=lambda i: -len(L.nodes[i]))
    best = {i: (1, [i]) for i in range(n)}
    for i in order:
        for a, b in L.edges:
            if b == i:
                cand = (best[i][0] + 1, best[i][1] + [a])
                if cand[0] > best[a][0]:
                    best[a] = cand
    length, chain = max(best.values(), key=lambda t: (t[0], [-x for x in t[1]]))
    return length, chain


@dataclass
class ChainReport:
    max_chain_length: int
    stabilizes: bool
    witness: list[int]
    note: str


def acc_report(L: LatticeReport) -> ChainReport:
    length, chain = longest_chain(L)
    return ChainReport(
        max_chain_length=length,
        stabilizes=True,
        witness=chain,
        note=f"finitely many closed congruences ({len(L.nodes)}); every ascending chain stabilizes "
        f"after at most {length} steps",
    )


def element_pairs(F: FreeAlgebra) -> list[tuple[int, int]]:
    return list(combinations(range(F.size), 2))
