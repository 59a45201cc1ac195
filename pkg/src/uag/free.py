"""Free algebras of Var(H) on finitely many variables, as value vectors.

An element of Free(H, X) is identified with the function it induces on the
affine space H^X: its vector of values at every point, points in lexicographic
order. Two terms are equal in the free algebra of Var(H) exactly when these
vectors agree, so equality is exact and no rewriting is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product as iproduct
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra, point_array
from .config import DEFAULT_CAPS, Caps
from .errors import CapExceeded, SignatureError, UnboundVariable
from .terms import App, Term, Var


def _key_function(n: int, width: int):
    """Hashable key per row of an (m, width) array of values in range(n)."""
    if n == 1:
        return lambda rows: [0] * len(rows)
    if width * int(np.ceil(np.log2(n))) <= 62:
        weights = np.array([n ** (width - 1 - j) for j in range(width)], dtype=np.int64)
        return lambda rows: (rows.astype(np.int64) @ weights).tolist()
    return lambda rows: [r.tobytes() for r in np.ascontiguousarray(rows, dtype=np.int16)]


class FreeAlgebra:
    """Free(Var(H), X): elements in BFS discovery order, each with a witness term.

    ``recipes[e]`` is ("var", i), ("const", op) or (op, argument indices) and
    records how e was first produced; ``witnesses[e]`` is the matching term.
    ``algebra`` is the free algebra itself as a FiniteAlgebra on element indices.
    """

    def __init__(self, base, variables, vectors, recipes, witnesses, depths, tables):
        self.base: FiniteAlgebra = base
        self.variables: tuple[str, ...] = tuple(variables)
        self.vectors: np.ndarray = vectors
        self.vectors.flags.writeable = False
        self.recipes: tuple = tuple(recipes)
        self.witnesses: tuple[Term, ...] = tuple(witnesses)
        self.depths: tuple[int, ...] = tuple(depths)
        self.algebra = FiniteAlgebra(base.signature, len(recipes), tables, f"Free({base.name};{','.join(self.variables)})")
        self._keyf = _key_function(base.size, vectors.shape[1])
        self._index = {k: i for i, k in enumerate(self._keyf(vectors))}
        self._elements: dict[Term, int] = {}

    def __eq__(self, other):
        return isinstance(other, FreeAlgebra) and (self.base, self.variables) == (other.base, other.variables)

    def __hash__(self):
        return hash((self.base, self.variables))

    def __repr__(self):
        return f"FreeAlgebra({self.base.name}, {self.variables}, size={self.size})"

    @property
    def size(self) -> int:
        return len(self.recipes)

    @property
    def num_points(self) -> int:
        return self.vectors.shape[1]

    @cached_property
    def generators(self) -> tuple[int, ...]:
        return tuple(self.index_of(self.points[:, i]) for i in range(len(self.variables)))

    @cached_property
    def points(self) -> np.ndarray:
        return point_array(self.base.size, len(self.variables), Caps(points=self.num_points))

    def index_of(self, vector) -> int:
        vec = np.asarray(vector, dtype=np.intp).reshape(1, -1)
        return self._index[self._keyf(vec)[0]]

    def indices_of(self, rows: np.ndarray) -> np.ndarray:
        return np.array([self._index[k] for k in self._keyf(rows)], dtype=np.intp)

    def element(self, term: Term) -> int:
        """Index of the element a term over the variables denotes, evaluated
        in the free algebra's own tables (memoized per term)."""
        memo = self._elements
        e = memo.get(term)
        if e is not None:
            return e
        if isinstance(term, Var):
            if term.name not in self.variables:
                raise UnboundVariable(f"variable {term.name!r} not in {self.variables}")
            e = self.generators[self.variables.index(term.name)]
        else:
            ar = self.base.signature.arity(term.op)
            if ar != len(term.args):
                raise SignatureError(f"{term.op} has arity {ar}, applied to {len(term.args)} arguments")
            t = self.algebra.tables[term.op]
            e = int(t) if ar == 0 else int(t[tuple(self.element(a) for a in term.args)])
        memo[term] = e
        return e

    def canonical_term(self, e: int) -> Term:
        return self.witnesses[e]


def canonical_term(F: FreeAlgebra, e: int) -> Term:
    return F.canonical_term(e)


@lru_cache(maxsize=128)
def _build_free(H: FiniteAlgebra, X: tuple[str, ...], caps: Caps) -> FreeAlgebra:
    pts = point_array(H.size, len(X), caps)
    P = len(pts)
    keyf = _key_function(H.size, P)
    vecs: list[np.ndarray] = []
    index: dict = {}
    recipes: list[tuple] = []
    wit: list[Term] = []
    depths: list[int] = []
    entries: dict[str, list] = {op: [] for op, _ in H.signature.ops}

    def add(vec, key, recipe, term, d) -> int:
        index[key] = len(vecs)
        vecs.append(vec)
        recipes.append(recipe)
        wit.append(term)
        depths.append(d)
        if len(vecs) > caps.free:
            raise CapExceeded("free algebra elements", caps.free, len(vecs))
        return len(vecs) - 1

    for i, x in enumerate(X):
        col = np.ascontiguousarray(pts[:, i])
        k = keyf(col[None, :])[0]
        if k not in index:
            add(col, k, ("var", i), Var(x), 0)
    for op, ar in H.signature.ops:
        if ar == 0:
            col = np.full(P, int(H.tables[op]), dtype=np.intp)
            k = keyf(col[None, :])[0]
            e = index.get(k)
            if e is None:
                e = add(col, k, ("const", op), App(op), 0)
            entries[op].append((np.zeros((1, 0), dtype=np.intp), np.array([e])))

    start, rnd = 0, 0
    while True:
        rnd += 1
        K = len(vecs)
        V = np.array(vecs, dtype=np.intp)
        grew = False
        for op, ar in H.signature.ops:
            if ar == 0:
                continue
            t = H.tables[op]
            rest = np.indices((K,) * (ar - 1)).reshape(ar - 1, -1).T if ar > 1 else np.zeros((1, 0), dtype=np.intp)
            for a in range(K):
                tuples = np.concatenate([np.full((len(rest), 1), a, dtype=np.intp), rest], axis=1)
                if a < start:
                    tuples = tuples[tuples.max(axis=1) >= start]
                if not len(tuples):
                    continue
                res = t[tuple(V[tuples[:, j]] for j in range(ar))]
                out = np.empty(len(tuples), dtype=np.intp)
                for r, k in enumerate(keyf(res)):
                    e = index.get(k)
                    if e is None:
                        args = tuple(int(x) for x in tuples[r])
                        e = add(res[r].copy(), k, (op, args), App(op, tuple(wit[x] for x in args)), rnd)
                        grew = True
                    out[r] = e
                entries[op].append((tuples, out))
        if not grew:
            break
        start = K

    N = len(vecs)
    tables = {}
    for op, ar in H.signature.ops:
        if ar == 0:
            tables[op] = int(entries[op][0][1][0])
            continue
        tab = np.full((N,) * ar, -1, dtype=np.intp)
        for tuples, out in entries[op]:
            tab[tuple(tuples.T)] = out
        assert (tab >= 0).all(), "free algebra table incomplete"
        tables[op] = tab
    return FreeAlgebra(H, X, np.array(vecs, dtype=np.intp).reshape(N, P), recipes, wit, depths, tables)


def build_free(H: FiniteAlgebra, variables: Sequence[str], caps: Caps = DEFAULT_CAPS) -> FreeAlgebra:
    """Free(Var(H), X) by breadth-first closure of the projections and constants.

    Round 0 holds the variables (in order) then the constants (in signature
    order). Round r applies every symbol, in signature order, to every operand
    tuple over the elements known at the start of the round (lexicographic in
    element index) that uses at least one element from round r-1. A new value
    vector becomes the next element, with the applied term as its witness.
    """
    X = tuple(variables)
    if not X:
        raise ValueError("the variable set must be nonempty")
    if len(set(X)) != len(X):
        raise ValueError("duplicate variable")
    return _build_free(H, X, caps)


# --- morphisms of the category of free algebras -------------------------------


def morphism_maps(source: FreeAlgebra, target: FreeAlgebra, images: np.ndarray) -> np.ndarray:
    """Element maps of many morphisms at once.

    ``images`` has shape (m, |Y|): generator images of m morphisms
    source -> target. Returns shape (m, |source|).
    """
    images = np.asarray(images, dtype=np.intp).reshape(-1, len(source.variables))
    out = np.empty((len(images), source.size), dtype=np.intp)
    T = target.algebra.tables
    for e, r in enumerate(source.recipes):
        if r[0] == "var":
            out[:, e] = images[:, r[1]]
        elif r[0] == "const":
            out[:, e] = int(T[r[1]])
        else:
            out[:, e] = T[r[0]][tuple(out[:, x] for x in r[1])]
    return out


@dataclass(frozen=True, eq=False)
class FreeMorphism:
    """An arrow source -> target of the category of free algebras, fixed by
    the images of the source generators (indices into target)."""

    source: FreeAlgebra
    target: FreeAlgebra
    images: tuple[int, ...]

    def __post_init__(self):
        if self.source.base.signature.ops != self.target.base.signature.ops:
            raise SignatureError("free algebras have different signatures")
        if len(self.images) != len(self.source.variables):
            raise ValueError("one image per source generator is required")
        if any(not 0 <= i < self.target.size for i in self.images):
            raise ValueError("image index out of range")

    def __eq__(self, other):
        return (
            isinstance(other, FreeMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.source, self.target, self.images))

    @cached_property
    def map(self) -> np.ndarray:
        m = morphism_maps(self.source, self.target, np.array([self.images]))[0]
        m.flags.writeable = False
        return m

    def __call__(self, e: int) -> int:
        return int(self.map[e])

    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and len(set(self.map.tolist())) == self.source.size

    def describe(self) -> str:
        return ", ".join(
            f"{x}->{self.target.canonical_term(i)}" for x, i in zip(self.source.variables, self.images)
        )


def apply_morphism(s: FreeMorphism, e: int) -> int:
    """Image of a source element: its witness term evaluated with the
    generator images substituted, computed along the stored recipes."""
    return s(e)


def identity_morphism(F: FreeAlgebra) -> FreeMorphism:
    return FreeMorphism(F, F, F.generators)


def morphism_from_terms(source: FreeAlgebra, target: FreeAlgebra, terms: Sequence[Term]) -> FreeMorphism:
    return FreeMorphism(source, target, tuple(target.element(t) for t in terms))


def compose(s2: FreeMorphism, s1: FreeMorphism) -> FreeMorphism:
    """s2 after s1."""
    if s1.target != s2.source:
        raise ValueError("cannot compose: target of the first is not the source of the second")
    return FreeMorphism(s1.source, s2.target, tuple(int(s2.map[i]) for i in s1.images))


def all_morphisms(source: FreeAlgebra, target: FreeAlgebra, caps: Caps = DEFAULT_CAPS) -> list[FreeMorphism]:
    """Every morphism source -> target, one per generator-image tuple, lexicographic."""
    count = target.size ** len(source.variables)
    if count > caps.homs:
        raise CapExceeded("hom-set size |W2|^|Y|", caps.homs, count)
    return [FreeMorphism(source, target, imgs) for imgs in iproduct(range(target.size), repeat=len(source.variables))]
