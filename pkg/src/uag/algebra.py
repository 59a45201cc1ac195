"""Finite algebras over a declared signature.

Carriers are ``range(n)``. Every enumeration in this module is in
lexicographic order of these integers, so all outputs are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, product as iproduct
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DEFAULT_CAPS, Caps
from .errors import CapExceeded, NotACongruence, SignatureError, UnboundVariable
from .fields import Field
from .terms import App, Term, Var, variables as term_variables


@dataclass(frozen=True)
class Signature:
    """Operation symbols with arities.

    ``product`` optionally designates a binary symbol as the reversible
    product (used by opposite algebras and mirror maps). ``scalars`` attaches a
    finite field P; one unary symbol ``scale_<a>`` per field element is added
    when not already listed.
    """

    ops: tuple[tuple[str, int], ...]
    product: str | None = None
    scalars: Field | None = None

    def __post_init__(self):
        ops = tuple((str(n), int(a)) for n, a in self.ops)
        if self.scalars is not None:
            have = {n for n, _ in ops}
            ops = ops + tuple((s, 1) for s in self.scalars.scale_symbols if s not in have)
        object.__setattr__(self, "ops", ops)
        names = [n for n, _ in ops]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise SignatureError(f"duplicate operation symbol {dup!r}")
        if any(a < 0 for _, a in ops):
            raise SignatureError("arities must be non-negative")
        if self.product is not None and self.arities.get(self.product) != 2:
            raise SignatureError(f"reversible product {self.product!r} must be a binary symbol")
        if self.scalars is not None:
            for s in self.scalars.scale_symbols:
                if self.arities[s] != 1:
                    raise SignatureError(f"scalar symbol {s} must be unary")

    @cached_property
    def arities(self) -> dict[str, int]:
        return dict(self.ops)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.ops]

    def arity(self, op: str) -> int:
        try:
            return self.arities[op]
        except KeyError:
            raise SignatureError(f"unknown symbol {op!r}") from None

    def check_term(self, t: Term) -> None:
        if isinstance(t, Var):
            return
        a = self.arity(t.op)
        if a != len(t.args):
            raise SignatureError(f"{t.op} has arity {a}, applied to {len(t.args)} arguments")
        for s in t.args:
            self.check_term(s)


class FiniteAlgebra:
    """An algebra on {0..n-1}; one numpy table per symbol (arity-dimensional)."""

    def __init__(self, signature: Signature, size: int, tables: Mapping[str, object], name: str = ""):
        if size < 1:
            raise ValueError("carrier must be nonempty")
        self.signature = signature
        self.size = int(size)
        self.name = name
        missing = [n for n in signature.names if n not in tables]
        if missing:
            raise SignatureError(f"no table for symbol(s) {', '.join(missing)}")
        extra = [n for n in tables if n not in signature.arities]
        if extra:
            raise SignatureError(f"table given for undeclared symbol(s) {', '.join(extra)}")
        self.tables: dict[str, np.ndarray] = {}
        for op, ar in signature.ops:
            t = np.asarray(tables[op], dtype=np.intp)
            if ar == 0 and t.shape == (1,):
                t = t.reshape(())
            if t.shape != (self.size,) * ar:
                raise SignatureError(f"table of {op}/{ar} has shape {t.shape}, expected {(self.size,) * ar}")
            bad = (t < 0) | (t >= self.size)
            if bad.any():
                raise SignatureError(f"table of {op}: entry {int(t[bad].flat[0])} out of range")
            t = t.copy()
            t.flags.writeable = False
            self.tables[op] = t
        self._key = (signature, self.size, tuple(self.tables[o].tobytes() for o in signature.names))

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FiniteAlgebra({self.name or '?'}, size={self.size}, ops={self.signature.names})"

    def apply(self, op: str, *args):
        """Apply ``op`` to elements or, elementwise, to equal-length integer vectors."""
        t = self.tables[op]
        if t.ndim == 0:
            if args:
                raise SignatureError(f"{op} is nullary")
            return int(t)
        if len(args) != t.ndim:
            raise SignatureError(f"{op} has arity {t.ndim}, got {len(args)} arguments")
        return t[tuple(args)]

    def constants(self) -> list[int]:
        return [int(self.tables[o]) for o, a in self.signature.ops if a == 0]

    def renamed(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(self.signature, self.size, self.tables, name)

    def with_tables(self, name: str = "", **changes) -> "FiniteAlgebra":
        tabs = dict(self.tables)
        tabs.update(changes)
        return FiniteAlgebra(self.signature, self.size, tabs, name or self.name)


# --- points and evaluation ---------------------------------------------------


@dataclass(frozen=True)
class Point:
    variables: tuple[str, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.variables) != len(self.values):
            raise ValueError("point must assign one value per variable")

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.variables, self.values))


@lru_cache(maxsize=256)
def _point_array(n: int, k: int) -> np.ndarray:
    arr = np.array(list(iproduct(range(n), repeat=k)), dtype=np.intp).reshape(n**k, k)
    arr.flags.writeable = False
    return arr


def point_array(n: int, k: int, caps: Caps = DEFAULT_CAPS) -> np.ndarray:
    """All points of H^k, shape (n^k, k), lexicographic with the first variable most significant."""
    if n**k > caps.points:
        raise CapExceeded("points |H|^|X|", caps.points, n**k)
    return _point_array(n, k)


def point_index(values: Sequence[int], n: int) -> int:
    idx = 0
    for x in values:
        idx = idx * n + x
    return idx


def eval_term(term: Term, H: FiniteAlgebra, point) -> int:
    """Value of ``term`` in H under an assignment (a Point or a name->element mapping)."""
    env = point.as_dict() if isinstance(point, Point) else dict(point)

    def go(t: Term) -> int:
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise UnboundVariable(f"variable {t.name!r} is not bound by the point") from None
        ar = H.signature.arity(t.op)
        if ar != len(t.args):
            raise SignatureError(f"{t.op} has arity {ar}, applied to {len(t.args)} arguments")
        return int(H.apply(t.op, *(go(a) for a in t.args)))

    return go(term)


def term_vector(
    term: Term, H: FiniteAlgebra, variables: Sequence[str], caps: Caps = DEFAULT_CAPS, cache: dict | None = None
) -> np.ndarray:
    """Values of ``term`` at every point of H^variables (lexicographic point order).

    ``cache`` (term -> vector) may be shared between calls with the same H and
    variables; systems of canonical terms share most subterms.
    """
    variables = tuple(variables)
    pts = point_array(H.size, len(variables), caps)
    cols = {x: pts[:, i] for i, x in enumerate(variables)}
    if cache is None:
        cache = {}

    def go(t: Term) -> np.ndarray:
        if t in cache:
            return cache[t]
        if isinstance(t, Var):
            if t.name not in cols:
                raise UnboundVariable(f"variable {t.name!r} not in {variables}")
            r = cols[t.name]
        else:
            ar = H.signature.arity(t.op)
            if ar != len(t.args):
                raise SignatureError(f"{t.op} has arity {ar}, applied to {len(t.args)} arguments")
            if ar == 0:
                r = np.full(len(pts), int(H.tables[t.op]), dtype=np.intp)
            else:
                r = H.tables[t.op][tuple(go(a) for a in t.args)]
        cache[t] = r
        return r

    return go(term)


# --- partitions --------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """An equivalence relation on range(n), stored as canonical block labels.

    Block ids are assigned in order of least representative, so two partitions
    are equal exactly when their label tuples are equal.
    """

    labels: tuple[int, ...]
    congruence: bool = field(default=False, compare=False)

    @classmethod
    def from_labels(cls, labels: Iterable, congruence: bool = False) -> "Partition":
        out, seen = [], {}
        for lab in labels:
            key = lab.tobytes() if isinstance(lab, np.ndarray) else lab
            if key not in seen:
                seen[key] = len(seen)
            out.append(seen[key])
        return cls(tuple(out), congruence)

    @classmethod
    def from_rows(cls, rows: np.ndarray) -> "Partition":
        """Partition of row indices by equality of rows of a 2-d array."""
        rows = np.ascontiguousarray(rows)
        if rows.ndim == 1:
            rows = rows[:, None]
        if rows.shape[1] == 0:
            return cls.full(rows.shape[0])
        hi = int(rows.max()) + 1 if rows.size else 1
        if rows.shape[1] * max(1, (hi - 1).bit_length()) <= 62:
            # pack each row into one integer; 1-d unique is much faster
            rows = rows.astype(np.int64) @ (hi ** np.arange(rows.shape[1] - 1, -1, -1, dtype=np.int64))
            _, first, inv = np.unique(rows, return_index=True, return_inverse=True)
        else:
            _, first, inv = np.unique(rows, axis=0, return_index=True, return_inverse=True)
        order = np.argsort(first, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        return cls(tuple(int(x) for x in rank[inv.ravel()]))

    @classmethod
    def identity(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def full(cls, n: int) -> "Partition":
        return cls((0,) * n)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Partition":
        uf = UnionFind(n)
        for a, b in pairs:
            uf.union(a, b)
        return uf.partition()

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls.from_pairs(n, ((b[0], x) for b in map(list, blocks) if b for x in b[1:]))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_blocks(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for i, b in enumerate(self.labels):
            out[b].append(i)
        return out

    def same(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    def array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.intp)

    def refines(self, other: "Partition") -> bool:
        """True iff self is contained in other as a relation."""
        seen: dict[int, int] = {}
        for a, b in zip(self.labels, other.labels):
            if seen.setdefault(a, b) != b:
                return False
        return True

    def meet(self, other: "Partition") -> "Partition":
        return Partition.from_labels(zip(self.labels, other.labels))

    def join(self, other: "Partition") -> "Partition":
        uf = UnionFind(self.n)
        for p in (self, other):
            for blk in p.blocks():
                for x in blk[1:]:
                    uf.union(blk[0], x)
        return uf.partition()

    def pairs(self) -> list[tuple[int, int]]:
        """All pairs (a, b), a < b, in one block."""
        return [(a, b) for blk in self.blocks() for a, b in combinations(blk, 2)]

    def is_identity(self) -> bool:
        return self.num_blocks == self.n

    def congruence_violation(self, H: FiniteAlgebra):
        """First (op, args, args') witnessing incompatibility, or None."""
        lab = self.array()
        for op, ar in H.signature.ops:
            if ar == 0:
                continue
            t = H.tables[op]
            for pos in range(ar):
                for blk in self.blocks():
                    rep = blk[0]
                    for x in blk[1:]:
                        a = np.take(t, rep, axis=pos)
                        b = np.take(t, x, axis=pos)
                        bad = lab[a] != lab[b]
                        if bad.any():
                            rest = tuple(int(i) for i in np.argwhere(bad)[0])
                            args = rest[:pos] + (rep,) + rest[pos:]
                            args2 = rest[:pos] + (x,) + rest[pos:]
                            return op, args, args2
        return None

    def is_congruence(self, H: FiniteAlgebra) -> bool:
        return self.n == H.size and self.congruence_violation(H) is None

    def as_congruence(self, H: FiniteAlgebra) -> "Partition":
        v = self.congruence_violation(H)
        if v is not None:
            op, a, b = v
            raise NotACongruence(f"not compatible with {op}: {op}{a} and {op}{b} fall in different blocks")
        return Partition(self.labels, True)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def partition(self) -> Partition:
        return Partition.from_labels(self.find(i) for i in range(len(self.parent)))


# --- congruences --------------------------------------------------------------


def congruence_generated(H: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Partition:
    """Least congruence of H containing ``pairs``."""
    uf = UnionFind(H.size)
    pending = []
    for a, b in pairs:
        if uf.union(a, b):
            pending.append((a, b))
    ops = [(H.tables[o], a) for o, a in H.signature.ops if a > 0]
    while pending:
        a, b = pending.pop()
        for t, ar in ops:
            for pos in range(ar):
                xs = np.take(t, a, axis=pos).ravel()
                ys = np.take(t, b, axis=pos).ravel()
                for x, y in zip(xs.tolist(), ys.tolist()):
                    if x != y and uf.union(x, y):
                        pending.append((x, y))
    return Partition(uf.partition().labels, True)


def all_congruences(H: FiniteAlgebra) -> list[Partition]:
    """Every congruence of H, sorted by (number of blocks descending, labels)."""
    principal = {}
    for a, b in combinations(range(H.size), 2):
        c = congruence_generated(H, [(a, b)])
        principal.setdefault(c.labels, c)
    found = {Partition.identity(H.size).labels: Partition(Partition.identity(H.size).labels, True)}
    frontier = list(found.values())
    gens = list(principal.values())
    while frontier:
        nxt = []
        for c in frontier:
            for g in gens:
                j = c.join(g)
                if j.labels not in found:
                    jc = congruence_generated(H, j.pairs()) if not j.is_congruence(H) else Partition(j.labels, True)
                    if jc.labels not in found:
                        found[jc.labels] = jc
                        nxt.append(jc)
        frontier = nxt
    return sorted(found.values(), key=lambda p: (-p.num_blocks, p.labels))


# --- homomorphisms -----------------------------------------------------------


@dataclass(frozen=True)
class Homomorphism:
    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.map[a]

    def preserves(self) -> bool:
        return preserves_operations(self.source, self.target, self.map)

    def kernel(self) -> Partition:
        return Partition(Partition.from_labels(self.map).labels, True)

    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)


def preserves_operations(A: FiniteAlgebra, B: FiniteAlgebra, m: Sequence[int]) -> bool:
    _same_signature(A, B)
    m = np.asarray(m, dtype=np.intp)
    for op, ar in A.signature.ops:
        ta, tb = A.tables[op], B.tables[op]
        if ar == 0:
            if m[int(ta)] != int(tb):
                return False
            continue
        if not np.array_equal(m[ta], tb[np.ix_(*([m] * ar))]):
            return False
    return True


def _same_signature(A: FiniteAlgebra, B: FiniteAlgebra) -> None:
    if A.signature.ops != B.signature.ops:
        raise SignatureError("algebras have different signatures")


def _closure_with_recipe(H: FiniteAlgebra, seed: Sequence[int]):
    """Subuniverse generated by seed plus constants, with a derivation per element.

    Returns (elements in discovery order, recipe) where recipe[e] is
    ("gen", i), ("const", op) or (op, argument elements).
    """
    recipe: dict[int, tuple] = {}
    order: list[int] = []
    for i, s in enumerate(seed):
        if s not in recipe:
            recipe[s] = ("gen", i)
            order.append(s)
    for op, ar in H.signature.ops:
        if ar == 0:
            c = int(H.tables[op])
            if c not in recipe:
                recipe[c] = ("const", op)
                order.append(c)
    start = 0
    while True:
        known = list(order)
        pos = {e: i for i, e in enumerate(known)}
        added = False
        for op, ar in H.signature.ops:
            if ar == 0:
                continue
            t = H.tables[op]
            for args in iproduct(known, repeat=ar):
                if max(pos[a] for a in args) < start:
                    continue
                r = int(t[args])
                if r not in recipe:
                    recipe[r] = (op, args)
                    order.append(r)
                    added = True
        if not added:
            return order, recipe
        start = len(known)


def generating_set(H: FiniteAlgebra) -> list[int]:
    """Greedy generating set: smallest element outside the current subuniverse, repeatedly."""
    gens: list[int] = []
    covered = set(_closure_with_recipe(H, [])[0])
    for a in range(H.size):
        if a not in covered:
            gens.append(a)
            covered = set(_closure_with_recipe(H, gens)[0])
    return gens


def enumerate_homs(A: FiniteAlgebra, B: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> list[Homomorphism]:
    """All homomorphisms A -> B in lexicographic order of the map array.

    A homomorphism is fixed by its values on a generating set of A, so the
    search space is |B|^g with g the size of the greedy generating set; that
    quantity is what the hom cap bounds.
    """
    _same_signature(A, B)
    gens = generating_set(A)
    space = B.size ** len(gens)
    if space > caps.homs:
        raise CapExceeded("hom search space |B|^generators", caps.homs, space)
    order, recipe = _closure_with_recipe(A, gens)
    found = []
    for images in iproduct(range(B.size), repeat=len(gens)):
        m = [-1] * A.size
        for e in order:
            r = recipe[e]
            if r[0] == "gen":
                m[e] = images[r[1]]
            elif r[0] == "const":
                m[e] = int(B.tables[r[1]])
            else:
                m[e] = int(B.tables[r[0]][tuple(m[x] for x in r[1])])
        if preserves_operations(A, B, m):
            found.append(tuple(m))
    found.sort()
    return [Homomorphism(A, B, m) for m in found]


def is_isomorphic(A: FiniteAlgebra, B: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> Homomorphism | None:
    """An isomorphism A -> B, or None."""
    if A.size != B.size or A.signature.ops != B.signature.ops:
        return None
    for h in enumerate_homs(A, B, caps):
        if h.is_injective():
            return h
    return None


# --- constructions -----------------------------------------------------------


def trivial_algebra(signature: Signature, name: str = "1") -> FiniteAlgebra:
    return FiniteAlgebra(signature, 1, {op: np.zeros((1,) * a, dtype=np.intp) for op, a in signature.ops}, name)


def product(
    factors: Sequence[FiniteAlgebra],
    caps: Caps = DEFAULT_CAPS,
    name: str = "",
    signature: Signature | None = None,
) -> FiniteAlgebra:
    """Direct product with mixed-radix carrier: (a_1..a_m) has index
    ((a_1*n_2 + a_2)*n_3 + ...), the first factor most significant.

    The empty product is the one-element algebra of ``signature``.
    """
    if not factors:
        if signature is None:
            raise ValueError("empty product needs a signature")
        return trivial_algebra(signature)
    sig = factors[0].signature
    for F in factors[1:]:
        _same_signature(factors[0], F)
    sizes = [F.size for F in factors]
    N = int(np.prod(sizes))
    if N > caps.carrier:
        raise CapExceeded("product carrier", caps.carrier, N)
    comps = np.array(list(iproduct(*(range(s) for s in sizes))), dtype=np.intp).reshape(N, len(factors))
    radix = np.array([int(np.prod(sizes[i + 1 :])) for i in range(len(sizes))], dtype=np.intp)
    tables = {}
    for op, ar in sig.ops:
        if ar == 0:
            tables[op] = int(sum(int(F.tables[op]) * radix[i] for i, F in enumerate(factors)))
            continue
        grids = np.meshgrid(*([np.arange(N)] * ar), indexing="ij")
        out = np.zeros((N,) * ar, dtype=np.intp)
        for i, F in enumerate(factors):
            out += F.tables[op][tuple(comps[g, i] for g in grids)] * radix[i]
        tables[op] = out
    return FiniteAlgebra(sig, N, tables, name or "x".join(F.name or "?" for F in factors))


def subalgebra_generated(H: FiniteAlgebra, seed: Iterable[int]) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """Least subuniverse containing seed and all constants, as an algebra plus
    the inclusion map (the subalgebra's carrier is the subset in increasing order)."""
    seed = list(seed)
    if any(not 0 <= s < H.size for s in seed):
        raise ValueError("seed element outside the carrier")
    elems = sorted(_closure_with_recipe(H, seed)[0])
    if not elems:
        raise ValueError("empty subuniverse: no seed and no constants")
    pos = {e: i for i, e in enumerate(elems)}
    idx = np.array(elems, dtype=np.intp)
    relabel = np.full(H.size, -1, dtype=np.intp)
    relabel[idx] = np.arange(len(elems))
    tables = {}
    for op, ar in H.signature.ops:
        t = H.tables[op]
        tables[op] = pos[int(t)] if ar == 0 else relabel[t[np.ix_(*([idx] * ar))]]
    return FiniteAlgebra(H.signature, len(elems), tables, f"Sg({H.name})"), tuple(elems)


def quotient(H: FiniteAlgebra, theta: Partition) -> tuple[FiniteAlgebra, Homomorphism]:
    """H/theta with blocks ordered by least representative, and the projection."""
    if theta.n != H.size:
        raise ValueError("partition size does not match the carrier")
    theta = theta.as_congruence(H)
    lab = theta.array()
    reps = np.array([b[0] for b in theta.blocks()], dtype=np.intp)
    tables = {}
    for op, ar in H.signature.ops:
        t = H.tables[op]
        tables[op] = int(lab[int(t)]) if ar == 0 else lab[t[np.ix_(*([reps] * ar))]]
    Q = FiniteAlgebra(H.signature, len(reps), tables, f"{H.name}/θ")
    return Q, Homomorphism(H, Q, tuple(int(x) for x in lab))


def separates_points(A: FiniteAlgebra, B: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> tuple[bool, tuple[int, int] | None]:
    """Whether homomorphisms A -> B separate the points of A (A in SC(B)).

    On failure returns the lexicographically first pair a < a' identified by
    every homomorphism.
    """
    homs = enumerate_homs(A, B, caps)
    if not homs:
        cols = np.zeros((A.size, 0), dtype=np.intp)
    else:
        cols = np.array([h.map for h in homs], dtype=np.intp).T
    part = Partition.from_rows(cols)
    if part.is_identity():
        return True, None
    for a, b in combinations(range(A.size), 2):
        if part.same(a, b):
            return False, (a, b)
    raise AssertionError("unreachable")


def check_laws(H: FiniteAlgebra, laws: Sequence[tuple[Term, Term]], variables: Sequence[str] | None = None):
    """(True, None) if every law holds at every point, else (False, (law, point))."""
    for lhs, rhs in laws:
        vs = tuple(variables) if variables is not None else tuple(
            dict.fromkeys(term_variables(lhs) + term_variables(rhs))
        )
        if not vs:
            ok = eval_term(lhs, H, {}) == eval_term(rhs, H, {})
            if not ok:
                return False, ((lhs, rhs), Point((), ()))
            continue
        a = term_vector(lhs, H, vs, Caps(points=max(H.size ** len(vs), 1)))
        b = term_vector(rhs, H, vs, Caps(points=max(H.size ** len(vs), 1)))
        bad = np.flatnonzero(a != b)
        if bad.size:
            pts = _point_array(H.size, len(vs))
            return False, ((lhs, rhs), Point(vs, tuple(int(x) for x in pts[bad[0]])))
    return True, None
