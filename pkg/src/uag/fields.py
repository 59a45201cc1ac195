"""Finite fields given by tables, and their automorphisms.

Elements of GF(p^k) built by :func:`gf` are integers whose base-p digits are
the coefficients of a polynomial in the generator t (least significant digit
first), reduced modulo the lexicographically first monic irreducible
polynomial of degree k.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct

from .errors import FieldError


@dataclass(frozen=True)
class Field:
    name: str
    p: int
    k: int
    add: tuple[tuple[int, ...], ...]
    mul: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        validate_field(self)

    @property
    def order(self) -> int:
        return len(self.add)

    @cached_property
    def zero(self) -> int:
        return _identity(self.add)

    @cached_property
    def one(self) -> int:
        return _identity(self.mul)

    def power(self, a: int, e: int) -> int:
        r = self.one
        for _ in range(e):
            r = self.mul[r][a]
        return r

    def scale_symbol(self, a: int) -> str:
        return f"scale_{a}"

    @property
    def scale_symbols(self) -> list[str]:
        return [self.scale_symbol(a) for a in range(self.order)]


def _identity(table) -> int:
    n = len(table)
    for e in range(n):
        if all(table[e][x] == x and table[x][e] == x for x in range(n)):
            return e
    raise FieldError("operation has no identity element")


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def validate_field(F: Field) -> None:
    n = len(F.add)
    if not _is_prime(F.p) or F.k < 1 or n != F.p**F.k:
        raise FieldError(f"{F.name}: order {n} is not {F.p}^{F.k} with {F.p} prime")
    for name, t in (("addtable", F.add), ("multable", F.mul)):
        if len(t) != n or any(len(row) != n for row in t):
            raise FieldError(f"{F.name}: {name} must be {n}x{n}")
        if any(not 0 <= x < n for row in t for x in row):
            raise FieldError(f"{F.name}: {name} entry out of range")
    R = range(n)
    A, M = F.add, F.mul
    for a, b in iproduct(R, R):
        if A[a][b] != A[b][a] or M[a][b] != M[b][a]:
            raise FieldError(f"{F.name}: not commutative at ({a},{b})")
    for a, b, c in iproduct(R, R, R):
        if A[A[a][b]][c] != A[a][A[b][c]] or M[M[a][b]][c] != M[a][M[b][c]]:
            raise FieldError(f"{F.name}: not associative at ({a},{b},{c})")
        if M[a][A[b][c]] != A[M[a][b]][M[a][c]]:
            raise FieldError(f"{F.name}: not distributive at ({a},{b},{c})")
    zero, one = _identity(A), _identity(M)
    if zero == one:
        raise FieldError(f"{F.name}: 0 = 1")
    for a in R:
        if zero not in A[a]:
            raise FieldError(f"{F.name}: {a} has no additive inverse")
        if a != zero and one not in M[a]:
            raise FieldError(f"{F.name}: {a} has no multiplicative inverse")


def _poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    k = len(modulus) - 1
    prod = [0] * (2 * k - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i in range(k + 1):
                prod[d - k + i] = (prod[d - k + i] - c * modulus[i]) % p
    return prod[:k]


def _digits(a: int, p: int, k: int) -> list[int]:
    return [(a // p**i) % p for i in range(k)]


def _undigits(ds: list[int], p: int) -> int:
    return sum(d * p**i for i, d in enumerate(ds))


def _irreducible(p: int, k: int) -> list[int]:
    if k == 1:
        return [0, 1]
    for low in iproduct(range(p), repeat=k):
        poly = list(low) + [1]
        if low[0] == 0:
            continue
        # no roots is enough for k <= 3; general case checks all monic divisors
        if all(_poly_eval(poly, x, p) for x in range(p)) and not _has_factor(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {k} over F{p}")


def _poly_eval(poly, x, p):
    return sum(c * x**i for i, c in enumerate(poly)) % p


def _has_factor(poly: list[int], p: int) -> bool:
    k = len(poly) - 1
    for d in range(2, k // 2 + 1):
        for low in iproduct(range(p), repeat=d):
            div = list(low) + [1]
            if _poly_divides(div, poly, p):
                return True
    return False


def _poly_divides(div, poly, p) -> bool:
    rem = list(poly)
    d = len(div) - 1
    for i in range(len(rem) - 1, d - 1, -1):
        c = rem[i]
        if c:
            for j in range(d + 1):
                rem[i - d + j] = (rem[i - d + j] - c * div[j]) % p
    return not any(rem[:d])


def gf(p: int, k: int = 1, name: str | None = None) -> Field:
    """The field with p^k elements in the polynomial encoding described above."""
    if not _is_prime(p):
        raise FieldError(f"{p} is not prime")
    q = p**k
    modulus = _irreducible(p, k)
    add = tuple(
        tuple(_undigits([(x + y) % p for x, y in zip(_digits(a, p, k), _digits(b, p, k))], p) for b in range(q))
        for a in range(q)
    )
    mul = tuple(
        tuple(_undigits(_poly_mulmod(_digits(a, p, k), _digits(b, p, k), modulus, p), p) for b in range(q))
        for a in range(q)
    )
    return Field(name or f"F{q}", p, k, add, mul)


@dataclass(frozen=True)
class FieldAutomorphism:
    """A permutation of field elements preserving both tables."""

    field: Field
    perm: tuple[int, ...]

    def __post_init__(self):
        F, s = self.field, self.perm
        if sorted(s) != list(range(F.order)):
            raise FieldError("automorphism must be a permutation of the field")
        for a, b in iproduct(range(F.order), repeat=2):
            if s[F.add[a][b]] != F.add[s[a]][s[b]] or s[F.mul[a][b]] != F.mul[s[a]][s[b]]:
                raise FieldError(f"permutation {s} does not preserve the field tables at ({a},{b})")

    def __call__(self, a: int) -> int:
        return self.perm[a]

    def inverse(self) -> "FieldAutomorphism":
        inv = [0] * len(self.perm)
        for a, b in enumerate(self.perm):
            inv[b] = a
        return FieldAutomorphism(self.field, tuple(inv))

    def then(self, other: "FieldAutomorphism") -> "FieldAutomorphism":
        """``other`` after ``self``."""
        return FieldAutomorphism(self.field, tuple(other.perm[a] for a in self.perm))

    def is_identity(self) -> bool:
        return all(a == b for a, b in enumerate(self.perm))

    def order(self) -> int:
        n, cur = 1, self
        while not cur.is_identity():
            cur = cur.then(self)
            n += 1
        return n


def frobenius(F: Field, power: int = 1) -> FieldAutomorphism:
    """t -> t^(p^power)."""
    e = F.p ** (power % F.k)
    return FieldAutomorphism(F, tuple(F.power(a, e) for a in range(F.order)))


def frobenius_automorphisms(F: Field) -> list[FieldAutomorphism]:
    """All k automorphisms of GF(p^k): the powers of Frobenius.

    Each is checked against the tables on construction; the Frobenius map is
    additionally checked to have order exactly k, so the list is the whole
    cyclic group.
    """
    autos = [frobenius(F, i) for i in range(F.k)]
    if F.k > 1 and autos[1].order() != F.k:
        raise FieldError(f"Frobenius of {F.name} has order {autos[1].order()}, expected {F.k}")
    return autos
