"""Small named algebras used throughout the examples and tests."""

from __future__ import annotations

import numpy as np

from .algebra import FiniteAlgebra, Signature, product, trivial_algebra
from .fields import Field, gf

GROUP = Signature((("add", 2), ("neg", 1), ("zero", 0)))
SEMIGROUP = Signature((("mul", 2),), product="mul")
MONOID = Signature((("mul", 2), ("one", 0)), product="mul")


def cyclic(n: int) -> FiniteAlgebra:
    r = np.arange(n)
    return FiniteAlgebra(GROUP, n, {"add": (r[:, None] + r[None, :]) % n, "neg": (-r) % n, "zero": 0}, f"Z{n}")


def klein() -> FiniteAlgebra:
    return product([cyclic(2), cyclic(2)], name="Klein")


def trivial_group() -> FiniteAlgebra:
    return trivial_algebra(GROUP, "1")


def left_zero(n: int = 2) -> FiniteAlgebra:
    """a*b = a."""
    r = np.arange(n)
    return FiniteAlgebra(SEMIGROUP, n, {"mul": np.repeat(r[:, None], n, axis=1)}, f"LZ{n}")


def right_zero(n: int = 2) -> FiniteAlgebra:
    """a*b = b."""
    r = np.arange(n)
    return FiniteAlgebra(SEMIGROUP, n, {"mul": np.repeat(r[None, :], n, axis=0)}, f"RZ{n}")


def left_zero_monoid(n: int = 2) -> FiniteAlgebra:
    """Left-zero semigroup on {1..n} with an identity 0 adjoined."""
    m = n + 1
    t = np.zeros((m, m), dtype=np.intp)
    for a in range(m):
        for b in range(m):
            t[a, b] = b if a == 0 else a
    return FiniteAlgebra(MONOID, m, {"mul": t, "one": 0}, f"LZ{n}+1")


def upper_triangular_monoid() -> FiniteAlgebra:
    """Multiplicative monoid of upper-triangular 2x2 matrices over F2.

    [[a, b], [0, c]] is encoded as 4a + 2b + c.
    """

    def dec(i):
        return (i >> 2) & 1, (i >> 1) & 1, i & 1

    t = np.zeros((8, 8), dtype=np.intp)
    for i in range(8):
        a, b, c = dec(i)
        for j in range(8):
            d, e, f = dec(j)
            t[i, j] = 4 * (a * d % 2) + 2 * ((a * e + b * f) % 2) + (c * f % 2)
    return FiniteAlgebra(MONOID, 8, {"mul": t, "one": 0b101}, "UT2(F2)")


def field_signature(F: Field) -> Signature:
    return Signature((("add", 2), ("neg", 1), ("zero", 0), ("mul", 2), ("one", 0)), product="mul", scalars=F)


def field_algebra(F: Field) -> FiniteAlgebra:
    """F as a unital commutative algebra over itself (scale_l(a) = l*a)."""
    q = F.order
    add = np.array(F.add, dtype=np.intp)
    mul = np.array(F.mul, dtype=np.intp)
    neg = np.array([F.add[a].index(F.zero) for a in range(q)], dtype=np.intp)
    tables = {"add": add, "neg": neg, "zero": F.zero, "mul": mul, "one": F.one}
    for lam in range(q):
        tables[F.scale_symbol(lam)] = mul[lam]
    return FiniteAlgebra(field_signature(F), q, tables, f"{F.name}-alg")


def f4_algebra() -> FiniteAlgebra:
    return field_algebra(gf(2, 2, "F4"))


def multiplicative_monoid(n: int) -> FiniteAlgebra:
    """Z_n under multiplication (commutative)."""
    r = np.arange(n)
    return FiniteAlgebra(MONOID, n, {"mul": (r[:, None] * r[None, :]) % n, "one": 1 % n}, f"Z{n}*")
