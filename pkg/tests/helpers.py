"""Shared fixtures-as-functions for the test modules."""

from __future__ import annotations

from uag import dsl
from uag.galois import EquationSystem
from uag.library import cyclic, f4_algebra, klein, left_zero, trivial_group


def term(text: str, variables: str = "x,y"):
    """Parse one term over the given variables (bare names not listed are constants)."""
    return dsl.parse(f"system T over {variables} {{ {text} = {text} }}").first("system").pairs[0][0]


def system(text: str, variables: str = "x") -> EquationSystem:
    return dsl.parse(f"system T over {variables} {{ {text} }}").first("system")


def galois_pool() -> dict:
    """The algebras of the Galois-law criterion."""
    return {"Z2": cyclic(2), "Z4": cyclic(4), "Klein": klein(), "LZ2": left_zero(2), "F4": f4_algebra()}


def equivalence_pool() -> dict:
    """Six groups: two equivalence classes of size > 1 plus singletons."""
    return {
        "1": trivial_group(),
        "Z2": cyclic(2),
        "Z3": cyclic(3),
        "Z4": cyclic(4),
        "Klein": klein(),
        "K2": klein().renamed("K2"),
    }
