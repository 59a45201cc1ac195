"""Terms over a signature: variables and operation applications."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple["Term", ...] = ()

    # terms are hashed constantly (caches, dict keys); compute the hash once
    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.op, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        if not self.args:
            return self.op
        return f"{self.op}({','.join(str(a) for a in self.args)})"


Term = Union[Var, App]


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def variables(t: Term) -> list[str]:
    """Variable names of ``t`` in order of first occurrence."""
    return list(_variables(t))


@lru_cache(maxsize=1 << 16)
def _variables(t: Term) -> tuple[str, ...]:
    if isinstance(t, Var):
        return (t.name,)
    seen: dict[str, None] = {}
    for a in t.args:
        seen.update(dict.fromkeys(_variables(a)))
    return tuple(seen)


def symbols(t: Term) -> Iterator[tuple[str, int]]:
    if isinstance(t, App):
        yield t.op, len(t.args)
        for a in t.args:
            yield from symbols(a)


def substitute(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    return App(t.op, tuple(substitute(a, mapping) for a in t.args))


def rewrite_apps(t: Term, fn: Callable[[App], App]) -> Term:
    """Bottom-up rewrite of every application node with ``fn``."""
    if isinstance(t, Var):
        return t
    return fn(App(t.op, tuple(rewrite_apps(a, fn) for a in t.args)))


def mirror_term(t: Term, product: str) -> Term:
    """Swap the operands of every ``product`` node, recursively."""

    def swap(node: App) -> App:
        if node.op == product and len(node.args) == 2:
            return App(node.op, (node.args[1], node.args[0]))
        return node

    return rewrite_apps(t, swap)


def rename_ops(t: Term, renaming: dict[str, str]) -> Term:
    return rewrite_apps(t, lambda n: App(renaming.get(n.op, n.op), n.args))


def v(name: str) -> Var:
    return Var(name)


def app(op: str, *args: Term) -> App:
    return App(op, tuple(args))
