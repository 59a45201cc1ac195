"""Exception types shared across the package."""

from __future__ import annotations


class UagError(Exception):
    """Base class for all errors raised by uag."""


class CapExceeded(UagError):
    """A configured size bound would be exceeded.

    ``what`` names the bound, ``limit`` is its value and ``needed`` is the
    size that triggered it (or the partial count reached when the true size
    is unknown).
    """

    def __init__(self, what: str, limit: int, needed: int | None = None):
        self.what = what
        self.limit = limit
        self.needed = needed
        msg = f"cap exceeded: {what} (limit {limit}"
        if needed is not None:
            msg += f", reached {needed}"
        super().__init__(msg + ")")


class SignatureError(UagError):
    """Unknown symbol, arity mismatch, or inconsistent signatures."""


class UnboundVariable(UagError):
    pass


class NotACongruence(UagError):
    pass


class FieldError(UagError):
    pass
