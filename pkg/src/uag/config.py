from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Caps:
    """Size bounds. Exceeding one raises CapExceeded; nothing is truncated."""

    points: int = 4096  # |H|^|X|
    free: int = 4096  # elements of a free algebra
    homs: int = 65536  # hom search space |B|^(generators of A)
    carrier: int = 4096  # carriers of products
    pairs: int = 1 << 23  # element pairs scanned by the lattice builder


DEFAULT_CAPS = Caps()
