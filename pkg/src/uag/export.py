"""JSON and DOT renderings of reports, lattices and category slices.

JSON reports share one envelope:

    {"schema": "uag/1", "command": ..., "inputs": {...}, "result": {...}, "witnesses": [...]}

and are written with sorted keys and no timestamps, so identical runs give
identical bytes. Witnesses embed the DSL text of everything they refer to and
can be replayed by ``uag verify-witness``.
"""

from __future__ import annotations

import json
from typing import Any

from .algebra import Partition
from .functors import CategorySlice
from .galois import LatticeReport

SCHEMA = "uag/1"


def envelope(command: str, inputs: dict, result: dict, witnesses: list | None = None) -> dict:
    return {"schema": SCHEMA, "command": command, "inputs": inputs, "result": result, "witnesses": witnesses or []}


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def partition_json(P: Partition, free=None) -> list:
    if free is None:
        return P.blocks()
    return [[str(free.canonical_term(e)) for e in blk] for blk in P.blocks()]


def lattice_json(L: LatticeReport) -> dict:
    pts = L.free.points
    return {
        "algebra": L.algebra.name,
        "variables": list(L.variables),
        "nodes": [
            {
                "index": i,
                "points": [[int(v) for v in pts[p]] for p in sorted(n)],
                "equations": L.label_text(i),
                "congruence": partition_json(L.congruences[i], L.free),
            }
            for i, n in enumerate(L.nodes)
        ],
        "edges": [list(e) for e in L.edges],
        "height": L.height,
        "meet": L.meet,
        "join": L.join,
    }


def _q(*lines: str) -> str:
    """A DOT string literal; separate arguments become separate label lines."""
    return '"' + "\\n".join(s.replace("\\", "\\\\").replace('"', '\\"') for s in lines) + '"'


def lattice_dot(L: LatticeReport) -> str:
    """Hasse diagram, larger closed sets on top; nodes labeled by defining equations."""
    pts = L.free.points
    lines = ["digraph lattice {", "  rankdir=BT;", "  node [shape=box];"]
    for i, n in enumerate(L.nodes):
        pset = "{" + ", ".join("(" + ",".join(str(int(v)) for v in pts[p]) + ")" for p in sorted(n)) + "}"
        lines.append(f"  n{i} [label={_q(L.label_text(i), pset)}];")
    for a, b in L.edges:
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def slice_json(S: CategorySlice) -> dict:
    return {
        "algebra": S.algebra.name,
        "max_vars": S.max_vars,
        "objects": [
            {
                "index": i,
                "variables": list(o.variables),
                "points": [list(p) for p in o.point_tuples()],
                "equations": o.label,
                "dual_size": o.dual.size,
            }
            for i, o in enumerate(S.objects)
        ],
        "arrows": [
            {"source": i, "target": j, "count": len(a), "representatives": [x.rep.describe() for x in a]}
            for (i, j), a in sorted(S.arrows.items())
        ],
        "skeleton": S.skeleton,
    }


def slice_dot(S: CategorySlice) -> str:
    """Skeleton graph: one node per class, an edge when some arrow exists."""
    lines = ["digraph skeleton {", "  node [shape=ellipse];"]
    for c, members in enumerate(S.skeleton):
        o = S.objects[members[0]]
        head = f"[{','.join(o.variables)}] {o.label}"
        lines.append(f"  c{c} [label={_q(head, f'|dual| = {o.dual.size}, objects {members}')}];")
    for a in range(len(S.skeleton)):
        for b in range(len(S.skeleton)):
            if a != b and S.arrows[(S.skeleton[a][0], S.skeleton[b][0])]:
                lines.append(f"  c{a} -> c{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
