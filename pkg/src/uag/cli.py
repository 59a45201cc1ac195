"""Command line interface: ``uag <command> [flags]``.

Exit codes: 0 computed (or verdict true), 1 verdict false, 2 usage or parse
error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import warnings
from typing import Callable

from . import dsl
from .algebra import FiniteAlgebra, all_congruences, enumerate_homs, eval_term
from .config import DEFAULT_CAPS, Caps
from .equiv import (
    QuasiIdentity,
    almost_geo_equivalent,
    frobenius_automorphisms,
    geo_equivalent,
    mirror_closure_transport,
    opposite,
    quasi_identity_holds,
    replay_closure_witness,
    same_quasi_identities_up_to,
    twist,
    twist_closure_bijection,
)
from .errors import CapExceeded, UagError
from .export import dumps, envelope, lattice_dot, lattice_json, partition_json, slice_dot, slice_json
from .fields import FieldAutomorphism
from .free import build_free
from .functors import (
    AutomorphismSpec,
    alpha,
    build_category,
    duality_check,
    generator_transposition,
    image_partition,
    rho,
    tau,
)
from .galois import (
    EquationSystem,
    acc_report,
    algebraic_set_lattice,
    closure_contains,
    closure_T,
    membership,
    read_back,
    solve,
)

COMMANDS = (
    "solve",
    "closure",
    "member",
    "lattice",
    "acc",
    "equiv",
    "quasi-check",
    "quasi-compare",
    "opposite",
    "twist",
    "category",
    "duality",
    "tau-rho",
    "alpha",
    "almost-equiv",
    "verify-witness",
)


class UsageError(UagError):
    pass


class Ctx:
    """Parsed flags plus the report being assembled."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.caps = Caps(
            points=args.cap_points or DEFAULT_CAPS.points,
            free=args.cap_free or DEFAULT_CAPS.free,
            homs=args.cap_homs or DEFAULT_CAPS.homs,
        )
        self.inputs: dict = {}
        self.result: dict = {}
        self.witnesses: list = []
        self.out: list[str] = []

    def say(self, line: str = ""):
        self.out.append(line)

    # inputs
    def _doc(self, flag: str) -> dsl.Document:
        path = getattr(self.args, flag)
        if not path:
            raise UsageError(f"--{flag.replace('_', '-')} FILE is required")
        self.inputs[flag] = path
        try:
            return dsl.load(path)
        except OSError as e:
            raise UsageError(f"cannot read {path}: {e.strerror}") from None

    def algebra(self, flag: str = "algebra") -> FiniteAlgebra:
        return self._doc(flag).first("algebra")

    def system(self) -> EquationSystem:
        return self._doc("system").first("system")

    def quasi(self) -> QuasiIdentity:
        return self._doc("system").first("quasi")

    def variables(self, default: tuple[str, ...] = ("x",)) -> tuple[str, ...]:
        if self.args.vars:
            vs = tuple(v.strip() for v in self.args.vars.split(",") if v.strip())
            if not vs:
                raise UsageError("--vars needs at least one variable")
        else:
            vs = default
        self.inputs["vars"] = list(vs)
        return vs

    def sigma(self, H: FiniteAlgebra) -> FieldAutomorphism:
        P = H.signature.scalars
        if P is None:
            raise UsageError("the algebra has no scalar block")
        choice = self.args.sigma or "frob^1"
        self.inputs["sigma"] = choice
        autos = frobenius_automorphisms(P)
        if choice == "id":
            return autos[0]
        if choice == "frob":
            choice = "frob^1"
        if not choice.startswith("frob^"):
            raise UsageError("--sigma must be 'id' or 'frob^k'")
        try:
            k = int(choice[5:])
        except ValueError:
            raise UsageError("--sigma must be 'id' or 'frob^k'") from None
        return autos[k % len(autos)]


def _text(H: FiniteAlgebra) -> str:
    return dsl.print_algebra_standalone(H)


def _pts(A) -> list[list[int]]:
    return [list(t) for t in A.tuples()]


# --- commands ------------------------------------------------------------------------


def cmd_solve(c: Ctx) -> int:
    H, T = c.algebra(), c.system()
    X = c.variables(T.variables)
    A = solve(T, H, X, c.caps)
    c.result = {"points": _pts(A), "count": len(A), "full": A.is_full()}
    c.say(f"solutions of {T} in {H.name}: {len(A)} of {A.num_points} points")
    for p in _pts(A):
        c.say("  (" + ", ".join(f"{x}={v}" for x, v in zip(X, p)) + ")")
    return 0


def cmd_closure(c: Ctx) -> int:
    H, T = c.algebra(), c.system()
    X = c.variables(T.variables)
    C = closure_T(T, H, X, c.caps)
    P = C.partition
    kind = "diagonal" if P.is_identity() else "full relation" if P.num_blocks == 1 else f"{P.num_blocks} blocks"
    c.result = {
        "blocks": partition_json(P, C.free),
        "num_blocks": P.num_blocks,
        "free_size": C.free.size,
        "equations": [[str(a), str(b)] for a, b in read_back(C).pairs],
    }
    c.say(f"closure of {T} in Free({H.name}; {','.join(X)}) [{C.free.size} elements]: {kind}")
    for blk in partition_json(P, C.free):
        c.say("  {" + ", ".join(blk) + "}")
    return 0


def _random_member_suite(c: Ctx, H: FiniteAlgebra, X, seed: int, cases: int = 1000) -> int:
    rng = random.Random(seed)
    F = build_free(H, X, c.caps)
    terms = [F.canonical_term(e) for e in range(F.size)]
    bad = 0
    for _ in range(cases):
        pairs = tuple((rng.choice(terms), rng.choice(terms)) for _ in range(rng.randint(0, 2)))
        T = EquationSystem(X, pairs)
        w0, w1 = rng.choice(terms), rng.choice(terms)
        if membership(w0, w1, T, H, X, c.caps) != closure_contains(closure_T(T, H, X, c.caps), w0, w1):
            bad += 1
    c.inputs["seed"] = seed
    c.result = {"cases": cases, "mismatches": bad}
    c.say(f"membership vs closure lookup: {cases} random cases, {bad} mismatches")
    return 0 if bad == 0 else 1


def cmd_member(c: Ctx) -> int:
    H = c.algebra()
    if c.args.system is None and c.args.seed is not None:
        return _random_member_suite(c, H, c.variables(), c.args.seed)
    q = c.quasi()
    holds = membership(q.conclusion[0], q.conclusion[1], q.system(), H, q.variables, c.caps)
    c.result = {"holds": holds, "quasi": str(q)}
    c.say(f"{q}: {'holds' if holds else 'fails'} in {H.name}")
    if not holds:
        _, pt = quasi_identity_holds(q, H, c.caps)
        c.witnesses.append(
            {"kind": "quasi_counterexample", "algebra": _text(H), "quasi": dsl.print_quasi(q, "w"), "point": list(pt.values)}
        )
        c.say(f"  counterexample: {pt.as_dict()}")
    return 0 if holds else 1


def cmd_lattice(c: Ctx) -> int:
    H = c.algebra()
    L = algebraic_set_lattice(H, c.variables(), c.caps)
    c.result = lattice_json(L)
    c.result["anti_isomorphic"] = L.check_anti_isomorphism()
    c.say(f"closed sets of {H.name}^{len(L.variables)}: {len(L)} nodes, height {L.height}")
    for i in range(len(L)):
        c.say(f"  n{i}: {sorted(L.nodes[i])}  <- {L.label_text(i)}")
    for a, b in L.edges:
        c.say(f"  n{a} < n{b}")
    if c.args.dot:
        with open(c.args.dot, "w", encoding="utf-8") as fh:
            fh.write(lattice_dot(L))
    return 0


def cmd_acc(c: Ctx) -> int:
    H = c.algebra()
    L = algebraic_set_lattice(H, c.variables(), c.caps)
    r = acc_report(L)
    chain = [sorted(L.nodes[i]) for i in r.witness]
    c.result = {"max_chain_length": r.max_chain_length, "stabilizes": r.stabilizes, "chain": chain, "note": r.note}
    c.say(f"longest chain of closed congruences: {r.max_chain_length}")
    c.say("  " + " > ".join(str(x) for x in chain))
    c.say(f"  {r.note}")
    return 0


def cmd_equiv(c: Ctx) -> int:
    H1, H2 = c.algebra(), c.algebra("algebra2")
    v = geo_equivalent(H1, H2, oracle=True, caps=c.caps)
    c.result = {"equivalent": v.equivalent, "direction": v.direction, "oracle_equivalent": v.oracle_equivalent}
    c.say(f"{H1.name} and {H2.name}: {'geometrically equivalent' if v.equivalent else 'not geometrically equivalent'}")
    if not v.equivalent:
        failing, other = (H1, H2) if v.direction.startswith("H1") else (H2, H1)
        c.witnesses.append(
            {
                "kind": "inseparable",
                "algebra": _text(failing),
                "target": _text(other),
                "pair": list(v.inseparable),
            }
        )
        c.say(f"  {v.direction}: elements {v.inseparable} of {failing.name} are identified by every homomorphism")
    if v.system is not None:
        q = QuasiIdentity(v.system.variables, v.system.pairs, v.pair)
        c.witnesses.append(
            {
                "kind": "closure",
                "algebra1": _text(H1),
                "algebra2": _text(H2),
                "quasi": dsl.print_quasi(q, "w"),
                "pair_in": v.pair_in,
            }
        )
        c.say(f"  closure witness: T = {v.system}; ({v.pair[0]}, {v.pair[1]}) lies only in T'' of algebra {v.pair_in}")
    if v.oracle_equivalent is not None and v.oracle_equivalent != v.equivalent:
        c.say("  warning: the closure oracle disagrees at |X| <= 2")
    return 0 if v.equivalent else 1


def cmd_quasi_check(c: Ctx) -> int:
    H, q = c.algebra(), c.quasi()
    ok, pt = quasi_identity_holds(q, H, c.caps)
    c.result = {"holds": ok, "quasi": str(q)}
    c.say(f"{q}: {'holds' if ok else 'fails'} in {H.name}")
    if not ok:
        c.result["counterexample"] = pt.as_dict()
        c.witnesses.append(
            {"kind": "quasi_counterexample", "algebra": _text(H), "quasi": dsl.print_quasi(q, "w"), "point": list(pt.values)}
        )
        c.say(f"  counterexample: {pt.as_dict()}")
    return 0 if ok else 1


def cmd_quasi_compare(c: Ctx) -> int:
    H1, H2 = c.algebra(), c.algebra("algebra2")
    d, nv = c.args.depth, c.args.max_vars or 1
    c.inputs.update(depth=d, max_vars=nv)
    r = same_quasi_identities_up_to(H1, H2, d, nv, 2, c.caps)
    c.result = {"same": r.same}
    c.say(f"quasi-identities up to depth {d}, {nv} variable(s), 2 premises: {'same' if r.same else 'differ'}")
    if not r.same:
        c.result.update(witness=str(r.witness), holds_in=r.holds_in)
        c.witnesses.append(
            {
                "kind": "quasi_disagreement",
                "algebra1": _text(H1),
                "algebra2": _text(H2),
                "quasi": dsl.print_quasi(r.witness, "w"),
                "holds_in": r.holds_in,
            }
        )
        c.say(f"  {r.witness}  holds only in algebra {r.holds_in}")
    return 0 if r.same else 1


def cmd_opposite(c: Ctx) -> int:
    H = c.algebra()
    Hop = opposite(H)
    text = _text(Hop)
    c.result = {"algebra": text}
    c.say(text.rstrip())
    if c.args.system:
        T = c.system()
        X = c.variables(T.variables)
        ok = mirror_closure_transport(H, X, T, c.caps)
        c.result["mirror_transport"] = ok
        c.say(f"# mirror transport of the closure of {T}: {'ok' if ok else 'FAILED'}")
        return 0 if ok else 1
    return 0


def cmd_twist(c: Ctx) -> int:
    H = c.algebra()
    s = c.sigma(H)
    Hs = twist(H, s)
    text = _text(Hs)
    c.result = {"algebra": text, "sigma": list(s.perm)}
    c.say(text.rstrip())
    if c.args.vars:
        r = twist_closure_bijection(H, s, c.variables(), c.caps)
        c.result["bijection"] = {"ok": r.ok, "nodes": list(r.nodes), "heights": list(r.heights), "detail": r.detail}
        c.say(f"# closed-congruence bijection T -> sigma_W T: {r.detail} ({r.nodes[0]} nodes)")
        return 0 if r.ok else 1
    return 0


def cmd_category(c: Ctx) -> int:
    H = c.algebra()
    k = c.args.max_vars or 1
    c.inputs["max_vars"] = k
    S = build_category(H, k, c.caps)
    c.result = slice_json(S)
    c.say(f"objects (|X| <= {k}): {len(S.objects)}; skeleton classes: {len(S.skeleton)}")
    for i, o in enumerate(S.objects):
        c.say(f"  o{i}: X={','.join(o.variables)}  A={o.point_tuples()}  dual size {o.dual.size}")
    c.say("  skeleton: " + " ".join("{" + ",".join(f"o{i}" for i in cl) + "}" for cl in S.skeleton))
    if c.args.dot:
        with open(c.args.dot, "w", encoding="utf-8") as fh:
            fh.write(slice_dot(S))
    return 0


def cmd_duality(c: Ctx) -> int:
    H = c.algebra()
    k = c.args.max_vars or 1
    c.inputs["max_vars"] = k
    S = build_category(H, k, c.caps)
    r = duality_check(S, c.caps)
    c.result = {
        "ok": r.ok,
        "pairs_checked": r.pairs_checked,
        "counts": [[i, j, a, b] for (i, j), (a, b) in sorted(r.counts.items())],
        "failures": r.failures,
    }
    c.say(f"duality on {len(S.objects)} objects: {'ok' if r.ok else 'FAILED'} ({r.pairs_checked} pairs)")
    for (i, j), (a, b) in sorted(r.counts.items()):
        c.say(f"  Hom(o{i},o{j}) = {a}   Hom(dual o{j}, dual o{i}) = {b}")
    for f in r.failures:
        c.say(f"  {f}")
    return 0 if r.ok else 1


def cmd_tau_rho(c: Ctx) -> int:
    H = c.algebra()
    X = c.variables()
    W = build_free(H, X, c.caps)
    congs = all_congruences(W.algebra)
    bad = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for T in congs:
            res = tau(W, rho(W, T, c.caps), strict=c.args.strict_tau)
            if res.partition is None or res.partition.labels != T.labels:
                bad.append(T)
    c.inputs["strict_tau"] = bool(c.args.strict_tau)
    c.result = {"congruences": len(congs), "failures": len(bad), "free_size": W.size}
    c.say(f"tau(rho(T)) = T on Free({H.name}; {','.join(X)}): {len(congs) - len(bad)}/{len(congs)} congruences")
    for T in bad:
        c.witnesses.append({"kind": "tau_rho", "algebra": _text(H), "variables": list(X), "blocks": T.blocks()})
    return 0 if not bad else 1


def cmd_alpha(c: Ctx) -> int:
    H = c.algebra()
    X = c.variables()
    if c.args.sigma:
        phi = AutomorphismSpec.twist(c.sigma(H))
    else:
        phi = generator_transposition()
    L = algebraic_set_lattice(H, X, c.caps)
    W = L.free
    W2, cw = phi.on_object(W, c.caps)
    bad = 0
    for T in L.congruences:
        _, a = alpha(phi, W, T, c.caps)
        if a.labels != image_partition(T, cw, W2.size).labels:
            bad += 1
    c.result = {"automorphism": phi.label, "closed_congruences": len(L), "failures": bad}
    c.say(f"alpha({phi.label})_W(T) = c_W T for {len(L) - bad}/{len(L)} closed T on Free({H.name}; {','.join(X)})")
    return 0 if bad == 0 else 1


def cmd_almost_equiv(c: Ctx) -> int:
    H1, H2 = c.algebra(), c.algebra("algebra2")
    r = almost_geo_equivalent(H1, H2, c.caps)
    c.result = {"almost_equivalent": r.ok, "chain": r.chain, "tried": r.tried}
    if r.ok:
        c.say("almost geometrically equivalent: " + " ; ".join(r.chain))
    else:
        c.say(f"no chain found ({len(r.tried)} candidates tried)")
    return 0 if r.ok else 1


# --- witness replay -------------------------------------------------------------------


def _alg(text: str) -> FiniteAlgebra:
    return dsl.parse(text).first("algebra")


def _q(text: str) -> QuasiIdentity:
    return dsl.parse(text).first("quasi")


def replay(w: dict, caps: Caps = DEFAULT_CAPS) -> bool:
    kind = w.get("kind")
    if kind == "inseparable":
        A, B = _alg(w["algebra"]), _alg(w["target"])
        a, b = w["pair"]
        return a != b and all(h.map[a] == h.map[b] for h in enumerate_homs(A, B, caps))
    if kind == "closure":
        q = _q(w["quasi"])
        return replay_closure_witness(_alg(w["algebra1"]), _alg(w["algebra2"]), q.system(), q.conclusion, w["pair_in"], caps)
    if kind == "quasi_counterexample":
        H, q = _alg(w["algebra"]), _q(w["quasi"])
        pt = dict(zip(q.variables, w["point"]))
        prem = all(eval_term(a, H, pt) == eval_term(b, H, pt) for a, b in q.premises)
        return prem and eval_term(q.conclusion[0], H, pt) != eval_term(q.conclusion[1], H, pt)
    if kind == "quasi_disagreement":
        H1, H2, q = _alg(w["algebra1"]), _alg(w["algebra2"]), _q(w["quasi"])
        h1, h2 = quasi_identity_holds(q, H1, caps)[0], quasi_identity_holds(q, H2, caps)[0]
        return h1 != h2 and (h1 if w["holds_in"] == 1 else h2)
    if kind == "tau_rho":
        from .algebra import Partition

        H = _alg(w["algebra"])
        W = build_free(H, tuple(w["variables"]), caps)
        T = Partition.from_blocks(W.size, w["blocks"])
        res = tau(W, rho(W, T, caps))
        return res.partition is None or res.partition.labels != T.labels
    raise UsageError(f"unknown witness kind {kind!r}")


def cmd_verify_witness(c: Ctx) -> int:
    path = c.args.report
    c.inputs["report"] = path
    try:
        with open(path, encoding="utf-8") as fh:
            rep = json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not JSON: {e}") from None
    if rep.get("schema") != "uag/1":
        raise UsageError("not a uag/1 report")
    results = [replay(w, c.caps) for w in rep.get("witnesses", [])]
    c.result = {"witnesses": len(results), "valid": sum(results), "checked_command": rep.get("command")}
    c.say(f"{sum(results)}/{len(results)} witnesses re-validated")
    return 0 if all(results) else 1


HANDLERS: dict[str, Callable[[Ctx], int]] = {
    "solve": cmd_solve,
    "closure": cmd_closure,
    "member": cmd_member,
    "lattice": cmd_lattice,
    "acc": cmd_acc,
    "equiv": cmd_equiv,
    "quasi-check": cmd_quasi_check,
    "quasi-compare": cmd_quasi_compare,
    "opposite": cmd_opposite,
    "twist": cmd_twist,
    "category": cmd_category,
    "duality": cmd_duality,
    "tau-rho": cmd_tau_rho,
    "alpha": cmd_alpha,
    "almost-equiv": cmd_almost_equiv,
    "verify-witness": cmd_verify_witness,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", metavar="FILE")
    common.add_argument("--algebra2", metavar="FILE")
    common.add_argument("--system", metavar="FILE")
    common.add_argument("--vars", metavar="x,y")
    common.add_argument("--max-vars", type=int, metavar="N")
    common.add_argument("--depth", type=int, default=2, metavar="D")
    common.add_argument("--cap-points", type=int, metavar="N")
    common.add_argument("--cap-free", type=int, metavar="N")
    common.add_argument("--cap-homs", type=int, metavar="N")
    common.add_argument("--sigma", metavar="frob^k|id")
    common.add_argument("--json", metavar="PATH")
    common.add_argument("--dot", metavar="PATH")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--strict-tau", action="store_true")
    p = argparse.ArgumentParser(prog="uag", description="Algebraic geometry over finite algebras.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "verify-witness":
            sp.add_argument("report", metavar="REPORT.json")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    c = Ctx(args)
    try:
        code = HANDLERS[args.command](c)
    except CapExceeded as e:
        print(f"uag: {e}", file=sys.stderr)
        return 3
    except (UagError, ValueError) as e:
        print(f"uag: {e}", file=sys.stderr)
        return 2
    print("\n".join(c.out))
    if args.json:
        inputs = {k: c.inputs[k] for k in sorted(c.inputs)}
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(dumps(envelope(args.command, inputs, c.result, c.witnesses)))
    return code


if __name__ == "__main__":
    sys.exit(main())
