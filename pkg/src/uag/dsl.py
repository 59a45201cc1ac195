"""Text format for algebras, fields, equation systems and quasi-identities.

    doc     := (algebra | system | quasi | field)*
    algebra := "algebra" NAME "{" "carrier" INT opdef* flag* "}"
    opdef   := "op" NAME "/" INT "table" nested-int-array
    flag    := "product" NAME | "scalars" NAME
    system  := "system" NAME "over" varlist "{" (term "=" term)* "}"
    quasi   := "quasi" NAME "over" varlist "{" (term "=" term)* "=>" term "=" term "}"
    field   := "field" NAME "{" "p" INT "k" INT "addtable" array "multable" array "}"
    term    := VAR | NAME "(" term ("," term)* ")" | NAME

An identifier inside a system or quasi block is a variable when it appears in
the block's varlist and a constant symbol otherwise. ``scalars F`` refers to
a field block defined earlier in the document. Comments run from ``#`` to the
end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .algebra import FiniteAlgebra, Signature
from .equiv import QuasiIdentity
from .errors import UagError
from .fields import Field
from .galois import EquationSystem
from .terms import App, Term, Var


class DslError(UagError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg, self.line, self.col = msg, line, col
        super().__init__(f"line {line}, col {col}: {msg}" if line else msg)


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<arrow>=>)|(?P<int>-?\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[{}()\[\],/=])|(?P<bad>.)"
)


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out, line, start = [], 1, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - start + 1
        if kind == "bad":
            raise DslError(f"unexpected character {m.group()!r}", line, col)
        if kind not in ("ws", "comment"):
            out.append(Tok(kind, m.group(), line, col))
        nl = m.group().count("\n")
        if nl:
            line += nl
            start = m.start() + m.group().rindex("\n") + 1
    out.append(Tok("eof", "", line, len(text) - start + 1))
    return out


@dataclass
class AlgebraBlock:
    name: str
    algebra: FiniteAlgebra
    field_name: str | None = None

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraBlock)
            and self.name == other.name
            and self.field_name == other.field_name
            and self.algebra == other.algebra
        )


Block = Union[AlgebraBlock, "SystemBlock", "QuasiBlock", "FieldBlock"]


@dataclass(frozen=True)
class SystemBlock:
    name: str
    system: EquationSystem


@dataclass(frozen=True)
class QuasiBlock:
    name: str
    quasi: QuasiIdentity


@dataclass(frozen=True)
class FieldBlock:
    name: str
    field: Field


@dataclass
class Document:
    blocks: list = field(default_factory=list)
    spans: dict = field(default_factory=dict)  # block name -> (line, col)

    def __eq__(self, other):
        return isinstance(other, Document) and self.blocks == other.blocks

    def _of(self, cls):
        return [b for b in self.blocks if isinstance(b, cls)]

    @property
    def algebras(self) -> dict[str, FiniteAlgebra]:
        return {b.name: b.algebra for b in self._of(AlgebraBlock)}

    @property
    def systems(self) -> dict[str, EquationSystem]:
        return {b.name: b.system for b in self._of(SystemBlock)}

    @property
    def quasis(self) -> dict[str, QuasiIdentity]:
        return {b.name: b.quasi for b in self._of(QuasiBlock)}

    @property
    def fields(self) -> dict[str, Field]:
        return {b.name: b.field for b in self._of(FieldBlock)}

    def first(self, kind: str):
        cls = {"algebra": AlgebraBlock, "system": SystemBlock, "quasi": QuasiBlock, "field": FieldBlock}[kind]
        found = self._of(cls)
        if not found:
            raise DslError(f"no {kind} block in document")
        return getattr(found[0], kind)


def _shape(a):
    """Shape of a nested list, or None when ragged."""
    if not isinstance(a, list):
        return ()
    if not a:
        return (0,)
    subs = {_shape(x) for x in a}
    if len(subs) != 1 or None in subs:
        return None
    return (len(a),) + subs.pop()


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.doc = Document()

    # token helpers
    def peek(self) -> Tok:
        return self.toks[self.i]

    def next(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: Tok | None = None):
        tok = tok or self.peek()
        raise DslError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Tok:
        t = self.peek()
        if t.text != text or t.kind == "int":
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def name(self) -> Tok:
        t = self.peek()
        if t.kind != "name":
            self.fail(f"expected a name, found {t.text or 'end of input'!r}")
        return self.next()

    def integer(self) -> int:
        t = self.peek()
        if t.kind != "int":
            self.fail(f"expected an integer, found {t.text or 'end of input'!r}")
        return int(self.next().text)

    def array(self):
        t = self.expect("[")
        items = []
        if self.peek().text != "]":
            while True:
                items.append(self.array() if self.peek().text == "[" else self.integer())
                if self.peek().text == ",":
                    self.next()
                    continue
                break
        self.expect("]")
        kinds = {isinstance(x, list) for x in items}
        if len(kinds) > 1:
            self.fail("array mixes numbers and sub-arrays", t)
        return items

    # blocks
    def parse(self) -> Document:
        while self.peek().kind != "eof":
            t = self.peek()
            kw = {"algebra": self.algebra, "system": self.system, "quasi": self.quasi, "field": self.field}.get(t.text)
            if kw is None or t.kind != "name":
                self.fail(f"expected 'algebra', 'system', 'quasi' or 'field', found {t.text!r}")
            self.next()
            kw(t)
        return self.doc

    def _register(self, name_tok: Tok, block):
        if name_tok.text in self.doc.spans:
            self.fail(f"duplicate name {name_tok.text!r}", name_tok)
        self.doc.spans[name_tok.text] = (name_tok.line, name_tok.col)
        self.doc.blocks.append(block)

    def field(self, start: Tok):
        nt = self.name()
        self.expect("{")
        self.expect("p")
        p = self.integer()
        self.expect("k")
        k = self.integer()
        self.expect("addtable")
        at = self.peek()
        add = self.array()
        self.expect("multable")
        mul = self.array()
        self.expect("}")
        q = p**k
        for tab, label in ((add, "addtable"), (mul, "multable")):
            if _shape(tab) != (q, q):
                self.fail(f"{label} must be {q}x{q}", at)
        try:
            F = Field(nt.text, p, k, tuple(map(tuple, add)), tuple(map(tuple, mul)))
        except UagError as e:
            self.fail(str(e), start)
        self._register(nt, FieldBlock(nt.text, F))

    def algebra(self, start: Tok):
        nt = self.name()
        self.expect("{")
        self.expect("carrier")
        n = self.integer()
        if n < 1:
            self.fail("carrier must be at least 1")
        ops, tables, seen = [], {}, {}
        while self.peek().text == "op":
            self.next()
            ot = self.name()
            if ot.text in seen:
                self.fail(f"duplicate operation {ot.text!r}", ot)
            self.expect("/")
            ar = self.integer()
            if ar < 0:
                self.fail("arity must be non-negative")
            self.expect("table")
            tt = self.peek()
            tab = self.array()
            shape = _shape(tab)
            want = (1,) if ar == 0 else (n,) * ar
            if shape != want:
                got = "ragged" if shape is None else "x".join(map(str, shape)) or "scalar"
                self.fail(f"table of {ot.text}/{ar} has shape {got}, expected {'x'.join(map(str, want))}", tt)
            seen[ot.text] = tt
            ops.append((ot.text, ar))
            tables[ot.text] = np.asarray(tab, dtype=np.intp).reshape(()) if ar == 0 else np.asarray(tab, dtype=np.intp)
        product = scalars = None
        while self.peek().text in ("product", "scalars") and self.peek().kind == "name":
            ft = self.next()
            arg = self.name()
            if ft.text == "product":
                if product is not None:
                    self.fail("product designated twice", ft)
                product = arg.text
            else:
                if scalars is not None:
                    self.fail("scalars given twice", ft)
                fields = self.doc.fields
                if arg.text not in fields:
                    self.fail(f"unknown field {arg.text!r}", arg)
                scalars = arg.text
        self.expect("}")
        try:
            sig = Signature(tuple(ops), product, self.doc.fields[scalars] if scalars else None)
            missing = [s for s in sig.names if s not in tables]
            if missing:
                self.fail(f"missing table for {missing[0]}", start)
            H = FiniteAlgebra(sig, n, tables, nt.text)
        except DslError:
            raise
        except UagError as e:
            where = next((seen[o] for o in seen if f"of {o}:" in str(e) or f"{o!r}" in str(e)), start)
            self.fail(str(e), where)
        self._register(nt, AlgebraBlock(nt.text, H, scalars))

    def varlist(self) -> tuple[str, ...]:
        vs = [self.name().text]
        while self.peek().text == ",":
            self.next()
            vs.append(self.name().text)
        if len(set(vs)) != len(vs):
            self.fail("duplicate variable in varlist")
        return tuple(vs)

    def term(self, vs: tuple[str, ...]) -> Term:
        t = self.name()
        if self.peek().text == "(":
            if t.text in vs:
                self.fail(f"variable {t.text!r} applied to arguments", t)
            self.next()
            args = [self.term(vs)]
            while self.peek().text == ",":
                self.next()
                args.append(self.term(vs))
            self.expect(")")
            return App(t.text, tuple(args))
        return Var(t.text) if t.text in vs else App(t.text)

    def equation(self, vs) -> tuple[Term, Term]:
        a = self.term(vs)
        self.expect("=")
        return a, self.term(vs)

    def system(self, start: Tok):
        nt = self.name()
        self.expect("over")
        vs = self.varlist()
        self.expect("{")
        pairs = []
        while self.peek().text != "}":
            pairs.append(self.equation(vs))
        self.expect("}")
        self._register(nt, SystemBlock(nt.text, EquationSystem(vs, tuple(pairs))))

    def quasi(self, start: Tok):
        nt = self.name()
        self.expect("over")
        vs = self.varlist()
        self.expect("{")
        prem = []
        while self.peek().kind != "arrow":
            if self.peek().kind == "eof" or self.peek().text == "}":
                self.fail("expected '=>' in quasi block")
            prem.append(self.equation(vs))
        self.next()
        concl = self.equation(vs)
        self.expect("}")
        self._register(nt, QuasiBlock(nt.text, QuasiIdentity(vs, tuple(prem), concl)))


def parse(text: str) -> Document:
    return _Parser(text).parse()


# --- printing -------------------------------------------------------------------


def _array_text(a) -> str:
    if isinstance(a, list):
        return "[" + ",".join(_array_text(x) for x in a) + "]"
    return str(a)


def term_text(t: Term) -> str:
    return str(t)


def identifier(name: str, default: str = "H") -> str:
    """A printable block name: characters outside [A-Za-z0-9_] become '_'."""
    s = re.sub(r"[^A-Za-z0-9_]", "_", name or default)
    return s if re.match(r"[A-Za-z_]", s) else "_" + s


def print_algebra(H: FiniteAlgebra, name: str | None = None, field_name: str | None = None) -> str:
    lines = [f"algebra {identifier(name or H.name)} {{", f"  carrier {H.size}"]
    for op, ar in H.signature.ops:
        tab = [int(H.tables[op])] if ar == 0 else H.tables[op].tolist()
        lines.append(f"  op {op}/{ar} table {_array_text(tab)}")
    if H.signature.product:
        lines.append(f"  product {H.signature.product}")
    if H.signature.scalars is not None:
        lines.append(f"  scalars {identifier(field_name or H.signature.scalars.name)}")
    lines.append("}")
    return "\n".join(lines)


def print_field(F: Field, name: str | None = None) -> str:
    return "\n".join(
        [
            f"field {identifier(name or F.name, 'P')} {{",
            f"  p {F.p} k {F.k}",
            f"  addtable {_array_text([list(r) for r in F.add])}",
            f"  multable {_array_text([list(r) for r in F.mul])}",
            "}",
        ]
    )


def print_system(T: EquationSystem, name: str = "T") -> str:
    lines = [f"system {name} over {','.join(T.variables)} {{"]
    lines += [f"  {a} = {b}" for a, b in T.pairs]
    lines.append("}")
    return "\n".join(lines)


def print_quasi(q: QuasiIdentity, name: str = "q") -> str:
    lines = [f"quasi {name} over {','.join(q.variables)} {{"]
    lines += [f"  {a} = {b}" for a, b in q.premises]
    a, b = q.conclusion
    lines.append(f"  => {a} = {b}")
    lines.append("}")
    return "\n".join(lines)


def print_algebra_standalone(H: FiniteAlgebra, name: str | None = None) -> str:
    """An algebra with its field block (if any), parseable on its own."""
    parts = []
    if H.signature.scalars is not None:
        parts.append(print_field(H.signature.scalars))
    parts.append(print_algebra(H, name))
    return "\n\n".join(parts) + "\n"


def print_document(doc: Document) -> str:
    out = []
    for b in doc.blocks:
        if isinstance(b, AlgebraBlock):
            out.append(print_algebra(b.algebra, b.name, b.field_name))
        elif isinstance(b, SystemBlock):
            out.append(print_system(b.system, b.name))
        elif isinstance(b, QuasiBlock):
            out.append(print_quasi(b.quasi, b.name))
        else:
            out.append(print_field(b.field, b.name))
    return "\n\n".join(out) + ("\n" if out else "")


def load(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
