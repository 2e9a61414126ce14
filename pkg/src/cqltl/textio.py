"""Concrete syntax: the .cqm model DSL and the formula surface language.

Model files declare a signature, worlds (carriers + function tables + labels),
named relations between worlds, and lasso traces written [prefix](cycle).
Formulae use: true, false, =, !, |, &, exists/forall, O, A, U, F, W, T,
<> / [] (eventually / always) and <>* / []* (their universal variants).
Both parsers report the first failure as a ParseError carrying a source span.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .algebra import (
    Algebra,
    AlgebraError,
    FuncDecl,
    PredicateLabeling,
    RelMorphism,
    Signature,
    graph_signature,
    is_structure_preserving,
)
from .logic import (
    And,
    App,
    Context,
    Eq,
    Exists,
    FALSE_BASE,
    FALSE_PNF,
    Forall,
    Formula,
    Label,
    NegAtom,
    Next,
    NextAll,
    Not,
    Or,
    ScopeError,
    SortError,
    Term,
    Then,
    TRUE,
    TrueF,
    Until,
    UntilAll,
    Var,
    WUntil,
    term_sort,
)
from .model import CounterpartModel, LassoTrace, ModelError, TraceStep


@dataclass(frozen=True)
class SourceSpan:
    """1-based line/column location of a token inside an input text."""

    file: str
    line: int
    column: int
    length: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class ParseError(Exception):
    """First failure while reading a model file or formula string.

    kind is one of: lexical, syntactic, scoping, sort, reference.
    """

    def __init__(self, span: SourceSpan, kind: str, message: str):
        super().__init__(f"{span}: [{kind}] {message}")
        self.span = span
        self.kind = kind
        self.message = message


# ---------------------------------------------------------------------------
# Lexer (shared between the model DSL and the formula surface)
# ---------------------------------------------------------------------------

_MULTI = ("->", "<>*", "[]*", "<>", "[]", "=:")
_SINGLE = "{}()[];,:.|&!=*"
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

RESERVED = {"true", "false", "exists", "forall", "O", "A", "U", "F", "W", "T"}


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "eof", or the punctuation text itself
    text: str
    span: SourceSpan


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        span = SourceSpan(filename, line, col, 1)
        matched = False
        for punct in _MULTI:
            if text.startswith(punct, i):
                tokens.append(Token(punct, punct, SourceSpan(filename, line, col, len(punct))))
                i += len(punct)
                col += len(punct)
                matched = True
                break
        if matched:
            continue
        if ch in _SINGLE:
            tokens.append(Token(ch, ch, span))
            i += 1
            col += 1
            continue
        m = _NAME_RE.match(text, i)
        if m:
            word = m.group(0)
            tokens.append(Token("name", word, SourceSpan(filename, line, col, len(word))))
            i += len(word)
            col += len(word)
            continue
        raise ParseError(span, "lexical", f"unexpected character {ch!r}")
    tokens.append(Token("eof", "", SourceSpan(filename, line, col, 0)))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.i += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.peek().kind == kind:
            return self.next()
        return None

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            want = what or repr(kind)
            got = tok.text if tok.kind != "eof" else "end of input"
            raise ParseError(tok.span, "syntactic", f"expected {want}, found {got!r}")
        return self.next()

    def expect_name(self, what: str) -> Token:
        tok = self.peek()
        if tok.kind != "name":
            got = tok.text if tok.kind != "eof" else "end of input"
            raise ParseError(tok.span, "syntactic", f"expected {what}, found {got!r}")
        return self.next()


# ---------------------------------------------------------------------------
# Model DSL
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelFile:
    """A parsed .cqm document: the model plus its named traces."""

    name: str
    model: CounterpartModel
    traces: dict[str, LassoTrace] = field(default_factory=dict)


def parse_model_file(text: str, filename: str = "<model>") -> ModelFile:
    cur = _Cursor(tokenize(text, filename))
    sig, model_name = _parse_signature(cur)

    worlds: list[str] = []
    algebras: dict[str, Algebra] = {}
    labeling: dict[tuple[str, str], dict[str, frozenset[str]]] = {}
    while cur.peek().kind == "name" and cur.peek().text == "world":
        _parse_world(cur, sig, worlds, algebras, labeling)

    atomics: dict[tuple[str, str], dict[str, RelMorphism]] = {}
    rel_names: dict[str, tuple[str, str]] = {}
    while cur.peek().kind == "name" and cur.peek().text == "relation":
        _parse_relation(cur, sig, algebras, atomics, rel_names)

    try:
        model = CounterpartModel(
            signature=sig,
            worlds=tuple(worlds),
            assign=algebras,
            atomics=atomics,
            labeling=PredicateLabeling(labeling),
        )
    except (ModelError, AlgebraError) as exc:
        raise ParseError(cur.peek().span, "sort", str(exc)) from exc

    traces: dict[str, LassoTrace] = {}
    while cur.peek().kind == "name" and cur.peek().text == "trace":
        _parse_trace(cur, model, rel_names, traces)

    tok = cur.peek()
    if tok.kind != "eof":
        raise ParseError(tok.span, "syntactic", f"unexpected {tok.text!r} after the last declaration")
    return ModelFile(name=model_name, model=model, traces=traces)


def parse_model(text: str, filename: str = "<model>") -> CounterpartModel:
    return parse_model_file(text, filename).model


def _keyword(cur: _Cursor, word: str) -> Token:
    tok = cur.peek()
    if tok.kind != "name" or tok.text != word:
        got = tok.text if tok.kind != "eof" else "end of input"
        raise ParseError(tok.span, "syntactic", f"expected keyword {word!r}, found {got!r}")
    return cur.next()


def _parse_signature(cur: _Cursor) -> tuple[Signature, str]:
    _keyword(cur, "signature")
    name = cur.expect_name("a signature name")
    cur.expect("{")
    _keyword(cur, "sorts")
    sorts = [cur.expect_name("a sort name").text]
    while cur.accept(","):
        sorts.append(cur.expect_name("a sort name").text)
    cur.expect(";")
    functions: list[FuncDecl] = []
    while cur.peek().kind == "name" and cur.peek().text == "fn":
        cur.next()
        fname = cur.expect_name("a function name")
        cur.expect(":")
        args: list[str] = []
        if cur.peek().kind != "->":
            args.append(cur.expect_name("an argument sort").text)
            while cur.accept("*"):
                args.append(cur.expect_name("an argument sort").text)
        cur.expect("->")
        result = cur.expect_name("a result sort")
        cur.expect(";")
        functions.append(FuncDecl(fname.text, tuple(args), result.text))
    cur.expect("}")
    try:
        sig = Signature(tuple(sorts), tuple(functions))
    except AlgebraError as exc:
        raise ParseError(name.span, "sort", str(exc)) from exc
    return sig, name.text


def _parse_elems(cur: _Cursor) -> list[Token]:
    cur.expect("{")
    elems: list[Token] = []
    if cur.peek().kind == "name":
        elems.append(cur.next())
        while cur.accept(","):
            elems.append(cur.expect_name("an element name"))
    cur.expect("}")
    return elems


def _parse_world(
    cur: _Cursor,
    sig: Signature,
    worlds: list[str],
    algebras: dict[str, Algebra],
    labeling: dict[tuple[str, str], dict[str, frozenset[str]]],
) -> None:
    _keyword(cur, "world")
    wname = cur.expect_name("a world name")
    if wname.text in algebras:
        raise ParseError(wname.span, "reference", f"world {wname.text} is declared twice")
    cur.expect("{")
    carriers: dict[str, tuple[str, ...]] = {}
    interps: dict[str, dict[tuple[str, ...], str]] = {}
    labels_here: list[tuple[Token, str, list[Token]]] = []
    while cur.peek().kind == "name":
        tok = cur.peek()
        if tok.text == "fn":
            cur.next()
            fname = cur.expect_name("a function name")
            if not sig.has_function(fname.text):
                raise ParseError(fname.span, "reference", f"unknown function symbol {fname.text}")
            cur.expect("=")
            cur.expect("{")
            table: dict[tuple[str, ...], str] = {}
            while cur.peek().kind == "(":
                cur.next()
                args: list[str] = []
                if cur.peek().kind == "name":
                    args.append(cur.next().text)
                    while cur.accept(","):
                        args.append(cur.expect_name("an argument element").text)
                cur.expect(")")
                cur.expect("->")
                out = cur.expect_name("a result element")
                table[tuple(args)] = out.text
                if not cur.accept(","):
                    break
            cur.expect("}")
            cur.expect(";")
            interps[fname.text] = table
        elif tok.text == "label":
            cur.next()
            lname = cur.expect_name("a label name")
            cur.expect(":")
            lsort = cur.expect_name("a sort name")
            if lsort.text not in sig.sorts:
                raise ParseError(lsort.span, "reference", f"unknown sort {lsort.text}")
            cur.expect("=")
            elems = _parse_elems(cur)
            cur.expect(";")
            labels_here.append((lname, lsort.text, elems))
        elif tok.text in sig.sorts:
            sort_tok = cur.next()
            cur.expect("=")
            elems = _parse_elems(cur)
            cur.expect(";")
            if sort_tok.text in carriers:
                raise ParseError(sort_tok.span, "reference", f"carrier {sort_tok.text} declared twice")
            carriers[sort_tok.text] = tuple(e.text for e in elems)
        else:
            raise ParseError(tok.span, "reference", f"unknown sort or keyword {tok.text!r} in world {wname.text}")
    cur.expect("}")
    try:
        alg = Algebra(signature=sig, carriers=carriers, interps=interps)
    except AlgebraError as exc:
        raise ParseError(wname.span, "sort", f"world {wname.text}: {exc}") from exc
    worlds.append(wname.text)
    algebras[wname.text] = alg
    for lname, lsort, elems in labels_here:
        carrier = set(alg.carrier(lsort))
        for e in elems:
            if e.text not in carrier:
                raise ParseError(
                    e.span, "reference", f"label {lname.text}: element {e.text} is not in carrier {lsort}"
                )
        if elems:
            labeling.setdefault((lname.text, lsort), {})[wname.text] = frozenset(e.text for e in elems)


def _parse_relation(
    cur: _Cursor,
    sig: Signature,
    algebras: dict[str, Algebra],
    atomics: dict[tuple[str, str], dict[str, RelMorphism]],
    rel_names: dict[str, tuple[str, str]],
) -> None:
    _keyword(cur, "relation")
    rname = cur.expect_name("a relation name")
    if rname.text in rel_names:
        raise ParseError(rname.span, "reference", f"relation {rname.text} is declared twice")
    cur.expect(":")
    src = cur.expect_name("a source world")
    cur.expect("->")
    tgt = cur.expect_name("a target world")
    for w in (src, tgt):
        if w.text not in algebras:
            raise ParseError(w.span, "reference", f"unknown world {w.text}")
    cur.expect("{")
    rel: dict[str, set[tuple[str, str]]] = {tau: set() for tau in sig.sorts}
    while cur.peek().kind == "name":
        sort_tok = cur.next()
        if sort_tok.text not in sig.sorts:
            raise ParseError(sort_tok.span, "reference", f"unknown sort {sort_tok.text}")
        cur.expect("=")
        cur.expect("{")
        src_carrier = set(algebras[src.text].carrier(sort_tok.text))
        tgt_carrier = set(algebras[tgt.text].carrier(sort_tok.text))
        while cur.peek().kind == "name":
            a = cur.next()
            cur.expect("->")
            b = cur.expect_name("a target element")
            if a.text not in src_carrier:
                raise ParseError(a.span, "reference", f"{a.text} is not a {sort_tok.text}-element of {src.text}")
            if b.text not in tgt_carrier:
                raise ParseError(b.span, "reference", f"{b.text} is not a {sort_tok.text}-element of {tgt.text}")
            rel[sort_tok.text].add((a.text, b.text))
            if not cur.accept(","):
                break
        cur.expect("}")
        cur.expect(";")
    cur.expect("}")
    morphism = RelMorphism(
        source=algebras[src.text],
        target=algebras[tgt.text],
        rel={tau: frozenset(pairs) for tau, pairs in rel.items()},
    )
    if not is_structure_preserving(morphism):
        raise ParseError(rname.span, "sort", f"relation {rname.text} is not structure-preserving")
    atomics.setdefault((src.text, tgt.text), {})[rname.text] = morphism
    rel_names[rname.text] = (src.text, tgt.text)


def _parse_trace(
    cur: _Cursor,
    model: CounterpartModel,
    rel_names: dict[str, tuple[str, str]],
    traces: dict[str, LassoTrace],
) -> None:
    _keyword(cur, "trace")
    tname = cur.expect_name("a trace name")
    if tname.text in traces:
        raise ParseError(tname.span, "reference", f"trace {tname.text} is declared twice")
    cur.expect("=")

    def rel_steps(tokens: list[Token]) -> list[TraceStep]:
        steps = []
        for tok in tokens:
            if tok.text not in rel_names:
                raise ParseError(tok.span, "reference", f"unknown relation {tok.text}")
            steps.append(TraceStep(world=rel_names[tok.text][0], relation=tok.text))
        return steps

    prefix_tokens: list[Token] = []
    if cur.accept("[]") is None:
        cur.expect("[")
        if cur.peek().kind == "name":
            prefix_tokens.append(cur.next())
            while cur.accept(","):
                prefix_tokens.append(cur.expect_name("a relation name"))
        cur.expect("]")
    open_paren = cur.expect("(")
    cycle_tokens: list[Token] = []
    if cur.peek().kind == "name":
        cycle_tokens.append(cur.next())
        while cur.accept(","):
            cycle_tokens.append(cur.expect_name("a relation name"))
    cur.expect(")")
    cur.expect(";")
    if not cycle_tokens:
        raise ParseError(open_paren.span, "syntactic", "a trace cycle must name at least one relation")
    try:
        trace = LassoTrace(
            model=model,
            prefix=tuple(rel_steps(prefix_tokens)),
            cycle=tuple(rel_steps(cycle_tokens)),
        )
    except ModelError as exc:
        raise ParseError(tname.span, "reference", f"trace {tname.text}: {exc}") from exc
    traces[tname.text] = trace


# ---------------------------------------------------------------------------
# Model serialization
# ---------------------------------------------------------------------------

def serialize_model(
    model: CounterpartModel,
    name: str = "M",
    traces: dict[str, LassoTrace] | None = None,
) -> str:
    sig = model.signature
    out: list[str] = []
    out.append(f"signature {name} {{")
    out.append("  sorts " + ", ".join(sig.sorts) + ";")
    for f in sig.functions:
        args = " * ".join(f.arg_sorts)
        head = f"  fn {f.name} : {args} -> {f.result};" if args else f"  fn {f.name} : -> {f.result};"
        out.append(head)
    out.append("}")
    label_keys = sorted(model.labeling.labels)
    for w in model.worlds:
        alg = model.assign[w]
        out.append("")
        out.append(f"world {w} {{")
        for tau in sig.sorts:
            elems = alg.carrier(tau)
            body = " ".join(("{", ", ".join(elems), "}")) if elems else "{ }"
            out.append(f"  {tau} = {body};")
        for f in sig.functions:
            table = alg.interps[f.name]
            if not table:
                continue
            entries = []
            for args in _domain_order(alg, f):
                entries.append("(" + ", ".join(args) + ") -> " + table[args])
            out.append(f"  fn {f.name} = {{ " + ", ".join(entries) + " };")
        for (lname, lsort) in label_keys:
            elems = model.labeling.members(lname, lsort, w)
            if elems:
                order = {e: i for i, e in enumerate(alg.carrier(lsort))}
                listed = ", ".join(sorted(elems, key=order.__getitem__))
                out.append(f"  label {lname} : {lsort} = {{ {listed} }};")
        out.append("}")
    for rel_name in sorted(model.relation_names()):
        morphism, w1, w2 = model.relation(rel_name)
        out.append("")
        out.append(f"relation {rel_name} : {w1} -> {w2} {{")
        for tau in sig.sorts:
            pairs = morphism.pairs(tau)
            if not pairs:
                continue
            src_order = {e: i for i, e in enumerate(model.assign[w1].carrier(tau))}
            tgt_order = {e: i for i, e in enumerate(model.assign[w2].carrier(tau))}
            listed = sorted(pairs, key=lambda p: (src_order[p[0]], tgt_order[p[1]]))
            out.append(f"  {tau} = {{ " + ", ".join(f"{a} -> {b}" for a, b in listed) + " };")
        out.append("}")
    for tname in sorted(traces or {}):
        trace = traces[tname]
        out.append("")
        prefix = ", ".join(s.relation for s in trace.prefix)
        cycle = ", ".join(s.relation for s in trace.cycle)
        out.append(f"trace {tname} = [{prefix}]({cycle});")
    return "\n".join(out) + "\n"


def _domain_order(alg: Algebra, f: FuncDecl):
    return itertools.product(*(alg.carrier(t) for t in f.arg_sorts))


def serialize_model_file(mf: ModelFile) -> str:
    return serialize_model(mf.model, name=mf.name, traces=mf.traces)


# ---------------------------------------------------------------------------
# Formula surface: parsing
# ---------------------------------------------------------------------------

_PNF_ONLY_OPS = {"A", "F", "T", "<>*", "[]*"}


@dataclass(frozen=True)
class _STerm:
    name: str
    args: tuple["_STerm", ...] | None  # None: bare name; tuple: application
    span: SourceSpan


@dataclass(frozen=True)
class _SNode:
    op: str  # true/false/eq/call/not/or/and/quant/unary/bin
    span: SourceSpan
    kids: tuple = ()
    info: tuple = ()


def _parse_surface(cur: _Cursor) -> _SNode:
    node = _parse_temporal(cur)
    tok = cur.peek()
    if tok.kind != "eof":
        raise ParseError(tok.span, "syntactic", f"unexpected {tok.text!r} after the formula")
    return node


def _parse_temporal(cur: _Cursor) -> _SNode:
    left = _parse_disj(cur)
    tok = cur.peek()
    if tok.kind == "name" and tok.text in ("U", "F", "W", "T"):
        op = cur.next()
        right = _parse_disj(cur)
        again = cur.peek()
        if again.kind == "name" and again.text in ("U", "F", "W", "T"):
            raise ParseError(
                again.span,
                "syntactic",
                f"temporal operators are non-associative; parenthesize before {again.text}",
            )
        return _SNode("bin", op.span, (left, right), (op.text,))
    return left


def _parse_disj(cur: _Cursor) -> _SNode:
    node = _parse_conj(cur)
    while True:
        tok = cur.accept("|")
        if tok is None:
            return node
        rhs = _parse_conj(cur)
        node = _SNode("or", tok.span, (node, rhs))


def _parse_conj(cur: _Cursor) -> _SNode:
    node = _parse_unary(cur)
    while True:
        tok = cur.accept("&")
        if tok is None:
            return node
        rhs = _parse_unary(cur)
        node = _SNode("and", tok.span, (node, rhs))


def _parse_unary(cur: _Cursor) -> _SNode:
    tok = cur.peek()
    if tok.kind == "!":
        cur.next()
        return _SNode("not", tok.span, (_parse_unary(cur),))
    if tok.kind in ("<>", "[]", "<>*", "[]*"):
        cur.next()
        return _SNode("unary", tok.span, (_parse_unary(cur),), (tok.kind,))
    if tok.kind == "name" and tok.text in ("O", "A"):
        cur.next()
        return _SNode("unary", tok.span, (_parse_unary(cur),), (tok.text,))
    if tok.kind == "name" and tok.text in ("exists", "forall"):
        cur.next()
        first = cur.expect_name("a sort or variable name")
        second = cur.peek()
        if second.kind == "name":
            cur.next()
            sort_name: str | None = first.text
            var_tok = second
        else:
            sort_name = None
            var_tok = first
        if var_tok.text in RESERVED:
            raise ParseError(var_tok.span, "syntactic", f"{var_tok.text!r} is reserved and cannot bind")
        cur.expect(".")
        body = _parse_temporal(cur)  # binder scopes maximally to the right
        return _SNode("quant", tok.span, (body,), (tok.text, sort_name, var_tok.text, var_tok.span))
    return _parse_primary(cur)


def _parse_primary(cur: _Cursor) -> _SNode:
    tok = cur.peek()
    if tok.kind == "(":
        cur.next()
        inner = _parse_temporal(cur)
        cur.expect(")")
        return inner
    if tok.kind == "name" and tok.text == "true":
        cur.next()
        return _SNode("true", tok.span)
    if tok.kind == "name" and tok.text == "false":
        cur.next()
        return _SNode("false", tok.span)
    if tok.kind == "name":
        term = _parse_term(cur)
        nxt = cur.peek()
        if nxt.kind == "=" or nxt.kind == "=:":
            cur.next()
            sort_name = None
            if nxt.kind == "=:":
                sort_name = cur.expect_name("a sort name").text
            rhs = _parse_term(cur)
            return _SNode("eq", nxt.span, (), (term, rhs, sort_name))
        if term.args is None:
            raise ParseError(
                term.span, "syntactic", f"expected '=' after term {term.name!r}; a bare variable is not a formula"
            )
        return _SNode("call", term.span, (), (term,))
    got = tok.text if tok.kind != "eof" else "end of input"
    raise ParseError(tok.span, "syntactic", f"expected a formula, found {got!r}")


def _parse_term(cur: _Cursor) -> _STerm:
    tok = cur.expect_name("a term")
    if tok.text in RESERVED:
        raise ParseError(tok.span, "syntactic", f"{tok.text!r} is reserved and cannot be a term")
    if cur.peek().kind == "(":
        cur.next()
        args: list[_STerm] = []
        if cur.peek().kind != ")":
            args.append(_parse_term(cur))
            while cur.accept(","):
                args.append(_parse_term(cur))
        cur.expect(")")
        return _STerm(tok.text, tuple(args), tok.span)
    return _STerm(tok.text, None, tok.span)


def _surface_uses_pnf_ops(node: _SNode) -> bool:
    if node.op == "bin" and node.info[0] in ("F", "T"):
        return True
    if node.op == "unary" and node.info[0] in _PNF_ONLY_OPS:
        return True
    return any(_surface_uses_pnf_ops(k) for k in node.kids if isinstance(k, _SNode))


class _Elab:
    """Surface-to-AST elaboration under a context, signature, and dialect."""

    def __init__(self, sig: Signature, labels: set[str] | None, pnf: bool):
        self.sig = sig
        self.labels = labels
        self.pnf = pnf

    def formula(self, node: _SNode, ctx: Context) -> Formula:
        op = node.op
        if op == "true":
            return TRUE
        if op == "false":
            return FALSE_PNF if self.pnf else FALSE_BASE
        if op == "eq":
            s_left, s_right, sort_name = node.info
            left = self.term(s_left, ctx)
            right = self.term(s_right, ctx)
            lsort = self._sort_of(left, ctx, s_left.span)
            rsort = self._sort_of(right, ctx, s_right.span)
            if sort_name is not None:
                if sort_name not in self.sig.sorts:
                    raise ParseError(node.span, "reference", f"unknown sort {sort_name}")
                if lsort != sort_name or rsort != sort_name:
                    raise ParseError(
                        node.span, "sort", f"equality at {sort_name} applied to terms of sorts {lsort}, {rsort}"
                    )
                return Eq(sort_name, left, right)
            if lsort != rsort:
                raise ParseError(node.span, "sort", f"cannot equate a {lsort}-term with a {rsort}-term")
            return Eq(lsort, left, right)
        if op == "call":
            (sterm,) = node.info
            if self.sig.has_function(sterm.name):
                raise ParseError(
                    sterm.span, "sort", f"{sterm.name} is a function symbol, not a predicate"
                )
            if self.labels is not None and sterm.name not in self.labels:
                raise ParseError(sterm.span, "reference", f"unknown label {sterm.name}")
            if sterm.args is None or len(sterm.args) != 1:
                raise ParseError(sterm.span, "sort", f"label {sterm.name} takes exactly one term")
            arg = self.term(sterm.args[0], ctx)
            self._sort_of(arg, ctx, sterm.args[0].span)
            return Label(sterm.name, arg)
        if op == "not":
            body = self.formula(node.kids[0], ctx)
            if self.pnf:
                if not isinstance(body, (TrueF, Eq, Label)):
                    raise ParseError(
                        node.span,
                        "syntactic",
                        "in positive normal form '!' applies to atomic formulae only",
                    )
                return NegAtom(body)
            return Not(body)
        if op == "or":
            return Or(self.formula(node.kids[0], ctx), self.formula(node.kids[1], ctx))
        if op == "and":
            left = self.formula(node.kids[0], ctx)
            right = self.formula(node.kids[1], ctx)
            if self.pnf:
                return And(left, right)
            return Not(Or(Not(left), Not(right)))
        if op == "quant":
            kind, sort_name, var, var_span = node.info
            if sort_name is not None and sort_name not in self.sig.sorts:
                raise ParseError(node.span, "reference", f"unknown sort {sort_name}")
            if ctx.binds(var):
                raise ParseError(var_span, "scoping", f"variable {var} is already bound (no shadowing)")
            sort = sort_name or self._infer_binder_sort(node, ctx, var, var_span)
            body = self.formula(node.kids[0], ctx.extended(var, sort))
            if kind == "exists":
                return Exists(var, sort, body)
            if self.pnf:
                return Forall(var, sort, body)
            return Not(Exists(var, sort, Not(body)))
        if op == "unary":
            (sym,) = node.info
            body = self.formula(node.kids[0], ctx)
            if sym == "O":
                return Next(body)
            if sym == "A":
                self._pnf_only(node, "A")
                return NextAll(body)
            if sym == "<>":
                return Until(TRUE, body)
            if sym == "[]":
                return WUntil(body, FALSE_PNF if self.pnf else FALSE_BASE)
            if sym == "<>*":
                self._pnf_only(node, "<>*")
                return UntilAll(TRUE, body)
            if sym == "[]*":
                self._pnf_only(node, "[]*")
                return Then(body, FALSE_PNF)
        if op == "bin":
            (sym,) = node.info
            left = self.formula(node.kids[0], ctx)
            right = self.formula(node.kids[1], ctx)
            if sym == "U":
                return Until(left, right)
            if sym == "W":
                return WUntil(left, right)
            self._pnf_only(node, sym)
            return UntilAll(left, right) if sym == "F" else Then(left, right)
        raise ParseError(node.span, "syntactic", f"malformed formula node {op}")

    def _pnf_only(self, node: _SNode, sym: str) -> None:
        if not self.pnf:
            raise ParseError(
                node.span,
                "syntactic",
                f"operator {sym} belongs to the positive normal form dialect; "
                f"it is not part of the base grammar",
            )

    def _infer_binder_sort(self, node: _SNode, ctx: Context, var: str, var_span: SourceSpan) -> str:
        candidates = []
        first_error: ParseError | None = None
        for sort in self.sig.sorts:
            try:
                self.formula(node.kids[0], ctx.extended(var, sort))
                candidates.append(sort)
            except ParseError as exc:
                if first_error is None:
                    first_error = exc
        if len(candidates) == 1:
            return candidates[0]
        if not candidates:
            assert first_error is not None
            raise first_error
        raise ParseError(
            var_span,
            "sort",
            f"binder sort for {var} is ambiguous ({', '.join(candidates)}); "
            f"annotate it, e.g. 'exists {candidates[0]} {var} . …'",
        )

    def term(self, sterm: _STerm, ctx: Context) -> Term:
        if sterm.args is None:
            if not ctx.binds(sterm.name):
                raise ParseError(sterm.span, "scoping", f"unbound variable {sterm.name}")
            return Var(sterm.name)
        if not self.sig.has_function(sterm.name):
            raise ParseError(sterm.span, "reference", f"unknown function symbol {sterm.name}")
        args = tuple(self.term(a, ctx) for a in sterm.args)
        return App(sterm.name, args)

    def _sort_of(self, term: Term, ctx: Context, span: SourceSpan) -> str:
        try:
            return term_sort(term, ctx, self.sig)
        except ScopeError as exc:
            raise ParseError(span, "scoping", str(exc)) from exc
        except SortError as exc:
            raise ParseError(span, "sort", str(exc)) from exc


def parse_formula(
    text: str,
    ctx: Context = Context(),
    sig: Signature | None = None,
    labels: set[str] | None = None,
    filename: str = "<formula>",
) -> Formula:
    """Parse a base-dialect formula (sugar &, forall, false, <>, [] expands
    through negation; PNF-only operators are rejected)."""
    surface = _parse_surface(_Cursor(tokenize(text, filename)))
    return _Elab(sig or graph_signature(), labels, pnf=False).formula(surface, ctx)


def parse_formula_pnf(
    text: str,
    ctx: Context = Context(),
    sig: Signature | None = None,
    labels: set[str] | None = None,
    filename: str = "<formula>",
) -> Formula:
    """Parse a positive-normal-form formula ('!' on atoms only; A/F/T/<>*/[]* allowed)."""
    surface = _parse_surface(_Cursor(tokenize(text, filename)))
    return _Elab(sig or graph_signature(), labels, pnf=True).formula(surface, ctx)


def parse_formula_auto(
    text: str,
    ctx: Context = Context(),
    sig: Signature | None = None,
    labels: set[str] | None = None,
    filename: str = "<formula>",
) -> tuple[Formula, str]:
    """Parse in the base dialect unless PNF-only operators appear in the text;
    returns (formula, dialect) with dialect in {"base", "pnf"}."""
    surface = _parse_surface(_Cursor(tokenize(text, filename)))
    if _surface_uses_pnf_ops(surface):
        return _Elab(sig or graph_signature(), labels, pnf=True).formula(surface, ctx), "pnf"
    return _Elab(sig or graph_signature(), labels, pnf=False).formula(surface, ctx), "base"


# ---------------------------------------------------------------------------
# Formula serialization
# ---------------------------------------------------------------------------

def serialize_term(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    return f"{term.func}(" + ", ".join(serialize_term(a) for a in term.args) + ")"


def _is_atom(phi: Formula) -> bool:
    return isinstance(phi, (TrueF, Eq, Label))


def serialize_formula(phi: Formula) -> str:
    """Deterministic surface text; parenthesization is conservative: binary
    operands are wrapped unless atomic, unary bodies unless atomic-or-unary
    (equalities under a unary operator are wrapped for readability)."""
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, Eq):
        return f"{serialize_term(phi.left)} = {serialize_term(phi.right)}"
    if isinstance(phi, Label):
        return f"{phi.name}({serialize_term(phi.term)})"
    if isinstance(phi, Not):
        return "!" + _unary_body(phi.body)
    if isinstance(phi, NegAtom):
        return "!" + _unary_body(phi.atom)
    if isinstance(phi, Or):
        return f"{_bin_operand(phi.left)} | {_bin_operand(phi.right)}"
    if isinstance(phi, And):
        return f"{_bin_operand(phi.left)} & {_bin_operand(phi.right)}"
    if isinstance(phi, Exists):
        return f"(exists {phi.sort} {phi.var} . {serialize_formula(phi.body)})"
    if isinstance(phi, Forall):
        return f"(forall {phi.sort} {phi.var} . {serialize_formula(phi.body)})"
    if isinstance(phi, Next):
        return "O " + _unary_body(phi.body)
    if isinstance(phi, NextAll):
        return "A " + _unary_body(phi.body)
    if isinstance(phi, Until):
        return f"{_bin_operand(phi.left)} U {_bin_operand(phi.right)}"
    if isinstance(phi, UntilAll):
        return f"{_bin_operand(phi.left)} F {_bin_operand(phi.right)}"
    if isinstance(phi, WUntil):
        return f"{_bin_operand(phi.left)} W {_bin_operand(phi.right)}"
    if isinstance(phi, Then):
        return f"{_bin_operand(phi.left)} T {_bin_operand(phi.right)}"
    raise SortError(f"unknown formula node {phi!r}")


def _bin_operand(phi: Formula) -> str:
    text = serialize_formula(phi)
    if _is_atom(phi) and not isinstance(phi, Eq):
        return text
    return f"({text})"


def _unary_body(phi: Formula) -> str:
    text = serialize_formula(phi)
    if isinstance(phi, Eq):
        return f"({text})"
    if _is_atom(phi) or isinstance(phi, (Not, NegAtom, Next, NextAll)):
        return text
    return f"({text})"
