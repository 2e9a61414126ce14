"""The machinery is not graph-specific: a one-sorted signature with a binary
operation and a constant goes through parsing, validation, and evaluation."""

from __future__ import annotations

import pytest

from cqltl.algebra import (
    Algebra,
    FuncDecl,
    RelMorphism,
    Signature,
    is_structure_preserving,
)
from cqltl.logic import Assignment, Context, empty_assignment
from cqltl.semantics import Evaluator
from cqltl.textio import parse_formula, parse_model_file, serialize_model

MONOID_MODEL = """
signature FlipMonoid {
  sorts V;
  fn join : V * V -> V;
  fn unit : -> V;
}

world m0 {
  V = { z, o };
  fn join = { (z, z) -> z, (z, o) -> o, (o, z) -> o, (o, o) -> o };
  fn unit = { () -> z };
}

world m1 {
  V = { p, q };
  fn join = { (p, p) -> p, (p, q) -> q, (q, p) -> q, (q, q) -> q };
  fn unit = { () -> p };
}

// swap-free embedding: z -> p, o -> q preserves join and unit
relation Step : m0 -> m1 {
  V = { z -> p, o -> q };
}

relation Spin : m1 -> m1 {
  V = { p -> p, q -> q };
}

trace sigma = [Step](Spin);
"""


@pytest.fixture(scope="module")
def monoid():
    return parse_model_file(MONOID_MODEL, filename="monoid.cqm")


def test_parses_and_round_trips(monoid):
    text = serialize_model(monoid.model, name=monoid.name, traces=monoid.traces)
    again = parse_model_file(text)
    assert again.model == monoid.model
    assert again.traces == monoid.traces


def test_constant_and_binary_op_interpret(monoid):
    sig = monoid.model.signature
    ctx = Context((("x", "V"),))
    phi = parse_formula("join(x, unit()) = x", ctx, sig)
    trace = monoid.traces["sigma"]
    ev = Evaluator(trace)
    # join(z, unit) = join(z, z) = z but join(o, z) = o as well: both satisfy
    for elem in ("z", "o"):
        mu = Assignment(ctx, "m0", (elem,))
        assert ev.sat_qltl(0, mu, phi) is True


def test_quantified_temporal_formula_on_monoid(monoid):
    sig = monoid.model.signature
    trace = monoid.traces["sigma"]
    ev = Evaluator(trace)
    phi = parse_formula("exists V x . [] (join(x, x) = x)", Context(), sig)
    # z joins to z and its counterpart p joins to p forever
    assert ev.sat_qltl(0, empty_assignment("m0"), phi) is True


def test_constant_must_be_preserved():
    sig = Signature(("V",), (FuncDecl("unit", (), "V"),))
    a = Algebra(sig, {"V": ("z", "o")}, {"unit": {(): "z"}})
    b = Algebra(sig, {"V": ("p", "q")}, {"unit": {(): "p"}})
    good = RelMorphism(a, b, {"V": frozenset({("z", "p")})})
    assert is_structure_preserving(good)
    # relating the constant's carrier element to the wrong image breaks it
    bad = RelMorphism(a, b, {"V": frozenset({("z", "q")})})
    assert not is_structure_preserving(bad)
    # a relation that never mentions the constant is vacuously fine except
    # that the constant pair itself is forced once both sides are nonempty
    empty = RelMorphism(a, b, {"V": frozenset()})
    assert not is_structure_preserving(empty)


def test_binary_op_preservation_violation():
    sig = Signature(("V",), (FuncDecl("join", ("V", "V"), "V"),))
    a = Algebra(
        sig,
        {"V": ("z", "o")},
        {"join": {("z", "z"): "z", ("z", "o"): "o", ("o", "z"): "o", ("o", "o"): "o"}},
    )
    b = Algebra(
        sig,
        {"V": ("p", "q")},
        {"join": {("p", "p"): "p", ("p", "q"): "p", ("q", "p"): "p", ("q", "q"): "q"}},
    )
    # z->p, o->q: join(z,o)=o must map near join(p,q)=p, but (o,p) is missing
    rel = RelMorphism(a, b, {"V": frozenset({("z", "p"), ("o", "q")})})
    assert not is_structure_preserving(rel)
