"""The whole judgment table again, but through the text pipeline: surface
strings are parsed, evaluated directly, and evaluated after PNF translation;
all three must agree with the expected booleans."""

from __future__ import annotations

import pytest

from cqltl.logic import Assignment, Context, to_pnf
from cqltl.semantics import Evaluator
from cqltl.textio import parse_formula

PRESENT_E = "(exists E y . x = y)"
PRESENT_N = "(exists N y . x = y)"
HAS_LOOP = "(exists E l . s(l) = z & s(l) = t(l))"

SURFACE_JUDGMENTS = [
    (f"{PRESENT_E} & O {PRESENT_E}", 0, (("x", "E", "e0"),), True),
    (f"{PRESENT_N} & O {PRESENT_N}", 0, (("x", "N", "n1"),), True),
    (f"{PRESENT_E} & O {PRESENT_E}", 0, (("x", "E", "e2"),), False),
    (f"{PRESENT_N} & !(O {PRESENT_N})", 1, (("x", "N", "n3"),), False),
    (f"{PRESENT_E} & !(O {PRESENT_E})", 1, (("x", "E", "e3"),), True),
    (f"{PRESENT_E} & !(O {PRESENT_E})", 1, (("x", "E", "e4"),), False),
    ("s(x) = t(x)", 0, (("x", "E", "e0"),), False),
    ("s(x) = t(x)", 1, (("x", "E", "e3"),), False),
    ("s(x) = t(x)", 2, (("x", "E", "e5"),), True),
    (HAS_LOOP.replace("z", "x"), 0, (("x", "N", "n0"),), False),
    (HAS_LOOP.replace("z", "x"), 1, (("x", "N", "n3"),), False),
    (HAS_LOOP.replace("z", "x"), 2, (("x", "N", "n5"),), True),
    ("exists N w . " + HAS_LOOP.replace("z", "w"), 0, (), False),
    ("exists N w . " + HAS_LOOP.replace("z", "w"), 1, (), False),
    ("exists N w . " + HAS_LOOP.replace("z", "w"), 2, (), True),
    ("exists E a . (s(a) = x & t(a) = y) | (t(a) = x & s(a) = y)", 0,
     (("x", "N", "n0"), ("y", "N", "n1")), True),
    ("exists E a . (s(a) = x & t(a) = y) | (t(a) = x & s(a) = y)", 1,
     (("x", "N", "n3"), ("y", "N", "n4")), True),
    ("O (exists E a . (s(a) = x & t(a) = y) | (t(a) = x & s(a) = y))", 1,
     (("x", "N", "n3"), ("y", "N", "n4")), True),
    ("t(x) = s(y)", 0, (("x", "E", "e0"), ("y", "E", "e1")), True),
    ("O (t(x) = s(y))", 0, (("x", "E", "e0"), ("y", "E", "e1")), True),
    ("O (t(x) = s(y))", 1, (("x", "E", "e3"), ("y", "E", "e4")), False),
    ("t(x) = s(y) & (exists E c . s(c) = s(x) & t(c) = t(y))", 0,
     (("x", "E", "e0"), ("y", "E", "e1")), False),
    ("O (t(x) = s(y) & (exists E c . s(c) = s(x) & t(c) = t(y)))", 0,
     (("x", "E", "e0"), ("y", "E", "e1")), False),
    ("O (t(x) = s(y) & (exists E c . s(c) = s(x) & t(c) = t(y)))", 2,
     (("x", "E", "e5"), ("y", "E", "e5")), True),
    ("exists N n . exists N m . !(n = m) & <> (n = m)", 0, (), True),
    ("forall E e . [] (exists E y . e = y)", 0, (), False),
    ("exists E e . !(s(e) = t(e)) & <> (s(e) = t(e))", 0, (), True),
    ("(exists E e . !(s(e) = t(e))) U (exists N w . forall N y . w = y)", 0, (), True),
    ("forall E e . <> (s(e) = t(e))", 0, (), False),
    ("exists E e . <> ([] (s(e) = t(e)))", 0, (), True),
    ("exists E a . exists E b . !(<> (t(a) = s(b)))", 0, (), True),
    ("(exists E e . s(e) = t(e)) W (!(exists E l . s(l) = t(l)))", 0, (), True),
]


@pytest.mark.parametrize("text,pos,binds,expected", SURFACE_JUDGMENTS)
def test_surface_judgment(sigma, text, pos, binds, expected):
    ctx = Context(tuple((v, s) for v, s, _ in binds))
    mu = Assignment(ctx, sigma.world_at(pos), tuple(e for _, _, e in binds))
    phi = parse_formula(text, ctx, sigma.model.signature)
    ev = Evaluator(sigma, max_context=6)
    assert ev.sat_qltl(pos, mu, phi) is expected, text
    assert ev.sat_pnf(pos, mu, to_pnf(phi)) is expected, f"pnf route: {text}"
