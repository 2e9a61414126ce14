"""Reusable formula builders over the graph signature.

Each macro returns a formula in the minimal grammar by default (conjunction
and universal quantification expand through negation); pass pnf=True to get
the positive-normal-form variant with first-class And/Forall instead.
"""

from __future__ import annotations

from .logic import (
    And,
    App,
    Eq,
    Exists,
    Formula,
    Next,
    Not,
    Or,
    Term,
    Var,
    always,
    and_base,
    eventually,
)


def src(t: Term) -> App:
    return App("s", (t,))


def tgt(t: Term) -> App:
    return App("t", (t,))


def conj(left: Formula, right: Formula, pnf: bool = False) -> Formula:
    return And(left, right) if pnf else and_base(left, right)


def present(term: Term, sort: str, fresh: str = "_p") -> Formula:
    """The element denoted by term exists at the current world."""
    return Exists(fresh, sort, Eq(sort, term, Var(fresh)))


def next_preserved(term: Term, sort: str, pnf: bool = False) -> Formula:
    """Present now and still present after one step."""
    return conj(present(term, sort), Next(present(term, sort)), pnf)


def next_dealloc(term: Term, sort: str) -> Formula:
    """Present now but with no surviving counterpart at the next step."""
    return and_base(present(term, sort), Not(Next(present(term, sort))))


def loop_edge(e: Term) -> Formula:
    """The edge term denotes a self-loop."""
    return Eq("N", src(e), tgt(e))


def has_loop(n: Term, pnf: bool = False, fresh: str = "_l") -> Formula:
    """Some self-loop is attached at the node denoted by n."""
    e = Var(fresh)
    body = conj(Eq("N", src(e), n), loop_edge(e), pnf)
    return Exists(fresh, "E", body)


def composable(x: Term, y: Term) -> Formula:
    """Edge x ends where edge y starts."""
    return Eq("N", tgt(x), src(y))


def have_composition(x: Term, y: Term, fresh: str = "_c") -> Formula:
    """Composable, and some edge short-circuits x;y."""
    e = Var(fresh)
    witness = Exists(fresh, "E", and_base(Eq("N", src(e), src(x)), Eq("N", tgt(e), tgt(y))))
    return and_base(composable(x, y), witness)


def adjacent(x: Term, y: Term, fresh: str = "_a") -> Formula:
    """Some edge connects the nodes x and y, in either direction."""
    e = Var(fresh)
    fwd = and_base(Eq("N", src(e), x), Eq("N", tgt(e), y))
    bwd = and_base(Eq("N", tgt(e), x), Eq("N", src(e), y))
    return Exists(fresh, "E", Or(fwd, bwd))


def will_merge(x: Term, y: Term, sort: str) -> Formula:
    """Distinct now, eventually identified by the counterpart relations."""
    return and_base(Not(Eq(sort, x, y)), eventually(Eq(sort, x, y)))


def always_preserved(term: Term, sort: str) -> Formula:
    """A counterpart keeps existing at every future step."""
    return always(present(term, sort))


def will_become_loop(e: Term) -> Formula:
    """Not a self-loop now, but eventually some counterpart is."""
    return and_base(Not(loop_edge(e)), eventually(loop_edge(e)))
