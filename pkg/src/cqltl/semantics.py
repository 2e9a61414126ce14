"""Satisfiability of temporal formulae on lasso traces.

One recursive evaluator covers both dialects (they share constructors and the
common clauses coincide); sat_qltl and sat_pnf validate the fragment at entry.
The until-family operators are decided by iterating the counterpart-set
unfolding and detecting cycles over (position, assignment-set) states: a
revisit means the tail repeats forever, so strong operators (U, F) fail and
weak ones (W, T) succeed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .logic import (
    And,
    Assignment,
    Eq,
    Exists,
    Forall,
    Formula,
    Label,
    NegAtom,
    Next,
    NextAll,
    Not,
    Or,
    Then,
    TrueF,
    Until,
    UntilAll,
    WUntil,
    counterpart_assignments,
    extend,
    interpret_term,
    is_base_formula,
    is_pnf_formula,
    term_sort,
    typecheck,
)
from .model import LassoTrace


class EvalError(ValueError):
    """The evaluation query violates an invariant."""


class ContextCapError(EvalError):
    """Quantifier nesting exceeded the configured context cap."""


DEFAULT_MAX_CONTEXT = 4

_STRONG = {"U": True, "W": False, "F": True, "T": False}
_EXISTENTIAL = {"U": True, "W": True, "F": False, "T": False}


@dataclass(frozen=True)
class EvalQuery:
    """A satisfiability query: trace, position, assignment, formula."""

    trace: LassoTrace
    position: int
    assignment: Assignment
    formula: Formula


class Evaluator:
    """Memoizing evaluator bound to one trace.

    The cache is keyed by (formula, normalized position, assignment) and is
    local to this instance, so distinct queries can run concurrently on
    separate evaluators over the shared immutable model.
    """

    def __init__(self, trace: LassoTrace, max_context: int = DEFAULT_MAX_CONTEXT, memo: bool = True):
        self.trace = trace
        self.max_context = max_context
        self._memo: dict | None = {} if memo else None

    # -- entry points -------------------------------------------------------

    def sat_qltl(self, pos: int, mu: Assignment, phi: Formula) -> bool:
        self._check_query(pos, mu, phi)
        if not is_base_formula(phi):
            raise EvalError("sat_qltl expects a minimal-grammar formula (no PNF-only operators)")
        return self.sat(pos, mu, phi)

    def sat_pnf(self, pos: int, mu: Assignment, phi: Formula) -> bool:
        self._check_query(pos, mu, phi)
        if not is_pnf_formula(phi):
            raise EvalError("sat_pnf expects a positive-normal-form formula (no bare negation)")
        return self.sat(pos, mu, phi)

    def _check_query(self, pos: int, mu: Assignment, phi: Formula) -> None:
        world = self.trace.world_at(pos)
        if mu.world != world:
            raise EvalError(f"assignment lives at {mu.world} but position {pos} is at {world}")
        typecheck(mu.context, phi, self.trace.model.signature)

    # -- recursive clauses --------------------------------------------------

    def sat(self, pos: int, mu: Assignment, phi: Formula) -> bool:
        pos = self.trace.normalize_pos(pos)
        if self._memo is None:
            return self._clause(pos, mu, phi)
        key = (phi, pos, mu)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._clause(pos, mu, phi)
            self._memo[key] = hit
        return hit

    def _clause(self, pos: int, mu: Assignment, phi: Formula) -> bool:
        trace = self.trace
        if isinstance(phi, TrueF):
            return True
        if isinstance(phi, Eq):
            alg = trace.algebra_at(pos)
            return interpret_term(mu, alg, phi.left) == interpret_term(mu, alg, phi.right)
        if isinstance(phi, Label):
            sort = term_sort(phi.term, mu.context, trace.model.signature)
            elem = interpret_term(mu, trace.algebra_at(pos), phi.term)
            return elem in trace.model.labeling.members(phi.name, sort, trace.world_at(pos))
        if isinstance(phi, Not):
            return not self.sat(pos, mu, phi.body)
        if isinstance(phi, NegAtom):
            return not self.sat(pos, mu, phi.atom)
        if isinstance(phi, Or):
            return self.sat(pos, mu, phi.left) or self.sat(pos, mu, phi.right)
        if isinstance(phi, And):
            return self.sat(pos, mu, phi.left) and self.sat(pos, mu, phi.right)
        if isinstance(phi, Exists):
            return any(
                self.sat(pos, nu, phi.body) for nu in self._extensions(pos, mu, phi.var, phi.sort)
            )
        if isinstance(phi, Forall):
            return all(
                self.sat(pos, nu, phi.body) for nu in self._extensions(pos, mu, phi.var, phi.sort)
            )
        if isinstance(phi, Next):
            return any(self.sat(nxt, nu, phi.body) for nxt, nu in self._successors(pos, mu))
        if isinstance(phi, NextAll):
            return all(self.sat(nxt, nu, phi.body) for nxt, nu in self._successors(pos, mu))
        if isinstance(phi, Until):
            return self._until("U", pos, mu, phi.left, phi.right)[0]
        if isinstance(phi, WUntil):
            return self._until("W", pos, mu, phi.left, phi.right)[0]
        if isinstance(phi, UntilAll):
            return self._until("F", pos, mu, phi.left, phi.right)[0]
        if isinstance(phi, Then):
            return self._until("T", pos, mu, phi.left, phi.right)[0]
        raise EvalError(f"unknown formula node {phi!r}")

    def _extensions(self, pos: int, mu: Assignment, var: str, sort: str):
        if len(mu.context) + 1 > self.max_context:
            raise ContextCapError(
                f"quantifier for {var} would exceed the context cap of {self.max_context} variables; "
                f"raise max_context to evaluate deeper-quantified formulae"
            )
        alg = self.trace.algebra_at(pos)
        for elem in alg.carrier(sort):
            yield extend(mu, var, sort, elem, alg)

    def _successors(self, pos: int, mu: Assignment):
        rel, nxt = self.trace.step(pos)
        world = self.trace.world_at(nxt)
        for nu in counterpart_assignments(mu, rel, world):
            yield nxt, nu

    # -- until family -------------------------------------------------------

    def _until(
        self, flavor: str, pos: int, mu: Assignment, phi1: Formula, phi2: Formula
    ) -> tuple[bool, int | None]:
        """Decide U/W/F/T from (pos, mu); returns (verdict, success step or None).

        Iterates the image of {mu} under the composite counterpart relations.
        The success and continue tests depend only on (position, counterpart
        set), so outcomes repeat exactly once a state is revisited.
        """
        trace = self.trace
        existential = _EXISTENTIAL[flavor]
        strong = _STRONG[flavor]
        gather = any if existential else all
        current: frozenset[Assignment] = frozenset((mu,))
        p = trace.normalize_pos(pos)
        steps = 0
        visited: set[tuple[int, frozenset[Assignment]]] = set()
        while True:
            if gather(self.sat(p, m, phi2) for m in current):
                return True, steps
            if not gather(self.sat(p, m, phi1) for m in current):
                return False, None
            state = (p, current)
            if state in visited:
                # The unfolding is periodic from here: no success step will
                # ever appear (strong fails), while the continue condition
                # holds at every step forever (weak succeeds).
                return not strong, None
            visited.add(state)
            rel, nxt = trace.step(p)
            world = trace.world_at(nxt)
            current = frozenset(
                nu for m in current for nu in counterpart_assignments(m, rel, world)
            )
            p = nxt
            steps += 1


def sat_qltl(query: EvalQuery, max_context: int = DEFAULT_MAX_CONTEXT) -> bool:
    """Satisfiability of a minimal-grammar formula (full negation allowed)."""
    ev = Evaluator(query.trace, max_context=max_context)
    return ev.sat_qltl(query.position, query.assignment, query.formula)


def sat_pnf(query: EvalQuery, max_context: int = DEFAULT_MAX_CONTEXT) -> bool:
    """Satisfiability of a positive-normal-form formula."""
    ev = Evaluator(query.trace, max_context=max_context)
    return ev.sat_pnf(query.position, query.assignment, query.formula)


def eval_until(
    flavor: str,
    trace: LassoTrace,
    pos: int,
    mu: Assignment,
    phi1: Formula,
    phi2: Formula,
    max_context: int = DEFAULT_MAX_CONTEXT,
) -> bool:
    """Direct entry to the four-way until loop; flavor is one of U, W, F, T."""
    if flavor not in _STRONG:
        raise EvalError(f"unknown until flavor {flavor!r}; expected one of U, W, F, T")
    ev = Evaluator(trace, max_context=max_context)
    return ev._until(flavor, pos, mu, phi1, phi2)[0]


def until_witness_step(
    flavor: str,
    trace: LassoTrace,
    pos: int,
    mu: Assignment,
    phi1: Formula,
    phi2: Formula,
    max_context: int = DEFAULT_MAX_CONTEXT,
) -> int | None:
    """The smallest step offset at which the until family succeeds, if it does.

    Weak operators satisfied only through their perpetual-continuation
    disjunct have no success step and report None even though they hold.
    """
    if flavor not in _STRONG:
        raise EvalError(f"unknown until flavor {flavor!r}; expected one of U, W, F, T")
    ev = Evaluator(trace, max_context=max_context)
    ok, step = ev._until(flavor, pos, mu, phi1, phi2)
    return step if ok else None
