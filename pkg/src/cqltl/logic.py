"""Typed, well-scoped syntax for the temporal logic and its positive normal form.

The two dialects share constructor classes. The base dialect (full negation)
uses: TRUE, Eq, Label, Not, Or, Exists, Next, Until, WUntil. The positive
normal form replaces Not with atomic-only NegAtom and adds And, Forall,
NextAll (A), UntilAll (F), and Then (T). is_base_formula / is_pnf_formula
decide fragment membership; to_pnf translates the first into the second by
pushing negation down to atoms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import Algebra, RelMorphism, Signature


class ScopeError(ValueError):
    """Unbound variable, shadowed binder, or context mismatch."""


class SortError(ValueError):
    """A term or formula is not sort-correct."""


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    func: str
    args: tuple["Term", ...]


Term = Var | App


@dataclass(frozen=True)
class Context:
    """An ordered list of distinct (variable, sort) entries."""

    entries: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        names = [n for n, _ in self.entries]
        if len(set(names)) != len(names):
            raise ScopeError(f"duplicate variables in context: {names}")

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.entries)

    def sort_of(self, name: str) -> str:
        for n, tau in self.entries:
            if n == name:
                return tau
        raise ScopeError(f"unbound variable {name}")

    def binds(self, name: str) -> bool:
        return any(n == name for n, _ in self.entries)

    def extended(self, name: str, sort: str) -> Context:
        if self.binds(name):
            raise ScopeError(f"variable {name} is already bound (shadowing is rejected)")
        return Context(self.entries + ((name, sort),))


def term_sort(term: Term, ctx: Context, sig: Signature) -> str:
    """The sort of a term-in-context; raises ScopeError/SortError when ill-formed."""
    if isinstance(term, Var):
        return ctx.sort_of(term.name)
    decl = sig.function(term.func)
    if len(term.args) != len(decl.arg_sorts):
        raise SortError(f"{term.func} expects {len(decl.arg_sorts)} arguments, got {len(term.args)}")
    for arg, expected in zip(term.args, decl.arg_sorts):
        actual = term_sort(arg, ctx, sig)
        if actual != expected:
            raise SortError(f"argument of {term.func} has sort {actual}, expected {expected}")
    return decl.result


# ---------------------------------------------------------------------------
# Formulae (shared constructors for both dialects)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class Eq:
    sort: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Label:
    name: str
    term: Term


Atom = TrueF | Eq | Label


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class NegAtom:
    atom: Atom

    def __post_init__(self) -> None:
        if not isinstance(self.atom, (TrueF, Eq, Label)):
            raise SortError("NegAtom applies to atomic formulae only")


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True)
class Next:
    body: "Formula"


@dataclass(frozen=True)
class NextAll:
    body: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class UntilAll:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class WUntil:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Then:
    left: "Formula"
    right: "Formula"


Formula = (
    TrueF | Eq | Label | Not | NegAtom | Or | And | Exists | Forall
    | Next | NextAll | Until | UntilAll | WUntil | Then
)

TRUE = TrueF()

_BASE_ONLY = (Not,)
_PNF_ONLY = (NegAtom, And, Forall, NextAll, UntilAll, Then)


def _subformulas(phi: Formula):
    yield phi
    for attr in ("body", "left", "right"):
        child = getattr(phi, attr, None)
        if child is not None and not isinstance(child, (Var, App, str)):
            yield from _subformulas(child)


def is_base_formula(phi: Formula) -> bool:
    """Membership in the minimal-grammar dialect (full negation, no PNF operators)."""
    return not any(isinstance(f, _PNF_ONLY) for f in _subformulas(phi))


def is_pnf_formula(phi: Formula) -> bool:
    """Membership in positive normal form: no Not nodes (NegAtom enforces atomicity)."""
    return not any(isinstance(f, _BASE_ONLY) for f in _subformulas(phi))


# ---------------------------------------------------------------------------
# Derived operators
# ---------------------------------------------------------------------------

FALSE_BASE = Not(TRUE)
FALSE_PNF = NegAtom(TRUE)


def eventually(phi: Formula) -> Formula:
    return Until(TRUE, phi)


def always(phi: Formula, pnf: bool = False) -> Formula:
    return WUntil(phi, FALSE_PNF if pnf else FALSE_BASE)


def eventually_all(phi: Formula) -> Formula:
    return UntilAll(TRUE, phi)


def always_all(phi: Formula) -> Formula:
    return Then(phi, FALSE_PNF)


def and_base(left: Formula, right: Formula) -> Formula:
    """Conjunction in the minimal grammar, expanded through negation."""
    return Not(Or(Not(left), Not(right)))


def forall_base(var: str, sort: str, body: Formula) -> Formula:
    """Universal quantification in the minimal grammar, expanded through negation."""
    return Not(Exists(var, sort, Not(body)))


# ---------------------------------------------------------------------------
# Type checking
# ---------------------------------------------------------------------------

def typecheck(ctx: Context, phi: Formula, sig: Signature) -> None:
    """Confirm well-scopedness and sort-correctness under ctx; raises on failure.

    Label atoms are accepted at whatever sort their argument term has; a
    model's labeling decides which (name, sort) pairs are actually populated.
    """
    if isinstance(phi, TrueF):
        return
    if isinstance(phi, Eq):
        if phi.sort not in sig.sorts:
            raise SortError(f"equality at undeclared sort {phi.sort}")
        for side in (phi.left, phi.right):
            actual = term_sort(side, ctx, sig)
            if actual != phi.sort:
                raise SortError(f"equality at sort {phi.sort} applied to a term of sort {actual}")
        return
    if isinstance(phi, Label):
        term_sort(phi.term, ctx, sig)
        return
    if isinstance(phi, NegAtom):
        typecheck(ctx, phi.atom, sig)
        return
    if isinstance(phi, Not):
        typecheck(ctx, phi.body, sig)
        return
    if isinstance(phi, (Or, And, Until, UntilAll, WUntil, Then)):
        typecheck(ctx, phi.left, sig)
        typecheck(ctx, phi.right, sig)
        return
    if isinstance(phi, (Next, NextAll)):
        typecheck(ctx, phi.body, sig)
        return
    if isinstance(phi, (Exists, Forall)):
        if phi.sort not in sig.sorts:
            raise SortError(f"quantifier binds {phi.var} at undeclared sort {phi.sort}")
        typecheck(ctx.extended(phi.var, phi.sort), phi.body, sig)
        return
    raise SortError(f"unknown formula node {phi!r}")


def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, TrueF):
        return frozenset()
    if isinstance(phi, Eq):
        return _term_vars(phi.left) | _term_vars(phi.right)
    if isinstance(phi, Label):
        return _term_vars(phi.term)
    if isinstance(phi, NegAtom):
        return free_vars(phi.atom)
    if isinstance(phi, (Not, Next, NextAll)):
        return free_vars(phi.body)
    if isinstance(phi, (Or, And, Until, UntilAll, WUntil, Then)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Exists, Forall)):
        return free_vars(phi.body) - {phi.var}
    raise SortError(f"unknown formula node {phi!r}")


def _term_vars(term: Term) -> frozenset[str]:
    if isinstance(term, Var):
        return frozenset({term.name})
    out: frozenset[str] = frozenset()
    for arg in term.args:
        out |= _term_vars(arg)
    return out


# ---------------------------------------------------------------------------
# Positive normal form translation
# ---------------------------------------------------------------------------

def to_pnf(phi: Formula) -> Formula:
    """Translate a base-dialect formula to positive normal form.

    Structural recursion with a positive and a negative mode; the negative
    mode rewrites negated temporal operators into their universal duals and
    stops at atoms.
    """
    if not is_base_formula(phi):
        raise SortError("to_pnf expects a formula of the minimal grammar")
    return _pnf_pos(phi)


def _pnf_pos(phi: Formula) -> Formula:
    if isinstance(phi, (TrueF, Eq, Label)):
        return phi
    if isinstance(phi, Not):
        return _pnf_neg(phi.body)
    if isinstance(phi, Or):
        return Or(_pnf_pos(phi.left), _pnf_pos(phi.right))
    if isinstance(phi, Exists):
        return Exists(phi.var, phi.sort, _pnf_pos(phi.body))
    if isinstance(phi, Next):
        return Next(_pnf_pos(phi.body))
    if isinstance(phi, Until):
        return Until(_pnf_pos(phi.left), _pnf_pos(phi.right))
    if isinstance(phi, WUntil):
        return WUntil(_pnf_pos(phi.left), _pnf_pos(phi.right))
    raise SortError(f"not a minimal-grammar node: {phi!r}")


def _pnf_neg(phi: Formula) -> Formula:
    if isinstance(phi, (TrueF, Eq, Label)):
        return NegAtom(phi)
    if isinstance(phi, Not):
        return _pnf_pos(phi.body)
    if isinstance(phi, Or):
        return And(_pnf_neg(phi.left), _pnf_neg(phi.right))
    if isinstance(phi, Exists):
        return Forall(phi.var, phi.sort, _pnf_neg(phi.body))
    if isinstance(phi, Next):
        return NextAll(_pnf_neg(phi.body))
    if isinstance(phi, Until):
        return Then(_pnf_neg(phi.right), And(_pnf_neg(phi.left), _pnf_neg(phi.right)))
    if isinstance(phi, WUntil):
        return UntilAll(_pnf_neg(phi.right), And(_pnf_neg(phi.left), _pnf_neg(phi.right)))
    raise SortError(f"not a minimal-grammar node: {phi!r}")


# ---------------------------------------------------------------------------
# Assignments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Assignment:
    """A sort-respecting valuation of a context's variables into one world's
    carriers. values aligns with context.entries; the tuple representation
    keeps assignments hashable for memoization and cycle detection."""

    context: Context
    world: str
    values: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.values) != len(self.context):
            raise ScopeError(
                f"assignment has {len(self.values)} values for {len(self.context)} context variables"
            )

    def value(self, name: str) -> str:
        for (n, _), v in zip(self.context.entries, self.values):
            if n == name:
                return v
        raise ScopeError(f"unbound variable {name}")

    def as_dict(self) -> dict[str, str]:
        return {n: v for (n, _), v in zip(self.context.entries, self.values)}


def empty_assignment(world: str) -> Assignment:
    return Assignment(Context(), world)


def extend(mu: Assignment, var: str, sort: str, elem: str, algebra: Algebra) -> Assignment:
    """mu extended with var ↦ elem; var must be fresh and elem a carrier member."""
    ctx = mu.context.extended(var, sort)
    if elem not in algebra.carrier(sort):
        raise SortError(f"element {elem} is not in the {sort}-carrier of world {mu.world}")
    return Assignment(ctx, mu.world, mu.values + (elem,))


def interpret_term(mu: Assignment, algebra: Algebra, term: Term) -> str:
    """Evaluate a term under mu in the given world algebra."""
    if isinstance(term, Var):
        return mu.value(term.name)
    args = tuple(interpret_term(mu, algebra, a) for a in term.args)
    return algebra.apply(term.func, args)


def counterpart_assignments(
    mu: Assignment, rel: RelMorphism, target_world: str
) -> tuple[Assignment, ...]:
    """All assignments at rel's target world related pointwise to mu.

    Computed as the cartesian product of per-variable counterpart sets; the
    empty context yields exactly the one empty assignment at the target.
    """
    per_var = [rel.images(tau, v) for (_, tau), v in zip(mu.context.entries, mu.values)]
    out = []
    for combo in itertools.product(*per_var):
        out.append(Assignment(mu.context, target_world, tuple(combo)))
    return tuple(out)
