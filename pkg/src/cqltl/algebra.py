"""Multi-sorted signatures, finite algebras, and relational morphisms.

A world of a counterpart model is a finite algebra over a shared signature
(directed graphs are the bundled preset: sorts N, E with source/target
functions). Transitions between worlds are per-sort relations that must
preserve the algebraic structure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class AlgebraError(ValueError):
    """An invariant of a signature, algebra, or morphism is violated."""


@dataclass(frozen=True)
class FuncDecl:
    """A function symbol: name, argument sorts, result sort."""

    name: str
    arg_sorts: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class Signature:
    """A finite multi-sorted vocabulary: sort names plus typed function symbols."""

    sorts: tuple[str, ...]
    functions: tuple[FuncDecl, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.sorts)) != len(self.sorts):
            raise AlgebraError(f"duplicate sort names in {self.sorts}")
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate function names in {names}")
        declared = set(self.sorts)
        for f in self.functions:
            for tau in (*f.arg_sorts, f.result):
                if tau not in declared:
                    raise AlgebraError(f"function {f.name} uses undeclared sort {tau}")

    def function(self, name: str) -> FuncDecl:
        for f in self.functions:
            if f.name == name:
                return f
        raise AlgebraError(f"unknown function symbol {name}")

    def has_function(self, name: str) -> bool:
        return any(f.name == name for f in self.functions)


def graph_signature() -> Signature:
    """The directed-graph signature: sorts N, E and functions s, t : E -> N."""
    return Signature(
        sorts=("N", "E"),
        functions=(FuncDecl("s", ("E",), "N"), FuncDecl("t", ("E",), "N")),
    )


@dataclass(frozen=True)
class Algebra:
    """A finite interpretation of a signature: one carrier set per sort and a
    total finite map for every function symbol.

    Element identifiers are opaque strings, unique within (algebra, sort);
    element equality is identifier equality.
    """

    signature: Signature
    carriers: dict[str, tuple[str, ...]]
    interps: dict[str, dict[tuple[str, ...], str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        carriers = {tau: tuple(self.carriers.get(tau, ())) for tau in self.signature.sorts}
        object.__setattr__(self, "carriers", carriers)
        for tau, elems in carriers.items():
            if len(set(elems)) != len(elems):
                raise AlgebraError(f"duplicate elements in carrier {tau}: {elems}")
        unknown = set(self.carriers) - set(self.signature.sorts)
        if unknown:
            raise AlgebraError(f"carriers for undeclared sorts: {sorted(unknown)}")
        interps = {f.name: dict(self.interps.get(f.name, {})) for f in self.signature.functions}
        object.__setattr__(self, "interps", interps)
        for f in self.signature.functions:
            table = interps[f.name]
            domain = list(itertools.product(*(carriers[t] for t in f.arg_sorts)))
            if set(table) != set(domain):
                raise AlgebraError(
                    f"interpretation of {f.name} is not total: "
                    f"has {len(table)} entries, domain has {len(domain)}"
                )
            for args, out in table.items():
                if out not in carriers[f.result]:
                    raise AlgebraError(f"{f.name}{args} = {out} is outside carrier {f.result}")

    def carrier(self, sort: str) -> tuple[str, ...]:
        if sort not in self.carriers:
            raise AlgebraError(f"unknown sort {sort}")
        return self.carriers[sort]

    def apply(self, func: str, args: tuple[str, ...]) -> str:
        try:
            return self.interps[func][args]
        except KeyError:
            raise AlgebraError(f"no interpretation entry for {func}{args}") from None

    def sort_of_element(self, elem: str) -> tuple[str, ...]:
        """All sorts whose carrier contains elem (identifiers are unique per sort only)."""
        return tuple(tau for tau in self.signature.sorts if elem in self.carriers[tau])


@dataclass(frozen=True)
class RelMorphism:
    """A per-sort relation between the carriers of two algebras.

    Pairs are oriented (source element, target element). Construction checks
    carrier membership only; structure preservation is a separate, eagerly
    enforced model-load invariant (see is_structure_preserving).
    """

    source: Algebra
    target: Algebra
    rel: dict[str, frozenset[tuple[str, str]]]

    def __post_init__(self) -> None:
        if self.source.signature != self.target.signature:
            raise AlgebraError("source and target algebras have different signatures")
        rel = {tau: frozenset(self.rel.get(tau, frozenset())) for tau in self.source.signature.sorts}
        object.__setattr__(self, "rel", rel)
        unknown = set(self.rel) - set(self.source.signature.sorts)
        if unknown:
            raise AlgebraError(f"relation on undeclared sorts: {sorted(unknown)}")
        images: dict[str, dict[str, tuple[str, ...]]] = {}
        for tau, pairs in rel.items():
            src_carrier = self.source.carriers[tau]
            tgt_carrier = set(self.target.carriers[tau])
            by_src: dict[str, list[str]] = {}
            for a, b in pairs:
                if a not in src_carrier:
                    raise AlgebraError(f"pair ({a},{b}) at sort {tau}: {a} not in source carrier")
                if b not in tgt_carrier:
                    raise AlgebraError(f"pair ({a},{b}) at sort {tau}: {b} not in target carrier")
                by_src.setdefault(a, []).append(b)
            order = {e: i for i, e in enumerate(self.target.carriers[tau])}
            images[tau] = {a: tuple(sorted(bs, key=order.__getitem__)) for a, bs in by_src.items()}
        object.__setattr__(self, "_images", images)

    def images(self, sort: str, elem: str) -> tuple[str, ...]:
        """Target elements related to elem, in target-carrier order."""
        return self._images[sort].get(elem, ())  # type: ignore[attr-defined]

    def pairs(self, sort: str) -> frozenset[tuple[str, str]]:
        return self.rel[sort]


def identity_morphism(a: Algebra) -> RelMorphism:
    """The identity relation on every carrier of a; structure-preserving by construction."""
    return RelMorphism(
        source=a,
        target=a,
        rel={tau: frozenset((x, x) for x in a.carriers[tau]) for tau in a.signature.sorts},
    )


def compose(r1: RelMorphism, r2: RelMorphism) -> RelMorphism:
    """Relational composition in diagrammatic order: (a,c) related iff some b
    links them through r1 then r2."""
    if r1.target != r2.source:
        raise AlgebraError("cannot compose: first morphism's target differs from second's source")
    rel = {}
    for tau in r1.source.signature.sorts:
        pairs = set()
        for a, b in r1.rel[tau]:
            for c in r2.images(tau, b):
                pairs.add((a, c))
        rel[tau] = frozenset(pairs)
    return RelMorphism(source=r1.source, target=r2.target, rel=rel)


def is_structure_preserving(r: RelMorphism) -> bool:
    """Exhaustively check that related argument tuples have related images:
    for every function f and all tuples a⃗, b⃗ with (aᵢ,bᵢ) related at the
    argument sorts, (f(a⃗), f(b⃗)) must be related at the result sort."""
    for f in r.source.signature.functions:
        pair_choices = [r.rel[tau] for tau in f.arg_sorts]
        result_rel = r.rel[f.result]
        for combo in itertools.product(*pair_choices):
            args_src = tuple(p[0] for p in combo)
            args_tgt = tuple(p[1] for p in combo)
            if (r.source.apply(f.name, args_src), r.target.apply(f.name, args_tgt)) not in result_rel:
                return False
    return True


def is_functional(r: RelMorphism) -> bool:
    """True iff every source element has at most one related target element."""
    for tau in r.source.signature.sorts:
        seen: set[str] = set()
        for a, _ in r.rel[tau]:
            if a in seen:
                return False
            seen.add(a)
    return True


@dataclass(frozen=True)
class PredicateLabeling:
    """Unary predicates over worlds: (label name, sort) -> world -> element set."""

    labels: dict[tuple[str, str], dict[str, frozenset[str]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        # Empty entries carry no information and are dropped so that
        # serialization round-trips compare structurally equal.
        normalized = {}
        for key, per_world in self.labels.items():
            kept = {w: frozenset(elems) for w, elems in per_world.items() if elems}
            if kept:
                normalized[key] = kept
        object.__setattr__(self, "labels", normalized)

    def members(self, label: str, sort: str, world: str) -> frozenset[str]:
        return self.labels.get((label, sort), {}).get(world, frozenset())

    def declares(self, label: str, sort: str) -> bool:
        return (label, sort) in self.labels

    def label_names(self) -> tuple[str, ...]:
        return tuple(sorted({name for name, _ in self.labels}))
