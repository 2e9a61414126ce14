"""Counterpart models and ultimately-periodic traces.

A model assigns an algebra to every world and a named family of atomic
counterpart relations to world pairs. Infinite traces are presented as
lassos: a finite prefix followed by a repeating nonempty cycle of steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

from .algebra import (
    Algebra,
    PredicateLabeling,
    RelMorphism,
    Signature,
    compose,
    identity_morphism,
    is_structure_preserving,
)


class ModelError(ValueError):
    """A counterpart-model or trace invariant is violated."""


@dataclass(frozen=True)
class CounterpartModel:
    """Worlds, their algebras, and named atomic counterpart relations.

    atomics maps (source world, target world) to {relation name: morphism}.
    Unlisted world pairs have no atomic relations. Relation names are unique
    model-wide. Every atomic relation is checked for structure preservation
    at construction; invalid relations are rejected, not silently accepted.
    """

    signature: Signature
    worlds: tuple[str, ...]
    assign: dict[str, Algebra]
    atomics: dict[tuple[str, str], dict[str, RelMorphism]] = field(default_factory=dict)
    labeling: PredicateLabeling = field(default_factory=PredicateLabeling)

    def __post_init__(self) -> None:
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError(f"duplicate world names: {self.worlds}")
        if set(self.assign) != set(self.worlds):
            raise ModelError("assign must cover exactly the declared worlds")
        for w, alg in self.assign.items():
            if alg.signature != self.signature:
                raise ModelError(f"world {w} uses a different signature")
        index: dict[str, tuple[str, str]] = {}
        for (w1, w2), rels in self.atomics.items():
            if w1 not in self.assign or w2 not in self.assign:
                raise ModelError(f"atomic relations declared between unknown worlds ({w1},{w2})")
            for name, r in rels.items():
                if name in index:
                    raise ModelError(f"relation name {name} is not unique model-wide")
                index[name] = (w1, w2)
                if r.source != self.assign[w1] or r.target != self.assign[w2]:
                    raise ModelError(f"relation {name} does not connect D({w1}) to D({w2})")
                if not is_structure_preserving(r):
                    raise ModelError(f"relation {name} is not structure-preserving")
        object.__setattr__(self, "_relation_index", index)
        for (label, sort), per_world in self.labeling.labels.items():
            for w, elems in per_world.items():
                if w not in self.assign:
                    raise ModelError(f"label {label} refers to unknown world {w}")
                carrier = set(self.assign[w].carrier(sort))
                stray = set(elems) - carrier
                if stray:
                    raise ModelError(
                        f"label {label}:{sort} in world {w} marks elements outside the carrier: {sorted(stray)}"
                    )

    def algebra(self, world: str) -> Algebra:
        try:
            return self.assign[world]
        except KeyError:
            raise ModelError(f"unknown world {world}") from None

    def relation(self, name: str) -> tuple[RelMorphism, str, str]:
        """Resolve a relation name to (morphism, source world, target world)."""
        index: dict[str, tuple[str, str]] = self._relation_index  # type: ignore[attr-defined]
        if name not in index:
            raise ModelError(f"unknown relation {name}")
        w1, w2 = index[name]
        return self.atomics[(w1, w2)][name], w1, w2

    def relation_names(self) -> tuple[str, ...]:
        return tuple(self._relation_index)  # type: ignore[attr-defined]


@dataclass(frozen=True)
class TraceStep:
    """One trace step: the world it leaves from and the atomic relation taken."""

    world: str
    relation: str


@dataclass(frozen=True)
class LassoTrace:
    """An infinite trace presented as prefix + repeating cycle of steps.

    Consecutive steps must chain: each step's relation goes from its world to
    the next step's world, and the last cycle step wraps to the first.
    """

    model: CounterpartModel
    prefix: tuple[TraceStep, ...]
    cycle: tuple[TraceStep, ...]

    def __post_init__(self) -> None:
        if not self.cycle:
            raise ModelError("lasso cycle must be nonempty")
        steps = list(self.prefix) + list(self.cycle)
        for i, step in enumerate(steps):
            rel, src, tgt = self.model.relation(step.relation)
            if src != step.world:
                raise ModelError(f"step {i}: relation {step.relation} does not start at {step.world}")
            nxt = steps[i + 1].world if i + 1 < len(steps) else self.cycle[0].world
            if tgt != nxt:
                raise ModelError(
                    f"step {i}: relation {step.relation} targets {tgt} but the next step is at {nxt}"
                )

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def normalize_pos(self, i: int) -> int:
        """Canonical position in [0, |prefix|+|cycle|): identity on the prefix,
        modular wrap-around inside the cycle."""
        if i < 0:
            raise ModelError(f"trace positions are nonnegative, got {i}")
        total = len(self)
        if i < total:
            return i
        np = len(self.prefix)
        return np + (i - np) % len(self.cycle)

    def step_at(self, i: int) -> TraceStep:
        p = self.normalize_pos(i)
        if p < len(self.prefix):
            return self.prefix[p]
        return self.cycle[p - len(self.prefix)]

    def world_at(self, i: int) -> str:
        return self.step_at(i).world

    def algebra_at(self, i: int) -> Algebra:
        return self.model.algebra(self.world_at(i))

    def relation_at(self, i: int) -> RelMorphism:
        return self.model.relation(self.step_at(i).relation)[0]

    def step(self, i: int) -> tuple[RelMorphism, int]:
        """The atomic relation leaving position i and the normalized successor position."""
        p = self.normalize_pos(i)
        return self.relation_at(p), self.normalize_pos(p + 1)

    def prefix_composite(self, start: int, n: int) -> RelMorphism:
        """Composite of the n consecutive atomic relations from position start;
        the identity on the start world when n = 0."""
        if n == 0:
            return identity_morphism(self.algebra_at(start))
        rels = []
        p = self.normalize_pos(start)
        for _ in range(n):
            r, p = self.step(p)
            rels.append(r)
        return reduce(compose, rels)

    def unrolled(self) -> LassoTrace:
        """The same infinite trace presented with one cycle copy moved into the prefix."""
        return LassoTrace(self.model, self.prefix + self.cycle, self.cycle)


def normalize_pos(trace: LassoTrace, i: int) -> int:
    return trace.normalize_pos(i)


def step(trace: LassoTrace, i: int) -> tuple[RelMorphism, int]:
    return trace.step(i)


def prefix_composite(trace: LassoTrace, start: int, n: int) -> RelMorphism:
    return trace.prefix_composite(start, n)
