"""Independent decision procedures used as oracles against the evaluator.

These deliberately avoid the evaluator's incremental frozenset loop: the
counterpart set at step i is recomputed from scratch through the composite
relation of the first i steps, and the horizon comes from explicit state
periodicity. Subformula truth is delegated to a caller-supplied function.
"""

from __future__ import annotations

from cqltl.logic import Assignment, counterpart_assignments
from cqltl.model import LassoTrace


def counterpart_set_sequence(trace: LassoTrace, pos: int, mu: Assignment):
    """Yield (step index, normalized position, counterpart set) until the
    (position, set) state first repeats; the last yielded state equals an
    earlier one, so every later step replays the cycle in between."""
    seen: dict[tuple[int, frozenset], int] = {}
    i = 0
    while True:
        p = trace.normalize_pos(pos + i)
        composite = trace.prefix_composite(pos, i)
        s = frozenset(counterpart_assignments(mu, composite, trace.world_at(p)))
        yield i, p, s
        state = (p, s)
        if state in seen:
            return
        seen[state] = i
        i += 1


def oracle_until(flavor: str, trace: LassoTrace, pos: int, mu: Assignment, sat1, sat2) -> bool:
    """Reference decision for the until family.

    sat1(p, nu) / sat2(p, nu) report the truth of the operands at normalized
    position p under assignment nu. Success and continuation are evaluated on
    the full counterpart-set sequence up to the first repeated state; the
    repeat makes the tail periodic, so a strong operator that has not yet
    succeeded never will, and a weak one whose continuation held throughout
    holds forever.
    """
    existential = flavor in ("U", "W")
    weak = flavor in ("W", "T")
    gather = any if existential else all
    states = list(counterpart_set_sequence(trace, pos, mu))
    success = [gather(sat2(p, nu) for nu in s) for _, p, s in states]
    cont = [gather(sat1(p, nu) for nu in s) for _, p, s in states]
    for n in range(len(states)):
        if success[n] and all(cont[i] for i in range(n)):
            return True
    if weak and all(cont):
        return True
    return False


def direct_eventually(trace: LassoTrace, pos: int, mu: Assignment, sat) -> bool:
    """There are i >= 0 and a counterpart of mu through the first i steps
    satisfying the body."""
    for _, p, s in counterpart_set_sequence(trace, pos, mu):
        if any(sat(p, nu) for nu in s):
            return True
    return False


def direct_always(trace: LassoTrace, pos: int, mu: Assignment, sat) -> bool:
    """For every i >= 0 some counterpart of mu through the first i steps
    satisfies the body."""
    for _, p, s in counterpart_set_sequence(trace, pos, mu):
        if not any(sat(p, nu) for nu in s):
            return False
    return True
