from __future__ import annotations

import pytest

from cqltl.algebra import compose, identity_morphism, is_structure_preserving
from cqltl.model import CounterpartModel, LassoTrace, ModelError, TraceStep


def test_normalize_positions(sigma):
    # prefix 2, cycle 1
    assert sigma.normalize_pos(0) == 0
    assert sigma.normalize_pos(2) == 2
    assert sigma.normalize_pos(5) == 2
    assert sigma.normalize_pos(100) == 2


def test_normalize_pure_cycle(halt):
    t = halt.traces["sigma"]
    assert len(t.prefix) == 0 and len(t.cycle) == 1
    assert t.normalize_pos(7) == 0


def test_normalize_prefixless_three_cycle(running):
    # Build a 3-step cycle over the stationary world to exercise the modulus.
    m = running.model
    t = LassoTrace(
        m,
        prefix=(),
        cycle=(TraceStep("w2", "C3"), TraceStep("w2", "C3"), TraceStep("w2", "C3")),
    )
    assert t.normalize_pos(7) == 1


def test_step_sequence(sigma):
    rel0, nxt0 = sigma.step(0)
    assert rel0 is sigma.model.relation("C0")[0] and nxt0 == 1
    rel1, nxt1 = sigma.step(1)
    assert rel1 is sigma.model.relation("C1")[0] and nxt1 == 2
    rel2, nxt2 = sigma.step(2)
    assert rel2 is sigma.model.relation("C3")[0] and nxt2 == 2


def test_prefix_composite_identity(sigma):
    ident = sigma.prefix_composite(0, 0)
    assert ident == identity_morphism(sigma.model.assign["w0"])


def test_prefix_composite_single(sigma):
    assert sigma.prefix_composite(0, 1) == sigma.model.relation("C0")[0]


def test_prefix_composite_two_steps(sigma):
    both = sigma.prefix_composite(0, 2)
    assert both.rel["N"] == frozenset({("n0", "n5"), ("n1", "n5"), ("n2", "n5")})
    assert both.rel["E"] == frozenset({("e0", "e5")})


def test_prefix_composite_recurrence(sigma):
    for start in range(len(sigma)):
        for i in range(2 * len(sigma) + 1):
            stepwise = compose(sigma.prefix_composite(start, i),
                               sigma.relation_at(sigma.normalize_pos(start + i)))
            assert sigma.prefix_composite(start, i + 1) == stepwise


def test_unrolling_agrees_on_steps(sigma):
    unrolled = sigma.unrolled()
    horizon = len(sigma.prefix) + 3 * len(sigma.cycle)
    for i in range(horizon):
        assert sigma.world_at(i) == unrolled.world_at(i)
        assert sigma.relation_at(i) == unrolled.relation_at(i)


def test_bundled_model_valid(running):
    for name in running.model.relation_names():
        assert is_structure_preserving(running.model.relation(name)[0])


def test_trace_chain_validation(running):
    with pytest.raises(ModelError):
        LassoTrace(running.model, (TraceStep("w0", "C0"),), (TraceStep("w2", "C3"),))
    with pytest.raises(ModelError):
        # C1 does not start at w0
        LassoTrace(running.model, (TraceStep("w0", "C1"),), (TraceStep("w2", "C3"),))
    with pytest.raises(ModelError):
        LassoTrace(running.model, (), ())


def test_model_rejects_duplicate_relation_names(running):
    m = running.model
    c0 = m.relation("C0")[0]
    with pytest.raises(ModelError):
        CounterpartModel(
            signature=m.signature,
            worlds=m.worlds,
            assign=m.assign,
            atomics={("w0", "w1"): {"X": c0}, ("w0", "w0"): {"X": identity_morphism(m.assign["w0"])}},
        )


def test_model_rejects_unpreserving_relation(running):
    from cqltl.algebra import RelMorphism

    m = running.model
    broken = RelMorphism(m.assign["w0"], m.assign["w1"], {"E": frozenset({("e0", "e4")})})
    with pytest.raises(ModelError):
        CounterpartModel(
            signature=m.signature,
            worlds=m.worlds,
            assign=m.assign,
            atomics={("w0", "w1"): {"X": broken}},
        )
