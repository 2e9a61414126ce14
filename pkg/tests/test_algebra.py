from __future__ import annotations

import random

import pytest

from cqltl.algebra import (
    Algebra,
    AlgebraError,
    FuncDecl,
    RelMorphism,
    Signature,
    compose,
    graph_signature,
    identity_morphism,
    is_functional,
    is_structure_preserving,
)
from cqltl.generate import GenConfig, gen_model, gen_relation


def w2_algebra():
    return Algebra(
        graph_signature(),
        {"N": ("n5",), "E": ("e5",)},
        {"s": {("e5",): "n5"}, "t": {("e5",): "n5"}},
    )


def test_graph_signature_shape():
    sig = graph_signature()
    assert sig.sorts == ("N", "E")
    assert sig.functions == (FuncDecl("s", ("E",), "N"), FuncDecl("t", ("E",), "N"))


def test_duplicate_sort_rejected():
    with pytest.raises(AlgebraError):
        Signature(("N", "N"))


def test_duplicate_function_rejected():
    with pytest.raises(AlgebraError):
        Signature(("N",), (FuncDecl("c", (), "N"), FuncDecl("c", (), "N")))


def test_undeclared_sort_in_function_rejected():
    with pytest.raises(AlgebraError):
        Signature(("N",), (FuncDecl("s", ("E",), "N"),))


def test_algebra_totality_enforced():
    sig = graph_signature()
    with pytest.raises(AlgebraError):
        Algebra(sig, {"N": ("n0",), "E": ("e0",)}, {"s": {}, "t": {("e0",): "n0"}})


def test_algebra_output_in_carrier():
    sig = graph_signature()
    with pytest.raises(AlgebraError):
        Algebra(sig, {"N": ("n0",), "E": ("e0",)}, {"s": {("e0",): "nX"}, "t": {("e0",): "n0"}})


def test_identity_on_single_loop_world():
    ident = identity_morphism(w2_algebra())
    assert ident.rel["N"] == frozenset({("n5", "n5")})
    assert ident.rel["E"] == frozenset({("e5", "e5")})


def test_identity_on_empty_algebra():
    empty = Algebra(graph_signature(), {"N": (), "E": ()}, {"s": {}, "t": {}})
    ident = identity_morphism(empty)
    assert ident.rel["N"] == frozenset() and ident.rel["E"] == frozenset()


def test_identity_structure_preserving_on_random_algebras():
    for seed in range(50):
        model = gen_model(GenConfig(seed=seed, max_worlds=2, max_elems=4))
        for world in model.worlds:
            assert is_structure_preserving(identity_morphism(model.assign[world]))


def test_compose_running_example(running):
    c0 = running.model.relation("C0")[0]
    c1 = running.model.relation("C1")[0]
    both = compose(c0, c1)
    # Pairwise join by hand: C0 sends n0,n2 to n4 and n1 to n3; C1 sends both
    # n3 and n4 to n5. C0 sends e0 to e4 and e1 to e3; C1 keeps only e4.
    assert both.rel["N"] == frozenset({("n0", "n5"), ("n1", "n5"), ("n2", "n5")})
    assert both.rel["E"] == frozenset({("e0", "e5")})


def test_compose_identity_units(running):
    c0, w0, w1 = running.model.relation("C0")
    left = compose(identity_morphism(running.model.assign[w0]), c0)
    right = compose(c0, identity_morphism(running.model.assign[w1]))
    assert left == c0 == right


def test_compose_empty_absorbs(running):
    c0, w0, w1 = running.model.relation("C0")
    empty = RelMorphism(running.model.assign[w0], running.model.assign[w0], {})
    assert compose(empty, c0).rel["N"] == frozenset()
    assert compose(empty, c0).rel["E"] == frozenset()


def test_compose_source_target_mismatch(running):
    c0 = running.model.relation("C0")[0]
    with pytest.raises(AlgebraError):
        compose(c0, c0)


def test_structure_preservation_running_example(running):
    for name in running.model.relation_names():
        assert is_structure_preserving(running.model.relation(name)[0])


def test_structure_preservation_violation_detected(running):
    a0 = running.model.assign["w0"]
    a1 = running.model.assign["w1"]
    # e0 paired with e4 without any node pairs: the source images are unrelated.
    broken = RelMorphism(a0, a1, {"E": frozenset({("e0", "e4")})})
    assert not is_structure_preserving(broken)


def test_structure_preservation_empty_relation(running):
    a0 = running.model.assign["w0"]
    assert is_structure_preserving(RelMorphism(a0, a0, {}))


def test_is_functional(running):
    assert is_functional(running.model.relation("C0")[0])
    a0 = running.model.assign["w0"]
    a1 = running.model.assign["w1"]
    dup = RelMorphism(a0, a1, {"N": frozenset({("n0", "n3"), ("n0", "n4")})})
    assert not is_functional(dup)
    assert is_functional(RelMorphism(a0, a1, {}))


def test_relmorphism_rejects_stray_elements(running):
    a0 = running.model.assign["w0"]
    with pytest.raises(AlgebraError):
        RelMorphism(a0, a0, {"N": frozenset({("n0", "n5")})})


def _random_chain(seed: int, length: int):
    """Algebras A0..A_length and random relations A_i -> A_{i+1}."""
    rng = random.Random(seed)
    model = gen_model(GenConfig(seed=seed, max_worlds=1, max_elems=4))
    algebras = [model.assign[model.worlds[0]]]
    for i in range(length):
        extra = gen_model(GenConfig(seed=seed * 977 + i + 1, max_worlds=1, max_elems=4))
        algebras.append(extra.assign[extra.worlds[0]])
    rels = [gen_relation(rng, algebras[i], algebras[i + 1], False) for i in range(length)]
    return rels


def test_compose_associative():
    for seed in range(40):
        r1, r2, r3 = _random_chain(seed, 3)
        assert compose(compose(r1, r2), r3) == compose(r1, compose(r2, r3))


def test_structure_preservation_closed_under_composition():
    for seed in range(40):
        r1, r2 = _random_chain(seed, 2)
        assert is_structure_preserving(r1) and is_structure_preserving(r2)
        assert is_structure_preserving(compose(r1, r2))


def test_functional_closed_under_composition():
    for seed in range(40):
        rng = random.Random(seed)
        model_a = gen_model(GenConfig(seed=seed + 1000, max_worlds=1, max_elems=4))
        model_b = gen_model(GenConfig(seed=seed + 2000, max_worlds=1, max_elems=4))
        model_c = gen_model(GenConfig(seed=seed + 3000, max_worlds=1, max_elems=4))
        a = model_a.assign[model_a.worlds[0]]
        b = model_b.assign[model_b.worlds[0]]
        c = model_c.assign[model_c.worlds[0]]
        r1 = gen_relation(rng, a, b, True)
        r2 = gen_relation(rng, b, c, True)
        assert is_functional(r1) and is_functional(r2)
        assert is_functional(compose(r1, r2))


def test_compose_associative_exhaustive_tiny():
    """Every relation triple over fixed 2-node, edge-free carriers: 4096 cases."""
    import itertools

    sig = graph_signature()
    algs = [
        Algebra(sig, {"N": (f"{chr(97 + i)}0", f"{chr(97 + i)}1"), "E": ()}, {"s": {}, "t": {}})
        for i in range(4)
    ]

    def relations(src, tgt):
        pairs = list(itertools.product(src.carrier("N"), tgt.carrier("N")))
        for k in range(len(pairs) + 1):
            for chosen in itertools.combinations(pairs, k):
                yield RelMorphism(src, tgt, {"N": frozenset(chosen)})

    count = 0
    r2_list = list(relations(algs[1], algs[2]))
    r3_list = list(relations(algs[2], algs[3]))
    for r1 in relations(algs[0], algs[1]):
        for r2 in r2_list:
            left_12 = compose(r1, r2)
            for r3 in r3_list:
                assert compose(left_12, r3) == compose(r1, compose(r2, r3))
                count += 1
    assert count == 16 ** 3
