from __future__ import annotations

from dataclasses import replace

import pytest

from cqltl.algebra import is_functional, is_structure_preserving
from cqltl.bundled import witness_fixture, witness_names
from cqltl.generate import (
    GenConfig,
    GenError,
    TARGETS,
    check_duplication_judgments,
    default_search_config,
    duplication_judgments,
    gen_model,
    gen_trace,
    run_difftest,
    search_counterexample,
    search_duplication_model,
    target_formulas,
)
from cqltl.logic import Assignment, Context
from cqltl.semantics import Evaluator
from cqltl.textio import parse_formula_pnf, serialize_formula, serialize_model

# Pinned search coordinates; regenerating with these must reproduce the
# committed fixtures exactly.
DUPLICATION_SEED = 0
DUPLICATION_BUDGET = 10000
DUPLICATION_CANDIDATE = 9715
WITNESS_SEED = 0
WITNESS_BUDGET = 10000


def test_genconfig_bounds_validated():
    with pytest.raises(GenError):
        GenConfig(max_worlds=0)
    with pytest.raises(GenError):
        GenConfig(labels=-1)
    GenConfig(labels=0)


def test_gen_model_deterministic():
    cfg = GenConfig(seed=42, max_worlds=3, max_elems=3, max_rels_per_pair=2, labels=2)
    a = gen_model(cfg)
    b = gen_model(cfg)
    assert a == b
    assert serialize_model(a) == serialize_model(b)


def test_gen_model_valid_across_seeds():
    for seed in range(100):
        model = gen_model(GenConfig(seed=seed, max_worlds=2, max_elems=2, max_rels_per_pair=1))
        for name in model.relation_names():
            assert is_structure_preserving(model.relation(name)[0])


def test_functional_only_generator_self_test():
    for seed in range(1000):
        cfg = GenConfig(seed=seed, max_worlds=2, max_elems=3, max_rels_per_pair=2,
                        functional_only=True)
        model = gen_model(cfg)
        for name in model.relation_names():
            assert is_functional(model.relation(name)[0]), (seed, name)


def test_gen_trace_chains(running):
    for seed in range(30):
        model = gen_model(GenConfig(seed=seed, max_worlds=3, max_elems=2, max_rels_per_pair=2))
        trace = gen_trace(model, seed)
        if trace is None:
            continue
        # LassoTrace construction re-validates chaining; touch a few positions
        for i in range(len(trace) + 2):
            trace.relation_at(i)


def test_target_formulas_unknown():
    with pytest.raises(GenError):
        target_formulas("o-expansion")


@pytest.mark.parametrize("target", TARGETS)
def test_search_finds_and_reverifies(target):
    witness = search_counterexample(target, default_search_config(WITNESS_SEED), budget=WITNESS_BUDGET)
    assert witness is not None, f"no witness for {target} within budget"
    assert witness.violated()
    assert witness.reverify()


@pytest.mark.parametrize("target", TARGETS)
def test_search_matches_committed_fixture(target):
    witness = search_counterexample(target, default_search_config(WITNESS_SEED), budget=WITNESS_BUDGET)
    mf, meta = witness_fixture(target)
    assert witness is not None
    assert mf.model == witness.model
    assert mf.traces["sigma"] == witness.trace
    assert meta["candidate_index"] == witness.candidate_index
    assert meta["position"] == witness.position
    assert meta["assignment"] == witness.assignment.as_dict()
    assert meta["lhs_value"] == witness.lhs_value
    assert meta["rhs_value"] == witness.rhs_value
    assert meta["lhs"] == serialize_formula(witness.lhs)
    assert meta["rhs"] == serialize_formula(witness.rhs)


def test_committed_witnesses_cover_all_targets():
    assert set(witness_names()) == set(TARGETS)


@pytest.mark.parametrize("target", TARGETS)
def test_committed_witness_replays(target):
    """Re-evaluate both sides of the committed fixture from its own metadata."""
    mf, meta = witness_fixture(target)
    trace = mf.traces[meta["trace"]]
    ctx = Context(tuple((v, "N") for v in meta["assignment"]))
    mu = Assignment(ctx, trace.world_at(meta["position"]), tuple(meta["assignment"].values()))
    labels = set(mf.model.labeling.label_names())
    lhs = parse_formula_pnf(meta["lhs"], ctx, labels=labels)
    rhs = parse_formula_pnf(meta["rhs"], ctx, labels=labels)
    ev = Evaluator(trace, max_context=4)
    assert ev.sat_pnf(meta["position"], mu, lhs) == meta["lhs_value"]
    assert ev.sat_pnf(meta["position"], mu, rhs) == meta["rhs_value"]
    if meta["kind"] == "duality":
        assert (not meta["lhs_value"]) != meta["rhs_value"]
    else:
        assert meta["lhs_value"] != meta["rhs_value"]


def test_functional_sweep_finds_nothing():
    cfg = replace(default_search_config(seed=0), functional_only=True)
    for target in TARGETS:
        assert search_counterexample(target, cfg, budget=1500) is None, target


def test_duplication_search_reproduces_fixture(duplication):
    hit = search_duplication_model(seed=DUPLICATION_SEED, budget=DUPLICATION_BUDGET)
    assert hit is not None
    model, trace, candidate = hit
    assert candidate == DUPLICATION_CANDIDATE
    assert model == duplication.model
    assert trace == duplication.traces["sigma"]


def test_duplication_fixture_judgments(duplication):
    trace = duplication.traces["sigma"]
    assert check_duplication_judgments(trace)
    assert len(duplication_judgments(trace)) == 7


def test_thread_fanout_matches_sequential(monkeypatch):
    """QLTL_THREADS > 1 fans candidates out but must return the same first
    witness, merged by lowest candidate index."""
    sequential = search_counterexample("f-expansion", default_search_config(0), budget=500)
    monkeypatch.setenv("QLTL_THREADS", "4")
    parallel = search_counterexample("f-expansion", default_search_config(0), budget=500)
    assert sequential is not None and parallel is not None
    assert parallel.candidate_index == sequential.candidate_index
    assert parallel.model == sequential.model
    assert serialize_model(parallel.model) == serialize_model(sequential.model)


def test_difftest_small_run_clean():
    summary = run_difftest(models=40, depth=3, seed=123)
    assert summary.ok
    assert summary.models == 40
    assert summary.law_counts["pnf-translation"] > 0


def test_difftest_functional_small_run_clean():
    summary = run_difftest(models=40, depth=3, seed=321, functional=True)
    assert summary.ok
    for law in ("t-u-duality", "f-w-duality", "u-expansion", "w-expansion",
                "f-expansion", "t-expansion"):
        assert summary.law_counts[law] > 0


def test_gen_formula_deterministic():
    cfg = GenConfig(seed=777, formula_depth=5, context_size=3, labels=2)
    ctx = Context((("x", "N"), ("y", "E")))
    from cqltl.generate import gen_formula

    assert gen_formula(cfg, ctx) == gen_formula(cfg, ctx)
